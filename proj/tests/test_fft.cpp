#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "stereotac/fft.hpp"
#include "stereotac/image.hpp"

using namespace stereotac;

namespace {

// O(N^2) reference DFT.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = -2.0 * M_PI * static_cast<double>(j * k % n) / static_cast<double>(n);
      acc += x[j] * std::complex<double>{std::cos(ang), std::sin(ang)};
    }
    out[k] = acc;
  }
  return out;
}

// O(N^2) reference DST-I.
std::vector<double> naive_dst1(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += x[j] * std::sin(M_PI * (j + 1.0) * (k + 1.0) / (n + 1.0));
    }
    out[k] = acc;
  }
  return out;
}

double max_abs_err(const std::vector<std::complex<double>>& a,
                   const std::vector<std::complex<double>>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("fft") {

TEST_CASE("radix-2 FFT matches the naive DFT") {
  Rng rng(7);
  for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{8},
                        std::size_t{64}, std::size_t{256}}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    std::vector<std::complex<double>> got = x;
    fft::Radix2Plan plan(n);
    plan.forward(got.data());
    CHECK(max_abs_err(got, naive_dft(x)) < 1e-9 * static_cast<double>(n + 1));
  }
}

TEST_CASE("radix-2 round trip") {
  Rng rng(8);
  const std::size_t n = 128;
  std::vector<std::complex<double>> x(n);
  for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  std::vector<std::complex<double>> y = x;
  fft::Radix2Plan plan(n);
  plan.forward(y.data());
  plan.backward(y.data());
  for (auto& v : y) v /= static_cast<double>(n);
  CHECK(max_abs_err(x, y) < 1e-12);
}

TEST_CASE("Bluestein DFT handles arbitrary lengths") {
  Rng rng(9);
  for (std::size_t n : {std::size_t{3}, std::size_t{5}, std::size_t{12},
                        std::size_t{97}, std::size_t{126}, std::size_t{958},
                        std::size_t{1278}}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    std::vector<std::complex<double>> got(n);
    fft::DftPlan plan(n);
    plan.forward(x.data(), got.data());
    if (n <= 256) {
      CHECK(max_abs_err(got, naive_dft(x)) < 1e-9 * static_cast<double>(n));
    } else {
      // Spot-check a few bins against direct evaluation.
      for (std::size_t k : {std::size_t{0}, std::size_t{1}, n / 2, n - 1}) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
          const double ang = -2.0 * M_PI * static_cast<double>((j * k) % n) /
                             static_cast<double>(n);
          acc += x[j] * std::complex<double>{std::cos(ang), std::sin(ang)};
        }
        CHECK(std::abs(got[k] - acc) < 1e-8);
      }
    }
  }
}

TEST_CASE("DST-I matches the naive transform") {
  Rng rng(10);
  for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{7},
                        std::size_t{62}, std::size_t{63}, std::size_t{100}}) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-1, 1);
    std::vector<double> got(n);
    fft::Dst1Plan plan(n);
    plan.execute(x.data(), got.data());
    const std::vector<double> want = naive_dst1(x);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("DST-I self-inverse scaling") {
  Rng rng(11);
  const std::size_t n = 41;
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-1, 1);
  std::vector<double> y(n), z(n);
  auto plan = fft::dst1_plan(n);
  plan->execute(x.data(), y.data());
  plan->execute(y.data(), z.data());
  const double scale = 2.0 / (static_cast<double>(n) + 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(z[i] * scale == doctest::Approx(x[i]).epsilon(1e-11));
  }
}

}  // TEST_SUITE
