#include "stereotac/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace stereotac::fft {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Radix2Plan::Radix2Plan(std::size_t n) : n_(n) {
  if (!is_pow2(n)) throw std::invalid_argument("Radix2Plan: size must be a power of two");
  twiddles_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[k] = {std::cos(ang), std::sin(ang)};
  }
  bitrev_.resize(n);
  std::uint32_t bits = 0;
  while ((1u << bits) < n) ++bits;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t r = 0;
    for (std::uint32_t b = 0; b < bits; ++b) {
      r |= ((i >> b) & 1u) << (bits - 1 - b);
    }
    bitrev_[i] = r;
  }
}

void Radix2Plan::transform(std::complex<double>* a, bool inverse) const {
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = bitrev_[i];
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> w = twiddles_[k * step];
        if (inverse) w = std::conj(w);
        const std::complex<double> u = a[base + k];
        const std::complex<double> v = a[base + k + half] * w;
        a[base + k] = u + v;
        a[base + k + half] = u - v;
      }
    }
  }
}

void Radix2Plan::forward(std::complex<double>* data) const { transform(data, false); }
void Radix2Plan::backward(std::complex<double>* data) const { transform(data, true); }

DftPlan::DftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("DftPlan: size must be positive");
  if (is_pow2(n)) {
    radix2_ = std::make_shared<Radix2Plan>(n);
    return;
  }
  const std::size_t m = next_pow2(2 * n - 1);
  conv_plan_ = std::make_shared<Radix2Plan>(m);
  chirp_.resize(n);
  // Reduce j^2 mod 2N in integers before the trig call; the raw square loses
  // precision for lengths in the thousands.
  const long long period = 2 * static_cast<long long>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const long long q = (static_cast<long long>(j) * static_cast<long long>(j)) % period;
    const double ang = -M_PI * static_cast<double>(q) / static_cast<double>(n);
    chirp_[j] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<std::complex<double>> b(m, {0.0, 0.0});
  b[0] = std::conj(chirp_[0]);
  for (std::size_t j = 1; j < n; ++j) {
    b[j] = std::conj(chirp_[j]);
    b[m - j] = std::conj(chirp_[j]);
  }
  conv_plan_->forward(b.data());
  chirp_fft_ = std::move(b);
}

void DftPlan::forward(const std::complex<double>* in, std::complex<double>* out) const {
  if (radix2_) {
    for (std::size_t i = 0; i < n_; ++i) out[i] = in[i];
    radix2_->forward(out);
    return;
  }
  const std::size_t m = conv_plan_->size();
  std::vector<std::complex<double>> a(m, {0.0, 0.0});
  for (std::size_t j = 0; j < n_; ++j) a[j] = in[j] * chirp_[j];
  conv_plan_->forward(a.data());
  for (std::size_t j = 0; j < m; ++j) a[j] *= chirp_fft_[j];
  conv_plan_->backward(a.data());
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n_; ++k) out[k] = a[k] * inv_m * chirp_[k];
}

Dst1Plan::Dst1Plan(std::size_t n) : n_(n), dft_(2 * (n + 1)) {
  if (n == 0) throw std::invalid_argument("Dst1Plan: length must be positive");
}

void Dst1Plan::execute(const double* in, double* out) const {
  // Odd extension of length 2(n+1); the DFT of that sequence carries the DST
  // in its imaginary part: X[k] = -Im(Y[k+1]) / 2.
  const std::size_t big = 2 * (n_ + 1);
  std::vector<std::complex<double>> y(big, {0.0, 0.0});
  for (std::size_t j = 1; j <= n_; ++j) {
    y[j] = {in[j - 1], 0.0};
    y[big - j] = {-in[j - 1], 0.0};
  }
  std::vector<std::complex<double>> spectrum(big);
  dft_.forward(y.data(), spectrum.data());
  for (std::size_t k = 0; k < n_; ++k) {
    out[k] = -0.5 * spectrum[k + 1].imag();
  }
}

std::shared_ptr<const Dst1Plan> dst1_plan(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const Dst1Plan>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const Dst1Plan>(n);
  cache.emplace(n, plan);
  return plan;
}

}  // namespace stereotac::fft
