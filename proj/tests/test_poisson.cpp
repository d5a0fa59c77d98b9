#include <doctest.h>

#include <Eigen/Sparse>
#include <chrono>
#include <cmath>
#include <vector>

#include "stereotac/image.hpp"
#include "stereotac/poisson.hpp"

using namespace stereotac;

namespace {

// Independent oracle: assemble the 5-point Laplacian with zero-Dirichlet ring
// boundary as a sparse system and solve it directly.
std::vector<double> dense_direct_solve(const std::vector<double>& rhs, int cols, int rows) {
  const int n = cols * rows;
  Eigen::SparseMatrix<double> lap(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  auto idx = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      trip.emplace_back(idx(r, c), idx(r, c), -4.0);
      if (r > 0) trip.emplace_back(idx(r, c), idx(r - 1, c), 1.0);
      if (r < rows - 1) trip.emplace_back(idx(r, c), idx(r + 1, c), 1.0);
      if (c > 0) trip.emplace_back(idx(r, c), idx(r, c - 1), 1.0);
      if (c < cols - 1) trip.emplace_back(idx(r, c), idx(r, c + 1), 1.0);
    }
  }
  lap.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lap);
  REQUIRE(solver.info() == Eigen::Success);
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
  Eigen::VectorXd x = solver.solve(b);
  return std::vector<double>(x.data(), x.data() + n);
}

double rel_error(const std::vector<double>& got, const std::vector<double>& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += (got[i] - want[i]) * (got[i] - want[i]);
    den += want[i] * want[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// Superposition of a few random interior bumps; zero near the ring.
std::vector<double> random_compact_field(Rng& rng, int cols, int rows) {
  std::vector<double> f(static_cast<std::size_t>(cols) * rows, 0.0);
  const int bumps = rng.uniform_int(1, 4);
  for (int b = 0; b < bumps; ++b) {
    const double cx = rng.uniform(cols * 0.25, cols * 0.75);
    const double cy = rng.uniform(rows * 0.25, rows * 0.75);
    const double sigma = rng.uniform(1.5, std::min(cols, rows) / 6.0);
    const double amp = rng.uniform(-2.0, 2.0);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double d2 = (c - cx) * (c - cx) + (r - cy) * (r - cy);
        f[static_cast<std::size_t>(r) * cols + c] += amp * std::exp(-d2 / (2 * sigma * sigma));
      }
    }
  }
  return f;
}

}  // namespace

TEST_SUITE("poisson") {

TEST_CASE("zero rhs yields the zero solution") {
  const std::vector<double> rhs(12 * 9, 0.0);
  const std::vector<double> z = poisson::solve_dirichlet(rhs, 12, 9);
  for (double v : z) CHECK(v == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("single-mode eigenfunction is solved exactly") {
  // rhs = lambda * sin mode; solution must be the sine mode itself.
  const int cols = 17, rows = 13, kc = 2, kr = 4;
  const double lc = -4.0 * std::pow(std::sin(M_PI * (kc + 1) / (2.0 * (cols + 1))), 2);
  const double lr = -4.0 * std::pow(std::sin(M_PI * (kr + 1) / (2.0 * (rows + 1))), 2);
  std::vector<double> mode(static_cast<std::size_t>(cols) * rows);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      mode[static_cast<std::size_t>(r) * cols + c] =
          std::sin(M_PI * (c + 1.0) * (kc + 1.0) / (cols + 1.0)) *
          std::sin(M_PI * (r + 1.0) * (kr + 1.0) / (rows + 1.0));
    }
  }
  std::vector<double> rhs = mode;
  for (double& v : rhs) v *= (lc + lr);
  const std::vector<double> z = poisson::solve_dirichlet(rhs, cols, rows);
  CHECK(rel_error(z, mode) < 1e-12);
}

TEST_CASE("matches the direct solve on random compact fields") {
  Rng rng(1234);
  for (int trial = 0; trial < 8; ++trial) {
    const int cols = rng.uniform_int(4, 64);
    const int rows = rng.uniform_int(4, 64);
    const std::vector<double> rhs = random_compact_field(rng, cols, rows);
    const std::vector<double> fast = poisson::solve_dirichlet(rhs, cols, rows);
    const std::vector<double> direct = dense_direct_solve(rhs, cols, rows);
    CHECK(rel_error(fast, direct) < 1e-6);
  }
}

TEST_CASE("linearity to machine precision") {
  Rng rng(99);
  const int cols = 31, rows = 22;
  const std::vector<double> f1 = random_compact_field(rng, cols, rows);
  const std::vector<double> f2 = random_compact_field(rng, cols, rows);
  const double a = 2.5, b = -0.75;
  std::vector<double> combo(f1.size());
  for (std::size_t i = 0; i < f1.size(); ++i) combo[i] = a * f1[i] + b * f2[i];

  const std::vector<double> z1 = poisson::solve_dirichlet(f1, cols, rows);
  const std::vector<double> z2 = poisson::solve_dirichlet(f2, cols, rows);
  const std::vector<double> zc = poisson::solve_dirichlet(combo, cols, rows);
  double scale = 0.0;
  for (std::size_t i = 0; i < zc.size(); ++i) scale = std::max(scale, std::abs(zc[i]));
  for (std::size_t i = 0; i < zc.size(); ++i) {
    CHECK(std::abs(zc[i] - (a * z1[i] + b * z2[i])) < 1e-12 * (scale + 1.0));
  }
}

TEST_CASE("full-resolution solve stays fast") {
  // Representative of one 640x480 reconstruction (interior 638x478).
  const int cols = 638, rows = 478;
  std::vector<double> rhs(static_cast<std::size_t>(cols) * rows, 0.0);
  Rng rng(5);
  for (auto& v : rhs) v = rng.uniform(-1, 1);
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> z = poisson::solve_dirichlet(rhs, cols, rows);
  const auto t1 = std::chrono::steady_clock::now();
  const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  MESSAGE("638x478 solve took ", ms, " ms");
  CHECK(ms < 5000.0);
  CHECK(std::isfinite(z[z.size() / 2]));
}

}  // TEST_SUITE
