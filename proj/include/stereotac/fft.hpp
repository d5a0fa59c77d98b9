// Fast orthogonal transforms used by the Poisson integrator: an iterative
// radix-2 complex FFT, a Bluestein (chirp-z) DFT for arbitrary lengths, and a
// type-I discrete sine transform built on top of them. All paths are O(N log N)
// in double precision.
#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace stereotac::fft {

/// Precomputed twiddle factors and bit-reversal permutation for a
/// power-of-two complex FFT.
class Radix2Plan {
 public:
  explicit Radix2Plan(std::size_t n);  // n must be a power of two >= 1

  std::size_t size() const { return n_; }
  void forward(std::complex<double>* data) const;
  /// Unscaled inverse (conjugate transform); divide by n for the true inverse.
  void backward(std::complex<double>* data) const;

 private:
  void transform(std::complex<double>* data, bool inverse) const;

  std::size_t n_;
  std::vector<std::complex<double>> twiddles_;  // exp(-2*pi*i*k/n), k < n/2
  std::vector<std::uint32_t> bitrev_;
};

/// DFT of arbitrary length N. Power-of-two lengths run the radix-2 path
/// directly; everything else goes through Bluestein's chirp-z convolution.
class DftPlan {
 public:
  explicit DftPlan(std::size_t n);

  std::size_t size() const { return n_; }
  /// out[k] = sum_j in[j] * exp(-2*pi*i*j*k/N). out may not alias in.
  void forward(const std::complex<double>* in, std::complex<double>* out) const;

 private:
  std::size_t n_;
  std::shared_ptr<const Radix2Plan> radix2_;       // direct path when n is pow2
  std::shared_ptr<const Radix2Plan> conv_plan_;    // Bluestein convolution FFT
  std::vector<std::complex<double>> chirp_;        // exp(-i*pi*j^2/N)
  std::vector<std::complex<double>> chirp_fft_;    // FFT of the wrapped conjugate chirp
};

/// Type-I DST of length n:
///   X[k] = sum_{j=0}^{n-1} x[j] * sin(pi*(j+1)*(k+1)/(n+1)),  k = 0..n-1.
/// Self-inverse up to the factor (n+1)/2.
class Dst1Plan {
 public:
  explicit Dst1Plan(std::size_t n);

  std::size_t length() const { return n_; }
  /// Unnormalized transform; in and out may alias.
  void execute(const double* in, double* out) const;

 private:
  std::size_t n_;
  DftPlan dft_;  // size 2*(n+1)
};

/// Process-wide plan cache; transforms of a given length are planned once.
std::shared_ptr<const Dst1Plan> dst1_plan(std::size_t n);

std::size_t next_pow2(std::size_t n);

}  // namespace stereotac::fft
