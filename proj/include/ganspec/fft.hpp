#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ganspec/tensor.hpp"

namespace ganspec {

/// Precomputed complex FFT of a fixed length. Powers of two use an iterative
/// radix-2 transform; other lengths go through Bluestein's chirp-z algorithm
/// on top of a power-of-two transform. Forward uses exp(-i 2 pi k n / N) and
/// is unnormalized; inverse carries the 1/N factor. Immutable after
/// construction and safe to share between threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }
  void forward(std::span<Complex> data) const;
  void inverse(std::span<Complex> data) const;

 private:
  void radix2(std::span<Complex> data, bool inverse) const;
  void bluestein(std::span<Complex> data) const;

  std::size_t n_;
  bool pow2_;
  std::vector<Complex> twiddles_;       // exp(-i 2 pi k / n), k < n/2
  std::vector<std::size_t> bitrev_;
  // Bluestein only.
  std::vector<Complex> chirp_;          // exp(-i pi k^2 / n)
  std::vector<Complex> chirp_filter_;   // FFT of the conjugate chirp, length m
  std::vector<FftPlan> inner_;          // plan of length m (0 or 1 element)
};

/// In-place 2D transform of an h x w row-major plane: rows in parallel, then
/// columns in parallel. Inverse includes 1/(h w).
void fft2d_inplace(std::span<Complex> data, int height, int width, bool inverse);

}  // namespace ganspec
