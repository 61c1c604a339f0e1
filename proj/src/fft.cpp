#include "ganspec/fft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "ganspec/errors.hpp"

namespace ganspec {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Plain product; std::complex operator* adds NaN recovery we do not need.
inline Complex mul(const Complex& a, const Complex& b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n), pow2_(is_pow2(n)) {
  if (n == 0) throw SizeError("fft: length must be positive");
  if (pow2_) {
    twiddles_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddles_[k] = {std::cos(angle), std::sin(angle)};
    }
    bitrev_.resize(n);
    int bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      bitrev_[i] = r;
    }
    return;
  }

  const std::size_t m = next_pow2(2 * n - 1);
  chirp_.resize(n);
  const std::size_t period = 2 * n;
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 reduced mod 2n keeps the angle small and exact.
    const std::size_t k2 = (k * k) % period;
    const double angle = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp_[k] = {std::cos(angle), std::sin(angle)};
  }
  inner_.emplace_back(m);
  chirp_filter_.assign(m, Complex{});
  chirp_filter_[0] = std::conj(chirp_[0]);
  for (std::size_t k = 1; k < n; ++k) {
    chirp_filter_[k] = std::conj(chirp_[k]);
    chirp_filter_[m - k] = std::conj(chirp_[k]);
  }
  inner_.front().forward(chirp_filter_);
}

void FftPlan::radix2(std::span<Complex> a, bool inverse) const {
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < half; ++j) {
        const Complex w = inverse ? std::conj(twiddles_[j * step]) : twiddles_[j * step];
        const Complex u = a[i + j];
        const Complex v = mul(a[i + j + half], w);
        a[i + j] = u + v;
        a[i + j + half] = u - v;
      }
    }
  }
}

void FftPlan::bluestein(std::span<Complex> data) const {
  const FftPlan& inner = inner_.front();
  const std::size_t m = inner.size();
  std::vector<Complex> work(m, Complex{});
  for (std::size_t k = 0; k < n_; ++k) work[k] = mul(data[k], chirp_[k]);
  inner.forward(work);
  for (std::size_t k = 0; k < m; ++k) work[k] = mul(work[k], chirp_filter_[k]);
  inner.inverse(work);
  for (std::size_t k = 0; k < n_; ++k) data[k] = mul(work[k], chirp_[k]);
}

void FftPlan::forward(std::span<Complex> data) const {
  if (data.size() != n_) throw SizeError("fft: buffer length does not match plan");
  if (pow2_) {
    radix2(data, false);
  } else {
    bluestein(data);
  }
}

void FftPlan::inverse(std::span<Complex> data) const {
  if (data.size() != n_) throw SizeError("fft: buffer length does not match plan");
  const double scale = 1.0 / static_cast<double>(n_);
  if (pow2_) {
    radix2(data, true);
    for (Complex& v : data) v *= scale;
    return;
  }
  for (Complex& v : data) v = std::conj(v);
  bluestein(data);
  for (Complex& v : data) v = std::conj(v) * scale;
}

void fft2d_inplace(std::span<Complex> data, int height, int width, bool inverse) {
  if (height <= 0 || width <= 0 ||
      data.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw SizeError("fft2d: buffer does not match dimensions");
  }
  const FftPlan rows(static_cast<std::size_t>(width));
  const FftPlan cols(static_cast<std::size_t>(height));

#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    auto row = data.subspan(static_cast<std::size_t>(y) * width, width);
    if (inverse) {
      rows.inverse(row);
    } else {
      rows.forward(row);
    }
  }

#pragma omp parallel
  {
    std::vector<Complex> column(height);
#pragma omp for schedule(static)
    for (int x = 0; x < width; ++x) {
      for (int y = 0; y < height; ++y) column[y] = data[static_cast<std::size_t>(y) * width + x];
      if (inverse) {
        cols.inverse(column);
      } else {
        cols.forward(column);
      }
      for (int y = 0; y < height; ++y) data[static_cast<std::size_t>(y) * width + x] = column[y];
    }
  }
}

}  // namespace ganspec
