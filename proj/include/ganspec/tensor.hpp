#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ganspec {

using Complex = std::complex<double>;

/// Dense H x W x C image or feature map. Samples are stored row-major with
/// channels interleaved: index ((y * W) + x) * C + c.
class RealTensor {
 public:
  RealTensor() = default;
  RealTensor(int height, int width, int channels, double fill = 0.0);
  RealTensor(int height, int width, int channels, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int y, int x, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double at(int y, int x, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }

  bool same_shape(const RealTensor& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }
  bool all_finite() const;

  /// Copies channel c into a single-channel tensor.
  RealTensor channel(int c) const;
  void set_channel(int c, const RealTensor& plane);

  friend bool operator==(const RealTensor&, const RealTensor&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Convolution kernel. The anchor (the tap aligned with the output sample)
/// sits at (floor((rows-1)/2), floor((cols-1)/2)).
class Kernel2D {
 public:
  Kernel2D() = default;
  Kernel2D(int rows, int cols, double fill = 0.0);
  Kernel2D(int rows, int cols, std::vector<double> taps);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int anchor_row() const { return (rows_ - 1) / 2; }
  int anchor_col() const { return (cols_ - 1) / 2; }

  double& at(int a, int b) { return taps_[static_cast<std::size_t>(a) * cols_ + b]; }
  double at(int a, int b) const { return taps_[static_cast<std::size_t>(a) * cols_ + b]; }

  std::span<double> taps() { return taps_; }
  std::span<const double> taps() const { return taps_; }
  double sum() const;

  friend bool operator==(const Kernel2D&, const Kernel2D&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> taps_;
};

/// H x W plane of complex samples, row-major.
class ComplexTensor {
 public:
  ComplexTensor() = default;
  ComplexTensor(int height, int width);
  ComplexTensor(int height, int width, std::vector<Complex> data);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  Complex& at(int y, int x) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  const Complex& at(int y, int x) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }
  std::vector<Complex>& storage() { return data_; }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<Complex> data_;
};

enum class Padding { kCircular, kZero };

}  // namespace ganspec
