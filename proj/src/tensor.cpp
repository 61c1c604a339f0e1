#include "ganspec/tensor.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ganspec/errors.hpp"

namespace ganspec {

namespace {

void check_dims(int h, int w, int c) {
  if (h <= 0 || w <= 0 || c <= 0) {
    throw ShapeError("tensor dimensions must be positive, got " + std::to_string(h) + "x" +
                     std::to_string(w) + "x" + std::to_string(c));
  }
}

}  // namespace

RealTensor::RealTensor(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width, channels);
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

RealTensor::RealTensor(int height, int width, int channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  check_dims(height, width, channels);
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw ShapeError("tensor data length does not match its shape");
  }
}

bool RealTensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

RealTensor RealTensor::channel(int c) const {
  if (c < 0 || c >= channels_) throw ShapeError("channel index out of range");
  RealTensor out(height_, width_, 1);
  for (std::size_t i = 0, n = out.size(); i < n; ++i) {
    out.data_[i] = data_[i * channels_ + c];
  }
  return out;
}

void RealTensor::set_channel(int c, const RealTensor& plane) {
  if (c < 0 || c >= channels_) throw ShapeError("channel index out of range");
  if (plane.height_ != height_ || plane.width_ != width_ || plane.channels_ != 1) {
    throw ShapeError("plane shape does not match tensor");
  }
  for (std::size_t i = 0, n = plane.size(); i < n; ++i) {
    data_[i * channels_ + c] = plane.data_[i];
  }
}

Kernel2D::Kernel2D(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) throw ShapeError("kernel dimensions must be positive");
  taps_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

Kernel2D::Kernel2D(int rows, int cols, std::vector<double> taps)
    : rows_(rows), cols_(cols), taps_(std::move(taps)) {
  if (rows <= 0 || cols <= 0) throw ShapeError("kernel dimensions must be positive");
  if (taps_.size() != static_cast<std::size_t>(rows) * cols) {
    throw ShapeError("kernel tap count does not match its shape");
  }
  for (double t : taps_) {
    if (!std::isfinite(t)) throw ShapeError("kernel taps must be finite");
  }
}

double Kernel2D::sum() const { return std::accumulate(taps_.begin(), taps_.end(), 0.0); }

ComplexTensor::ComplexTensor(int height, int width) : height_(height), width_(width) {
  if (height <= 0 || width <= 0) throw ShapeError("complex tensor dimensions must be positive");
  data_.assign(static_cast<std::size_t>(height) * width, Complex{});
}

ComplexTensor::ComplexTensor(int height, int width, std::vector<Complex> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (height <= 0 || width <= 0) throw ShapeError("complex tensor dimensions must be positive");
  if (data_.size() != static_cast<std::size_t>(height) * width) {
    throw ShapeError("complex tensor data length does not match its shape");
  }
}

}  // namespace ganspec
