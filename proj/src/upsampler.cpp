#include "ganspec/upsampler.hpp"

#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "ganspec/errors.hpp"
#include "ganspec/numeric.hpp"
#include "ganspec/spectral.hpp"

namespace ganspec {

std::string_view upsampler_kind_name(UpsamplerKind kind) {
  switch (kind) {
    case UpsamplerKind::kTransposed: return "transposed";
    case UpsamplerKind::kNearest: return "nearest";
    case UpsamplerKind::kLearned: return "learned";
  }
  return "transposed";
}

UpsamplerKind parse_upsampler_kind(std::string_view name) {
  if (name == "transposed") return UpsamplerKind::kTransposed;
  if (name == "nearest") return UpsamplerKind::kNearest;
  if (name == "learned") return UpsamplerKind::kLearned;
  throw std::invalid_argument("unknown up-sampler kind '" + std::string(name) + "'");
}

void UpsamplerSpec::validate() const {
  if (factor < 2) throw SizeError("up-sampler factor must be at least 2");
  if (kernel.taps().empty()) throw ShapeError("up-sampler kernel is empty");
  if (kind == UpsamplerKind::kNearest && !(kernel == make_nn_kernel(factor))) {
    throw ShapeError("nearest up-sampler requires the all-ones box kernel");
  }
}

UpsamplerSpec UpsamplerSpec::nearest(int factor, Padding padding) {
  return {UpsamplerKind::kNearest, factor, make_nn_kernel(factor), padding};
}

RealTensor zero_insert(const RealTensor& img, int m) {
  if (m <= 0) throw SizeError("zero_insert: factor must be positive");
  const int ch = img.channels();
  RealTensor out(img.height() * m, img.width() * m, ch);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < ch; ++c) out.at(m * y, m * x, c) = img.at(y, x, c);
    }
  }
  return out;
}

RealTensor upsample(const RealTensor& img, const UpsamplerSpec& spec) {
  spec.validate();
  return conv2d(zero_insert(img, spec.factor), spec.kernel, spec.padding);
}

Kernel2D make_nn_kernel(int m) {
  if (m < 2) throw SizeError("make_nn_kernel: factor must be at least 2");
  return Kernel2D(m, m, 1.0);
}

RealTensor kernel_frequency_response(const Kernel2D& kernel, int height, int width) {
  if (kernel.rows() > height || kernel.cols() > width) {
    throw SizeError("kernel_frequency_response: kernel does not fit the grid");
  }
  ComplexTensor grid(height, width);
  for (int a = 0; a < kernel.rows(); ++a) {
    for (int b = 0; b < kernel.cols(); ++b) {
      const int y = ((a - kernel.anchor_row()) % height + height) % height;
      const int x = ((b - kernel.anchor_col()) % width + width) % width;
      grid.at(y, x) += kernel.at(a, b);
    }
  }
  const ComplexTensor spec = dft2d(grid);
  RealTensor mag(height, width, 1);
  for (std::size_t i = 0; i < spec.size(); ++i) mag.data()[i] = std::abs(spec.data()[i]);
  return fftshift(mag);
}

double high_to_low_ratio(const Kernel2D& kernel, int height, int width) {
  const RealTensor response = kernel_frequency_response(kernel, height, width);
  const BandPartition part = band_partition(height, width);
  double sum[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < part.labels.size(); ++i) sum[part.labels[i]] += response.data()[i];
  const auto counts = part.counts();
  const double low = sum[0] / counts[0];
  const double high = sum[2] / counts[2];
  if (low == 0.0) return high == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return high / low;
}

bool is_low_pass(const Kernel2D& kernel, int height, int width, double threshold) {
  return high_to_low_ratio(kernel, height, width) <= threshold;
}

void write_kernel(std::ostream& out, const Kernel2D& kernel) {
  out << kernel.rows() << ' ' << kernel.cols() << '\n';
  char buf[40];
  for (int a = 0; a < kernel.rows(); ++a) {
    for (int b = 0; b < kernel.cols(); ++b) {
      std::snprintf(buf, sizeof buf, "%.17g", kernel.at(a, b));
      out << (b ? " " : "") << buf;
    }
    out << '\n';
  }
}

Kernel2D read_kernel(std::istream& in) {
  int rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw IoError("kernel text: bad header, expected 'rows cols'");
  }
  std::vector<double> taps(static_cast<std::size_t>(rows) * cols);
  for (double& t : taps) {
    if (!(in >> t)) throw IoError("kernel text: expected " + std::to_string(taps.size()) + " taps");
  }
  return Kernel2D(rows, cols, std::move(taps));
}

}  // namespace ganspec
