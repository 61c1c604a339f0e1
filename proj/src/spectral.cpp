#include "ganspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ganspec/errors.hpp"
#include "ganspec/fft.hpp"
#include "ganspec/upsampler.hpp"

namespace ganspec {

namespace {

ComplexTensor to_complex_plane(const RealTensor& img, int c) {
  ComplexTensor plane(img.height(), img.width());
  auto out = plane.data();
  auto in = img.data();
  const int ch = img.channels();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {in[i * ch + c], 0.0};
  return plane;
}

template <typename Grid>
Grid shift_by(const Grid& in, int dy, int dx) {
  Grid out = in;
  const int h = in.height(), w = in.width();
  for (int y = 0; y < h; ++y) {
    const int ty = (y + dy) % h;
    for (int x = 0; x < w; ++x) {
      const int tx = (x + dx) % w;
      if constexpr (std::is_same_v<Grid, RealTensor>) {
        for (int c = 0; c < in.channels(); ++c) out.at(ty, tx, c) = in.at(y, x, c);
      } else {
        out.at(ty, tx) = in.at(y, x);
      }
    }
  }
  return out;
}

bool channel_is_constant(const RealTensor& img, int c) {
  const auto data = img.data();
  const int ch = img.channels();
  const double first = data[c];
  for (std::size_t i = c; i < data.size(); i += ch) {
    if (data[i] != first) return false;
  }
  return true;
}

}  // namespace

ComplexTensor dft1d(const RealTensor& signal, bool inverse) {
  if (signal.height() != 1 || signal.channels() != 1) {
    throw ShapeError("dft1d: expected a 1 x N x 1 signal");
  }
  return dft1d(to_complex_plane(signal, 0), inverse);
}

ComplexTensor dft1d(const ComplexTensor& signal, bool inverse) {
  if (signal.height() != 1) throw ShapeError("dft1d: expected a 1 x N row");
  ComplexTensor out = signal;
  const FftPlan plan(static_cast<std::size_t>(signal.width()));
  if (inverse) {
    plan.inverse(out.data());
  } else {
    plan.forward(out.data());
  }
  return out;
}

std::vector<ComplexTensor> dft2d(const RealTensor& img, bool inverse) {
  std::vector<ComplexTensor> planes;
  planes.reserve(img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    ComplexTensor plane = to_complex_plane(img, c);
    fft2d_inplace(plane.data(), plane.height(), plane.width(), inverse);
    planes.push_back(std::move(plane));
  }
  return planes;
}

ComplexTensor dft2d(const ComplexTensor& plane, bool inverse) {
  ComplexTensor out = plane;
  fft2d_inplace(out.data(), out.height(), out.width(), inverse);
  return out;
}

ComplexTensor fftshift(const ComplexTensor& spec) {
  return shift_by(spec, spec.height() / 2, spec.width() / 2);
}

ComplexTensor ifftshift(const ComplexTensor& spec) {
  return shift_by(spec, (spec.height() + 1) / 2, (spec.width() + 1) / 2);
}

RealTensor fftshift(const RealTensor& plane) {
  return shift_by(plane, plane.height() / 2, plane.width() / 2);
}

RealTensor ifftshift(const RealTensor& plane) {
  return shift_by(plane, (plane.height() + 1) / 2, (plane.width() + 1) / 2);
}

RealTensor magnitude_spectrum(const RealTensor& img) {
  const auto planes = dft2d(img);
  RealTensor mag(img.height(), img.width(), img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    const auto spec = planes[c].data();
    for (std::size_t i = 0; i < spec.size(); ++i) {
      mag.data()[i * img.channels() + c] = std::abs(spec[i]);
    }
  }
  return fftshift(mag);
}

SpectrumFeature log_spectrum(const RealTensor& img) {
  if (!img.all_finite()) throw ShapeError("log_spectrum: non-finite pixels");
  RealTensor logmag = magnitude_spectrum(img);
  for (double& v : logmag.data()) v = std::log(v + kLogEpsilon);

  const int ch = img.channels();
  auto data = logmag.data();
  for (int c = 0; c < ch; ++c) {
    double lo = data[c], hi = data[c];
    for (std::size_t i = c; i < data.size(); i += ch) {
      lo = std::min(lo, data[i]);
      hi = std::max(hi, data[i]);
    }
    // A constant channel carries only a DC spike; it is treated like a flat
    // spectrum.
    const bool degenerate = hi == lo || channel_is_constant(img, c);
    const double span = hi - lo;
    for (std::size_t i = c; i < data.size(); i += ch) {
      data[i] = degenerate ? 0.0 : std::clamp(2.0 * (data[i] - lo) / span - 1.0, -1.0, 1.0);
    }
  }
  return {std::move(logmag), true};
}

std::string_view band_name(Band band) {
  switch (band) {
    case Band::kLow: return "low";
    case Band::kMid: return "mid";
    case Band::kHigh: return "high";
  }
  return "low";
}

std::optional<Band> parse_band(std::string_view name) {
  if (name == "low") return Band::kLow;
  if (name == "mid") return Band::kMid;
  if (name == "high") return Band::kHigh;
  return std::nullopt;
}

std::array<int, 3> BandPartition::counts() const {
  std::array<int, 3> n{0, 0, 0};
  for (auto l : labels) ++n[l];
  return n;
}

BandPartition band_partition(int height, int width) {
  if (height <= 0 || width <= 0) throw ShapeError("band_partition: dimensions must be positive");
  const std::size_t n = static_cast<std::size_t>(height) * width;
  const long cy = height / 2, cx = width / 2;
  std::vector<long> radius2(n);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const long dy = y - cy, dx = x - cx;
      radius2[static_cast<std::size_t>(y) * width + x] = dy * dy + dx * dx;
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return radius2[a] < radius2[b]; });

  const std::size_t base = n / 3, rem = n % 3;
  const std::size_t low_end = base + (rem > 0 ? 1 : 0);
  const std::size_t mid_end = low_end + base + (rem > 1 ? 1 : 0);

  BandPartition part{height, width, std::vector<std::uint8_t>(n, 0)};
  for (std::size_t rank = 0; rank < n; ++rank) {
    const std::uint8_t label = rank < low_end ? 0 : (rank < mid_end ? 1 : 2);
    part.labels[order[rank]] = label;
  }
  return part;
}

SpectrumFeature apply_band(const SpectrumFeature& feature, const BandPartition& part, Band band) {
  const RealTensor& v = feature.values;
  if (v.height() != part.height || v.width() != part.width) {
    throw ShapeError("apply_band: feature and partition shapes differ");
  }
  SpectrumFeature out = feature;
  const int ch = v.channels();
  auto data = out.values.data();
  const auto wanted = static_cast<std::uint8_t>(band);
  for (std::size_t i = 0; i < part.labels.size(); ++i) {
    if (part.labels[i] != wanted) {
      for (int c = 0; c < ch; ++c) data[i * ch + c] = 0.0;
    }
  }
  return out;
}

double verify_replication(const RealTensor& signal) {
  if (signal.height() != 1 || signal.channels() != 1) {
    throw ShapeError("verify_replication: expected a 1 x N x 1 signal");
  }
  const int n = signal.width();
  // Only the column axis is zero-inserted for a 1-row signal.
  RealTensor inserted(1, 2 * n, 1);
  const RealTensor both = zero_insert(signal, 2);
  for (int i = 0; i < 2 * n; ++i) inserted.at(0, i) = both.at(0, i);

  const ComplexTensor x = dft1d(signal);
  const ComplexTensor xi = dft1d(inserted);
  double err = 0.0;
  for (int k = 0; k < 2 * n; ++k) err = std::max(err, std::abs(xi.at(0, k) - x.at(0, k % n)));
  return err;
}

double verify_replication_2d(const RealTensor& img) {
  if (img.channels() != 1) throw ShapeError("verify_replication_2d: expected 1 channel");
  const int h = img.height(), w = img.width();
  const ComplexTensor x = dft2d(img).front();
  const ComplexTensor xi = dft2d(zero_insert(img, 2)).front();
  double err = 0.0;
  for (int u = 0; u < 2 * h; ++u) {
    for (int v = 0; v < 2 * w; ++v) {
      err = std::max(err, std::abs(xi.at(u, v) - x.at(u % h, v % w)));
    }
  }
  return err;
}

}  // namespace ganspec
