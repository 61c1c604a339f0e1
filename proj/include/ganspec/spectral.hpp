#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ganspec/tensor.hpp"

namespace ganspec {

/// Guard added to the DFT magnitude before taking the log.
inline constexpr double kLogEpsilon = 1e-10;

/// Forward DFT X(k) = sum_n x(n) exp(-i 2 pi k n / N) of a 1 x N x 1 signal.
/// The inverse flag applies the 1/N-normalized inverse to the real input.
ComplexTensor dft1d(const RealTensor& signal, bool inverse = false);
/// Same on a 1 x N complex row.
ComplexTensor dft1d(const ComplexTensor& signal, bool inverse = false);

/// One 2D transform per channel.
std::vector<ComplexTensor> dft2d(const RealTensor& img, bool inverse = false);
ComplexTensor dft2d(const ComplexTensor& plane, bool inverse = false);

/// Circular shift by (floor(H/2), floor(W/2)); moves DC to the center.
ComplexTensor fftshift(const ComplexTensor& spec);
/// Circular shift by (ceil(H/2), ceil(W/2)); undoes fftshift for any size.
ComplexTensor ifftshift(const ComplexTensor& spec);
RealTensor fftshift(const RealTensor& plane);
RealTensor ifftshift(const RealTensor& plane);

/// Normalized log-magnitude spectrum. `values` is H x W x C with every
/// sample in [-1, 1].
struct SpectrumFeature {
  RealTensor values;
  bool dc_centered = true;
};

/// Per channel: |DFT|, log(|.| + kLogEpsilon), fftshift, then the channel's
/// [min, max] mapped affinely onto [-1, 1]. A channel with max == min becomes
/// all zeros. Phase is discarded.
SpectrumFeature log_spectrum(const RealTensor& img);

/// DC-centered magnitude |DFT| per channel (unnormalized, no log).
RealTensor magnitude_spectrum(const RealTensor& img);

enum class Band : std::uint8_t { kLow = 0, kMid = 1, kHigh = 2 };

std::string_view band_name(Band band);
std::optional<Band> parse_band(std::string_view name);

/// Low / mid / high split of the DC-centered bins by Euclidean distance to
/// (floor(H/2), floor(W/2)). Bins are ordered by radius, ties by row-major
/// index; the first third is low, the next mid, the rest high. When H*W is
/// not divisible by 3 the leading bands take the extra bin.
struct BandPartition {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> labels;  // row-major, DC-centered layout

  Band label(int y, int x) const {
    return static_cast<Band>(labels[static_cast<std::size_t>(y) * width + x]);
  }
  std::array<int, 3> counts() const;
};

BandPartition band_partition(int height, int width);

/// Zeroes every bin outside `band`, in every channel.
SpectrumFeature apply_band(const SpectrumFeature& feature, const BandPartition& part,
                           Band band);

/// Zero-inserts a 1 x N x 1 signal to length 2N and returns
/// max_k |X'(k) - X(k mod N)|.
double verify_replication(const RealTensor& signal);

/// 2D form on a single-channel H x W tensor, both axes zero-inserted:
/// max_{u,v} |X'(u,v) - X(u mod H, v mod W)|.
double verify_replication_2d(const RealTensor& img);

}  // namespace ganspec
