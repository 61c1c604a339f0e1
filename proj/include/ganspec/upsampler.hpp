#pragma once

#include <iosfwd>
#include <string_view>

#include "ganspec/tensor.hpp"

namespace ganspec {

enum class UpsamplerKind { kTransposed, kNearest, kLearned };

std::string_view upsampler_kind_name(UpsamplerKind kind);
UpsamplerKind parse_upsampler_kind(std::string_view name);

/// Zero insertion by `factor` followed by convolution with `kernel`.
/// Nearest-neighbor requires the factor x factor all-ones box.
struct UpsamplerSpec {
  UpsamplerKind kind = UpsamplerKind::kTransposed;
  int factor = 2;
  Kernel2D kernel;
  Padding padding = Padding::kCircular;

  void validate() const;
  static UpsamplerSpec nearest(int factor, Padding padding = Padding::kCircular);
};

/// out(m i, m j) = in(i, j); every other sample is exactly 0.
RealTensor zero_insert(const RealTensor& img, int m);

/// conv2d(zero_insert(img, m), kernel, padding).
RealTensor upsample(const RealTensor& img, const UpsamplerSpec& spec);

/// m x m all-ones box. Its anchor is (0, 0) for m = 2, which makes
/// zero-insert + box equal to pixel replication.
Kernel2D make_nn_kernel(int m);

/// |DFT| of the kernel placed on an h x w grid, DC-centered (1 channel).
RealTensor kernel_frequency_response(const Kernel2D& kernel, int height, int width);

/// Mean response over the high band divided by the mean over the low band.
double high_to_low_ratio(const Kernel2D& kernel, int height, int width);

/// True iff high-band mean response <= threshold * low-band mean response.
bool is_low_pass(const Kernel2D& kernel, int height, int width, double threshold);

/// Text format: first line "rows cols", then one whitespace-separated row of
/// decimal taps per line.
void write_kernel(std::ostream& out, const Kernel2D& kernel);
Kernel2D read_kernel(std::istream& in);

}  // namespace ganspec
