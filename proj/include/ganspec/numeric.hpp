#pragma once

#include "ganspec/rng.hpp"
#include "ganspec/tensor.hpp"

namespace ganspec {

/// 2D convolution applied independently to every channel:
///   out(y, x) = sum_{a,b} k(a, b) * in(y - a + ar, x - b + ac)
/// where (ar, ac) is the kernel anchor. Circular padding wraps indices, so
/// DFT(out) = DFT(in) * DFT(k placed with its anchor at the origin).
/// Zero padding treats out-of-range samples as 0. Rows are processed in
/// parallel; see serial::conv2d for the reference loop.
RealTensor conv2d(const RealTensor& img, const Kernel2D& kernel,
                  Padding padding = Padding::kCircular);

enum class DownsampleMode { kStride, kAverage };

/// Reduces each axis by m. Stride keeps sample (m*i, m*j); average takes the
/// mean of each m x m block.
RealTensor downsample(const RealTensor& img, int m, DownsampleMode mode);

/// Luma with weights 0.299 / 0.587 / 0.114.
RealTensor to_gray(const RealTensor& img);

struct CropWindow {
  int top = 0;
  int left = 0;
  int size = 0;
};

CropWindow center_window(int height, int width, int size);
/// Offsets drawn uniformly over the valid range, top first then left.
CropWindow random_window(int height, int width, int size, Rng& rng);
RealTensor crop(const RealTensor& img, const CropWindow& window);

/// Bilinear resampling with half-pixel centers: destination sample i maps to
/// source coordinate (i + 0.5) * in/out - 0.5, clamped to the image. No
/// anti-aliasing prefilter is applied when shrinking.
RealTensor resize_bilinear(const RealTensor& img, int new_height, int new_width);

/// Samples mapped through v -> 2v - 1 (pixels in [0,1] become [-1,1]).
RealTensor to_signed_unit(const RealTensor& img);

}  // namespace ganspec
