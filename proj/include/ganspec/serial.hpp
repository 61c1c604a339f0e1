#pragma once

#include <span>

#include "ganspec/tensor.hpp"

// Single-threaded reference versions of the OpenMP kernels. They follow the
// same arithmetic order per output sample so results agree bit for bit; tests
// compare both and the benchmark target times them side by side.
namespace ganspec::serial {

RealTensor conv2d(const RealTensor& img, const Kernel2D& kernel, Padding padding);

void fft2d_inplace(std::span<Complex> data, int height, int width, bool inverse);

RealTensor resize_bilinear(const RealTensor& img, int new_height, int new_width);

}  // namespace ganspec::serial
