#include "ganspec/serial.hpp"

#include <algorithm>
#include <vector>

#include "ganspec/errors.hpp"
#include "ganspec/fft.hpp"

namespace ganspec::serial {

RealTensor conv2d(const RealTensor& img, const Kernel2D& kernel, Padding padding) {
  const int h = img.height(), w = img.width(), ch = img.channels();
  if (padding == Padding::kCircular && (kernel.rows() > h || kernel.cols() > w)) {
    throw SizeError("conv2d: kernel larger than image with circular padding");
  }
  RealTensor out(h, w, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int a = 0; a < kernel.rows(); ++a) {
          int sy = y - a + kernel.anchor_row();
          if (padding == Padding::kCircular) {
            sy = ((sy % h) + h) % h;
          } else if (sy < 0 || sy >= h) {
            continue;
          }
          for (int b = 0; b < kernel.cols(); ++b) {
            int sx = x - b + kernel.anchor_col();
            if (padding == Padding::kCircular) {
              sx = ((sx % w) + w) % w;
            } else if (sx < 0 || sx >= w) {
              continue;
            }
            acc += kernel.at(a, b) * img.at(sy, sx, c);
          }
        }
        out.at(y, x, c) = acc;
      }
    }
  }
  return out;
}

void fft2d_inplace(std::span<Complex> data, int height, int width, bool inverse) {
  const FftPlan rows(static_cast<std::size_t>(width));
  const FftPlan cols(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    auto row = data.subspan(static_cast<std::size_t>(y) * width, width);
    inverse ? rows.inverse(row) : rows.forward(row);
  }
  std::vector<Complex> column(height);
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) column[y] = data[static_cast<std::size_t>(y) * width + x];
    inverse ? cols.inverse(column) : cols.forward(column);
    for (int y = 0; y < height; ++y) data[static_cast<std::size_t>(y) * width + x] = column[y];
  }
}

RealTensor resize_bilinear(const RealTensor& img, int new_height, int new_width) {
  const int h = img.height(), w = img.width(), ch = img.channels();
  if (h == new_height && w == new_width) return img;
  RealTensor out(new_height, new_width, ch);
  const double sy = static_cast<double>(h) / new_height;
  const double sx = static_cast<double>(w) / new_width;
  for (int y = 0; y < new_height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(h - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, h - 1);
    const double ty = fy - y0;
    for (int x = 0; x < new_width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(w - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, w - 1);
      const double tx = fx - x0;
      for (int c = 0; c < ch; ++c) {
        const double top = img.at(y0, x0, c) * (1.0 - tx) + img.at(y0, x1, c) * tx;
        const double bottom = img.at(y1, x0, c) * (1.0 - tx) + img.at(y1, x1, c) * tx;
        out.at(y, x, c) = top * (1.0 - ty) + bottom * ty;
      }
    }
  }
  return out;
}

}  // namespace ganspec::serial
