#include "ganspec/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ganspec/errors.hpp"

namespace ganspec {

namespace {

inline int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

void check_conv(const RealTensor& img, const Kernel2D& kernel, Padding padding) {
  if (img.empty()) throw ShapeError("conv2d: empty image");
  if (kernel.taps().empty()) throw ShapeError("conv2d: empty kernel");
  if (padding == Padding::kCircular &&
      (kernel.rows() > img.height() || kernel.cols() > img.width())) {
    throw SizeError("conv2d: kernel " + std::to_string(kernel.rows()) + "x" +
                    std::to_string(kernel.cols()) + " larger than image " +
                    std::to_string(img.height()) + "x" + std::to_string(img.width()) +
                    " with circular padding");
  }
}

}  // namespace

RealTensor conv2d(const RealTensor& img, const Kernel2D& kernel, Padding padding) {
  check_conv(img, kernel, padding);
  const int h = img.height(), w = img.width(), ch = img.channels();
  const int kh = kernel.rows(), kw = kernel.cols();
  const int ar = kernel.anchor_row(), ac = kernel.anchor_col();
  RealTensor out(h, w, ch);

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (int a = 0; a < kh; ++a) {
          int sy = y - a + ar;
          if (padding == Padding::kCircular) {
            sy = wrap(sy, h);
          } else if (sy < 0 || sy >= h) {
            continue;
          }
          for (int b = 0; b < kw; ++b) {
            int sx = x - b + ac;
            if (padding == Padding::kCircular) {
              sx = wrap(sx, w);
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

RealTensor downsample(const RealTensor& img, int m, DownsampleMode mode) {
  if (m <= 0) throw SizeError("downsample: factor must be positive");
  if (img.height() % m != 0 || img.width() % m != 0) {
    throw SizeError("downsample: " + std::to_string(img.height()) + "x" +
                    std::to_string(img.width()) + " not divisible by " + std::to_string(m));
  }
  const int oh = img.height() / m, ow = img.width() / m, ch = img.channels();
  RealTensor out(oh, ow, ch);
  const double inv = 1.0 / (static_cast<double>(m) * m);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      for (int c = 0; c < ch; ++c) {
        if (mode == DownsampleMode::kStride) {
          out.at(y, x, c) = img.at(m * y, m * x, c);
        } else {
          double acc = 0.0;
          for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) acc += img.at(m * y + a, m * x + b, c);
          }
          out.at(y, x, c) = acc * inv;
        }
      }
    }
  }
  return out;
}

RealTensor to_gray(const RealTensor& img) {
  if (img.channels() != 3) {
    throw ShapeError("to_gray: expected 3 channels, got " + std::to_string(img.channels()));
  }
  RealTensor out(img.height(), img.width(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(y, x) = 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
    }
  }
  return out;
}

CropWindow center_window(int height, int width, int size) {
  if (size <= 0 || size > std::min(height, width)) {
    throw SizeError("crop: size " + std::to_string(size) + " does not fit " +
                    std::to_string(height) + "x" + std::to_string(width));
  }
  return {(height - size) / 2, (width - size) / 2, size};
}

CropWindow random_window(int height, int width, int size, Rng& rng) {
  if (size <= 0 || size > std::min(height, width)) {
    throw SizeError("crop: size " + std::to_string(size) + " does not fit " +
                    std::to_string(height) + "x" + std::to_string(width));
  }
  const int top = static_cast<int>(rng.below(static_cast<std::uint64_t>(height - size + 1)));
  const int left = static_cast<int>(rng.below(static_cast<std::uint64_t>(width - size + 1)));
  return {top, left, size};
}

RealTensor crop(const RealTensor& img, const CropWindow& window) {
  if (window.size <= 0 || window.top < 0 || window.left < 0 ||
      window.top + window.size > img.height() || window.left + window.size > img.width()) {
    throw SizeError("crop: window outside image");
  }
  const int ch = img.channels();
  RealTensor out(window.size, window.size, ch);
  for (int y = 0; y < window.size; ++y) {
    for (int x = 0; x < window.size; ++x) {
      for (int c = 0; c < ch; ++c) out.at(y, x, c) = img.at(window.top + y, window.left + x, c);
    }
  }
  return out;
}

RealTensor resize_bilinear(const RealTensor& img, int new_height, int new_width) {
  if (new_height < 1 || new_width < 1) throw ShapeError("resize: target must be at least 1x1");
  const int h = img.height(), w = img.width(), ch = img.channels();
  if (h == new_height && w == new_width) return img;
  RealTensor out(new_height, new_width, ch);
  const double sy = static_cast<double>(h) / new_height;
  const double sx = static_cast<double>(w) / new_width;

#pragma omp parallel for schedule(static)
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

RealTensor to_signed_unit(const RealTensor& img) {
  RealTensor out = img;
  for (double& v : out.data()) v = 2.0 * v - 1.0;
  return out;
}

}  // namespace ganspec
