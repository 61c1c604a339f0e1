#include <gtest/gtest.h>

#include "ganspec/errors.hpp"
#include "ganspec/numeric.hpp"
#include "ganspec/spectral.hpp"
#include "ganspec/upsampler.hpp"
#include "oracles.hpp"

using namespace ganspec;

TEST(Tensor, RejectsBadShapes) {
  EXPECT_THROW(RealTensor(0, 3, 1), ShapeError);
  EXPECT_THROW(RealTensor(2, 2, 1, std::vector<double>(3)), ShapeError);
  EXPECT_THROW(Kernel2D(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
  EXPECT_THROW(Kernel2D(1, 1, std::vector<double>{NAN}), ShapeError);
}

TEST(Tensor, ChannelRoundTrip) {
  Rng rng(1);
  RealTensor t = oracle::random_tensor(5, 4, 3, rng);
  RealTensor g = t.channel(1);
  EXPECT_EQ(g.channels(), 1);
  EXPECT_EQ(g.at(2, 3), t.at(2, 3, 1));
  RealTensor u(5, 4, 3);
  for (int c = 0; c < 3; ++c) u.set_channel(c, t.channel(c));
  EXPECT_EQ(u, t);
}

TEST(Conv2d, IdentityKernel) {
  RealTensor ones(4, 4, 1, 1.0);
  EXPECT_EQ(conv2d(ones, Kernel2D(1, 1, 1.0), Padding::kCircular), ones);
}

TEST(Conv2d, ImpulseResponseFollowsAnchor) {
  RealTensor delta(4, 4, 1);
  delta.at(0, 0) = 1.0;
  Kernel2D box(2, 2, std::vector<double>{1, 2, 3, 4});
  RealTensor out = conv2d(delta, box, Padding::kCircular);
  // anchor (0,0): tap (a,b) lands at (a,b)
  EXPECT_EQ(out.at(0, 0), 1.0);
  EXPECT_EQ(out.at(0, 1), 2.0);
  EXPECT_EQ(out.at(1, 0), 3.0);
  EXPECT_EQ(out.at(1, 1), 4.0);
  double s = 0;
  for (double v : out.data()) s += v;
  EXPECT_EQ(s, box.sum());

  Kernel2D k3(3, 3);
  k3.at(0, 0) = 5.0;  // anchor (1,1), so tap (0,0) shifts by (-1,-1)
  RealTensor o3 = conv2d(delta, k3, Padding::kCircular);
  EXPECT_EQ(o3.at(3, 3), 5.0);
}

TEST(Conv2d, MatchesBruteForce) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int h = 3 + static_cast<int>(rng.below(10)), w = 3 + static_cast<int>(rng.below(10));
    const int kh = 1 + static_cast<int>(rng.below(3)), kw = 1 + static_cast<int>(rng.below(3));
    RealTensor img = oracle::random_tensor(h, w, 2, rng);
    Kernel2D k = oracle::random_kernel(kh, kw, rng);
    EXPECT_LT(oracle::max_abs_diff(conv2d(img, k, Padding::kCircular), oracle::conv(img, k, true)), 1e-12);
    EXPECT_LT(oracle::max_abs_diff(conv2d(img, k, Padding::kZero), oracle::conv(img, k, false)), 1e-12);
  }
}

TEST(Conv2d, ConvolutionTheorem) {
  Rng rng(3);
  for (int n : {8, 12, 16, 32}) {
    RealTensor img = oracle::random_tensor(n, n, 1, rng);
    Kernel2D k = oracle::random_kernel(3, 3, rng);
    RealTensor out = conv2d(img, k, Padding::kCircular);
    // kernel placed with its anchor at the origin
    RealTensor placed(n, n, 1);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        placed.at((a - k.anchor_row() + n) % n, (b - k.anchor_col() + n) % n) = k.at(a, b);
    ComplexTensor fo = dft2d(out)[0], fi = dft2d(img)[0], fk = dft2d(placed)[0];
    double err = 0;
    for (std::size_t i = 0; i < fo.size(); ++i)
      err = std::max(err, std::abs(fo.data()[i] - fi.data()[i] * fk.data()[i]));
    EXPECT_LT(err, 1e-9) << n;
  }
}

TEST(Conv2d, Linear) {
  Rng rng(4);
  RealTensor x = oracle::random_tensor(9, 7, 1, rng), y = oracle::random_tensor(9, 7, 1, rng);
  Kernel2D k = oracle::random_kernel(3, 2, rng);
  RealTensor mix(9, 7, 1);
  for (std::size_t i = 0; i < mix.size(); ++i) mix.data()[i] = 2.5 * x.data()[i] - 0.75 * y.data()[i];
  RealTensor lhs = conv2d(mix, k), cx = conv2d(x, k), cy = conv2d(y, k);
  for (std::size_t i = 0; i < lhs.size(); ++i)
    EXPECT_NEAR(lhs.data()[i], 2.5 * cx.data()[i] - 0.75 * cy.data()[i], 1e-12);
}

TEST(Conv2d, KernelTooLargeForCircular) {
  RealTensor img(2, 2, 1);
  EXPECT_THROW(conv2d(img, Kernel2D(3, 3, 1.0), Padding::kCircular), SizeError);
  EXPECT_NO_THROW(conv2d(img, Kernel2D(3, 3, 1.0), Padding::kZero));
}

TEST(Downsample, StrideRamp) {
  RealTensor ramp(4, 4, 1);
  for (int i = 0; i < 16; ++i) ramp.data()[i] = i;
  RealTensor d = downsample(ramp, 2, DownsampleMode::kStride);
  EXPECT_EQ(d, RealTensor(2, 2, 1, std::vector<double>{0, 2, 8, 10}));
}

TEST(Downsample, AverageOfConstant) {
  for (int m : {1, 2, 3, 6}) {
    RealTensor c(6, 12, 3, 0.375);
    RealTensor d = downsample(c, m, DownsampleMode::kAverage);
    EXPECT_EQ(d.height(), 6 / m);
    for (double v : d.data()) EXPECT_DOUBLE_EQ(v, 0.375);
  }
}

TEST(Downsample, AverageEqualsBoxThenStride) {
  Rng rng(5);
  RealTensor img = oracle::random_tensor(8, 8, 1, rng);
  RealTensor avg = downsample(img, 2, DownsampleMode::kAverage);
  // 2x2 box anchored at (0,0) sums in(y-1..y, x-1..x): the block starting at
  // (2i, 2j) is read at (2i+1, 2j+1).
  RealTensor boxed = oracle::conv(img, Kernel2D(2, 2, 0.25), true);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(avg.at(i, j), boxed.at(2 * i + 1, 2 * j + 1), 1e-15);
}

TEST(Downsample, RejectsNonDivisible) {
  EXPECT_THROW(downsample(RealTensor(5, 4, 1), 2, DownsampleMode::kStride), SizeError);
}

TEST(Downsample, InvertsZeroInsert) {
  Rng rng(6);
  RealTensor img = oracle::random_tensor(5, 7, 3, rng);
  for (int m : {2, 3}) EXPECT_EQ(downsample(zero_insert(img, m), m, DownsampleMode::kStride), img);
}

TEST(ToGray, Weights) {
  RealTensor white(1, 1, 3, 1.0);
  EXPECT_NEAR(to_gray(white).at(0, 0), 1.0, 1e-15);
  RealTensor red(1, 1, 3, std::vector<double>{1, 0, 0});
  EXPECT_DOUBLE_EQ(to_gray(red).at(0, 0), 0.299);
  Rng rng(7);
  RealTensor img = oracle::random_tensor(6, 5, 3, rng);
  RealTensor g = to_gray(img);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 5; ++x)
      EXPECT_NEAR(g.at(y, x), 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2), 1e-15);
  EXPECT_THROW(to_gray(RealTensor(2, 2, 1)), ShapeError);
}

TEST(Crop, CenterOffsets) {
  CropWindow w = center_window(256, 256, 224);
  EXPECT_EQ(w.top, 16);
  EXPECT_EQ(w.left, 16);
  Rng rng(8);
  RealTensor img = oracle::random_tensor(10, 10, 1, rng);
  EXPECT_EQ(crop(img, center_window(10, 10, 10)), img);
  EXPECT_THROW(center_window(10, 10, 11), SizeError);
}

TEST(Crop, RandomIsSeededAndInRange) {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) {
    CropWindow wa = random_window(40, 30, 25, a), wb = random_window(40, 30, 25, b);
    EXPECT_EQ(wa.top, wb.top);
    EXPECT_EQ(wa.left, wb.left);
    EXPECT_LE(wa.top, 15);
    EXPECT_LE(wa.left, 5);
  }
}

TEST(Crop, CopiesWindow) {
  Rng rng(10);
  RealTensor img = oracle::random_tensor(6, 6, 3, rng);
  RealTensor c = crop(img, CropWindow{1, 2, 3});
  EXPECT_EQ(c.at(0, 0, 2), img.at(1, 2, 2));
  EXPECT_EQ(c.at(2, 2, 0), img.at(3, 4, 0));
}

TEST(Resize, SameSizeIsIdentity) {
  Rng rng(11);
  RealTensor img = oracle::random_tensor(7, 9, 3, rng);
  EXPECT_LT(oracle::max_abs_diff(resize_bilinear(img, 7, 9), img), 1e-12);
}

TEST(Resize, ConstantStaysConstant) {
  RealTensor c(13, 17, 1, 0.625);
  const RealTensor r = resize_bilinear(c, 5, 29);
  for (double v : r.data()) EXPECT_NEAR(v, 0.625, 1e-15);
}

TEST(Resize, HalfPixelCenters) {
  RealTensor src(2, 2, 1, std::vector<double>{0, 1, 2, 3});
  RealTensor out = resize_bilinear(src, 3, 3);
  // source coordinates -1/6 (clamped to 0), 1/2, 7/6 (clamped to 1)
  const double expect[3][3] = {{0, 0.5, 1}, {1, 1.5, 2}, {2, 2.5, 3}};
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) EXPECT_NEAR(out.at(y, x), expect[y][x], 1e-15);
}

TEST(Resize, HalvingAveragesPairs) {
  RealTensor src(1, 4, 1, std::vector<double>{0, 2, 4, 6});
  RealTensor out = resize_bilinear(src, 1, 2);
  EXPECT_NEAR(out.at(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(out.at(0, 1), 5.0, 1e-15);
}

TEST(SignedUnit, AffineMap) {
  RealTensor t(1, 3, 1, std::vector<double>{0, 0.5, 1});
  EXPECT_EQ(to_signed_unit(t), RealTensor(1, 3, 1, std::vector<double>{-1, 0, 1}));
}
