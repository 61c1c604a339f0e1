#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "ganspec/errors.hpp"
#include "ganspec/numeric.hpp"
#include "ganspec/spectral.hpp"
#include "ganspec/upsampler.hpp"
#include "oracles.hpp"

using namespace ganspec;

TEST(ZeroInsert, OneDimensional) {
  RealTensor x(1, 2, 1, std::vector<double>{3, 5});
  RealTensor z = zero_insert(x, 2);
  EXPECT_EQ(z.height(), 2);
  EXPECT_EQ(z.width(), 4);
  EXPECT_EQ(z.channel(0), RealTensor(2, 4, 1, std::vector<double>{3, 0, 5, 0, 0, 0, 0, 0}));
}

TEST(ZeroInsert, NonzeroPattern) {
  Rng rng(1);
  RealTensor x = oracle::random_tensor(4, 4, 1, rng, 0.1, 1.0);
  RealTensor z = zero_insert(x, 2);
  int nonzero = 0;
  for (int y = 0; y < 8; ++y)
    for (int c = 0; c < 8; ++c)
      if (z.at(y, c) != 0.0) {
        ++nonzero;
        EXPECT_EQ(y % 2, 0);
        EXPECT_EQ(c % 2, 0);
        EXPECT_EQ(z.at(y, c), x.at(y / 2, c / 2));
      }
  EXPECT_EQ(nonzero, 16);
  const RealTensor zeros = zero_insert(RealTensor(3, 2, 3), 3);
  for (double v : zeros.data()) EXPECT_EQ(v, 0.0);
}

TEST(Upsample, NearestIsReplication) {
  RealTensor x(1, 2, 1, std::vector<double>{0.25, 0.75});
  RealTensor up = upsample(x, UpsamplerSpec::nearest(2));
  EXPECT_EQ(up.at(0, 0), 0.25);
  EXPECT_EQ(up.at(0, 1), 0.25);
  EXPECT_EQ(up.at(0, 2), 0.75);
  EXPECT_EQ(up.at(0, 3), 0.75);

  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const int h = 1 + static_cast<int>(rng.below(9)), w = 1 + static_cast<int>(rng.below(9));
    RealTensor img = oracle::random_tensor(h, w, 3, rng);
    for (Padding p : {Padding::kCircular, Padding::kZero})
      EXPECT_EQ(upsample(img, UpsamplerSpec::nearest(2, p)), oracle::replicate(img, 2));
  }
}

TEST(Upsample, IdentityKernelKeepsZeroInsertion) {
  Rng rng(3);
  RealTensor img = oracle::random_tensor(6, 6, 1, rng);
  UpsamplerSpec spec{UpsamplerKind::kTransposed, 2, Kernel2D(1, 1, 1.0)};
  RealTensor up = upsample(img, spec);
  EXPECT_EQ(up, zero_insert(img, 2));
  // four replicas of the small spectrum
  const ComplexTensor big = dft2d(up)[0], small = dft2d(img)[0];
  for (int u = 0; u < 12; ++u)
    for (int v = 0; v < 12; ++v) EXPECT_LT(std::abs(big.at(u, v) - small.at(u % 6, v % 6)), 1e-9);
}

TEST(Upsample, BoxConservesMass) {
  Rng rng(4);
  RealTensor img = oracle::random_tensor(7, 5, 2, rng);
  RealTensor up = upsample(img, UpsamplerSpec::nearest(2));
  double s_in = 0, s_out = 0;
  for (double v : img.data()) s_in += v;
  for (double v : up.data()) s_out += v;
  EXPECT_NEAR(s_out, 4 * s_in, 1e-9);
}

TEST(Upsample, SpecValidation) {
  UpsamplerSpec bad = UpsamplerSpec::nearest(2);
  bad.kernel.at(0, 0) = 0.5;
  EXPECT_THROW(bad.validate(), ShapeError);
  UpsamplerSpec one{UpsamplerKind::kTransposed, 1, Kernel2D(1, 1, 1.0)};
  EXPECT_THROW(one.validate(), SizeError);
}

TEST(NnKernel, Shapes) {
  EXPECT_EQ(make_nn_kernel(2), Kernel2D(2, 2, std::vector<double>{1, 1, 1, 1}));
  EXPECT_EQ(make_nn_kernel(3), Kernel2D(3, 3, 1.0));
  EXPECT_EQ(make_nn_kernel(4).sum(), 16.0);
  EXPECT_EQ(make_nn_kernel(2).anchor_row(), 0);
  EXPECT_THROW(make_nn_kernel(1), SizeError);
}

TEST(FrequencyResponse, BoxNyquistZero) {
  Kernel2D box(1, 2, 1.0);
  RealTensor r = kernel_frequency_response(box, 1, 16);
  // uncentered bin 8 (frequency pi) lands at centered column 0
  EXPECT_NEAR(r.at(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(r.at(0, 8), 2.0, 1e-15);
}

TEST(FrequencyResponse, IdentityFlat) {
  const RealTensor r = kernel_frequency_response(Kernel2D(1, 1, 1.0), 7, 8);
  for (double v : r.data()) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(FrequencyResponse, BoxClosedForm) {
  RealTensor r = kernel_frequency_response(make_nn_kernel(2), 8, 8);
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      const Complex hu = 1.0 + oracle::expi(-2 * std::numbers::pi * u / 8);
      const Complex hv = 1.0 + oracle::expi(-2 * std::numbers::pi * v / 8);
      EXPECT_NEAR(r.at((u + 4) % 8, (v + 4) % 8), std::abs(hu * hv), 1e-10);
    }
  EXPECT_THROW(kernel_frequency_response(Kernel2D(5, 5, 1.0), 4, 4), SizeError);
}

TEST(LowPass, Classification) {
  EXPECT_TRUE(is_low_pass(make_nn_kernel(2), 16, 16, 0.5));
  EXPECT_DOUBLE_EQ(high_to_low_ratio(Kernel2D(1, 1, 1.0), 16, 16), 1.0);
  EXPECT_FALSE(is_low_pass(Kernel2D(1, 1, 1.0), 16, 16, 0.5));
  EXPECT_FALSE(is_low_pass(Kernel2D(1, 2, std::vector<double>{-1, 1}), 16, 16, 0.5));
}

TEST(KernelText, RoundTrip) {
  Rng rng(5);
  Kernel2D k = oracle::random_kernel(3, 4, rng);
  std::stringstream ss;
  write_kernel(ss, k);
  EXPECT_EQ(read_kernel(ss), k);
  std::istringstream bad("2 2\n1 2 3\n");
  EXPECT_THROW(read_kernel(bad), IoError);
}

TEST(KindNames, RoundTrip) {
  for (auto k : {UpsamplerKind::kTransposed, UpsamplerKind::kNearest, UpsamplerKind::kLearned})
    EXPECT_EQ(parse_upsampler_kind(upsampler_kind_name(k)), k);
  EXPECT_THROW(parse_upsampler_kind("bicubic"), std::invalid_argument);
}
