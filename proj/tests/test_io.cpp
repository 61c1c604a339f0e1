#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ganspec/config.hpp"
#include "ganspec/errors.hpp"
#include "ganspec/io.hpp"
#include "oracles.hpp"

using namespace ganspec;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / ("ganspec_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::create_directories(p);
  return p;
}

RealTensor quantized(int h, int w, int c, Rng& rng) {
  RealTensor t(h, w, c);
  for (double& v : t.data()) v = static_cast<double>(rng.below(256)) / 255.0;
  return t;
}

}  // namespace

TEST(Rt01, RoundTripAndLayout) {
  RealTensor t(2, 3, 1, std::vector<double>{0, 0.5, 1, -2, 3.25, 8});
  std::stringstream ss;
  write_rt01(ss, t);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4u + 12u + 6u * 4u);
  EXPECT_EQ(bytes.substr(0, 4), "RT01");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2);  // height, little endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);
  EXPECT_EQ(read_rt01(ss), t);  // all samples exact in float32
  std::istringstream bad("RT02xxxxxxxxxxxx");
  EXPECT_THROW(read_rt01(bad), IoError);
}

TEST(Sf01, RoundTrip) {
  Rng rng(1);
  SpectrumFeature f{oracle::random_tensor(5, 4, 3, rng, -1, 1), true};
  std::stringstream ss;
  write_sf01(ss, f);
  EXPECT_EQ(ss.str().size(), 4u + 12u + 1u + 60u * 4u);
  const SpectrumFeature back = read_sf01(ss);
  EXPECT_TRUE(back.dc_centered);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    EXPECT_EQ(back.values.data()[i], static_cast<double>(static_cast<float>(f.values.data()[i])));
}

TEST(Pgm, Header) {
  RealTensor t(2, 2, 1, std::vector<double>{-1, 0, 1, 5});
  std::stringstream ss;
  write_pgm(ss, t);
  const std::string s = ss.str();
  ASSERT_EQ(s.substr(0, 11), "P5\n2 2\n255\n");
  EXPECT_EQ(static_cast<unsigned char>(s[11]), 0);
  EXPECT_EQ(static_cast<unsigned char>(s[12]), 128);
  EXPECT_EQ(static_cast<unsigned char>(s[13]), 255);
  EXPECT_EQ(static_cast<unsigned char>(s[14]), 255);
}

TEST(Png, RoundTripIsExactOn8Bit) {
  const fs::path dir = scratch_dir();
  Rng rng(2);
  for (int c : {1, 3}) {
    RealTensor img = quantized(9, 13, c, rng);
    const fs::path p = dir / ("img" + std::to_string(c) + ".png");
    write_png(p, img);
    EXPECT_EQ(read_image(p), img);
    EXPECT_EQ(load_tensor(p), img);
  }
  EXPECT_THROW(read_image(dir / "missing.png"), IoError);
  fs::remove_all(dir);
}

TEST(Jpeg, QualityBounds) {
  Rng rng(3);
  RealTensor img(32, 32, 3);
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = 0.5 + 0.4 * std::sin(0.2 * x + c) * std::cos(0.15 * y);
  const RealTensor hq = jpeg_roundtrip(img, 100);
  EXPECT_TRUE(hq.same_shape(img));
  EXPECT_LT(oracle::max_abs_diff(hq, img), 0.1);
  const RealTensor lq = jpeg_roundtrip(img, 10);
  double e_hq = 0, e_lq = 0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    e_hq += std::abs(hq.data()[i] - img.data()[i]);
    e_lq += std::abs(lq.data()[i] - img.data()[i]);
  }
  EXPECT_LT(e_hq, e_lq);
  EXPECT_THROW(jpeg_roundtrip(img, 0), std::invalid_argument);
  EXPECT_THROW(decode_jpeg({0x00, 0x01, 0x02}), IoError);
  EXPECT_EQ(jpeg_roundtrip(img.channel(0), 90).channels(), 1);
}

TEST(Jpeg, FileLoad) {
  const fs::path dir = scratch_dir();
  Rng rng(4);
  RealTensor img = quantized(16, 16, 3, rng);
  save_tensor(dir / "a.jpg", img);
  const RealTensor back = load_tensor(dir / "a.jpg");
  EXPECT_TRUE(back.same_shape(img));
  save_tensor(dir / "a.rt01", img);
  EXPECT_LT(oracle::max_abs_diff(load_tensor(dir / "a.rt01"), img), 1e-7);  // float32 samples
  fs::remove_all(dir);
}

TEST(Config, ParseAndTypes) {
  std::istringstream in(
      "# comment\n"
      "name = run one\n"
      "\n"
      "n = 42\n"
      "x = 0.5   # trailing\n"
      "flag = true\n"
      "list = a, b ,c\n"
      "big = 18446744073709551615\n");
  const KeyValueConfig kv = KeyValueConfig::parse(in);
  EXPECT_EQ(kv.get("name", ""), "run one");
  EXPECT_EQ(kv.get_int("n", 0), 42);
  EXPECT_EQ(kv.get_double("x", 0), 0.5);
  EXPECT_TRUE(kv.get_bool("flag", false));
  EXPECT_EQ(kv.get_list("list"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(kv.get_u64("big", 0), 18446744073709551615ULL);
  EXPECT_EQ(kv.get_int("absent", 7), 7);
  EXPECT_TRUE(kv.get_list("absent").empty());
  EXPECT_THROW(kv.require("absent"), IoError);
  EXPECT_THROW(kv.get_int("x", 0), IoError);
  EXPECT_THROW(kv.get_bool("n", false), IoError);
  EXPECT_TRUE(kv.has_prefix("na"));
  EXPECT_FALSE(kv.has_prefix("sim."));
  std::istringstream bad("no equals sign\n");
  EXPECT_THROW(KeyValueConfig::parse(bad), IoError);
}
