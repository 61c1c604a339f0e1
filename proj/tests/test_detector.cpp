#include <gtest/gtest.h>


#include <cmath>
#include <numeric>
#include <sstream>

#include "ganspec/detector.hpp"
#include "ganspec/errors.hpp"
#include "ganspec/harness.hpp"
#include "ganspec/numeric.hpp"
#include "ganspec/upsampler.hpp"
#include "oracles.hpp"

using namespace ganspec;

namespace {

// Two Gaussian blobs in 2D, well separated.
LabeledSet blobs(int n, Rng& rng) {
  LabeledSet s;
  for (int i = 0; i < n; ++i) {
    const bool fake = i % 2 == 1;
    const double cx = fake ? 2.0 : -2.0;
    s.add({cx + 0.5 * rng.normal(), 0.5 * rng.normal() + (fake ? 1.0 : -1.0)}, fake ? Label::kFake : Label::kReal);
  }
  return s;
}

LabeledSet random_set(int n, int dim, Rng& rng) {
  LabeledSet s;
  for (int i = 0; i < n; ++i) {
    std::vector<double> x(dim);
    for (double& v : x) v = rng.uniform(-1, 1);
    s.add(std::move(x), rng.below(2) ? Label::kFake : Label::kReal);
  }
  return s;
}

double gradient_error(const Model& model, const LabeledSet& data, double h) {
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> g;
  loss_and_gradient(model, data, idx, &g);
  double worst = 0;
  for (std::size_t j = 0; j < model.params.size(); ++j) {
    Model p = model, m = model;
    p.params[j] += h;
    m.params[j] -= h;
    const double numeric = (loss_and_gradient(p, data, idx, nullptr) - loss_and_gradient(m, data, idx, nullptr)) / (2 * h);
    worst = std::max(worst, oracle::rel_err(g[j], numeric, 1e-6));
  }
  return worst;
}

}  // namespace

TEST(Features, ConstantImageSpectrumIsZero) {
  FeatureConfig fc;
  const auto f = extract_features(RealTensor(64, 64, 3, 0.3), fc);
  EXPECT_EQ(f.size(), 64u * 64u);
  for (double v : f) EXPECT_EQ(v, 0.0);
}

TEST(Features, PixelModeIsAffine) {
  Rng rng(1);
  RealTensor img = oracle::random_tensor(16, 16, 1, rng);
  FeatureConfig fc;
  fc.mode = FeatureMode::kPixel;
  fc.input_side = 16;
  const auto f = extract_features(img, fc);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f[i], 2 * img.data()[i] - 1, 1e-12);
}

TEST(Features, LengthsAndErrors) {
  Rng rng(2);
  RealTensor img = oracle::random_tensor(40, 48, 3, rng);
  FeatureConfig fc;
  fc.input_side = 32;
  fc.grayscale = false;
  EXPECT_EQ(extract_features(img, fc).size(), static_cast<std::size_t>(fc.feature_length()));
  EXPECT_EQ(extract_features(img.channel(0), fc).size(), 32u * 32u * 3u);
  fc.input_side = 64;
  EXPECT_THROW(extract_features(img, fc), SizeError);
  fc.input_side = 4;
  EXPECT_THROW(extract_features(img, fc), std::invalid_argument);
}

TEST(Features, HighBandSeesZeroInsertion) {
  RealTensor img(64, 64, 1);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) img.at(y, x) = 0.5 + 0.25 * std::sin(0.3 * x) * std::cos(0.2 * y);
  // same size, but rebuilt from a half-resolution copy by zero insertion and a box
  const RealTensor rebuilt = upsample(downsample(img, 2, DownsampleMode::kStride), UpsamplerSpec::nearest(2));
  FeatureConfig fc;
  fc.band = Band::kHigh;
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
  };
  EXPECT_GT(mean(extract_features(rebuilt, fc)), mean(extract_features(img, fc)));
}

TEST(Features, BatchMatchesSingle) {
  Rng rng(3);
  std::vector<RealTensor> imgs;
  for (int i = 0; i < 5; ++i) imgs.push_back(oracle::random_tensor(64, 64, 3, rng));
  FeatureConfig fc;
  const auto batch = extract_features_batch(imgs, fc);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(batch[i], extract_features(imgs[i], fc));
  imgs.push_back(RealTensor(8, 8, 1));
  EXPECT_THROW(extract_features_batch(imgs, fc), SizeError);
}

TEST(Features, SpectrumSeesWhatPixelsAverageOut) {
  // nearest-kind reconstructions keep local means, so per-pixel corpus means
  // barely move while the high band changes a lot
  Rng rng(4);
  const auto reals = synth_corpus(24, 64, rng);
  SimulatorConfig sc;
  sc.kind = UpsamplerKind::kNearest;
  const auto fakes = make_fakes(reals, initial_state(sc));
  FeatureConfig spec, pix;
  spec.band = Band::kHigh;
  pix.mode = FeatureMode::kPixel;
  auto mean_of = [](const std::vector<std::vector<double>>& rows) {
    std::vector<double> m(rows[0].size(), 0.0);
    for (const auto& r : rows)
      for (std::size_t i = 0; i < r.size(); ++i) m[i] += r[i] / rows.size();
    return m;
  };
  const auto pr = mean_of(extract_features_batch(reals, pix)), pf = mean_of(extract_features_batch(fakes, pix));
  double pixel_diff = 0;
  for (std::size_t i = 0; i < pr.size(); ++i) pixel_diff += std::abs(pr[i] - pf[i]) / pr.size();
  const auto sr = mean_of(extract_features_batch(reals, spec)), sf = mean_of(extract_features_batch(fakes, spec));
  double spec_diff = 0;
  for (std::size_t i = 0; i < sr.size(); ++i) spec_diff += std::abs(sr[i] - sf[i]) / sr.size();
  EXPECT_GT(spec_diff, 3 * pixel_diff);
}

TEST(Model, InitAndPredict) {
  Model m = init_model(ModelKind::kLogistic, 5, 0, 1);
  EXPECT_EQ(m.param_count(), 6u);
  for (double p : m.params) EXPECT_EQ(p, 0.0);
  const std::vector<double> x = {1, 2, 3, 4, 5};
  EXPECT_EQ(predict(m, x), 0.5);
  EXPECT_EQ(decide(0.5), Label::kFake);
  EXPECT_EQ(decide(0.4999), Label::kReal);
  m.params[2] = 0.1;
  const double p1 = predict(m, x);
  m.params[2] = 0.2;
  EXPECT_GT(predict(m, x), p1);
  EXPECT_THROW(predict(m, std::vector<double>{1, 2}), ShapeError);

  Model mlp = init_model(ModelKind::kMlp1, 10, 4, 7);
  EXPECT_EQ(mlp.param_count(), 4u * 10 + 4 + 4 + 1);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_LE(std::abs(mlp.params[i]), 1 / std::sqrt(10.0));
  EXPECT_EQ(init_model(ModelKind::kMlp1, 10, 4, 7).params, mlp.params);
}

TEST(Model, ExtremeLogitsStayFinite) {
  Model m = init_model(ModelKind::kLogistic, 1, 0, 0);
  m.params = {1000.0, 0.0};
  LabeledSet s;
  s.add({1.0}, Label::kReal);
  s.add({-1.0}, Label::kFake);
  std::vector<std::size_t> idx = {0, 1};
  std::vector<double> g;
  const double loss = loss_and_gradient(m, s, idx, &g);
  EXPECT_NEAR(loss, 1000.0, 1e-9);
  for (double v : g) EXPECT_TRUE(std::isfinite(v));
}

TEST(Model, LogisticGradientMatchesFiniteDifferences) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + static_cast<int>(rng.below(8));
    LabeledSet data = random_set(6, dim, rng);
    Model m = init_model(ModelKind::kLogistic, dim, 0, trial);
    for (double& p : m.params) p = rng.uniform(-2, 2);
    EXPECT_LE(gradient_error(m, data, 1e-5), 1e-3) << trial;
  }
}

TEST(Model, MlpGradientMatchesFiniteDifferences) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + static_cast<int>(rng.below(6));
    const int hidden = 1 + static_cast<int>(rng.below(5));
    LabeledSet data = random_set(5, dim, rng);
    Model m = init_model(ModelKind::kMlp1, dim, hidden, 100 + trial);
    for (double& p : m.params) p = rng.uniform(-1.5, 1.5);
    EXPECT_LE(gradient_error(m, data, 1e-5), 1e-3) << trial;
  }
}

TEST(Train, SeparatesBlobs) {
  Rng rng(7);
  const LabeledSet data = blobs(100, rng);
  TrainConfig tc;
  tc.seed = 3;
  for (ModelKind kind : {ModelKind::kLogistic, ModelKind::kMlp1}) {
    const Model m = train(data, tc, kind, {}, 8);
    EXPECT_EQ(evaluate(m, data).accuracy, 1.0);
    ASSERT_EQ(m.epoch_losses.size(), 10u);
    EXPECT_EQ(m.final_train_loss, m.epoch_losses.back());
    for (std::size_t e = 1; e < m.epoch_losses.size(); ++e)
      EXPECT_LT(m.epoch_losses[e], m.epoch_losses[e - 1] + 1e-9);
  }
}

TEST(Train, DeterministicPerSeed) {
  Rng rng(8);
  const LabeledSet data = random_set(50, 6, rng);
  TrainConfig tc;
  tc.seed = 11;
  EXPECT_EQ(train(data, tc, ModelKind::kMlp1, {}, 5).params, train(data, tc, ModelKind::kMlp1, {}, 5).params);
  tc.seed = 12;
  const Model other = train(data, tc, ModelKind::kLogistic);
  tc.seed = 11;
  EXPECT_NE(other.params, train(data, tc, ModelKind::kLogistic).params);
}

TEST(Train, FlippedLabelsFlipDecisions) {
  Rng rng(9);
  LabeledSet data = blobs(60, rng);
  LabeledSet flipped = data;
  for (auto& l : flipped.labels) l = l == Label::kFake ? Label::kReal : Label::kFake;
  TrainConfig tc;
  tc.seed = 2;
  const Model a = train(data, tc, ModelKind::kLogistic), b = train(flipped, tc, ModelKind::kLogistic);
  for (std::size_t i = 0; i < a.params.size(); ++i) EXPECT_NEAR(a.params[i], -b.params[i], 1e-12);
  for (const auto& x : data.features) EXPECT_NE(decide(predict(a, x)), decide(predict(b, x)));
}

TEST(Train, RejectsBadSets) {
  TrainConfig tc;
  LabeledSet one;
  one.add({1.0}, Label::kReal);
  one.add({2.0}, Label::kReal);
  EXPECT_THROW(train(one, tc, ModelKind::kLogistic), std::invalid_argument);
  LabeledSet ragged;
  ragged.add({1.0}, Label::kReal);
  ragged.add({1.0, 2.0}, Label::kFake);
  EXPECT_THROW(train(ragged, tc, ModelKind::kLogistic), ShapeError);
  tc.momentum = 1.0;
  EXPECT_THROW(tc.validate(), std::invalid_argument);
}

TEST(Evaluate, TieBreakAndCounts) {
  const Model m = init_model(ModelKind::kLogistic, 2, 0, 0);
  Rng rng(10);
  const LabeledSet data = blobs(40, rng);
  const Metrics met = evaluate(m, data);
  EXPECT_EQ(met.accuracy, 0.5);
  EXPECT_EQ(met.fake_accuracy, 1.0);
  EXPECT_EQ(met.real_accuracy, 0.0);
  EXPECT_EQ(met.confusion[0][0] + met.confusion[0][1] + met.confusion[1][0] + met.confusion[1][1], 40);
  EXPECT_EQ(met.total, 40);
  EXPECT_THROW(evaluate(m, LabeledSet{}), std::invalid_argument);
}

TEST(ModelFile, RoundTrip) {
  Rng rng(11);
  Model m = init_model(ModelKind::kMlp1, 12, 3, 5);
  m.feature_config.band = Band::kMid;
  m.feature_config.input_side = 16;
  m.epochs = 7;
  m.final_train_loss = 0.125;
  std::stringstream ss;
  save_model(ss, m);
  const Model back = load_model(ss);
  EXPECT_EQ(back.kind, ModelKind::kMlp1);
  EXPECT_EQ(back.input_dim, 12);
  EXPECT_EQ(back.hidden, 3);
  EXPECT_EQ(back.feature_config.band, Band::kMid);
  EXPECT_EQ(back.feature_config.input_side, 16);
  EXPECT_EQ(back.seed, 5u);
  EXPECT_EQ(back.epochs, 7);
  EXPECT_EQ(back.final_train_loss, 0.125);
  ASSERT_EQ(back.params.size(), m.params.size());
  for (std::size_t i = 0; i < m.params.size(); ++i)
    EXPECT_EQ(back.params[i], static_cast<double>(static_cast<float>(m.params[i])));
  std::istringstream junk("format = other\n[data]\n");
  EXPECT_THROW(load_model(junk), IoError);
}

TEST(Names, RoundTrip) {
  for (auto k : {ModelKind::kLogistic, ModelKind::kMlp1}) EXPECT_EQ(parse_model_kind(model_kind_name(k)), k);
  for (auto f : {FeatureMode::kSpectrum, FeatureMode::kPixel}) EXPECT_EQ(parse_feature_mode(feature_mode_name(f)), f);
  EXPECT_THROW(parse_model_kind("resnet34"), std::invalid_argument);
}
