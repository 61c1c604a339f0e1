#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ganspec/spectral.hpp"
#include "ganspec/tensor.hpp"

namespace ganspec {

enum class FeatureMode { kSpectrum, kPixel };

struct FeatureConfig {
  FeatureMode mode = FeatureMode::kSpectrum;
  int input_side = 64;
  std::optional<Band> band;
  bool grayscale = true;

  void validate() const;
  int feature_length() const { return input_side * input_side * (grayscale ? 1 : 3); }
};

/// Spectrum mode: [gray] -> log_spectrum -> [band mask] -> bilinear resize to
/// input_side^2 -> flatten. Pixel mode: [gray] -> 2 p - 1 -> resize ->
/// flatten. Throws SizeError when the image is smaller than input_side.
std::vector<double> extract_features(const RealTensor& img, const FeatureConfig& config);

/// extract_features over a batch, one image per OpenMP iteration.
std::vector<std::vector<double>> extract_features_batch(std::span<const RealTensor> images,
                                                        const FeatureConfig& config);

enum class Label : std::uint8_t { kReal = 0, kFake = 1 };

struct LabeledSet {
  std::vector<std::vector<double>> features;
  std::vector<Label> labels;

  std::size_t size() const { return labels.size(); }
  void add(std::vector<double> feature, Label label) {
    features.push_back(std::move(feature));
    labels.push_back(label);
  }
};

enum class ModelKind { kLogistic, kMlp1 };

struct TrainConfig {
  int batch_size = 16;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double lr_decay = 1e-2;  // lr *= (1 - lr_decay) after every epoch
  int epochs = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Binary real/fake classifier; outputs P(fake).
///
/// Parameters live in one flat vector:
///   logistic: [w (input_dim), b]
///   mlp1:     [W1 (hidden x input_dim, row-major), b1 (hidden), w2 (hidden), b2]
/// The hidden layer of mlp1 uses tanh.
struct Model {
  ModelKind kind = ModelKind::kLogistic;
  int input_dim = 0;
  int hidden = 0;
  std::vector<double> params;
  FeatureConfig feature_config;
  // Training metadata.
  std::uint64_t seed = 0;
  int epochs = 0;
  double final_train_loss = 0.0;
  std::vector<double> epoch_losses;

  std::size_t param_count() const;
};

/// Zero weights for logistic; uniform(+-1/sqrt(fan_in)) for mlp1 layers.
Model init_model(ModelKind kind, int input_dim, int hidden, std::uint64_t seed);

double predict(const Model& model, std::span<const double> features);

/// Probability >= 0.5 counts as fake, so an exact 0.5 tie is fake.
Label decide(double probability);

/// Mean binary cross-entropy over `indices` of `data`. When `gradient` is
/// non-null it receives d loss / d params (resized to param_count()).
double loss_and_gradient(const Model& model, const LabeledSet& data,
                         std::span<const std::size_t> indices, std::vector<double>* gradient);

/// Mini-batch SGD with momentum on mean binary cross-entropy. The sample
/// order is reshuffled each epoch from a seeded generator, so equal inputs
/// and seeds give bit-identical weights.
Model train(const LabeledSet& train_set, const TrainConfig& config, ModelKind kind,
            const FeatureConfig& feature_config = {}, int hidden = 64);

struct Metrics {
  double accuracy = 0.0;
  double real_accuracy = 0.0;
  double fake_accuracy = 0.0;
  // confusion[truth][predicted], 0 = real, 1 = fake
  std::int64_t confusion[2][2] = {{0, 0}, {0, 0}};
  std::int64_t total = 0;
};

Metrics evaluate(const Model& model, const LabeledSet& test_set);

/// Text header of "key = value" lines, then "[data]" and float32
/// little-endian parameter blocks each introduced by "[block <name> <count>]".
void save_model(std::ostream& out, const Model& model);
Model load_model(std::istream& in);

std::string feature_mode_name(FeatureMode mode);
std::string model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
FeatureMode parse_feature_mode(std::string_view name);

}  // namespace ganspec
