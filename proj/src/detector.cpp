#include "ganspec/detector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ganspec/config.hpp"
#include "ganspec/errors.hpp"
#include "ganspec/numeric.hpp"
#include "ganspec/rng.hpp"

namespace ganspec {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

// Pre-activation of the output unit; fills `hidden_out` for mlp1.
double forward(const Model& m, std::span<const double> x, std::vector<double>* hidden_out) {
  const auto& p = m.params;
  const int d = m.input_dim;
  if (m.kind == ModelKind::kLogistic) {
    double z = p[d];
    for (int i = 0; i < d; ++i) z += p[i] * x[i];
    return z;
  }
  const int h = m.hidden;
  const double* w1 = p.data();
  const double* b1 = w1 + static_cast<std::size_t>(h) * d;
  const double* w2 = b1 + h;
  const double b2 = w2[h];
  double z = b2;
  if (hidden_out) hidden_out->resize(h);
  for (int j = 0; j < h; ++j) {
    const double* row = w1 + static_cast<std::size_t>(j) * d;
    double a = b1[j];
    for (int i = 0; i < d; ++i) a += row[i] * x[i];
    const double t = std::tanh(a);
    if (hidden_out) (*hidden_out)[j] = t;
    z += w2[j] * t;
  }
  return z;
}

double sample_loss(double z, Label y) { return y == Label::kFake ? softplus(-z) : softplus(z); }

void check_input(const Model& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.input_dim) {
    throw ShapeError("model expects " + std::to_string(m.input_dim) + " features, got " +
                     std::to_string(x.size()));
  }
}

void write_f32_block(std::ostream& out, const std::string& name, std::span<const double> values) {
  out << "[block " << name << ' ' << values.size() << "]\n";
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    const char bytes[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                           static_cast<char>((bits >> 16) & 0xFF),
                           static_cast<char>((bits >> 24) & 0xFF)};
    out.write(bytes, 4);
  }
  out << '\n';
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void FeatureConfig::validate() const {
  if (input_side < 8) throw std::invalid_argument("feature config: input_side must be >= 8");
}

std::vector<double> extract_features(const RealTensor& img, const FeatureConfig& config) {
  config.validate();
  if (img.height() < config.input_side || img.width() < config.input_side) {
    throw SizeError("extract_features: image " + std::to_string(img.height()) + "x" +
                    std::to_string(img.width()) + " smaller than input side " +
                    std::to_string(config.input_side));
  }
  if (img.channels() != 1 && img.channels() != 3) {
    throw ShapeError("extract_features: expected 1 or 3 channels");
  }
  RealTensor base;
  if (config.grayscale) {
    base = img.channels() == 3 ? to_gray(img) : img;
  } else if (img.channels() == 1) {
    base = RealTensor(img.height(), img.width(), 3);
    for (int c = 0; c < 3; ++c) base.set_channel(c, img);
  } else {
    base = img;
  }

  RealTensor map;
  if (config.mode == FeatureMode::kSpectrum) {
    SpectrumFeature feat = log_spectrum(base);
    if (config.band) {
      feat = apply_band(feat, band_partition(base.height(), base.width()), *config.band);
    }
    map = std::move(feat.values);
  } else {
    map = to_signed_unit(base);
  }
  map = resize_bilinear(map, config.input_side, config.input_side);
  return std::vector<double>(map.data().begin(), map.data().end());
}

std::vector<std::vector<double>> extract_features_batch(std::span<const RealTensor> images,
                                                        const FeatureConfig& config) {
  std::vector<std::vector<double>> out(images.size());
  // Exceptions cannot cross the parallel region; the first one is rethrown.
  std::vector<std::exception_ptr> errors(images.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < images.size(); ++i) {
    try {
      out[i] = extract_features(images[i], config);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void TrainConfig::validate() const {
  if (batch_size <= 0 || !(learning_rate > 0.0) || epochs <= 0 || lr_decay < 0.0 ||
      lr_decay >= 1.0) {
    throw std::invalid_argument("train config: batch_size, learning_rate, epochs must be positive "
                                "and lr_decay in [0, 1)");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw std::invalid_argument("train config: momentum must be in [0, 1)");
  }
}

std::size_t Model::param_count() const {
  if (kind == ModelKind::kLogistic) return static_cast<std::size_t>(input_dim) + 1;
  return static_cast<std::size_t>(hidden) * input_dim + 2 * static_cast<std::size_t>(hidden) + 1;
}

Model init_model(ModelKind kind, int input_dim, int hidden, std::uint64_t seed) {
  if (input_dim <= 0) throw ShapeError("model input dimension must be positive");
  Model m;
  m.kind = kind;
  m.input_dim = input_dim;
  m.hidden = kind == ModelKind::kMlp1 ? hidden : 0;
  if (kind == ModelKind::kMlp1 && hidden <= 0) throw ShapeError("mlp1 needs hidden units");
  m.seed = seed;
  m.params.assign(m.param_count(), 0.0);
  if (kind == ModelKind::kMlp1) {
    Rng rng = Rng(seed).fork(0);
    const double r1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double r2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    const std::size_t n1 = static_cast<std::size_t>(hidden) * input_dim;
    for (std::size_t i = 0; i < n1; ++i) m.params[i] = rng.uniform(-r1, r1);
    for (int j = 0; j < hidden; ++j) m.params[n1 + hidden + j] = rng.uniform(-r2, r2);
  }
  return m;
}

double predict(const Model& model, std::span<const double> features) {
  check_input(model, features);
  return sigmoid(forward(model, features, nullptr));
}

Label decide(double probability) { return probability >= 0.5 ? Label::kFake : Label::kReal; }

double loss_and_gradient(const Model& model, const LabeledSet& data,
                         std::span<const std::size_t> indices, std::vector<double>* gradient) {
  if (indices.empty()) throw std::invalid_argument("loss_and_gradient: no samples");
  const int d = model.input_dim;
  const int h = model.hidden;
  if (gradient) gradient->assign(model.param_count(), 0.0);
  const double inv = 1.0 / static_cast<double>(indices.size());
  double loss = 0.0;
  std::vector<double> hid;
  for (std::size_t idx : indices) {
    const auto& x = data.features[idx];
    check_input(model, x);
    const double z = forward(model, x, gradient ? &hid : nullptr);
    const Label y = data.labels[idx];
    loss += sample_loss(z, y) * inv;
    if (!gradient) continue;
    const double dz = (sigmoid(z) - (y == Label::kFake ? 1.0 : 0.0)) * inv;
    auto& g = *gradient;
    if (model.kind == ModelKind::kLogistic) {
      for (int i = 0; i < d; ++i) g[i] += dz * x[i];
      g[d] += dz;
      continue;
    }
    const std::size_t n1 = static_cast<std::size_t>(h) * d;
    const double* w2 = model.params.data() + n1 + h;
    for (int j = 0; j < h; ++j) {
      g[n1 + h + j] += dz * hid[j];
      const double da = dz * w2[j] * (1.0 - hid[j] * hid[j]);
      g[n1 + j] += da;
      double* row = g.data() + static_cast<std::size_t>(j) * d;
      for (int i = 0; i < d; ++i) row[i] += da * x[i];
    }
    g[n1 + 2 * static_cast<std::size_t>(h)] += dz;
  }
  return loss;
}

namespace {

double full_loss(const Model& model, const LabeledSet& data) {
  std::vector<double> losses(data.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < data.size(); ++i) {
    losses[i] = sample_loss(forward(model, data.features[i], nullptr), data.labels[i]);
  }
  double total = 0.0;
  for (double l : losses) total += l;
  return total / static_cast<double>(data.size());
}

}  // namespace

Model train(const LabeledSet& train_set, const TrainConfig& config, ModelKind kind,
            const FeatureConfig& feature_config, int hidden) {
  config.validate();
  if (train_set.size() == 0 || train_set.features.size() != train_set.labels.size()) {
    throw std::invalid_argument("train: empty or inconsistent training set");
  }
  const std::size_t dim = train_set.features.front().size();
  bool has_real = false, has_fake = false;
  for (std::size_t i = 0; i < train_set.size(); ++i) {
    if (train_set.features[i].size() != dim) throw ShapeError("train: feature lengths differ");
    (train_set.labels[i] == Label::kFake ? has_fake : has_real) = true;
  }
  if (!has_real || !has_fake) throw std::invalid_argument("train: both labels must be present");

  Model model = init_model(kind, static_cast<int>(dim), hidden, config.seed);
  model.feature_config = feature_config;
  model.epochs = config.epochs;

  Rng shuffler = Rng(config.seed).fork(1);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> velocity(model.param_count(), 0.0);
  std::vector<double> grad;
  double lr = config.learning_rate;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffler.below(i)]);
    }
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      loss_and_gradient(model, train_set, std::span(order).subspan(start, end - start), &grad);
      for (std::size_t j = 0; j < velocity.size(); ++j) {
        velocity[j] = config.momentum * velocity[j] - lr * grad[j];
        model.params[j] += velocity[j];
      }
    }
    model.epoch_losses.push_back(full_loss(model, train_set));
    lr *= 1.0 - config.lr_decay;
  }
  model.final_train_loss = model.epoch_losses.back();
  return model;
}

Metrics evaluate(const Model& model, const LabeledSet& test_set) {
  if (test_set.size() == 0) throw std::invalid_argument("evaluate: empty test set");
  std::vector<Label> predicted(test_set.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    predicted[i] = decide(predict(model, test_set.features[i]));
  }
  Metrics m;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    ++m.confusion[static_cast<int>(test_set.labels[i])][static_cast<int>(predicted[i])];
  }
  const auto reals = m.confusion[0][0] + m.confusion[0][1];
  const auto fakes = m.confusion[1][0] + m.confusion[1][1];
  m.total = reals + fakes;
  m.accuracy = static_cast<double>(m.confusion[0][0] + m.confusion[1][1]) / m.total;
  m.real_accuracy = reals ? static_cast<double>(m.confusion[0][0]) / reals : 0.0;
  m.fake_accuracy = fakes ? static_cast<double>(m.confusion[1][1]) / fakes : 0.0;
  return m;
}

std::string feature_mode_name(FeatureMode mode) {
  return mode == FeatureMode::kSpectrum ? "spectrum" : "pixel";
}

std::string model_kind_name(ModelKind kind) {
  return kind == ModelKind::kLogistic ? "logistic" : "mlp1";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "logistic") return ModelKind::kLogistic;
  if (name == "mlp1") return ModelKind::kMlp1;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "spectrum") return FeatureMode::kSpectrum;
  if (name == "pixel") return FeatureMode::kPixel;
  throw std::invalid_argument("unknown feature mode '" + std::string(name) + "'");
}

void save_model(std::ostream& out, const Model& model) {
  const FeatureConfig& fc = model.feature_config;
  out << "format = ganspec-model-1\n"
      << "kind = " << model_kind_name(model.kind) << '\n'
      << "input_dim = " << model.input_dim << '\n'
      << "hidden = " << model.hidden << '\n'
      << "feature.mode = " << feature_mode_name(fc.mode) << '\n'
      << "feature.input_side = " << fc.input_side << '\n'
      << "feature.band = " << (fc.band ? band_name(*fc.band) : "none") << '\n'
      << "feature.grayscale = " << (fc.grayscale ? "true" : "false") << '\n'
      << "seed = " << model.seed << '\n'
      << "epochs = " << model.epochs << '\n'
      << "final_train_loss = " << format_double(model.final_train_loss) << '\n'
      << "[data]\n";
  std::span<const double> p = model.params;
  if (model.kind == ModelKind::kLogistic) {
    write_f32_block(out, "w", p.first(model.input_dim));
    write_f32_block(out, "b", p.subspan(model.input_dim, 1));
    return;
  }
  const std::size_t n1 = static_cast<std::size_t>(model.hidden) * model.input_dim;
  write_f32_block(out, "w1", p.first(n1));
  write_f32_block(out, "b1", p.subspan(n1, model.hidden));
  write_f32_block(out, "w2", p.subspan(n1 + model.hidden, model.hidden));
  write_f32_block(out, "b2", p.subspan(n1 + 2 * static_cast<std::size_t>(model.hidden), 1));
}

Model load_model(std::istream& in) {
  std::stringstream header;
  std::string line;
  bool found_data = false;
  while (std::getline(in, line)) {
    if (trim(line) == "[data]") {
      found_data = true;
      break;
    }
    header << line << '\n';
  }
  if (!found_data) throw IoError("model file: missing [data] section");
  const KeyValueConfig kv = KeyValueConfig::parse(header);
  if (kv.get("format", "") != "ganspec-model-1") throw IoError("model file: unknown format");

  Model m;
  m.kind = parse_model_kind(kv.require("kind"));
  m.input_dim = kv.get_int("input_dim", 0);
  m.hidden = kv.get_int("hidden", 0);
  m.feature_config.mode = parse_feature_mode(kv.get("feature.mode", "spectrum"));
  m.feature_config.input_side = kv.get_int("feature.input_side", 64);
  const std::string band = kv.get("feature.band", "none");
  if (band != "none") {
    m.feature_config.band = parse_band(band);
    if (!m.feature_config.band) throw IoError("model file: bad band '" + band + "'");
  }
  m.feature_config.grayscale = kv.get_bool("feature.grayscale", true);
  m.seed = kv.get_u64("seed", 0);
  m.epochs = kv.get_int("epochs", 0);
  m.final_train_loss = kv.get_double("final_train_loss", 0.0);
  if (m.input_dim <= 0 || (m.kind == ModelKind::kMlp1 && m.hidden <= 0)) {
    throw IoError("model file: bad dimensions");
  }

  m.params.clear();
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::istringstream marker(t);
    std::string tag, name;
    std::size_t count = 0;
    if (!(marker >> tag >> name >> count) || tag != "[block") {
      throw IoError("model file: bad block marker '" + t + "'");
    }
    for (std::size_t i = 0; i < count; ++i) {
      unsigned char bytes[4];
      if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw IoError("model file: truncated block");
      const std::uint32_t bits = bytes[0] | (bytes[1] << 8) | (bytes[2] << 16) |
                                 (static_cast<std::uint32_t>(bytes[3]) << 24);
      m.params.push_back(std::bit_cast<float>(bits));
    }
  }
  if (m.params.size() != m.param_count()) throw IoError("model file: parameter count mismatch");
  return m;
}

}  // namespace ganspec
