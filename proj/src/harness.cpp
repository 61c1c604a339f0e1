#include "ganspec/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "ganspec/errors.hpp"
#include "ganspec/fft.hpp"
#include "ganspec/io.hpp"
#include "ganspec/numeric.hpp"

namespace ganspec {

namespace {

constexpr double kPi = std::numbers::pi;

// Gaussian noise low-passed with a Gaussian of the given cutoff (in cycles
// per image), rescaled to zero mean and unit standard deviation.
std::vector<double> smooth_noise(int side, double cutoff, Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(side) * side;
  std::vector<Complex> plane(n);
  for (auto& v : plane) v = {rng.normal(), 0.0};
  fft2d_inplace(plane, side, side, false);
  for (int u = 0; u < side; ++u) {
    const double fu = u <= side / 2 ? u : u - side;
    for (int v = 0; v < side; ++v) {
      const double fv = v <= side / 2 ? v : v - side;
      plane[static_cast<std::size_t>(u) * side + v] *=
          std::exp(-(fu * fu + fv * fv) / (2.0 * cutoff * cutoff));
    }
  }
  fft2d_inplace(plane, side, side, true);
  std::vector<double> out(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += out[i] = plane[i].real();
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  for (double& v : out) v = sd > 0.0 ? (v - mean) / sd : 0.0;
  return out;
}

// Writes gray pattern g (roughly in [0, 1]) into RGB with a random tint.
RealTensor colorize(const std::vector<double>& gray, int side, Rng& rng) {
  RealTensor img(side, side, 3);
  double gain[3], offset[3];
  for (int c = 0; c < 3; ++c) {
    gain[c] = rng.uniform(0.6, 1.0);
    offset[c] = rng.uniform(0.0, 0.15);
  }
  for (std::size_t i = 0; i < gray.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      img.data()[i * 3 + c] = std::clamp(offset[c] + gain[c] * gray[i], 0.0, 1.0);
    }
  }
  return img;
}

void add_grain(RealTensor& img, double sigma, Rng& rng) {
  for (double& v : img.data()) v = std::clamp(v + sigma * rng.normal(), 0.0, 1.0);
}

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

RealTensor synth_image(SynthFamily family, int side, Rng& rng) {
  if (side < 4) throw SizeError("synth_image: side must be at least 4");
  const std::size_t n = static_cast<std::size_t>(side) * side;
  std::vector<double> g(n);
  switch (family) {
    case SynthFamily::kGradient: {
      const double a = rng.uniform(0.2, 0.5), bx = rng.uniform(-0.4, 0.4),
                   by = rng.uniform(-0.4, 0.4), q = rng.uniform(-0.3, 0.3);
      const double cx = rng.uniform(0.0, 1.0), cy = rng.uniform(0.0, 1.0);
      for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
          const double u = (x + 0.5) / side, v = (y + 0.5) / side;
          const double r2 = (u - cx) * (u - cx) + (v - cy) * (v - cy);
          g[static_cast<std::size_t>(y) * side + x] =
              std::clamp(a + 0.5 * bx * u + 0.5 * by * v + q * r2 + 0.25, 0.0, 1.0);
        }
      }
      return colorize(g, side, rng);
    }
    case SynthFamily::kNoiseField: {
      const double cutoff = rng.uniform(0.04, 0.3) * side;
      const double contrast = rng.uniform(0.1, 0.2);
      const auto field = smooth_noise(side, cutoff, rng);
      for (std::size_t i = 0; i < n; ++i) g[i] = 0.45 + contrast * field[i];
      RealTensor img = colorize(g, side, rng);
      add_grain(img, 0.02, rng);
      return img;
    }
    case SynthFamily::kStripes: {
      const int period = 3 + static_cast<int>(rng.below(14));
      const int orientation = static_cast<int>(rng.below(3));  // vertical, horizontal, checker
      const int phase = static_cast<int>(rng.below(static_cast<std::uint64_t>(period)));
      const double lo = rng.uniform(0.15, 0.4), hi = rng.uniform(0.6, 0.85);
      for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
          const bool sx = ((x + phase) % period) * 2 < period;
          const bool sy = ((y + phase) % period) * 2 < period;
          const bool on = orientation == 0 ? sx : (orientation == 1 ? sy : sx != sy);
          g[static_cast<std::size_t>(y) * side + x] = on ? hi : lo;
        }
      }
      RealTensor img = colorize(g, side, rng);
      add_grain(img, 0.02, rng);
      return img;
    }
    case SynthFamily::kSinusoids: {
      const int waves = 2 + static_cast<int>(rng.below(3));
      std::fill(g.begin(), g.end(), 0.45);
      for (int k = 0; k < waves; ++k) {
        const double freq = rng.uniform(1.0, side / 3.0);
        const double angle = rng.uniform(0.0, kPi);
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        const double amp = rng.uniform(0.05, 0.25) / waves * 2.0;
        const double fx = freq * std::cos(angle) / side, fy = freq * std::sin(angle) / side;
        for (int y = 0; y < side; ++y) {
          for (int x = 0; x < side; ++x) {
            g[static_cast<std::size_t>(y) * side + x] +=
                amp * std::sin(2.0 * kPi * (fx * x + fy * y) + phase);
          }
        }
      }
      RealTensor img = colorize(g, side, rng);
      add_grain(img, 0.02, rng);
      return img;
    }
  }
  throw std::invalid_argument("synth_image: unknown family");
}

RealTensor synth_stripes(int side, int period, bool vertical) {
  if (side < 1 || period < 2) throw SizeError("synth_stripes: bad side or period");
  RealTensor img(side, side, 1);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const int t = vertical ? y : x;
      img.at(y, x) = (t % period) * 2 < period ? 0.75 : 0.25;
    }
  }
  return img;
}

std::vector<RealTensor> synth_corpus(int n, int side, Rng& rng) {
  if (n < 1) throw std::invalid_argument("synth_corpus: n must be >= 1");
  if (side % 4 != 0) throw SizeError("synth_corpus: side must be divisible by 4");
  const Rng base(rng.next_u64());
  std::vector<RealTensor> out(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    Rng local = base.fork(static_cast<std::uint64_t>(i));
    out[i] = synth_image(static_cast<SynthFamily>(i % kSynthFamilyCount), side, local);
  }
  return out;
}

std::vector<RealTensor> make_fakes(std::span<const RealTensor> corpus, const SimulatorState& state) {
  std::vector<RealTensor> out(corpus.size());
  std::vector<std::exception_ptr> errors(corpus.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    try {
      out[i] = reconstruct(state, corpus[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone: return "none";
    case AttackKind::kJpeg: return "jpeg";
    case AttackKind::kResize: return "resize";
  }
  return "none";
}

AttackKind parse_attack_kind(std::string_view name) {
  if (name == "none" || name.empty()) return AttackKind::kNone;
  if (name == "jpeg") return AttackKind::kJpeg;
  if (name == "resize") return AttackKind::kResize;
  throw std::invalid_argument("unknown attack '" + std::string(name) + "'");
}

AttackDraw draw_attack(const AttackSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case AttackKind::kNone: return {AttackKind::kNone, 0};
    case AttackKind::kJpeg: return {AttackKind::kJpeg, kJpegQualities[rng.below(kJpegQualities.size())]};
    case AttackKind::kResize: return {AttackKind::kResize, kResizeSides[rng.below(kResizeSides.size())]};
  }
  return {};
}

RealTensor apply_attack(const RealTensor& img, const AttackDraw& draw) {
  switch (draw.kind) {
    case AttackKind::kNone: return img;
    case AttackKind::kJpeg: return jpeg_roundtrip(img, draw.parameter);
    case AttackKind::kResize: {
      const int shorter = std::min(img.height(), img.width());
      const double scale = static_cast<double>(draw.parameter) / shorter;
      const int h = std::max(1, static_cast<int>(std::lround(img.height() * scale)));
      const int w = std::max(1, static_cast<int>(std::lround(img.width() * scale)));
      return resize_bilinear(resize_bilinear(img, h, w), img.height(), img.width());
    }
  }
  return img;
}

RealTensor apply_attack(const RealTensor& img, const AttackSpec& spec, Rng& rng) {
  return apply_attack(img, draw_attack(spec, rng));
}

void DatasetManifest::validate(bool allow_single_label) const {
  std::set<std::string> seen;
  bool real = false, fake = false;
  for (const auto& e : entries) {
    if (e.path.empty()) throw std::invalid_argument("manifest: empty path");
    if (!seen.insert(e.path).second) throw std::invalid_argument("manifest: duplicate path " + e.path);
    (e.label == Label::kFake ? fake : real) = true;
  }
  if (entries.empty()) throw std::invalid_argument("manifest: no entries");
  if (split == Split::kTrain && !allow_single_label && !(real && fake)) {
    throw std::invalid_argument("manifest: training manifest needs both real and fake entries");
  }
}

void write_manifest(std::ostream& out, const DatasetManifest& manifest) {
  out << "# split = " << (manifest.split == Split::kTrain ? "train" : "test") << '\n';
  for (const auto& e : manifest.entries) {
    out << e.path << '\t' << (e.label == Label::kFake ? "fake" : "real") << '\t' << e.category
        << '\n';
  }
}

DatasetManifest read_manifest(std::istream& in) {
  DatasetManifest m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      if (body.rfind("split", 0) == 0) {
        const auto eq = body.find('=');
        const std::string v = eq == std::string::npos ? "" : trim(body.substr(eq + 1));
        if (v == "train") m.split = Split::kTrain;
        else if (v == "test") m.split = Split::kTest;
        else throw IoError("manifest line " + std::to_string(lineno) + ": bad split '" + v + "'");
      }
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 3) {
      throw IoError("manifest line " + std::to_string(lineno) + ": expected path<TAB>label<TAB>category");
    }
    ManifestEntry e;
    e.path = fields[0];
    if (fields[1] == "real") e.label = Label::kReal;
    else if (fields[1] == "fake") e.label = Label::kFake;
    else throw IoError("manifest line " + std::to_string(lineno) + ": bad label '" + fields[1] + "'");
    e.category = fields[2];
    m.entries.push_back(std::move(e));
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  return read_manifest(in);
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  write_manifest(out, manifest);
}

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& kv,
                                               const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  ExperimentConfig cfg;
  cfg.name = kv.get("name", cfg.name);
  cfg.seed = kv.get_u64("seed", 0);
  cfg.train_manifest = resolve(kv.require("train_manifest"));
  cfg.train_attack.kind = parse_attack_kind(kv.get("train_attack", "none"));

  const auto manifests = kv.get_list("test_manifests");
  const auto attacks = kv.get_list("test_attacks");
  const auto names = kv.get_list("test_names");
  if (manifests.empty()) throw IoError("config: test_manifests is empty");
  if (!attacks.empty() && attacks.size() != manifests.size()) {
    throw IoError("config: test_attacks must match test_manifests in length");
  }
  if (!names.empty() && names.size() != manifests.size()) {
    throw IoError("config: test_names must match test_manifests in length");
  }
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    TestSpec t;
    t.manifest = resolve(manifests[i]);
    t.attack.kind = parse_attack_kind(attacks.empty() ? "none" : attacks[i]);
    if (!names.empty()) {
      t.name = names[i];
    } else {
      t.name = std::filesystem::path(manifests[i]).stem().string();
      if (t.attack.kind != AttackKind::kNone) t.name += "+" + attack_kind_name(t.attack.kind);
    }
    cfg.tests.push_back(std::move(t));
  }

  cfg.feature.mode = parse_feature_mode(kv.get("feature.mode", "spectrum"));
  cfg.feature.input_side = kv.get_int("feature.input_side", cfg.feature.input_side);
  const std::string band = kv.get("feature.band", "none");
  if (band != "none") {
    cfg.feature.band = parse_band(band);
    if (!cfg.feature.band) throw IoError("config: bad feature.band '" + band + "'");
  }
  cfg.feature.grayscale = kv.get_bool("feature.grayscale", cfg.feature.grayscale);

  cfg.train.batch_size = kv.get_int("train.batch_size", cfg.train.batch_size);
  cfg.train.learning_rate = kv.get_double("train.learning_rate", cfg.train.learning_rate);
  cfg.train.momentum = kv.get_double("train.momentum", cfg.train.momentum);
  cfg.train.lr_decay = kv.get_double("train.lr_decay", cfg.train.lr_decay);
  cfg.train.epochs = kv.get_int("train.epochs", cfg.train.epochs);
  cfg.train.seed = kv.get_u64("train.seed", cfg.seed);
  cfg.model_kind = parse_model_kind(kv.get("model.kind", "logistic"));
  cfg.hidden = kv.get_int("model.hidden", cfg.hidden);

  if (kv.has_prefix("sim.")) {
    SimulatorConfig s;
    s.stages = kv.get_int("sim.stages", s.stages);
    s.kernel_size = kv.get_int("sim.kernel_size", s.kernel_size);
    s.kind = parse_upsampler_kind(kv.get("sim.kind", "transposed"));
    s.lambda = kv.get_double("sim.lambda", s.lambda);
    s.fit_iterations = kv.get_int("sim.fit_iterations", s.fit_iterations);
    s.learning_rate = kv.get_double("sim.learning_rate", s.learning_rate);
    s.seed = kv.get_u64("sim.seed", cfg.seed);
    s.init_scale = kv.get_double("sim.init_scale", s.init_scale);
    s.validate();
    cfg.simulator = s;
    cfg.sim_fit_images = kv.get_int("sim.fit_images", cfg.sim_fit_images);
  }
  cfg.crop = kv.get_int("crop", 0);
  cfg.output_dir = resolve(kv.get("output_dir", "."));
  cfg.feature.validate();
  cfg.train.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  return from_config(KeyValueConfig::load(path), path.parent_path());
}

std::string metrics_csv_row(const ExperimentRow& row) {
  const Metrics& m = row.metrics;
  return row.experiment + "," + row.split + "," + format_metric(m.accuracy) + "," +
         format_metric(m.real_accuracy) + "," + format_metric(m.fake_accuracy) + "," +
         std::to_string(m.total);
}

std::string ExperimentReport::csv() const {
  std::string out = std::string(kMetricsCsvHeader) + "\n";
  for (const auto& row : rows) out += metrics_csv_row(row) + "\n";
  return out;
}

namespace {

struct ImageSet {
  std::vector<RealTensor> images;
  std::vector<Label> labels;
};

template <typename Fn>
auto staged(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const ExperimentError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExperimentError(stage, e.what());
  }
}

ImageSet load_set(const DatasetManifest& manifest, const std::filesystem::path& manifest_path) {
  const auto dir = manifest_path.parent_path();
  ImageSet set;
  set.images.resize(manifest.entries.size());
  std::vector<std::exception_ptr> errors(manifest.entries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    try {
      std::filesystem::path p(manifest.entries[i].path);
      set.images[i] = load_tensor(p.is_absolute() ? p : dir / p);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& e : manifest.entries) set.labels.push_back(e.label);
  return set;
}

void append_fakes(ImageSet& set, const SimulatorState& state) {
  std::vector<RealTensor> reals;
  for (std::size_t i = 0; i < set.images.size(); ++i) {
    if (set.labels[i] == Label::kReal) reals.push_back(set.images[i]);
  }
  for (auto& f : make_fakes(reals, state)) {
    set.images.push_back(std::move(f));
    set.labels.push_back(Label::kFake);
  }
}

void attack_and_crop(ImageSet& set, const AttackSpec& attack, int crop_side, bool random_crop,
                     const Rng& stream) {
  std::vector<std::exception_ptr> errors(set.images.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < set.images.size(); ++i) {
    try {
      Rng rng = stream.fork(i);
      RealTensor img = apply_attack(set.images[i], attack, rng);
      if (crop_side > 0) {
        const CropWindow win = random_crop
                                   ? random_window(img.height(), img.width(), crop_side, rng)
                                   : center_window(img.height(), img.width(), crop_side);
        img = crop(img, win);
      }
      set.images[i] = std::move(img);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

LabeledSet featurize(const ImageSet& set, const FeatureConfig& fc) {
  LabeledSet out;
  out.features = extract_features_batch(set.images, fc);
  out.labels = set.labels;
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  ExperimentReport report;
  const Rng root(config.seed);

  const DatasetManifest train_manifest = staged("load train manifest", [&] {
    DatasetManifest m = load_manifest(config.train_manifest);
    m.validate(config.simulator.has_value());
    return m;
  });
  std::vector<DatasetManifest> test_manifests;
  for (const auto& t : config.tests) {
    test_manifests.push_back(staged("load test manifest " + t.name, [&] {
      DatasetManifest m = load_manifest(t.manifest);
      m.validate(true);
      return m;
    }));
  }

  ImageSet train_set = staged("load train images", [&] { return load_set(train_manifest, config.train_manifest); });
  std::vector<ImageSet> test_sets;
  for (std::size_t j = 0; j < config.tests.size(); ++j) {
    test_sets.push_back(staged("load test images " + config.tests[j].name,
                               [&] { return load_set(test_manifests[j], config.tests[j].manifest); }));
  }

  if (config.simulator) {
    report.simulator = staged("fit simulator", [&] {
      std::vector<RealTensor> corpus;
      for (std::size_t i = 0; i < train_set.images.size(); ++i) {
        if (static_cast<int>(corpus.size()) >= config.sim_fit_images) break;
        if (train_set.labels[i] == Label::kReal) corpus.push_back(train_set.images[i]);
      }
      return fit(*config.simulator, corpus);
    });
    staged("make fakes", [&] {
      append_fakes(train_set, *report.simulator);
      for (auto& s : test_sets) append_fakes(s, *report.simulator);
      return 0;
    });
  }

  staged("attack", [&] {
    attack_and_crop(train_set, config.train_attack, config.crop, true, root.fork(1));
    for (std::size_t j = 0; j < test_sets.size(); ++j) {
      attack_and_crop(test_sets[j], config.tests[j].attack, config.crop, false, root.fork(2 + j));
    }
    return 0;
  });

  const LabeledSet train_features = staged("extract train features", [&] { return featurize(train_set, config.feature); });
  report.model = staged("train", [&] {
    return train(train_features, config.train, config.model_kind, config.feature, config.hidden);
  });

  for (std::size_t j = 0; j < test_sets.size(); ++j) {
    const auto& t = config.tests[j];
    const Metrics m = staged("evaluate " + t.name, [&] {
      return evaluate(report.model, featurize(test_sets[j], config.feature));
    });
    report.rows.push_back({config.name, t.name, m});
  }

  staged("write outputs", [&] {
    std::filesystem::create_directories(config.output_dir);
    report.csv_path = config.output_dir / (config.name + ".csv");
    report.model_path = config.output_dir / (config.name + ".model");
    std::ofstream csv(report.csv_path, std::ios::binary);
    csv << report.csv();
    std::ofstream model(report.model_path, std::ios::binary);
    save_model(model, report.model);
    if (!csv || !model) throw IoError("cannot write outputs to " + config.output_dir.string());
    return 0;
  });
  return report;
}

}  // namespace ganspec
