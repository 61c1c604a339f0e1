#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganspec/config.hpp"
#include "ganspec/detector.hpp"
#include "ganspec/rng.hpp"
#include "ganspec/simulator.hpp"
#include "ganspec/tensor.hpp"

namespace ganspec {

// ---------------------------------------------------------------------------
// Procedural corpus

enum class SynthFamily { kGradient = 0, kNoiseField = 1, kStripes = 2, kSinusoids = 3 };
inline constexpr int kSynthFamilyCount = 4;

/// One RGB image in [0, 1] from the given family.
///   gradient:    smooth linear/quadratic ramps with a per-channel tint
///   noise field: Gaussian noise low-passed at a random cutoff
///   stripes:     square-wave stripes or checkers at a random period
///   sinusoids:   a few superposed plane waves at random frequencies
/// Families other than gradient also carry a faint fine-grain noise layer.
RealTensor synth_image(SynthFamily family, int side, Rng& rng);

/// Square-wave stripes with the given period along x (vertical=false) or y,
/// gray, values in {0.25, 0.75}.
RealTensor synth_stripes(int side, int period, bool vertical);

/// n images; image i uses family i % 4 and its own forked generator, so the
/// corpus depends only on the state of `rng` (which advances by one draw).
std::vector<RealTensor> synth_corpus(int n, int side, Rng& rng);

/// reconstruct(state, img) for every image; fakes[i] derives from corpus[i].
std::vector<RealTensor> make_fakes(std::span<const RealTensor> corpus,
                                   const SimulatorState& state);

// ---------------------------------------------------------------------------
// Post-processing attacks

enum class AttackKind { kNone, kJpeg, kResize };

inline constexpr std::array<int, 4> kJpegQualities = {100, 90, 70, 50};
inline constexpr std::array<int, 4> kResizeSides = {256, 200, 150, 128};

struct AttackSpec {
  AttackKind kind = AttackKind::kNone;
};

/// A concrete attack: JPEG quality or resize side (0 for none).
struct AttackDraw {
  AttackKind kind = AttackKind::kNone;
  int parameter = 0;
};

std::string attack_kind_name(AttackKind kind);
AttackKind parse_attack_kind(std::string_view name);

/// Draws the quality / side uniformly from the fixed lists.
AttackDraw draw_attack(const AttackSpec& spec, Rng& rng);

/// JPEG: encode/decode at the drawn quality. Resize: bilinear to side x side,
/// then back to the original size so feature dimensions stay fixed.
RealTensor apply_attack(const RealTensor& img, const AttackDraw& draw);
RealTensor apply_attack(const RealTensor& img, const AttackSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Manifests

enum class Split { kTrain, kTest };

struct ManifestEntry {
  std::string path;
  Label label = Label::kReal;
  std::string category;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// One "path<TAB>label<TAB>category" line per entry, label in {real, fake}.
/// The split is recorded in a leading "# split = train|test" comment.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  Split split = Split::kTrain;

  /// Paths must be unique; training manifests need both labels unless
  /// `allow_single_label` (fakes may come from a simulator).
  void validate(bool allow_single_label = false) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

void write_manifest(std::ostream& out, const DatasetManifest& manifest);
DatasetManifest read_manifest(std::istream& in);
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

// ---------------------------------------------------------------------------
// Experiments

class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(const std::string& stage, const std::string& detail)
      : std::runtime_error("experiment stage '" + stage + "': " + detail), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct TestSpec {
  std::string name;  // split column in the metrics CSV
  std::filesystem::path manifest;
  AttackSpec attack;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  std::filesystem::path train_manifest;
  std::vector<TestSpec> tests;
  AttackSpec train_attack;
  FeatureConfig feature;
  TrainConfig train;
  ModelKind model_kind = ModelKind::kLogistic;
  int hidden = 64;
  /// When set, every real entry of every manifest also yields a fake made by
  /// a simulator fitted on the first `sim_fit_images` training reals.
  std::optional<SimulatorConfig> simulator;
  int sim_fit_images = 16;
  /// Square crop side; 0 disables. Training crops are random, test crops
  /// central.
  int crop = 0;
  std::filesystem::path output_dir = ".";

  /// Relative paths resolve against base_dir.
  static ExperimentConfig from_config(const KeyValueConfig& kv,
                                      const std::filesystem::path& base_dir);
  static ExperimentConfig load(const std::filesystem::path& path);
};

struct ExperimentRow {
  std::string experiment;
  std::string split;
  Metrics metrics;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  Model model;
  std::optional<SimulatorState> simulator;
  std::filesystem::path csv_path;
  std::filesystem::path model_path;

  std::string csv() const;
};

inline constexpr const char* kMetricsCsvHeader = "experiment,split,accuracy,real_acc,fake_acc,n";
std::string metrics_csv_row(const ExperimentRow& row);

/// Loads manifests, optionally fits the simulator and synthesizes fakes,
/// applies attacks, trains on the training split and evaluates every test
/// spec. Writes <output_dir>/<name>.csv and <output_dir>/<name>.model.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace ganspec
