// ganspec command line: spectra, synthetic corpora, the GAN-pipeline
// simulator, detector training/evaluation and whole experiments.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ganspec/detector.hpp"
#include "ganspec/errors.hpp"
#include "ganspec/harness.hpp"
#include "ganspec/io.hpp"
#include "ganspec/numeric.hpp"
#include "ganspec/simulator.hpp"
#include "ganspec/spectral.hpp"
#include "ganspec/upsampler.hpp"

using namespace ganspec;
namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  return in;
}

struct LoadedSet {
  std::vector<RealTensor> images;
  std::vector<Label> labels;
};

LoadedSet load_set(const fs::path& manifest_path, int crop) {
  const DatasetManifest m = load_manifest(manifest_path);
  LoadedSet s;
  for (const ManifestEntry& e : m.entries) {
    RealTensor img = load_tensor(manifest_path.parent_path() / e.path);
    if (crop > 0) img = ganspec::crop(img, center_window(img.height(), img.width(), crop));
    s.images.push_back(std::move(img));
    s.labels.push_back(e.label);
  }
  return s;
}

LabeledSet featurize(const LoadedSet& s, const FeatureConfig& fc) {
  LabeledSet out;
  auto rows = extract_features_batch(s.images, fc);
  for (std::size_t i = 0; i < rows.size(); ++i) out.add(std::move(rows[i]), s.labels[i]);
  return out;
}

void print_metrics(const std::string& split, const Metrics& m) {
  std::printf("%s: accuracy %.4f (real %.4f, fake %.4f) on %d images\n", split.c_str(), m.accuracy, m.real_accuracy,
              m.fake_accuracy, static_cast<int>(m.total));
}

std::optional<Band> band_option(const std::string& s) {
  if (s.empty() || s == "none") return std::nullopt;
  return parse_band(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ganspec: spectral detection of up-sampling artifacts"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "check spectral replication and the FFT on random signals");
  int verify_max_n = 64;
  std::uint64_t verify_seed = 1;
  verify->add_option("--max-n", verify_max_n, "largest 1D length")->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_seed);
  verify->callback([&] {
    Rng rng(verify_seed);
    double rep = 0, rt = 0;
    for (int n = 1; n <= verify_max_n; ++n) {
      RealTensor x(1, n, 1);
      for (double& v : x.data()) v = rng.uniform(-1, 1);
      rep = std::max(rep, verify_replication(x));
      const ComplexTensor f = dft1d(x);
      const ComplexTensor back = dft1d(f, true);
      for (int i = 0; i < n; ++i) rt = std::max(rt, std::abs(back.at(0, i) - x.at(0, i)));
    }
    RealTensor img(24, 20, 1);
    for (double& v : img.data()) v = rng.uniform(-1, 1);
    const double rep2 = verify_replication_2d(img);
    std::printf("replication 1D max error %.3g\nreplication 2D max error %.3g\nround trip max error %.3g\n", rep, rep2, rt);
    if (std::max({rep, rep2, rt}) > 1e-9) throw std::runtime_error("verification failed");
  });

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "normalized log spectrum of an image (.sf01 or .pgm output)");
  fs::path spec_in, spec_out;
  bool spec_gray = false;
  std::string spec_band;
  spectrum->add_option("image", spec_in)->required()->check(CLI::ExistingFile);
  spectrum->add_option("-o,--output", spec_out)->required();
  spectrum->add_flag("--gray", spec_gray, "luma before the transform");
  spectrum->add_option("--band", spec_band, "keep only low, mid or high");
  spectrum->callback([&] {
    RealTensor img = load_tensor(spec_in);
    if (spec_gray) img = to_gray(img);
    SpectrumFeature f = log_spectrum(img);
    if (auto b = band_option(spec_band)) f = apply_band(f, band_partition(img.height(), img.width()), *b);
    auto out = open_out(spec_out);
    if (spec_out.extension() == ".pgm") {
      write_pgm(out, f.values);
    } else {
      write_sf01(out, f);
    }
  });

  // bands
  auto* bands = app.add_subcommand("bands", "radial band sizes for an h x w spectrum");
  int band_h = 0, band_w = 0;
  bands->add_option("height", band_h)->required();
  bands->add_option("width", band_w)->required();
  bands->callback([&] {
    const auto counts = band_partition(band_h, band_w).counts();
    for (int b = 0; b < 3; ++b) std::printf("%s %d\n", std::string(band_name(static_cast<Band>(b))).c_str(), counts[b]);
  });

  // synth
  auto* synth = app.add_subcommand("synth", "write a procedural corpus as PNG plus a manifest");
  int synth_n = 16, synth_side = 128;
  std::uint64_t synth_seed = 0;
  fs::path synth_dir;
  std::string synth_split = "train";
  synth->add_option("--count", synth_n)->check(CLI::PositiveNumber);
  synth->add_option("--side", synth_side)->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--split", synth_split)->check(CLI::IsMember({"train", "test"}));
  synth->add_option("-o,--output", synth_dir)->required();
  synth->callback([&] {
    Rng rng(synth_seed);
    const auto corpus = synth_corpus(synth_n, synth_side, rng);
    DatasetManifest m;
    m.split = synth_split == "train" ? Split::kTrain : Split::kTest;
    fs::create_directories(synth_dir);
    for (int i = 0; i < synth_n; ++i) {
      const std::string name = "real_" + std::to_string(i) + ".png";
      write_png(synth_dir / name, corpus[i]);
      m.entries.push_back({name, Label::kReal, "synth"});
    }
    save_manifest(synth_dir / "manifest.tsv", m);
    std::printf("wrote %d images and %s\n", synth_n, (synth_dir / "manifest.tsv").string().c_str());
  });

  // fit-sim
  auto* fitsim = app.add_subcommand("fit-sim", "fit the pipeline simulator on the reals of a manifest");
  fs::path fit_manifest, fit_out;
  SimulatorConfig fit_cfg;
  std::string fit_kind = "transposed";
  int fit_images = 16;
  fitsim->add_option("manifest", fit_manifest)->required()->check(CLI::ExistingFile);
  fitsim->add_option("-o,--output", fit_out)->required();
  fitsim->add_option("--kind", fit_kind)->check(CLI::IsMember({"transposed", "nearest"}));
  fitsim->add_option("--stages", fit_cfg.stages);
  fitsim->add_option("--kernel-size", fit_cfg.kernel_size);
  fitsim->add_option("--lambda", fit_cfg.lambda);
  fitsim->add_option("--iterations", fit_cfg.fit_iterations);
  fitsim->add_option("--learning-rate", fit_cfg.learning_rate);
  fitsim->add_option("--seed", fit_cfg.seed);
  fitsim->add_option("--images", fit_images, "number of reals used for fitting")->check(CLI::PositiveNumber);
  fitsim->callback([&] {
    fit_cfg.kind = parse_upsampler_kind(fit_kind);
    const DatasetManifest m = load_manifest(fit_manifest);
    std::vector<RealTensor> reals;
    for (const ManifestEntry& e : m.entries) {
      if (e.label != Label::kReal) continue;
      if (static_cast<int>(reals.size()) == fit_images) break;
      reals.push_back(load_tensor(fit_manifest.parent_path() / e.path));
    }
    const SimulatorState st = fit(fit_cfg, reals);
    auto out = open_out(fit_out);
    save_state(out, st);
    if (!st.fit_loss_history.empty())
      std::printf("loss %.6g -> %.6g over %zu iterations\n", st.fit_loss_history.front(), st.fit_loss_history.back(),
                  st.fit_loss_history.size() - 1);
  });

  // make-fakes
  auto* fakes = app.add_subcommand("make-fakes", "reconstruct every real of a manifest through a fitted simulator");
  fs::path fakes_sim, fakes_manifest, fakes_dir;
  fakes->add_option("manifest", fakes_manifest)->required()->check(CLI::ExistingFile);
  fakes->add_option("--sim", fakes_sim)->required()->check(CLI::ExistingFile);
  fakes->add_option("-o,--output", fakes_dir)->required();
  fakes->callback([&] {
    auto in = open_in(fakes_sim);
    const SimulatorState st = load_state(in);
    DatasetManifest m = load_manifest(fakes_manifest);
    DatasetManifest out = m;
    fs::create_directories(fakes_dir);
    int made = 0;
    for (const ManifestEntry& e : m.entries) {
      if (e.label != Label::kReal) continue;
      const fs::path src = fakes_manifest.parent_path() / e.path;
      const fs::path dst = fakes_dir / ("fake_" + src.stem().string() + ".png");
      write_png(dst, reconstruct(st, load_tensor(src)));
      out.entries.push_back({fs::relative(dst, fakes_manifest.parent_path()).string(), Label::kFake, e.category});
      ++made;
    }
    save_manifest(fakes_manifest.parent_path() / (fakes_manifest.stem().string() + "_with_fakes.tsv"), out);
    std::printf("made %d fakes\n", made);
  });

  // attack
  auto* attack = app.add_subcommand("attack", "apply JPEG or resize post-processing to an image");
  fs::path attack_in, attack_out;
  std::string attack_kind = "jpeg";
  int attack_param = 0;
  std::uint64_t attack_seed = 0;
  attack->add_option("image", attack_in)->required()->check(CLI::ExistingFile);
  attack->add_option("-o,--output", attack_out)->required();
  attack->add_option("--kind", attack_kind)->check(CLI::IsMember({"none", "jpeg", "resize"}));
  attack->add_option("--param", attack_param, "JPEG quality or resize side; drawn from the standard set when omitted");
  attack->add_option("--seed", attack_seed);
  attack->callback([&] {
    const RealTensor img = load_tensor(attack_in);
    AttackDraw d{parse_attack_kind(attack_kind), attack_param};
    if (attack_param == 0) {
      Rng rng(attack_seed);
      d = draw_attack(AttackSpec{d.kind}, rng);
    }
    save_tensor(attack_out, apply_attack(img, d));
    std::printf("%s %d\n", attack_kind_name(d.kind).c_str(), d.parameter);
  });

  // train
  auto* trainc = app.add_subcommand("train", "train a detector on a labeled manifest");
  fs::path train_manifest, train_out;
  std::string train_mode = "spectrum", train_band, train_model = "logistic";
  FeatureConfig train_fc;
  TrainConfig train_tc;
  int train_hidden = 64, train_crop = 0;
  trainc->add_option("manifest", train_manifest)->required()->check(CLI::ExistingFile);
  trainc->add_option("-o,--output", train_out)->required();
  trainc->add_option("--mode", train_mode)->check(CLI::IsMember({"spectrum", "pixel"}));
  trainc->add_option("--band", train_band);
  trainc->add_option("--input-side", train_fc.input_side);
  trainc->add_option("--model", train_model)->check(CLI::IsMember({"logistic", "mlp1"}));
  trainc->add_option("--hidden", train_hidden);
  trainc->add_option("--epochs", train_tc.epochs);
  trainc->add_option("--batch-size", train_tc.batch_size);
  trainc->add_option("--learning-rate", train_tc.learning_rate);
  trainc->add_option("--seed", train_tc.seed);
  trainc->add_option("--crop", train_crop, "central square crop before features");
  trainc->callback([&] {
    train_fc.mode = parse_feature_mode(train_mode);
    train_fc.band = band_option(train_band);
    const LabeledSet data = featurize(load_set(train_manifest, train_crop), train_fc);
    const Model m = train(data, train_tc, parse_model_kind(train_model), train_fc, train_hidden);
    auto out = open_out(train_out);
    save_model(out, m);
    std::printf("final training loss %.6g\n", m.final_train_loss);
    print_metrics("train", evaluate(m, data));
  });

  // eval
  auto* evalc = app.add_subcommand("eval", "evaluate a saved detector on a labeled manifest");
  fs::path eval_model, eval_manifest;
  int eval_crop = 0;
  std::string eval_attack = "none";
  std::uint64_t eval_seed = 0;
  evalc->add_option("manifest", eval_manifest)->required()->check(CLI::ExistingFile);
  evalc->add_option("--model", eval_model)->required()->check(CLI::ExistingFile);
  evalc->add_option("--crop", eval_crop);
  evalc->add_option("--attack", eval_attack)->check(CLI::IsMember({"none", "jpeg", "resize"}));
  evalc->add_option("--seed", eval_seed, "seed for per-image attack draws");
  evalc->callback([&] {
    auto in = open_in(eval_model);
    const Model m = load_model(in);
    LoadedSet s = load_set(eval_manifest, eval_crop);
    Rng rng(eval_seed);
    const AttackSpec spec{parse_attack_kind(eval_attack)};
    for (RealTensor& img : s.images) img = apply_attack(img, spec, rng);
    print_metrics(eval_manifest.stem().string(), evaluate(m, featurize(s, m.feature_config)));
  });

  // experiment
  auto* exp = app.add_subcommand("experiment", "run a config-driven experiment and write its metrics CSV");
  fs::path exp_cfg;
  exp->add_option("config", exp_cfg)->required()->check(CLI::ExistingFile);
  exp->callback([&] {
    const ExperimentReport r = run_experiment(ExperimentConfig::load(exp_cfg));
    std::cout << r.csv();
    std::printf("wrote %s and %s\n", r.csv_path.string().c_str(), r.model_path.string().c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
