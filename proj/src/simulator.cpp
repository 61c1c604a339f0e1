#include "ganspec/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ganspec/config.hpp"
#include "ganspec/errors.hpp"
#include "ganspec/fft.hpp"
#include "ganspec/numeric.hpp"
#include "ganspec/rng.hpp"

namespace ganspec {

namespace {

constexpr int kStageFactor = 2;
constexpr double kStageGain = 4.0;  // kStageFactor^2

void check_divisible(const RealTensor& img, int stages) {
  const int block = 1 << stages;
  if (img.height() % block != 0 || img.width() % block != 0) {
    throw SizeError("simulator: image " + std::to_string(img.height()) + "x" +
                    std::to_string(img.width()) + " not divisible by " + std::to_string(block));
  }
}

RealTensor encode(const RealTensor& img, int stages) {
  RealTensor z = img;
  for (int s = 0; s < stages; ++s) z = downsample(z, kStageFactor, DownsampleMode::kAverage);
  return z;
}

Kernel2D scaled(const Kernel2D& k, double gain) {
  Kernel2D out = k;
  for (double& t : out.taps()) t *= gain;
  return out;
}

// Decoder forward pass keeping every stage input for the backward pass.
struct DecoderTrace {
  std::vector<RealTensor> inputs;  // low-resolution input of each stage
  RealTensor output;
};

DecoderTrace decode(const std::vector<Kernel2D>& kernels, RealTensor z) {
  DecoderTrace trace;
  for (const Kernel2D& k : kernels) {
    trace.inputs.push_back(z);
    z = conv2d(zero_insert(z, kStageFactor), scaled(k, kStageGain), Padding::kZero);
  }
  trace.output = std::move(z);
  return trace;
}

// Maps an unshifted DFT bin to its label in the DC-centered partition.
std::vector<std::uint8_t> unshifted_high_mask(const BandPartition& part) {
  const int h = part.height, w = part.width;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(h) * w, 0);
  for (int u = 0; u < h; ++u) {
    for (int v = 0; v < w; ++v) {
      mask[static_cast<std::size_t>(u) * w + v] =
          part.label((u + h / 2) % h, (v + w / 2) % w) == Band::kHigh ? 1 : 0;
    }
  }
  return mask;
}

// Mean of log(|DFT| + floor) over the high band of every channel. When
// `spectra` is non-null the per-channel spectra are kept for the gradient.
double high_band_energy(const RealTensor& img, const std::vector<std::uint8_t>& mask,
                        double floor, std::vector<std::vector<Complex>>* spectra) {
  const int h = img.height(), w = img.width(), ch = img.channels();
  const std::size_t n = static_cast<std::size_t>(h) * w;
  const FftPlan rows(static_cast<std::size_t>(w));
  const FftPlan cols(static_cast<std::size_t>(h));
  double total = 0.0;
  std::size_t count = 0;
  if (spectra) spectra->assign(ch, {});
  std::vector<Complex> plane(n), column(h);
  for (int c = 0; c < ch; ++c) {
    for (std::size_t i = 0; i < n; ++i) plane[i] = {img.data()[i * ch + c], 0.0};
    // Serial 2D transform: images are already processed in parallel.
    for (int y = 0; y < h; ++y) rows.forward(std::span(plane).subspan(static_cast<std::size_t>(y) * w, w));
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) column[y] = plane[static_cast<std::size_t>(y) * w + x];
      cols.forward(column);
      for (int y = 0; y < h; ++y) plane[static_cast<std::size_t>(y) * w + x] = column[y];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      total += std::log(std::sqrt(std::norm(plane[i])) + floor);
      ++count;
    }
    if (spectra) (*spectra)[c] = plane;
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

// d HF / d img from the kept spectra: Re(DFT(c)) with
// c_b = conj(Y_b) / (|Y_b| (|Y_b| + floor)) on high-band bins.
RealTensor high_band_energy_gradient(const std::vector<std::vector<Complex>>& spectra, int h,
                                     int w, const std::vector<std::uint8_t>& mask, double floor) {
  const int ch = static_cast<int>(spectra.size());
  const std::size_t n = static_cast<std::size_t>(h) * w;
  std::size_t count = 0;
  for (auto m : mask) count += m;
  const double norm = 1.0 / (static_cast<double>(count) * ch);
  const FftPlan rows(static_cast<std::size_t>(w));
  const FftPlan cols(static_cast<std::size_t>(h));
  RealTensor grad(h, w, ch);
  std::vector<Complex> plane(n), column(h);
  for (int c = 0; c < ch; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      plane[i] = Complex{};
      if (!mask[i]) continue;
      const double mag = std::sqrt(std::norm(spectra[c][i]));
      if (mag > 0.0) plane[i] = std::conj(spectra[c][i]) * (1.0 / (mag * (mag + floor)));
    }
    for (int y = 0; y < h; ++y) rows.forward(std::span(plane).subspan(static_cast<std::size_t>(y) * w, w));
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) column[y] = plane[static_cast<std::size_t>(y) * w + x];
      cols.forward(column);
      for (int y = 0; y < h; ++y) plane[static_cast<std::size_t>(y) * w + x] = column[y];
    }
    for (std::size_t i = 0; i < n; ++i) grad.data()[i * ch + c] = plane[i].real() * norm;
  }
  return grad;
}

struct ImageTerm {
  double loss = 0.0;
  std::vector<Kernel2D> gradient;
};

ImageTerm image_objective(const SimulatorState& state, const RealTensor& img, double reference_hf,
                          const std::vector<std::uint8_t>& mask, bool want_gradient) {
  const SimulatorConfig& cfg = state.config;
  const DecoderTrace trace = decode(state.decoder_kernels, encode(img, cfg.stages));
  const RealTensor& out = trace.output;
  const std::size_t n = out.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double delta = cfg.smooth_delta;

  ImageTerm term;
  RealTensor grad_out(out.height(), out.width(), out.channels());
  double data_loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = out.data()[i] - img.data()[i];
    const double r = std::sqrt(d * d + delta * delta);
    data_loss += r - delta;
    grad_out.data()[i] = d / r * inv_n;
  }
  data_loss *= inv_n;

  double reg = 0.0;
  if (cfg.lambda > 0.0) {
    std::vector<std::vector<Complex>> spectra;
    const double hf = high_band_energy(out, mask, cfg.hf_floor, want_gradient ? &spectra : nullptr);
    const double diff = hf - reference_hf;
    reg = std::abs(diff);
    if (want_gradient && diff != 0.0) {
      const RealTensor g =
          high_band_energy_gradient(spectra, out.height(), out.width(), mask, cfg.hf_floor);
      const double coef = cfg.lambda * (diff > 0.0 ? 1.0 : -1.0);
      for (std::size_t i = 0; i < n; ++i) grad_out.data()[i] += coef * g.data()[i];
    }
  }
  term.loss = data_loss + cfg.lambda * reg;
  if (!want_gradient) return term;

  // Backward through the decoder stages.
  const int stages = static_cast<int>(state.decoder_kernels.size());
  term.gradient.resize(stages);
  RealTensor g = std::move(grad_out);
  for (int s = stages - 1; s >= 0; --s) {
    const Kernel2D& k = state.decoder_kernels[s];
    const RealTensor& z = trace.inputs[s];
    const int zh = z.height(), zw = z.width(), ch = z.channels();
    const int h = g.height(), w = g.width();
    const int ar = k.anchor_row(), ac = k.anchor_col();
    Kernel2D gk(k.rows(), k.cols(), 0.0);
    RealTensor gz(zh, zw, ch);
    // Output (y, x) reads zero-inserted input (y - a + ar, x - b + ac), which
    // is z(i, j) when that position equals (2i, 2j).
    for (int i = 0; i < zh; ++i) {
      for (int j = 0; j < zw; ++j) {
        for (int a = 0; a < k.rows(); ++a) {
          const int y = 2 * i + a - ar;
          if (y < 0 || y >= h) continue;
          for (int b = 0; b < k.cols(); ++b) {
            const int x = 2 * j + b - ac;
            if (x < 0 || x >= w) continue;
            for (int c = 0; c < ch; ++c) {
              const double go = g.at(y, x, c);
              gk.at(a, b) += kStageGain * go * z.at(i, j, c);
              gz.at(i, j, c) += kStageGain * k.at(a, b) * go;
            }
          }
        }
      }
    }
    term.gradient[s] = std::move(gk);
    g = std::move(gz);
  }
  return term;
}

std::vector<double> reference_energies(const SimulatorConfig& cfg,
                                       std::span<const RealTensor> corpus,
                                       const std::vector<std::uint8_t>& mask) {
  std::vector<double> refs(corpus.size(), 0.0);
  if (cfg.lambda <= 0.0) return refs;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    refs[i] = high_band_energy(corpus[i], mask, cfg.hf_floor, nullptr);
  }
  return refs;
}

void check_corpus(const SimulatorConfig& cfg, std::span<const RealTensor> corpus) {
  if (corpus.empty()) throw std::invalid_argument("simulator fit: empty corpus");
  for (const RealTensor& img : corpus) {
    check_divisible(img, cfg.stages);
    if (!img.same_shape(corpus.front())) {
      throw ShapeError("simulator fit: corpus images must share one shape");
    }
  }
}

FitObjective objective_with_refs(const SimulatorState& state, std::span<const RealTensor> corpus,
                                 const std::vector<double>& refs,
                                 const std::vector<std::uint8_t>& mask, bool want_gradient) {
  std::vector<ImageTerm> terms(corpus.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    terms[i] = image_objective(state, corpus[i], refs[i], mask, want_gradient);
  }
  FitObjective result;
  const double inv = 1.0 / static_cast<double>(corpus.size());
  if (want_gradient) {
    for (const Kernel2D& k : state.decoder_kernels) result.gradient.emplace_back(k.rows(), k.cols(), 0.0);
  }
  for (const ImageTerm& t : terms) {
    result.loss += t.loss * inv;
    if (!want_gradient) continue;
    for (std::size_t s = 0; s < t.gradient.size(); ++s) {
      auto dst = result.gradient[s].taps();
      auto src = t.gradient[s].taps();
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j] * inv;
    }
  }
  return result;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void SimulatorConfig::validate() const {
  if (stages < 1) throw std::invalid_argument("simulator: stages must be >= 1");
  if (kernel_size < 1) throw std::invalid_argument("simulator: kernel_size must be >= 1");
  if (lambda < 0.0) throw std::invalid_argument("simulator: lambda must be >= 0");
  if (fit_iterations < 0) throw std::invalid_argument("simulator: fit_iterations must be >= 0");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("simulator: learning_rate must be > 0");
  if (init_scale < 0.0) throw std::invalid_argument("simulator: init_scale must be >= 0");
  if (!(smooth_delta > 0.0) || !(hf_floor > 0.0)) {
    throw std::invalid_argument("simulator: smooth_delta and hf_floor must be > 0");
  }
  if (kind == UpsamplerKind::kLearned) {
    throw std::invalid_argument("simulator: kind must be transposed or nearest");
  }
}

SimulatorState initial_state(const SimulatorConfig& config) {
  config.validate();
  SimulatorState state{config, {}, {}};
  Rng rng(config.seed);
  for (int s = 0; s < config.stages; ++s) {
    if (config.kind == UpsamplerKind::kNearest) {
      state.decoder_kernels.emplace_back(2, 2, 0.25);
      continue;
    }
    const int ks = config.kernel_size;
    Kernel2D k(ks, ks, 0.0);
    const int anchor = k.anchor_row();
    for (int a = anchor; a < std::min(anchor + 2, ks); ++a) {
      for (int b = anchor; b < std::min(anchor + 2, ks); ++b) k.at(a, b) = 0.25;
    }
    for (double& t : k.taps()) t += rng.uniform(-config.init_scale, config.init_scale);
    state.decoder_kernels.push_back(std::move(k));
  }
  return state;
}

RealTensor reconstruct_unclamped(const SimulatorState& state, const RealTensor& img) {
  check_divisible(img, state.config.stages);
  if (static_cast<int>(state.decoder_kernels.size()) != state.config.stages) {
    throw ShapeError("simulator: kernel count does not match stage count");
  }
  return decode(state.decoder_kernels, encode(img, state.config.stages)).output;
}

RealTensor reconstruct(const SimulatorState& state, const RealTensor& img) {
  RealTensor out = reconstruct_unclamped(state, img);
  for (double& v : out.data()) v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
  return out;
}

FitObjective fit_objective(const SimulatorState& state, std::span<const RealTensor> corpus) {
  check_corpus(state.config, corpus);
  const RealTensor& first = corpus.front();
  const auto mask = unshifted_high_mask(band_partition(first.height(), first.width()));
  const auto refs = reference_energies(state.config, corpus, mask);
  return objective_with_refs(state, corpus, refs, mask, true);
}

SimulatorState fit(const SimulatorConfig& config, std::span<const RealTensor> corpus) {
  SimulatorState state = initial_state(config);
  check_corpus(config, corpus);
  const RealTensor& first = corpus.front();
  const auto mask = unshifted_high_mask(band_partition(first.height(), first.width()));
  const auto refs = reference_energies(config, corpus, mask);

  const bool learnable = config.kind != UpsamplerKind::kNearest;
  FitObjective current = objective_with_refs(state, corpus, refs, mask, learnable);
  state.fit_loss_history.push_back(current.loss);
  if (!learnable) return state;

  constexpr int kMaxHalvings = 30;
  for (int it = 0; it < config.fit_iterations; ++it) {
    double step = config.learning_rate;
    bool accepted = false;
    for (int attempt = 0; attempt <= kMaxHalvings && !accepted; ++attempt, step *= 0.5) {
      SimulatorState candidate = state;
      for (std::size_t s = 0; s < candidate.decoder_kernels.size(); ++s) {
        auto taps = candidate.decoder_kernels[s].taps();
        auto grad = current.gradient[s].taps();
        for (std::size_t j = 0; j < taps.size(); ++j) taps[j] -= step * grad[j];
      }
      FitObjective next = objective_with_refs(candidate, corpus, refs, mask, true);
      if (std::isfinite(next.loss) && next.loss <= current.loss) {
        state.decoder_kernels = std::move(candidate.decoder_kernels);
        current = std::move(next);
        accepted = true;
      }
    }
    if (!accepted) break;
    state.fit_loss_history.push_back(current.loss);
  }
  return state;
}

SpectrumFeature artifact_spectrum(const SimulatorState& state, const RealTensor& img) {
  return log_spectrum(reconstruct(state, img));
}

void save_state(std::ostream& out, const SimulatorState& state) {
  const SimulatorConfig& c = state.config;
  out << "stages = " << c.stages << '\n'
      << "kernel_size = " << c.kernel_size << '\n'
      << "kind = " << upsampler_kind_name(c.kind) << '\n'
      << "lambda = " << format_double(c.lambda) << '\n'
      << "fit_iterations = " << c.fit_iterations << '\n'
      << "learning_rate = " << format_double(c.learning_rate) << '\n'
      << "seed = " << c.seed << '\n'
      << "init_scale = " << format_double(c.init_scale) << '\n'
      << "smooth_delta = " << format_double(c.smooth_delta) << '\n'
      << "hf_floor = " << format_double(c.hf_floor) << '\n';
  out << "fit_loss_history = ";
  for (std::size_t i = 0; i < state.fit_loss_history.size(); ++i) {
    out << (i ? "," : "") << format_double(state.fit_loss_history[i]);
  }
  out << '\n';
  for (std::size_t s = 0; s < state.decoder_kernels.size(); ++s) {
    out << "[stage " << s + 1 << "]\n";
    write_kernel(out, state.decoder_kernels[s]);
  }
}

SimulatorState load_state(std::istream& in) {
  std::stringstream header;
  std::string line;
  std::vector<Kernel2D> kernels;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.rfind("[stage", 0) == 0) {
      kernels.push_back(read_kernel(in));
      continue;
    }
    if (!kernels.empty() && !t.empty()) throw IoError("simulator state: text after kernels");
    header << line << '\n';
  }
  const KeyValueConfig kv = KeyValueConfig::parse(header);
  SimulatorState state;
  SimulatorConfig& c = state.config;
  c.stages = kv.get_int("stages", c.stages);
  c.kernel_size = kv.get_int("kernel_size", c.kernel_size);
  c.kind = parse_upsampler_kind(kv.get("kind", "transposed"));
  c.lambda = kv.get_double("lambda", c.lambda);
  c.fit_iterations = kv.get_int("fit_iterations", c.fit_iterations);
  c.learning_rate = kv.get_double("learning_rate", c.learning_rate);
  c.seed = kv.get_u64("seed", c.seed);
  c.init_scale = kv.get_double("init_scale", c.init_scale);
  c.smooth_delta = kv.get_double("smooth_delta", c.smooth_delta);
  c.hf_floor = kv.get_double("hf_floor", c.hf_floor);
  c.validate();
  for (const std::string& v : kv.get_list("fit_loss_history")) {
    state.fit_loss_history.push_back(std::stod(v));
  }
  if (static_cast<int>(kernels.size()) != c.stages) {
    throw IoError("simulator state: expected " + std::to_string(c.stages) + " stage kernels");
  }
  state.decoder_kernels = std::move(kernels);
  return state;
}

}  // namespace ganspec
