#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ganspec/spectral.hpp"
#include "ganspec/tensor.hpp"
#include "ganspec/upsampler.hpp"

namespace ganspec {

/// AutoGAN-lite: an averaging encoder followed by a decoder of zero-insert
/// up-samplers whose kernels are fitted to reconstruct the input.
///
/// Decoder kernels are stored with unit DC gain: each stage applies
/// conv(zero_insert(z, 2), 4 * kernel), so a kernel whose taps sum to 1 on
/// every output phase reproduces constants.
///
/// The fit objective per image I with output G = decode(encode(I)) is
///   smooth_l1(I, G) + lambda * |HF(G) - HF(I)|
/// where smooth_l1 is the Charbonnier mean sqrt(d^2 + delta^2) - delta and
/// HF is the mean of log(|DFT| + hf_floor) over the high-band bins of every
/// channel. The second term stands in for a discriminator: it penalizes
/// outputs whose high-frequency energy drifts from the input's. The loss is
/// evaluated on the unclamped decoder output.
struct SimulatorConfig {
  int stages = 2;
  int kernel_size = 3;
  UpsamplerKind kind = UpsamplerKind::kTransposed;
  double lambda = 0.5;
  int fit_iterations = 200;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
  /// Half-width of the uniform noise added to the warm-start kernel.
  double init_scale = 0.1;
  double smooth_delta = 1e-3;
  double hf_floor = 1e-3;

  void validate() const;
};

struct SimulatorState {
  SimulatorConfig config;
  std::vector<Kernel2D> decoder_kernels;  // one per stage, shared across channels
  std::vector<double> fit_loss_history;   // loss before the first step, then after each step
};

/// Seeded starting point: the 2x2 box / 4 (nearest-neighbor replication)
/// embedded in a kernel_size kernel plus uniform noise in
/// [-init_scale, init_scale]. The nearest kind uses the exact 2x2 box / 4.
SimulatorState initial_state(const SimulatorConfig& config);

/// Encoder: `stages` 2x average downsamples. Decoder: `stages` zero-insert
/// up-samplers with zero padding. Output is clamped to [0, 1].
RealTensor reconstruct(const SimulatorState& state, const RealTensor& img);
/// Decoder output before clamping (the quantity the fit loss sees).
RealTensor reconstruct_unclamped(const SimulatorState& state, const RealTensor& img);

struct FitObjective {
  double loss = 0.0;
  std::vector<Kernel2D> gradient;  // d loss / d kernel, per stage
};

/// Mean objective over the corpus and its analytic gradient with respect to
/// the decoder kernels. Per-image terms are evaluated in parallel and summed
/// in corpus order.
FitObjective fit_objective(const SimulatorState& state, std::span<const RealTensor> corpus);

/// Full-batch gradient descent from initial_state(config). A step that would
/// raise the loss is retried with the step halved (up to 30 times); if no
/// halving helps the fit stops. The nearest kind has nothing to learn and
/// returns after one loss evaluation.
SimulatorState fit(const SimulatorConfig& config, std::span<const RealTensor> corpus);

/// log_spectrum(reconstruct(state, img)).
SpectrumFeature artifact_spectrum(const SimulatorState& state, const RealTensor& img);

/// "key = value" config block followed by one "[stage N]" section per
/// decoder kernel in the kernel text format.
void save_state(std::ostream& out, const SimulatorState& state);
SimulatorState load_state(std::istream& in);

}  // namespace ganspec
