#include "vgrid/bidi.hpp"

#include <cmath>
#include <stdexcept>

namespace vgrid {

namespace {

// One directional pass: estimate under `condition`, guide, Euler-step.
ClipState directional_pass(const ClipState& x_t, double sigma_t, double sigma_prev,
                           const Condition& condition, const std::vector<WarpedView>& warped,
                           DenoiserBackend& denoiser, const BidiStepConfig& cfg,
                           const ClipContext& ctx) {
  DenoiseOutput est = denoiser.denoise(x_t.frames, sigma_t, condition, ctx);
  std::vector<Frame> target =
      cfg.apply_warp_guidance ? warp_guided_estimate(est.conditional, warped) : est.conditional;
  const std::vector<Frame>& residual = select_residual(cfg.residual_mode, est, target);

  ClipState out;
  out.sigma = sigma_prev;
  out.frames = std::move(target);
  const float ratio = static_cast<float>(sigma_prev / sigma_t);
  for (size_t s = 0; s < out.frames.size(); ++s) {
    const auto& xt = x_t.frames[s].data;
    const auto& xr = residual[s].data;
    auto& y = out.frames[s].data;
    for (size_t i = 0; i < y.size(); ++i) y[i] = y[i] + ratio * (xt[i] - xr[i]);
  }
  return out;
}

void write_slot(std::vector<Frame>& frames, int slot, const Frame& content, double sigma, Rng& rng) {
  Frame f = content;
  if (sigma > 0) {
    const float scale = static_cast<float>(sigma);
    for (float& v : f.data) v += scale * rng.normal_f();
  }
  frames[slot] = std::move(f);
}

}  // namespace

ClipState bidi_step(const ClipState& x_t, double sigma_t, double sigma_prev,
                    const Condition& c_start, const Condition& c_end,
                    const std::vector<WarpedView>& warped, DenoiserBackend& denoiser, Rng& rng,
                    const BidiStepConfig& cfg, const ClipContext& ctx) {
  if (!(sigma_t > 0)) throw std::invalid_argument("bidi_step: sigma_t must be positive");
  if (!(sigma_prev < sigma_t)) throw std::invalid_argument("bidi_step: sigma_prev must decrease");
  if (x_t.frames.size() != warped.size()) throw std::invalid_argument("bidi_step: clip length mismatch");
  if (x_t.frames.size() < 2) throw std::invalid_argument("bidi_step: clip needs at least two slots");

  // Forward pass under the start condition.
  ClipState forward = directional_pass(x_t, sigma_t, sigma_prev, c_start, warped, denoiser, cfg, ctx);

  // Re-noise to sigma_t, then reverse the clip together with its guidance.
  ClipState renoised = renoise(forward, sigma_t, sigma_prev, rng);
  ClipState flipped;
  flipped.sigma = renoised.sigma;
  flipped.frames = flip_frames(renoised.frames);
  std::vector<WarpedView> warped_flipped = flip_views(warped);
  ClipContext ctx_flipped = ctx.flipped();
  ctx_flipped.guidance = &warped_flipped;

  // Backward pass under the end condition, then restore clip order.
  ClipState backward = directional_pass(flipped, sigma_t, sigma_prev, c_end, warped_flipped,
                                        denoiser, cfg, ctx_flipped);
  ClipState out;
  out.sigma = sigma_prev;
  out.frames = flip_frames(backward.frames);
  return out;
}

std::vector<Frame> interpolate_clip(const std::vector<WarpedView>& warped, const Condition& c_start,
                                    const Condition& c_end, DenoiserBackend& denoiser,
                                    const NoiseSchedule& schedule, Rng& rng,
                                    const BidiStepConfig& cfg, const ClipContext& ctx) {
  schedule.validate();
  if (warped.size() < 2) throw std::invalid_argument("interpolate_clip: clip needs at least two slots");
  const int length = static_cast<int>(warped.size());

  ClipState x;
  x.sigma = schedule.sigmas.front();
  x.frames.reserve(length);
  for (const WarpedView& view : warped) {
    Frame f = Frame::zeros(view.frame.height, view.frame.width, view.frame.channels);
    const float scale = static_cast<float>(x.sigma);
    for (float& v : f.data) v = scale * rng.normal_f();
    x.frames.push_back(std::move(f));
  }

  for (int i = 0; i < schedule.steps(); ++i) {
    const double sigma = schedule.sigmas[i];
    const double sigma_prev = schedule.sigmas[i + 1];
    write_slot(x.frames, 0, c_start.frame, sigma, rng);
    write_slot(x.frames, length - 1, c_end.frame, sigma, rng);
    try {
      x = bidi_step(x, sigma, sigma_prev, c_start, c_end, warped, denoiser, rng, cfg, ctx);
    } catch (const std::exception& e) {
      throw std::runtime_error("interpolation failed at step " + std::to_string(i) + ": " + e.what());
    }
  }
  write_slot(x.frames, 0, c_start.frame, 0.0, rng);
  write_slot(x.frames, length - 1, c_end.frame, 0.0, rng);
  return x.frames;
}

}  // namespace vgrid
