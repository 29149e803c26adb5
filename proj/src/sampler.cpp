#include "vgrid/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace vgrid {

namespace {

void check_shapes(const ClipState& x_t, const std::vector<Frame>& x_hat) {
  if (x_t.frames.size() != x_hat.size()) throw std::invalid_argument("sampler: clip length mismatch");
  for (size_t s = 0; s < x_hat.size(); ++s) {
    if (!x_t.frames[s].same_shape(x_hat[s])) throw std::invalid_argument("sampler: frame shape mismatch");
  }
}

std::vector<Frame> draw_noise_clip(const std::vector<WarpedView>& shape_like, double sigma,
                                   Rng& rng) {
  std::vector<Frame> frames;
  frames.reserve(shape_like.size());
  for (const WarpedView& view : shape_like) {
    Frame f = Frame::zeros(view.frame.height, view.frame.width, view.frame.channels);
    for (float& v : f.data) v = static_cast<float>(sigma) * rng.normal_f();
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace

void AnnealingParams::validate(int total_steps) const {
  if (t_guide < 0 || t_guide > total_steps) {
    throw std::invalid_argument("annealing: t_guide must lie in [0, steps]");
  }
  if (r_guide < 1 || r_guide > r_total) {
    throw std::invalid_argument("annealing: need 1 <= r_guide <= r_total");
  }
}

ClipState euler_step(const ClipState& x_t, const std::vector<Frame>& x_hat, double sigma_t,
                     double sigma_prev) {
  if (!(sigma_t > 0)) throw std::invalid_argument("euler_step: sigma_t must be positive");
  if (!(sigma_prev < sigma_t)) throw std::invalid_argument("euler_step: sigma_prev must decrease");
  check_shapes(x_t, x_hat);
  const float ratio = static_cast<float>(sigma_prev / sigma_t);
  ClipState out;
  out.sigma = sigma_prev;
  out.frames = x_hat;
  for (size_t s = 0; s < out.frames.size(); ++s) {
    const auto& xt = x_t.frames[s].data;
    const auto& xh = x_hat[s].data;
    auto& y = out.frames[s].data;
    for (size_t i = 0; i < y.size(); ++i) y[i] = xh[i] + ratio * (xt[i] - xh[i]);
  }
  return out;
}

std::vector<Frame> warp_guided_estimate(const std::vector<Frame>& x_hat,
                                        const std::vector<WarpedView>& warped) {
  if (x_hat.size() != warped.size()) throw std::invalid_argument("guidance: clip length mismatch");
  std::vector<Frame> out = x_hat;
  for (size_t s = 0; s < out.size(); ++s) {
    Frame& f = out[s];
    const WarpedView& w = warped[s];
    if (f.height != w.mask.height || f.width != w.mask.width || !f.same_shape(w.frame)) {
      throw std::invalid_argument("guidance: warped view shape mismatch");
    }
    for (int y = 0; y < f.height; ++y) {
      for (int x = 0; x < f.width; ++x) {
        if (w.mask.at(y, x) == 0) {
          for (int c = 0; c < f.channels; ++c) f.at(y, x, c) = w.frame.at(y, x, c);
        }
      }
    }
  }
  return out;
}

ClipState guided_euler_step(const ClipState& x_t, const std::vector<Frame>& x_hat,
                            const std::vector<WarpedView>& warped, double sigma_t,
                            double sigma_prev) {
  if (!(sigma_t > 0)) throw std::invalid_argument("guided_euler_step: sigma_t must be positive");
  if (!(sigma_prev < sigma_t)) throw std::invalid_argument("guided_euler_step: sigma_prev must decrease");
  check_shapes(x_t, x_hat);
  std::vector<Frame> guided = warp_guided_estimate(x_hat, warped);
  const float ratio = static_cast<float>(sigma_prev / sigma_t);
  ClipState out;
  out.sigma = sigma_prev;
  out.frames = std::move(guided);
  for (size_t s = 0; s < out.frames.size(); ++s) {
    const auto& xt = x_t.frames[s].data;
    const auto& xh = x_hat[s].data;  // residual keeps the unguided estimate
    auto& y = out.frames[s].data;
    for (size_t i = 0; i < y.size(); ++i) y[i] = y[i] + ratio * (xt[i] - xh[i]);
  }
  return out;
}

ClipState renoise(const ClipState& x_prev, double sigma_t, double sigma_prev, Rng& rng) {
  if (sigma_prev > sigma_t) throw std::invalid_argument("renoise: sigma_prev must not exceed sigma_t");
  const float scale = static_cast<float>(std::sqrt(sigma_t * sigma_t - sigma_prev * sigma_prev));
  ClipState out = x_prev;
  out.sigma = sigma_t;
  if (scale == 0.0f) return out;
  for (Frame& f : out.frames) {
    for (float& v : f.data) v += scale * rng.normal_f();
  }
  return out;
}

const std::vector<Frame>& select_residual(ResidualMode mode, const DenoiseOutput& out,
                                          const std::vector<Frame>& guided) {
  switch (mode) {
    case ResidualMode::Unconditional:
      return out.unconditional ? *out.unconditional : out.conditional;
    case ResidualMode::Guided:
      return guided;
    case ResidualMode::Conditional:
      break;
  }
  return out.conditional;
}

std::vector<Frame> sample_warp_guided_clip(DenoiserBackend& denoiser,
                                           const std::vector<WarpedView>& warped,
                                           const Condition& condition,
                                           const NoiseSchedule& schedule,
                                           const AnnealingParams& annealing, Rng& rng,
                                           const ClipContext& ctx, ResidualMode residual_mode) {
  schedule.validate();
  const int total_steps = schedule.steps();
  annealing.validate(total_steps);
  if (warped.empty()) throw std::invalid_argument("sample: empty warped clip");
  if (condition.frame.height != warped.front().frame.height ||
      condition.frame.width != warped.front().frame.width) {
    throw std::invalid_argument("sample: condition frame shape mismatch");
  }

  ClipState x;
  x.sigma = schedule.sigmas.front();
  x.frames = draw_noise_clip(warped, x.sigma, rng);

  for (int i = 0; i < total_steps; ++i) {
    const double sigma = schedule.sigmas[i];
    const double sigma_prev = schedule.sigmas[i + 1];
    const bool annealed = i < annealing.t_guide;
    const int rounds = annealed ? annealing.r_total : 1;
    for (int r = 1; r <= rounds; ++r) {
      DenoiseOutput est;
      try {
        est = denoiser.denoise(x.frames, sigma, condition, ctx);
      } catch (const std::exception& e) {
        throw std::runtime_error("denoiser failed at step " + std::to_string(i) + " round " +
                                 std::to_string(r) + ": " + e.what());
      }
      const bool guide = annealed && r <= annealing.r_guide;
      std::vector<Frame> target =
          guide ? warp_guided_estimate(est.conditional, warped) : est.conditional;
      const std::vector<Frame>& residual = select_residual(residual_mode, est, target);
      ClipState next;
      next.sigma = sigma_prev;
      next.frames = target;
      const float ratio = static_cast<float>(sigma_prev / sigma);
      for (size_t s = 0; s < next.frames.size(); ++s) {
        const auto& xt = x.frames[s].data;
        const auto& xr = residual[s].data;
        auto& y = next.frames[s].data;
        for (size_t k = 0; k < y.size(); ++k) y[k] = y[k] + ratio * (xt[k] - xr[k]);
      }
      if (r < rounds) {
        // Re-draw the level-sigma state around the round's target estimate.
        const float noise = static_cast<float>(sigma);
        for (size_t s = 0; s < x.frames.size(); ++s) {
          auto& xs = x.frames[s].data;
          const auto& tgt = target[s].data;
          for (size_t k = 0; k < xs.size(); ++k) xs[k] = tgt[k] + noise * rng.normal_f();
        }
      } else {
        x = std::move(next);
      }
    }
  }
  return x.frames;
}

}  // namespace vgrid
