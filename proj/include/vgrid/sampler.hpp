#pragma once

#include "vgrid/denoiser.hpp"
#include "vgrid/frame.hpp"
#include "vgrid/rng.hpp"
#include "vgrid/schedule.hpp"

namespace vgrid {

// Which estimate forms the Euler residual (x_t - estimate). The plain update
// uses the conditional estimate; the unconditional variant falls back to the
// conditional one when the backend has no unconditional branch.
enum class ResidualMode { Unconditional, Conditional, Guided };

// Resampling annealing knobs: the first t_guide timesteps run r_total
// denoise/guide/re-draw rounds, with warp guidance mixed in for the first
// r_guide rounds of each.
struct AnnealingParams {
  int t_guide = 0;
  int r_total = 1;
  int r_guide = 1;

  void validate(int total_steps) const;
};

// x_{t-1} = x_hat + (sigma_prev / sigma_t) * (x_t - x_hat), elementwise.
ClipState euler_step(const ClipState& x_t, const std::vector<Frame>& x_hat, double sigma_t,
                     double sigma_prev);

// Occlusion-masked mix: visible pixels (mask=0) take the warped value
// bit-exactly, missing pixels keep the estimate.
std::vector<Frame> warp_guided_estimate(const std::vector<Frame>& x_hat,
                                        const std::vector<WarpedView>& warped);

// Guided update: the warped mix replaces the estimate as the step target while
// the residual keeps the unguided estimate.
ClipState guided_euler_step(const ClipState& x_t, const std::vector<Frame>& x_hat,
                            const std::vector<WarpedView>& warped, double sigma_t,
                            double sigma_prev);

// Raises a state from sigma_prev back to sigma_t by adding
// sqrt(sigma_t^2 - sigma_prev^2) * eps.
ClipState renoise(const ClipState& x_prev, double sigma_t, double sigma_prev, Rng& rng);

// Full conditional sampling loop for one clip: fresh noise at the top level,
// annealed warp-guided rounds for the early timesteps, plain conditional Euler
// steps after, returning the clean clip at sigma = 0.
std::vector<Frame> sample_warp_guided_clip(DenoiserBackend& denoiser,
                                           const std::vector<WarpedView>& warped,
                                           const Condition& condition,
                                           const NoiseSchedule& schedule,
                                           const AnnealingParams& annealing, Rng& rng,
                                           const ClipContext& ctx,
                                           ResidualMode residual_mode = ResidualMode::Conditional);

// Residual-source selection shared by the samplers.
const std::vector<Frame>& select_residual(ResidualMode mode, const DenoiseOutput& out,
                                          const std::vector<Frame>& guided);

}  // namespace vgrid
