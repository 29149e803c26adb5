#pragma once

#include "vgrid/sampler.hpp"

namespace vgrid {

struct BidiStepConfig {
  ResidualMode residual_mode = ResidualMode::Unconditional;
  bool apply_warp_guidance = true;
};

// One bidirectional interpolation step: denoise under the start condition,
// guide, Euler-step, re-noise, flip the clip (with its guidance), denoise
// under the end condition, guide, Euler-step, flip back. Returns the clip at
// sigma_prev.
ClipState bidi_step(const ClipState& x_t, double sigma_t, double sigma_prev,
                    const Condition& c_start, const Condition& c_end,
                    const std::vector<WarpedView>& warped, DenoiserBackend& denoiser, Rng& rng,
                    const BidiStepConfig& cfg, const ClipContext& ctx);

// Full interpolation loop between two conditioning frames. The conditioning
// frames are written into the first and last clip slots, noised to the
// current level before each step and exactly at sigma = 0.
std::vector<Frame> interpolate_clip(const std::vector<WarpedView>& warped,
                                    const Condition& c_start, const Condition& c_end,
                                    DenoiserBackend& denoiser, const NoiseSchedule& schedule,
                                    Rng& rng, const BidiStepConfig& cfg, const ClipContext& ctx);

}  // namespace vgrid
