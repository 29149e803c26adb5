#pragma once

#include "vgrid/denoiser.hpp"
#include "vgrid/scene.hpp"

namespace vgrid {

enum class GridAxis { Camera, Time };

// Verification backend: the conditional estimate is the exact rendered
// ground-truth clip for the cells being denoised, independent of x_t and
// sigma. In the default mode the cells come from the call's ClipContext; a
// pinned instance always answers with one fixed grid row or column.
class IdealDenoiser : public DenoiserBackend {
 public:
  IdealDenoiser(const SyntheticScene& scene, const Trajectory& trajectory, const Intrinsics& K);

  BackendDescriptor descriptor() const override;
  DenoiseOutput denoise(const std::vector<Frame>& x_t, double sigma, const Condition& condition,
                        const ClipContext& ctx) override;

  const Frame& ground_truth(const GridCoord& cell) const;

 protected:
  RenderedGrid grid_;

 private:
  std::vector<Frame> clip_for(const std::vector<Frame>& x_t, const ClipContext& ctx) const;
};

// The addressed-line form: always returns the ground-truth clip along one
// grid row (axis=Time) or column (axis=Camera), in forward slot order.
BackendPtr ideal_denoiser(const SyntheticScene& scene, const Trajectory& trajectory,
                          const Intrinsics& K, GridAxis axis, int index);

// Ideal estimate degraded the way a generative inpainter degrades: wherever
// the accompanying occlusion mask marks a pixel missing, the estimate keeps a
// `persistence` fraction of the clip's mean deviation from ground truth
// instead of snapping to it. Visible pixels stay exact. With no guidance
// attached, every pixel is treated as missing.
class NoisyIdealDenoiser : public IdealDenoiser {
 public:
  NoisyIdealDenoiser(const SyntheticScene& scene, const Trajectory& trajectory, const Intrinsics& K,
                     double persistence);

  BackendDescriptor descriptor() const override;
  DenoiseOutput denoise(const std::vector<Frame>& x_t, double sigma, const Condition& condition,
                        const ClipContext& ctx) override;

 private:
  double persistence_;
};

}  // namespace vgrid
