#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vgrid/frame.hpp"

namespace vgrid {

// Conditioning input: the raw frame plus the grid coordinate it anchors.
// Backends that need embeddings derive them internally.
struct Condition {
  GridCoord anchor;
  Frame frame;
};

struct DenoiseOutput {
  std::vector<Frame> conditional;                    // x-hat under the condition
  std::optional<std::vector<Frame>> unconditional;   // x-hat without conditioning, if the backend has one
};

struct BackendDescriptor {
  std::string name;
  bool concurrent_safe = true;
  bool has_unconditional = false;
  int frame_height = 0;  // 0 = unconstrained
  int frame_width = 0;
  int channels = 0;
  int max_clip_length = 0;  // 0 = unlimited
};

// Per-call context the engine always knows: the grid coordinate of every clip
// slot (in clip order, so flipped clips carry flipped coordinates) and the
// warped guidance aligned with the slots. Backends are free to ignore it.
struct ClipContext {
  std::vector<GridCoord> cells;
  const std::vector<WarpedView>* guidance = nullptr;

  ClipContext flipped() const;
};

// Conditional denoiser: maps a noisy clip at level sigma to an estimate of the
// clean clip. Implementations must be pure functions of their inputs.
class DenoiserBackend {
 public:
  virtual ~DenoiserBackend() = default;

  virtual BackendDescriptor descriptor() const = 0;
  virtual DenoiseOutput denoise(const std::vector<Frame>& x_t, double sigma,
                                const Condition& condition, const ClipContext& ctx) = 0;

  void check_clip(const std::vector<Frame>& x_t, double sigma) const;
};

// Returns its input unchanged.
class IdentityDenoiser : public DenoiserBackend {
 public:
  BackendDescriptor descriptor() const override;
  DenoiseOutput denoise(const std::vector<Frame>& x_t, double sigma, const Condition& condition,
                        const ClipContext& ctx) override;
};

// Exact posterior mean for a N(mu, tau^2 I) prior observed at noise level
// sigma: (tau^2 x + sigma^2 mu) / (tau^2 + sigma^2).
class GaussianAnalyticDenoiser : public DenoiserBackend {
 public:
  GaussianAnalyticDenoiser(double mu, double tau);

  BackendDescriptor descriptor() const override;
  DenoiseOutput denoise(const std::vector<Frame>& x_t, double sigma, const Condition& condition,
                        const ClipContext& ctx) override;

 private:
  double mu_;
  double tau_;
};

using BackendPtr = std::shared_ptr<DenoiserBackend>;

}  // namespace vgrid
