#include "vgrid/ideal_backend.hpp"

#include <stdexcept>

namespace vgrid {

IdealDenoiser::IdealDenoiser(const SyntheticScene& scene, const Trajectory& trajectory,
                             const Intrinsics& K) {
  grid_ = render_grid(scene, trajectory, K);
}

BackendDescriptor IdealDenoiser::descriptor() const {
  BackendDescriptor d;
  d.name = "ideal";
  d.concurrent_safe = true;
  d.has_unconditional = false;
  return d;
}

const Frame& IdealDenoiser::ground_truth(const GridCoord& cell) const {
  if (cell.view < 0 || cell.view >= grid_.n_views || cell.time < 0 || cell.time >= grid_.n_frames) {
    throw std::invalid_argument("ideal backend: grid coordinate out of range");
  }
  return grid_.at(cell.view, cell.time);
}

std::vector<Frame> IdealDenoiser::clip_for(const std::vector<Frame>& x_t,
                                           const ClipContext& ctx) const {
  if (ctx.cells.size() != x_t.size()) {
    throw std::invalid_argument("ideal backend: needs one grid coordinate per clip slot");
  }
  std::vector<Frame> clip;
  clip.reserve(ctx.cells.size());
  for (const GridCoord& cell : ctx.cells) clip.push_back(ground_truth(cell));
  return clip;
}

DenoiseOutput IdealDenoiser::denoise(const std::vector<Frame>& x_t, double sigma,
                                     const Condition& condition, const ClipContext& ctx) {
  (void)condition;
  check_clip(x_t, sigma);
  return DenoiseOutput{clip_for(x_t, ctx), std::nullopt};
}

namespace {

class PinnedIdealDenoiserImpl : public IdealDenoiser {
 public:
  PinnedIdealDenoiserImpl(const SyntheticScene& scene, const Trajectory& trajectory,
                          const Intrinsics& K, GridAxis axis, int index)
      : IdealDenoiser(scene, trajectory, K), axis_(axis), index_(index) {
    int limit = axis == GridAxis::Camera ? grid_.n_frames : grid_.n_views;
    if (index < 0 || index >= limit) {
      throw std::invalid_argument("ideal backend: addressed line out of range");
    }
  }

  DenoiseOutput denoise(const std::vector<Frame>& x_t, double sigma, const Condition& condition,
                        const ClipContext& ctx) override {
    (void)condition;
    (void)ctx;
    check_clip(x_t, sigma);
    int length = axis_ == GridAxis::Camera ? grid_.n_views : grid_.n_frames;
    if (static_cast<int>(x_t.size()) != length) {
      throw std::invalid_argument("ideal backend: clip length does not match the addressed line");
    }
    std::vector<Frame> clip;
    clip.reserve(length);
    for (int s = 0; s < length; ++s) {
      clip.push_back(axis_ == GridAxis::Camera ? grid_.at(s, index_) : grid_.at(index_, s));
    }
    return DenoiseOutput{std::move(clip), std::nullopt};
  }

 private:
  GridAxis axis_;
  int index_;
};

}  // namespace

BackendPtr ideal_denoiser(const SyntheticScene& scene, const Trajectory& trajectory,
                          const Intrinsics& K, GridAxis axis, int index) {
  return std::make_shared<PinnedIdealDenoiserImpl>(scene, trajectory, K, axis, index);
}

NoisyIdealDenoiser::NoisyIdealDenoiser(const SyntheticScene& scene, const Trajectory& trajectory,
                                       const Intrinsics& K, double persistence)
    : IdealDenoiser(scene, trajectory, K), persistence_(persistence) {
  if (!(persistence >= 0.0) || !(persistence < 1.0)) {
    throw std::invalid_argument("noisy-ideal backend: persistence must lie in [0, 1)");
  }
}

BackendDescriptor NoisyIdealDenoiser::descriptor() const {
  BackendDescriptor d;
  d.name = "noisy-ideal";
  d.concurrent_safe = true;
  d.has_unconditional = false;
  return d;
}

DenoiseOutput NoisyIdealDenoiser::denoise(const std::vector<Frame>& x_t, double sigma,
                                          const Condition& condition, const ClipContext& ctx) {
  (void)condition;
  check_clip(x_t, sigma);
  if (ctx.cells.size() != x_t.size()) {
    throw std::invalid_argument("noisy-ideal backend: needs one grid coordinate per clip slot");
  }
  const int length = static_cast<int>(x_t.size());
  const Frame& shape = x_t.front();
  const bool have_guidance =
      ctx.guidance != nullptr && static_cast<int>(ctx.guidance->size()) == length;

  // Mean deviation of the noisy clip from ground truth, per pixel across slots.
  std::vector<float> dev(shape.size(), 0.0f);
  std::vector<const Frame*> gt(length);
  for (int s = 0; s < length; ++s) {
    gt[s] = &ground_truth(ctx.cells[s]);
    for (size_t i = 0; i < dev.size(); ++i) dev[i] += x_t[s].data[i] - gt[s]->data[i];
  }
  const float inv_len = 1.0f / static_cast<float>(length);
  for (float& v : dev) v *= inv_len;

  DenoiseOutput out;
  out.conditional.reserve(length);
  for (int s = 0; s < length; ++s) {
    Frame est = *gt[s];
    const OcclusionMask* mask = have_guidance ? &(*ctx.guidance)[s].mask : nullptr;
    for (int y = 0; y < est.height; ++y) {
      for (int x = 0; x < est.width; ++x) {
        if (mask != nullptr && mask->at(y, x) == 0) continue;
        for (int c = 0; c < est.channels; ++c) {
          size_t i = (static_cast<size_t>(y) * est.width + x) * est.channels + c;
          est.data[i] += static_cast<float>(persistence_) * dev[i];
        }
      }
    }
    out.conditional.push_back(std::move(est));
  }
  return out;
}

}  // namespace vgrid
