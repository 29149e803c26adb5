#include "vgrid/denoiser.hpp"

#include <stdexcept>

namespace vgrid {

ClipContext ClipContext::flipped() const {
  ClipContext out;
  out.cells.assign(cells.rbegin(), cells.rend());
  out.guidance = nullptr;  // caller re-binds flipped guidance storage
  return out;
}

void DenoiserBackend::check_clip(const std::vector<Frame>& x_t, double sigma) const {
  if (x_t.empty()) throw std::invalid_argument("denoise: empty clip");
  if (!(sigma > 0)) throw std::invalid_argument("denoise: sigma must be positive");
  BackendDescriptor d = descriptor();
  if (d.max_clip_length > 0 && static_cast<int>(x_t.size()) > d.max_clip_length) {
    throw std::invalid_argument("denoise: clip exceeds backend limit");
  }
  for (const Frame& f : x_t) {
    if (!f.same_shape(x_t.front())) throw std::invalid_argument("denoise: ragged clip shapes");
    if (d.frame_height > 0 &&
        (f.height != d.frame_height || f.width != d.frame_width || f.channels != d.channels)) {
      throw std::invalid_argument("denoise: clip shape violates backend descriptor");
    }
  }
}

BackendDescriptor IdentityDenoiser::descriptor() const {
  BackendDescriptor d;
  d.name = "identity";
  d.concurrent_safe = true;
  d.has_unconditional = false;
  return d;
}

DenoiseOutput IdentityDenoiser::denoise(const std::vector<Frame>& x_t, double sigma,
                                        const Condition& condition, const ClipContext& ctx) {
  (void)condition;
  (void)ctx;
  check_clip(x_t, sigma);
  return DenoiseOutput{x_t, std::nullopt};
}

GaussianAnalyticDenoiser::GaussianAnalyticDenoiser(double mu, double tau) : mu_(mu), tau_(tau) {
  if (!(tau > 0)) throw std::invalid_argument("gaussian backend: tau must be positive");
}

BackendDescriptor GaussianAnalyticDenoiser::descriptor() const {
  BackendDescriptor d;
  d.name = "gaussian";
  d.concurrent_safe = true;
  d.has_unconditional = false;
  return d;
}

DenoiseOutput GaussianAnalyticDenoiser::denoise(const std::vector<Frame>& x_t, double sigma,
                                                const Condition& condition, const ClipContext& ctx) {
  (void)condition;
  (void)ctx;
  check_clip(x_t, sigma);
  const double tau2 = tau_ * tau_;
  const double s2 = sigma * sigma;
  DenoiseOutput out;
  out.conditional = x_t;
  for (Frame& f : out.conditional) {
    for (float& v : f.data) v = static_cast<float>((tau2 * v + s2 * mu_) / (tau2 + s2));
  }
  return out;
}

}  // namespace vgrid
