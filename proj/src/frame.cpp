#include "vgrid/frame.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace vgrid {

Frame::Frame(int h, int w, int c) : height(h), width(w), channels(c) {
  if (h <= 0 || w <= 0 || (c != 1 && c != 3)) {
    throw std::invalid_argument("Frame: dims must be positive and channels 1 or 3");
  }
  data.assign(static_cast<size_t>(h) * w * c, 0.0f);
}

Frame Frame::constant(int h, int w, int c, float value) {
  Frame f(h, w, c);
  std::fill(f.data.begin(), f.data.end(), value);
  return f;
}

bool Frame::all_finite() const {
  for (float v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool bit_equal(const Frame& a, const Frame& b) {
  if (!a.same_shape(b)) return false;
  return std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(float)) == 0;
}

float max_abs_diff(const Frame& a, const Frame& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
  float m = 0.0f;
  for (size_t i = 0; i < a.data.size(); ++i) {
    m = std::max(m, std::fabs(a.data[i] - b.data[i]));
  }
  return m;
}

DepthMap::DepthMap(int h, int w, float fill) : height(h), width(w) {
  if (h <= 0 || w <= 0) throw std::invalid_argument("DepthMap: dims must be positive");
  data.assign(static_cast<size_t>(h) * w, fill);
}

OcclusionMask::OcclusionMask(int h, int w, uint8_t fill) : height(h), width(w) {
  if (h <= 0 || w <= 0) throw std::invalid_argument("OcclusionMask: dims must be positive");
  data.assign(static_cast<size_t>(h) * w, fill);
}

size_t OcclusionMask::missing_count() const {
  size_t n = 0;
  for (uint8_t m : data) n += (m != 0);
  return n;
}

bool WarpedView::consistent() const {
  if (frame.height != mask.height || frame.width != mask.width) return false;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      if (mask.at(y, x) > 1) return false;
      if (mask.at(y, x) == 1) {
        for (int c = 0; c < frame.channels; ++c) {
          if (frame.at(y, x, c) != 0.0f) return false;
        }
      }
    }
  }
  return true;
}

std::vector<Frame> flip_frames(const std::vector<Frame>& frames) {
  return {frames.rbegin(), frames.rend()};
}

std::vector<WarpedView> flip_views(const std::vector<WarpedView>& views) {
  return {views.rbegin(), views.rend()};
}

}  // namespace vgrid
