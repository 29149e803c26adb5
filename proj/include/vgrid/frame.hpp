#pragma once

#include <cstdint>
#include <vector>

namespace vgrid {

// Dense H x W x C float image. Used both for [0,1] pixel content and for
// unconstrained sampler states.
struct Frame {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<float> data;  // row-major (y, x, c)

  Frame() = default;
  Frame(int h, int w, int c);

  static Frame zeros(int h, int w, int c = 1) { return Frame(h, w, c); }
  static Frame constant(int h, int w, int c, float value);

  float& at(int y, int x, int c = 0) { return data[(static_cast<size_t>(y) * width + x) * channels + c]; }
  float at(int y, int x, int c = 0) const { return data[(static_cast<size_t>(y) * width + x) * channels + c]; }

  size_t size() const { return data.size(); }
  bool same_shape(const Frame& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
  bool all_finite() const;
};

bool bit_equal(const Frame& a, const Frame& b);
float max_abs_diff(const Frame& a, const Frame& b);

struct DepthMap {
  int height = 0;
  int width = 0;
  std::vector<float> data;  // scene units, strictly positive

  DepthMap() = default;
  DepthMap(int h, int w, float fill = 1.0f);

  float& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
  float at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }
};

// Binary map; 1 marks pixels the warp could not cover (missing), 0 marks
// visible warped content.
struct OcclusionMask {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> data;

  OcclusionMask() = default;
  OcclusionMask(int h, int w, uint8_t fill = 1);

  uint8_t& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
  uint8_t at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }

  size_t missing_count() const;
};

// A warped frame together with its occlusion mask. Invariant: pixels with
// mask=1 hold the value 0 in every channel.
struct WarpedView {
  Frame frame;
  OcclusionMask mask;

  bool consistent() const;
};

// Grid coordinate: view index along the camera axis, time index along the
// temporal axis. Both 0-based.
struct GridCoord {
  int view = 0;
  int time = 0;

  bool operator==(const GridCoord&) const = default;
};

// An ordered list of frames moving along one grid axis, tracked at a noise
// level sigma.
struct ClipState {
  std::vector<Frame> frames;
  double sigma = 0.0;

  int length() const { return static_cast<int>(frames.size()); }
};

std::vector<Frame> flip_frames(const std::vector<Frame>& frames);
std::vector<WarpedView> flip_views(const std::vector<WarpedView>& views);

}  // namespace vgrid
