#pragma once

#include <cstdint>
#include <vector>

#include "vgrid/frame.hpp"
#include "vgrid/geometry.hpp"

namespace vgrid {

enum class MotionKind { Linear, Circular };

// Procedural two-layer world: a fronto-parallel background plane at z_bg and a
// moving square quad at z_fg, both carrying piecewise-constant cell textures
// (hashed color per cell blended with a large-scale gradient). Exact depth and
// disocclusion sets are analytically known, so renders serve as ground truth.
struct SyntheticScene {
  int height = 64;
  int width = 64;
  int channels = 1;
  int n_frames = 9;

  double z_bg = 2.0;
  double z_fg = 1.0;
  double fg_half_size = 0.22;          // scene units
  Eigen::Vector2d fg_start{-0.25, 0.0};  // quad center at t=0 (world x, y)
  Eigen::Vector2d fg_end{0.25, 0.0};     // quad center at t=F-1 (linear motion)
  double fg_orbit_radius = 0.25;       // circular motion radius
  MotionKind motion = MotionKind::Linear;

  double bg_cell = 0.25;  // texture cell edge in scene units on the plane
  double fg_cell = 0.0625;
  uint64_t texture_seed = 7;

  void validate() const;
  Eigen::Vector2d fg_center(int time_index) const;
};

Frame render_frame(const SyntheticScene& scene, const Pose& pose, int time_index,
                   const Intrinsics& K);
DepthMap render_depth(const SyntheticScene& scene, const Pose& pose, int time_index,
                      const Intrinsics& K);

struct RenderedGrid {
  int n_views = 0;
  int n_frames = 0;
  std::vector<Frame> frames;               // N x F ground truth
  std::vector<DepthMap> input_depths;      // depth of row 0, per time index

  Frame& at(int view, int time) { return frames[static_cast<size_t>(view) * n_frames + time]; }
  const Frame& at(int view, int time) const {
    return frames[static_cast<size_t>(view) * n_frames + time];
  }
};

RenderedGrid render_grid(const SyntheticScene& scene, const Trajectory& trajectory,
                         const Intrinsics& K);

// Intrinsics matching the scene's frame dimensions with a centered principal
// point and power-of-two focal length (so lateral reprojection offsets of the
// form k/32 stay exact in binary floating point).
Intrinsics scene_intrinsics(const SyntheticScene& scene);

}  // namespace vgrid
