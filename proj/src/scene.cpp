#include "vgrid/scene.hpp"

#include <cmath>
#include <stdexcept>

#include "vgrid/rng.hpp"

namespace vgrid {

namespace {

// Per-cell pseudo-random value in [0, 1], stable across runs.
inline double cell_random(uint64_t seed, int layer, long iu, long iv, int channel) {
  uint64_t h = derive_seed(seed, {static_cast<uint64_t>(layer), static_cast<uint64_t>(iu) * 2654435761u,
                                  static_cast<uint64_t>(iv) * 40503u, static_cast<uint64_t>(channel)});
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline float texture_value(uint64_t seed, int layer, double u, double v, double cell, int channel) {
  long iu = static_cast<long>(std::floor(u / cell));
  long iv = static_cast<long>(std::floor(v / cell));
  double noise = cell_random(seed, layer, iu, iv, channel);
  double grad = 0.5 + 0.5 * std::sin(0.37 * iu + 0.61 * iv + 1.7 * channel + layer);
  return static_cast<float>(0.55 * noise + 0.45 * grad);
}

struct Hit {
  double world_x = 0.0;
  double world_y = 0.0;
  double cam_depth = 0.0;
  bool foreground = false;
};

inline Hit cast_ray(const SyntheticScene& scene, const Pose& pose, const Eigen::Vector2d& fg_center,
                    int x, int y, const Intrinsics& K) {
  Eigen::Vector3d dir_cam((x - K.cx) / K.fx, (y - K.cy) / K.fy, 1.0);
  Eigen::Matrix3d r_wc = pose.rotation.transpose();
  Eigen::Vector3d center = -(r_wc * pose.translation);
  Eigen::Vector3d dir = r_wc * dir_cam;
  if (!(dir.z() > 0)) throw std::runtime_error("render: ray does not reach the scene planes");

  auto plane_hit = [&](double plane_z) {
    double s = (plane_z - center.z()) / dir.z();
    return Eigen::Vector3d(center.x() + s * dir.x(), center.y() + s * dir.y(), plane_z);
  };

  Hit hit;
  Eigen::Vector3d p_fg = plane_hit(scene.z_fg);
  if (p_fg.z() > center.z() && std::fabs(p_fg.x() - fg_center.x()) <= scene.fg_half_size &&
      std::fabs(p_fg.y() - fg_center.y()) <= scene.fg_half_size) {
    hit.foreground = true;
    hit.world_x = p_fg.x();
    hit.world_y = p_fg.y();
    hit.cam_depth = (pose.rotation * p_fg + pose.translation).z();
    return hit;
  }
  Eigen::Vector3d p_bg = plane_hit(scene.z_bg);
  hit.world_x = p_bg.x();
  hit.world_y = p_bg.y();
  hit.cam_depth = (pose.rotation * p_bg + pose.translation).z();
  if (!(hit.cam_depth > 0)) throw std::runtime_error("render: surface behind the camera");
  return hit;
}

}  // namespace

void SyntheticScene::validate() const {
  if (height <= 0 || width <= 0 || (channels != 1 && channels != 3) || n_frames < 1) {
    throw std::invalid_argument("scene: bad frame dimensions");
  }
  if (!(z_fg > 0) || !(z_bg > z_fg)) throw std::invalid_argument("scene: need 0 < z_fg < z_bg");
  if (!(fg_half_size > 0) || !(bg_cell > 0) || !(fg_cell > 0)) {
    throw std::invalid_argument("scene: sizes must be positive");
  }
}

Eigen::Vector2d SyntheticScene::fg_center(int time_index) const {
  if (time_index < 0 || time_index >= n_frames) {
    throw std::invalid_argument("scene: time index out of range");
  }
  if (n_frames == 1) return fg_start;
  double u = static_cast<double>(time_index) / (n_frames - 1);
  if (motion == MotionKind::Linear) {
    return fg_start + u * (fg_end - fg_start);
  }
  double theta = 2.0 * M_PI * u;
  return fg_start + fg_orbit_radius * Eigen::Vector2d(std::cos(theta) - 1.0, std::sin(theta));
}

Frame render_frame(const SyntheticScene& scene, const Pose& pose, int time_index,
                   const Intrinsics& K) {
  scene.validate();
  Eigen::Vector2d q = scene.fg_center(time_index);
  Frame out(scene.height, scene.width, scene.channels);
  for (int y = 0; y < scene.height; ++y) {
    for (int x = 0; x < scene.width; ++x) {
      Hit hit = cast_ray(scene, pose, q, x, y, K);
      for (int c = 0; c < scene.channels; ++c) {
        float v;
        if (hit.foreground) {
          v = texture_value(scene.texture_seed, 1, hit.world_x - q.x() + scene.fg_half_size,
                            hit.world_y - q.y() + scene.fg_half_size, scene.fg_cell, c);
        } else {
          v = texture_value(scene.texture_seed, 0, hit.world_x, hit.world_y, scene.bg_cell, c);
        }
        out.at(y, x, c) = v;
      }
    }
  }
  return out;
}

DepthMap render_depth(const SyntheticScene& scene, const Pose& pose, int time_index,
                      const Intrinsics& K) {
  scene.validate();
  Eigen::Vector2d q = scene.fg_center(time_index);
  DepthMap out(scene.height, scene.width);
  for (int y = 0; y < scene.height; ++y) {
    for (int x = 0; x < scene.width; ++x) {
      out.at(y, x) = static_cast<float>(cast_ray(scene, pose, q, x, y, K).cam_depth);
    }
  }
  return out;
}

RenderedGrid render_grid(const SyntheticScene& scene, const Trajectory& trajectory,
                         const Intrinsics& K) {
  scene.validate();
  RenderedGrid grid;
  grid.n_views = trajectory.n_views();
  grid.n_frames = scene.n_frames;
  grid.frames.reserve(static_cast<size_t>(grid.n_views) * grid.n_frames);
  for (int n = 0; n < grid.n_views; ++n) {
    for (int i = 0; i < grid.n_frames; ++i) {
      grid.frames.push_back(render_frame(scene, trajectory.poses[n], i, K));
    }
  }
  grid.input_depths.reserve(grid.n_frames);
  for (int i = 0; i < grid.n_frames; ++i) {
    grid.input_depths.push_back(render_depth(scene, trajectory.poses[0], i, K));
  }
  return grid;
}

Intrinsics scene_intrinsics(const SyntheticScene& scene) {
  Intrinsics K;
  K.width = scene.width;
  K.height = scene.height;
  K.fx = scene.width;
  K.fy = scene.width;
  K.cx = (scene.width - 1) / 2.0;
  K.cy = (scene.height - 1) / 2.0;
  return K;
}

}  // namespace vgrid
