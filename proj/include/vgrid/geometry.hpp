#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace vgrid {

// Pinhole intrinsics. Pixel coordinates are continuous with integer pixel
// centers; (cx, cy) is expressed in those coordinates.
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
};

// Rigid camera pose, camera-from-world: X_cam = rotation * X_world + translation.
// Axes are right-handed with +z forward and +y down, matching pixel rows.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose identity() { return Pose{}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
  Pose inverse() const;
  Eigen::Vector3d center() const { return -(rotation.transpose() * translation); }

  // Orthonormality with det +1, within tol.
  bool is_valid_rotation(double tol = 1e-9) const;
  void validate() const;
};

bool approx_equal(const Pose& a, const Pose& b, double tol = 1e-9);

enum class TrajectoryKind { Orbit, Dolly, Elevation, Complex, Custom };

std::string to_string(TrajectoryKind kind);

struct Trajectory {
  std::vector<Pose> poses;
  TrajectoryKind kind = TrajectoryKind::Custom;

  int n_views() const { return static_cast<int>(poses.size()); }
  void validate() const;
};

// Relative transform mapping camera-i coordinates into camera-j coordinates:
// X_j = R * X_i + t with R = R_j R_i^T, t = t_j - R t_i.
Pose relative_transform(const Pose& pose_i, const Pose& pose_j);

Eigen::Vector2d project(const Eigen::Vector3d& point, const Intrinsics& K);
Eigen::Vector3d unproject(const Eigen::Vector2d& pixel, double depth, const Intrinsics& K);

// Camera-from-world pose of a camera at `center` whose optical axis passes
// through `target`, with +y kept as close to world +y (down) as possible.
Pose look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& target);

// Horizontal sweep about a vertical axis through the point at center_depth on
// the input optical axis. Angles run uniformly from 0 to max_angle_deg;
// pose 0 is the identity.
Trajectory make_orbit_trajectory(double center_depth, double max_angle_deg, int n_views);

// Pure translation along the optical axis, uniformly spaced over [0, distance].
// Positive distance moves the camera forward (dolly-in). Intrinsics are left
// untouched; see make_dolly_zoom_intrinsics for the optional focal adjustment.
Trajectory make_dolly_trajectory(double distance, int n_views);

// Optional companion to make_dolly_trajectory: scales the focal length so a
// subject plane at subject_depth keeps its projected size as the camera
// advances by `advance`. Off by default everywhere; the warp operates with a
// single fixed K.
Intrinsics make_dolly_zoom_intrinsics(const Intrinsics& K, double subject_depth, double advance);

// Vertical translation with the orientation adjusted so the point at
// pivot_depth on the input optical axis stays on the optical axis. Positive
// height moves the camera up (world -y).
Trajectory make_elevation_trajectory(double height, double pivot_depth, int n_views);

// Piecewise-linear camera centers through the waypoints, sampled uniformly in
// arc length, each pose looking at the pivot point on the input optical axis.
Trajectory make_complex_trajectory(const std::vector<Eigen::Vector3d>& waypoints,
                                   double pivot_depth, int n_views);

// Explicit camera centers with identity orientation (pure translations).
Trajectory make_custom_trajectory(const std::vector<Eigen::Vector3d>& centers);

}  // namespace vgrid
