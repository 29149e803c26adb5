#include "vgrid/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace vgrid {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

void require_views(int n_views) {
  if (n_views < 2) throw std::invalid_argument("trajectory needs n_views >= 2");
}

Eigen::Matrix3d rot_y(double angle_rad) {
  double c = std::cos(angle_rad);
  double s = std::sin(angle_rad);
  Eigen::Matrix3d r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

// Camera-from-world pose for a world-from-camera frame (R_wc, center).
Pose pose_from_world_frame(const Eigen::Matrix3d& r_wc, const Eigen::Vector3d& center) {
  Pose p;
  p.rotation = r_wc.transpose();
  p.translation = -(p.rotation * center);
  return p;
}

}  // namespace

void Intrinsics::validate() const {
  if (!(fx > 0) || !(fy > 0)) throw std::invalid_argument("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw std::invalid_argument("intrinsics: image size must be positive");
  if (!(cx >= 0 && cx < width) || !(cy >= 0 && cy < height)) {
    throw std::invalid_argument("intrinsics: principal point out of image bounds");
  }
  require_finite(fx, "fx");
  require_finite(fy, "fy");
  require_finite(cx, "cx");
  require_finite(cy, "cy");
}

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

bool Pose::is_valid_rotation(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  Eigen::Matrix3d err = rotation * rotation.transpose() - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > tol) return false;
  return std::fabs(rotation.determinant() - 1.0) <= tol;
}

void Pose::validate() const {
  if (!is_valid_rotation()) throw std::invalid_argument("pose: rotation must be orthonormal with det +1");
}

bool approx_equal(const Pose& a, const Pose& b, double tol) {
  return (a.rotation - b.rotation).cwiseAbs().maxCoeff() <= tol &&
         (a.translation - b.translation).cwiseAbs().maxCoeff() <= tol;
}

std::string to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::Orbit: return "orbit";
    case TrajectoryKind::Dolly: return "dolly";
    case TrajectoryKind::Elevation: return "elevation";
    case TrajectoryKind::Complex: return "complex";
    case TrajectoryKind::Custom: return "custom";
  }
  return "custom";
}

void Trajectory::validate() const {
  if (poses.size() < 2) throw std::invalid_argument("trajectory: need at least 2 poses");
  for (const Pose& p : poses) p.validate();
  if (!approx_equal(poses.front(), Pose::identity())) {
    throw std::invalid_argument("trajectory: pose 0 must be the identity (input camera)");
  }
}

Pose relative_transform(const Pose& pose_i, const Pose& pose_j) {
  Pose rel;
  rel.rotation = pose_j.rotation * pose_i.rotation.transpose();
  rel.translation = pose_j.translation - rel.rotation * pose_i.translation;
  return rel;
}

Eigen::Vector2d project(const Eigen::Vector3d& point, const Intrinsics& K) {
  if (!(point.z() > 0)) throw std::invalid_argument("project: point is behind the camera");
  return {K.fx * point.x() / point.z() + K.cx, K.fy * point.y() / point.z() + K.cy};
}

Eigen::Vector3d unproject(const Eigen::Vector2d& pixel, double depth, const Intrinsics& K) {
  if (!(depth > 0)) throw std::invalid_argument("unproject: depth must be positive");
  return {(pixel.x() - K.cx) / K.fx * depth, (pixel.y() - K.cy) / K.fy * depth, depth};
}

Pose look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& target) {
  Eigen::Vector3d forward = target - center;
  double dist = forward.norm();
  if (dist < 1e-12) throw std::invalid_argument("look_at: camera center coincides with target");
  forward /= dist;
  const Eigen::Vector3d world_down(0, 1, 0);
  Eigen::Vector3d right = world_down.cross(forward);
  double rn = right.norm();
  if (rn < 1e-12) throw std::invalid_argument("look_at: viewing direction is vertical");
  right /= rn;
  Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d r_wc;
  r_wc.col(0) = right;
  r_wc.col(1) = down;
  r_wc.col(2) = forward;
  return pose_from_world_frame(r_wc, center);
}

Trajectory make_orbit_trajectory(double center_depth, double max_angle_deg, int n_views) {
  require_views(n_views);
  require_finite(center_depth, "center_depth");
  require_finite(max_angle_deg, "max_angle");
  if (!(center_depth > 0)) throw std::invalid_argument("orbit: center_depth must be positive");
  if (!(max_angle_deg > -180.0 && max_angle_deg < 180.0)) {
    throw std::invalid_argument("orbit: max_angle must lie in (-180, 180)");
  }
  const Eigen::Vector3d pivot(0, 0, center_depth);
  Trajectory traj;
  traj.kind = TrajectoryKind::Orbit;
  traj.poses.reserve(n_views);
  for (int n = 0; n < n_views; ++n) {
    double angle = kDegToRad * max_angle_deg * n / (n_views - 1);
    Eigen::Matrix3d r = rot_y(angle);
    Eigen::Vector3d center = pivot + r * (-pivot);
    traj.poses.push_back(pose_from_world_frame(r, center));
  }
  traj.poses[0] = Pose::identity();
  return traj;
}

Trajectory make_dolly_trajectory(double distance, int n_views) {
  require_views(n_views);
  require_finite(distance, "distance");
  Trajectory traj;
  traj.kind = TrajectoryKind::Dolly;
  traj.poses.reserve(n_views);
  for (int n = 0; n < n_views; ++n) {
    double s = distance * n / (n_views - 1);
    Pose p;
    p.translation = Eigen::Vector3d(0, 0, -s);  // center at (0, 0, s)
    traj.poses.push_back(p);
  }
  return traj;
}

Intrinsics make_dolly_zoom_intrinsics(const Intrinsics& K, double subject_depth, double advance) {
  if (!(subject_depth > 0)) throw std::invalid_argument("dolly zoom: subject_depth must be positive");
  if (!(subject_depth - advance > 0)) {
    throw std::invalid_argument("dolly zoom: camera would pass through the subject plane");
  }
  // Keep fx * depth ratio constant for the subject plane.
  double scale = (subject_depth - advance) / subject_depth;
  Intrinsics out = K;
  out.fx *= scale;
  out.fy *= scale;
  return out;
}

Trajectory make_elevation_trajectory(double height, double pivot_depth, int n_views) {
  require_views(n_views);
  require_finite(height, "height");
  require_finite(pivot_depth, "pivot_depth");
  if (!(pivot_depth > 0)) throw std::invalid_argument("elevation: pivot_depth must be positive");
  const Eigen::Vector3d pivot(0, 0, pivot_depth);
  Trajectory traj;
  traj.kind = TrajectoryKind::Elevation;
  traj.poses.reserve(n_views);
  for (int n = 0; n < n_views; ++n) {
    double h = height * n / (n_views - 1);
    Eigen::Vector3d center(0, -h, 0);  // +height is up, world +y is down
    traj.poses.push_back(look_at(center, pivot));
  }
  traj.poses[0] = Pose::identity();
  return traj;
}

Trajectory make_complex_trajectory(const std::vector<Eigen::Vector3d>& waypoints,
                                   double pivot_depth, int n_views) {
  require_views(n_views);
  if (waypoints.size() < 2) throw std::invalid_argument("complex: need at least 2 waypoints");
  if (!(pivot_depth > 0)) throw std::invalid_argument("complex: pivot_depth must be positive");
  std::vector<double> cum{0.0};
  for (size_t k = 1; k < waypoints.size(); ++k) {
    cum.push_back(cum.back() + (waypoints[k] - waypoints[k - 1]).norm());
  }
  if (!(cum.back() > 0)) throw std::invalid_argument("complex: degenerate path, all waypoints equal");

  const Eigen::Vector3d pivot(0, 0, pivot_depth);
  Trajectory traj;
  traj.kind = TrajectoryKind::Complex;
  traj.poses.reserve(n_views);
  for (int n = 0; n < n_views; ++n) {
    double s = cum.back() * n / (n_views - 1);
    size_t seg = 1;
    while (seg + 1 < cum.size() && s > cum[seg]) ++seg;
    double seg_len = cum[seg] - cum[seg - 1];
    double u = seg_len > 0 ? (s - cum[seg - 1]) / seg_len : 0.0;
    Eigen::Vector3d center = waypoints[seg - 1] + u * (waypoints[seg] - waypoints[seg - 1]);
    traj.poses.push_back(look_at(center, pivot));
  }
  if (waypoints[0].norm() == 0.0) traj.poses[0] = Pose::identity();
  return traj;
}

Trajectory make_custom_trajectory(const std::vector<Eigen::Vector3d>& centers) {
  if (centers.size() < 2) throw std::invalid_argument("custom: need at least 2 centers");
  Trajectory traj;
  traj.kind = TrajectoryKind::Custom;
  traj.poses.reserve(centers.size());
  for (const auto& c : centers) {
    if (!c.allFinite()) throw std::invalid_argument("custom: centers must be finite");
    Pose p;
    p.translation = -c;
    traj.poses.push_back(p);
  }
  return traj;
}

}  // namespace vgrid
