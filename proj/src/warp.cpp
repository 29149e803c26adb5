#include "vgrid/warp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vgrid {

namespace {

struct ReprojectedPoint {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;  // target-space z
  bool in_front = false;
};

// Shared scalar kernel. The exact expression shapes here are the contract
// both warp_frame and oracle_warp_frame round through; keep them in sync.
inline ReprojectedPoint reproject_scalar(double x, double y, double d, const Eigen::Matrix3d& R,
                                         const Eigen::Vector3d& t, const Intrinsics& K) {
  ReprojectedPoint out;
  double px = (x - K.cx) / K.fx * d;
  double py = (y - K.cy) / K.fy * d;
  double pz = d;
  double jx = R(0, 0) * px + R(0, 1) * py + R(0, 2) * pz + t(0);
  double jy = R(1, 0) * px + R(1, 1) * py + R(1, 2) * pz + t(1);
  double jz = R(2, 0) * px + R(2, 1) * py + R(2, 2) * pz + t(2);
  if (!(jz > 0)) return out;
  out.u = K.fx * jx / jz + K.cx;
  out.v = K.fy * jy / jz + K.cy;
  out.depth = jz;
  out.in_front = true;
  return out;
}

}  // namespace

std::optional<Eigen::Vector2d> reproject_pixel(const Eigen::Vector2d& r_i, double depth,
                                               const Pose& P, const Intrinsics& K) {
  if (!(depth > 0)) throw std::invalid_argument("reproject_pixel: depth must be positive");
  ReprojectedPoint rp = reproject_scalar(r_i.x(), r_i.y(), depth, P.rotation, P.translation, K);
  if (!rp.in_front) return std::nullopt;
  return Eigen::Vector2d(rp.u, rp.v);
}

WarpedView warp_frame(const Frame& src, const DepthMap& depth, const Pose& P, const Intrinsics& K) {
  if (src.height != depth.height || src.width != depth.width) {
    throw std::invalid_argument("warp_frame: frame and depth dimensions differ");
  }
  const int h = src.height;
  const int w = src.width;
  WarpedView out;
  out.frame = Frame::zeros(h, w, src.channels);
  out.mask = OcclusionMask(h, w, 1);
  std::vector<double> zbuf(static_cast<size_t>(h) * w, std::numeric_limits<double>::infinity());

  const Eigen::Matrix3d& R = P.rotation;
  const Eigen::Vector3d& t = P.translation;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double d = depth.at(y, x);
      if (!(d > 0) || !std::isfinite(d)) {
        throw std::invalid_argument("warp_frame: depth must be finite and positive");
      }
      ReprojectedPoint rp = reproject_scalar(x, y, d, R, t, K);
      if (!rp.in_front) continue;
      long tx = std::lround(rp.u);
      long ty = std::lround(rp.v);
      if (tx < 0 || tx >= w || ty < 0 || ty >= h) continue;
      size_t idx = static_cast<size_t>(ty) * w + tx;
      if (rp.depth < zbuf[idx]) {
        zbuf[idx] = rp.depth;
        out.mask.at(static_cast<int>(ty), static_cast<int>(tx)) = 0;
        for (int c = 0; c < src.channels; ++c) {
          out.frame.at(static_cast<int>(ty), static_cast<int>(tx), c) = src.at(y, x, c);
        }
      }
    }
  }
  return out;
}

WarpedView oracle_warp_frame(const Frame& src, const DepthMap& depth, const Pose& P,
                             const Intrinsics& K) {
  if (src.height != depth.height || src.width != depth.width) {
    throw std::invalid_argument("oracle_warp_frame: frame and depth dimensions differ");
  }
  const int h = src.height;
  const int w = src.width;
  WarpedView out;
  out.frame = Frame::zeros(h, w, src.channels);
  out.mask = OcclusionMask(h, w, 1);
  std::vector<double> zbuf(static_cast<size_t>(h) * w, std::numeric_limits<double>::infinity());

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double d = depth.at(y, x);
      if (!(d > 0) || !std::isfinite(d)) {
        throw std::invalid_argument("oracle_warp_frame: depth must be finite and positive");
      }
      // Unproject, transform, project, written out longhand.
      double px = (x - K.cx) / K.fx * d;
      double py = (y - K.cy) / K.fy * d;
      double pz = d;
      double jx = P.rotation(0, 0) * px + P.rotation(0, 1) * py + P.rotation(0, 2) * pz + P.translation(0);
      double jy = P.rotation(1, 0) * px + P.rotation(1, 1) * py + P.rotation(1, 2) * pz + P.translation(1);
      double jz = P.rotation(2, 0) * px + P.rotation(2, 1) * py + P.rotation(2, 2) * pz + P.translation(2);
      if (!(jz > 0)) continue;
      double u = K.fx * jx / jz + K.cx;
      double v = K.fy * jy / jz + K.cy;
      long tx = std::lround(u);
      long ty = std::lround(v);
      if (tx < 0 || tx >= w || ty < 0 || ty >= h) continue;
      size_t idx = static_cast<size_t>(ty) * w + tx;
      if (jz < zbuf[idx]) {
        zbuf[idx] = jz;
        out.mask.at(static_cast<int>(ty), static_cast<int>(tx)) = 0;
        for (int c = 0; c < src.channels; ++c) {
          out.frame.at(static_cast<int>(ty), static_cast<int>(tx), c) = src.at(y, x, c);
        }
      }
    }
  }
  return out;
}

std::vector<WarpedView> WarpGrid::column(int time) const {
  std::vector<WarpedView> col;
  col.reserve(n_views);
  for (int n = 0; n < n_views; ++n) col.push_back(at(n, time));
  return col;
}

std::vector<WarpedView> WarpGrid::row(int view) const {
  std::vector<WarpedView> r;
  r.reserve(n_frames);
  for (int i = 0; i < n_frames; ++i) r.push_back(at(view, i));
  return r;
}

WarpGrid warp_video_row(const std::vector<Frame>& row, const std::vector<DepthMap>& depths,
                        const Trajectory& trajectory, const Intrinsics& K) {
  if (row.size() != depths.size()) {
    throw std::invalid_argument("warp_video_row: frame and depth counts differ");
  }
  if (row.empty()) throw std::invalid_argument("warp_video_row: empty input row");
  const int n_views = trajectory.n_views();
  const int n_frames = static_cast<int>(row.size());

  WarpGrid grid;
  grid.n_views = n_views;
  grid.n_frames = n_frames;
  grid.cells.resize(static_cast<size_t>(n_views) * n_frames);
  for (int i = 0; i < n_frames; ++i) {
    WarpedView input_view;
    input_view.frame = row[i];
    input_view.mask = OcclusionMask(row[i].height, row[i].width, 0);
    grid.at(0, i) = std::move(input_view);
    for (int n = 1; n < n_views; ++n) {
      Pose rel = relative_transform(trajectory.poses[0], trajectory.poses[n]);
      grid.at(n, i) = warp_frame(row[i], depths[i], rel, K);
    }
  }
  return grid;
}

void force_all_missing(WarpGrid& grid) {
  for (WarpedView& view : grid.cells) {
    std::fill(view.frame.data.begin(), view.frame.data.end(), 0.0f);
    std::fill(view.mask.data.begin(), view.mask.data.end(), uint8_t{1});
  }
}

}  // namespace vgrid
