#pragma once

#include <optional>
#include <vector>

#include "vgrid/frame.hpp"
#include "vgrid/geometry.hpp"

namespace vgrid {

// Continuous reprojection of a source pixel into the target view through its
// depth. Returns nullopt when the transformed point lands behind the target
// camera. No rounding is applied here.
std::optional<Eigen::Vector2d> reproject_pixel(const Eigen::Vector2d& r_i, double depth,
                                               const Pose& P, const Intrinsics& K);

// Forward-splats every source pixel to its reprojected location with
// nearest-pixel rounding. Conflicts resolve by z-buffer on target-space depth,
// equal depths keep the earlier (row-major) source pixel. Untouched target
// pixels get mask=1 and value 0.
WarpedView warp_frame(const Frame& src, const DepthMap& depth, const Pose& P,
                      const Intrinsics& K);

// Reference implementation of warp_frame: one explicit per-pixel double loop
// with an explicit z-buffer and inlined camera arithmetic. Kept deliberately
// naive; warp_frame must match it bit-exactly.
WarpedView oracle_warp_frame(const Frame& src, const DepthMap& depth, const Pose& P,
                             const Intrinsics& K);

// N x F array of warped views: entry (n, i) is input frame i warped into
// view n. Row n=0 is the input itself with all-visible masks.
struct WarpGrid {
  int n_views = 0;
  int n_frames = 0;
  std::vector<WarpedView> cells;

  WarpedView& at(int view, int time) { return cells[static_cast<size_t>(view) * n_frames + time]; }
  const WarpedView& at(int view, int time) const {
    return cells[static_cast<size_t>(view) * n_frames + time];
  }

  std::vector<WarpedView> column(int time) const;
  std::vector<WarpedView> row(int view) const;
};

WarpGrid warp_video_row(const std::vector<Frame>& row, const std::vector<DepthMap>& depths,
                        const Trajectory& trajectory, const Intrinsics& K);

// Replaces every view by an all-missing mask with zeroed content. Used by the
// warp-guidance ablation: downstream consumers then behave as if no warped
// pixels were available.
void force_all_missing(WarpGrid& grid);

}  // namespace vgrid
