#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vgrid/bidi.hpp"
#include "vgrid/denoiser.hpp"
#include "vgrid/grid.hpp"
#include "vgrid/sampler.hpp"
#include "vgrid/scene.hpp"
#include "vgrid/schedule.hpp"
#include "vgrid/warp.hpp"

namespace vgrid {

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::Orbit;
  double max_angle_deg = 20.0;                 // orbit
  double center_depth = 2.0;                   // orbit
  double distance = 0.5;                       // dolly
  double height = 0.5;                         // elevation
  double pivot_depth = 2.0;                    // elevation, complex
  std::vector<Eigen::Vector3d> waypoints;      // complex
  std::vector<Eigen::Vector3d> centers;        // custom

  Trajectory build(int n_views) const;
};

struct SamplerConfig {
  int steps = 25;
  double sigma_min = 0.002;
  double sigma_max = 80.0;
  double rho = 7.0;
  ResidualMode residual_mode = ResidualMode::Conditional;

  NoiseSchedule build() const { return make_schedule(steps, sigma_min, sigma_max, rho); }
};

struct BackendSpec {
  std::string kind = "ideal";  // ideal | gaussian | identity | noisy-ideal | external
  double mu = 0.0;             // gaussian
  double tau = 1.0;            // gaussian
  double persistence = 0.8;    // noisy-ideal
  std::vector<std::string> command;  // external
  double timeout_seconds = 300.0;    // external
};

struct AblationFlags {
  bool disable_warp_guidance = false;
  bool disable_stbi = false;
};

struct InputFiles {
  std::string frames_dir;
  std::string depths_dir;
  int count = 0;
};

struct PipelineConfig {
  int n_views = 9;
  int n_frames = 9;
  int frame_height = 64;
  int frame_width = 64;
  int channels = 1;

  Intrinsics intrinsics;  // zero focal = derive from the scene/frame dims
  TrajectorySpec trajectory;
  SamplerConfig sampler;
  AnnealingParams annealing{-1, 3, 2};  // t_guide < 0 = steps / 2
  ResidualMode bidi_residual = ResidualMode::Unconditional;
  uint64_t seed = 0;
  BackendSpec backend;
  AblationFlags ablation;
  bool parallel = false;
  bool symmetric_renoise = false;
  int png_bit_depth = 16;

  std::optional<SyntheticScene> scene;
  std::optional<InputFiles> input;

  Intrinsics resolved_intrinsics() const;
  AnnealingParams resolved_annealing() const;
  void validate() const;
};

struct PipelineInputs {
  std::vector<Frame> frames;
  std::vector<DepthMap> depths;
};

// Input video row and per-frame depths, rendered from the synthetic scene or
// loaded from the configured files.
PipelineInputs load_inputs(const PipelineConfig& config);

BackendPtr make_backend(const PipelineConfig& config);

// Runs fn(0..count-1), possibly on a small thread pool. Results must not
// depend on execution order; the first exception is rethrown.
void parallel_for(int count, bool parallel, const std::function<void(int)>& fn);

// Stage A: boundary generation. (a1) first-frame novel views down column 0,
// (a2) end-view video along row N-1 conditioned on the frame generated at
// (N-1, 0), (a3) last column interpolated between its two known corners.
void stage_a_keyframes(Grid4D& grid, const WarpGrid& warped, DenoiserBackend& denoiser,
                       const PipelineConfig& config, uint64_t seed);

// Stage B: alternating camera-axis and time-axis bidirectional interpolation
// across the noisy interior, boundary cells slot-pinned to their Stage A
// content. With ablation.disable_stbi each interior row interpolates
// independently instead.
void stage_b_fill(Grid4D& grid, const WarpGrid& warped, DenoiserBackend& denoiser,
                  const PipelineConfig& config, uint64_t seed);

struct PipelineResult {
  Grid4D grid;
  WarpGrid warped;
  Trajectory trajectory;
  Intrinsics intrinsics;
  std::vector<Frame> input_row;
  std::vector<DepthMap> input_depths;
};

PipelineResult run_pipeline(const PipelineConfig& config);
PipelineResult run_pipeline(const PipelineConfig& config, BackendPtr backend);

// Runs input loading, warping, and Stage A only.
PipelineResult run_keyframes(const PipelineConfig& config, BackendPtr backend = nullptr);

}  // namespace vgrid
