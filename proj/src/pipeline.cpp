#include "vgrid/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "vgrid/external_backend.hpp"
#include "vgrid/ideal_backend.hpp"
#include "vgrid/image_io.hpp"

namespace vgrid {

namespace {

const uint64_t kTagStageA = fnv1a64("stage-a");
const uint64_t kTagStageB = fnv1a64("stage-b");
const uint64_t kTagInit = fnv1a64("stage-b-init");
const uint64_t kTagPin = fnv1a64("pin");
const uint64_t kTagColumnRenoise = fnv1a64("column-renoise");
const uint64_t kTagRowRenoise = fnv1a64("row-renoise");
const uint64_t kTagRowFill = fnv1a64("row-fill");
const uint64_t kAxisCamera = 0;
const uint64_t kAxisTime = 1;

std::vector<GridCoord> column_cells(int n_views, int time) {
  std::vector<GridCoord> cells(n_views);
  for (int n = 0; n < n_views; ++n) cells[n] = {n, time};
  return cells;
}

std::vector<GridCoord> row_cells(int view, int n_frames) {
  std::vector<GridCoord> cells(n_frames);
  for (int i = 0; i < n_frames; ++i) cells[i] = {view, i};
  return cells;
}

// Clean boundary contents captured after Stage A; the source for conditions
// and for slot pinning while the grid itself churns through noisy states.
class KeyBank {
 public:
  KeyBank(const Grid4D& grid) : n_frames_(grid.n_frames()) {
    frames_.resize(static_cast<size_t>(grid.n_views()) * grid.n_frames());
    known_.resize(frames_.size(), false);
    for (int n = 0; n < grid.n_views(); ++n) {
      for (int i = 0; i < grid.n_frames(); ++i) {
        if (grid.known(n, i)) {
          frames_[idx(n, i)] = grid.state(n, i);
          known_[idx(n, i)] = true;
        }
      }
    }
  }

  bool known(int view, int time) const { return known_[idx(view, time)]; }
  const Frame& frame(int view, int time) const {
    if (!known(view, time)) throw std::logic_error("key bank: cell content is not known");
    return frames_[idx(view, time)];
  }
  Condition condition(int view, int time) const { return Condition{{view, time}, frame(view, time)}; }

 private:
  size_t idx(int view, int time) const { return static_cast<size_t>(view) * n_frames_ + time; }

  int n_frames_;
  std::vector<Frame> frames_;
  std::vector<bool> known_;
};

Frame noised_copy(const Frame& clean, double sigma, Rng& rng) {
  Frame f = clean;
  if (sigma > 0) {
    const float scale = static_cast<float>(sigma);
    for (float& v : f.data) v += scale * rng.normal_f();
  }
  return f;
}

void require_stage_a_complete(const Grid4D& grid) {
  const int n = grid.n_views();
  const int f = grid.n_frames();
  for (int i = 0; i < f; ++i) {
    if (!grid.known(0, i) || !grid.known(n - 1, i)) {
      throw std::logic_error("stage B requires completed boundary rows");
    }
  }
  for (int v = 0; v < n; ++v) {
    if (!grid.known(v, 0) || !grid.known(v, f - 1)) {
      throw std::logic_error("stage B requires completed boundary columns");
    }
  }
}

}  // namespace

Trajectory TrajectorySpec::build(int n_views) const {
  switch (kind) {
    case TrajectoryKind::Orbit:
      return make_orbit_trajectory(center_depth, max_angle_deg, n_views);
    case TrajectoryKind::Dolly:
      return make_dolly_trajectory(distance, n_views);
    case TrajectoryKind::Elevation:
      return make_elevation_trajectory(height, pivot_depth, n_views);
    case TrajectoryKind::Complex:
      return make_complex_trajectory(waypoints, pivot_depth, n_views);
    case TrajectoryKind::Custom: {
      Trajectory traj = make_custom_trajectory(centers);
      if (traj.n_views() != n_views) {
        throw std::invalid_argument("custom trajectory: center count must equal n_views");
      }
      return traj;
    }
  }
  throw std::invalid_argument("trajectory: unknown kind");
}

Intrinsics PipelineConfig::resolved_intrinsics() const {
  Intrinsics K = intrinsics;
  if (K.width == 0) K.width = frame_width;
  if (K.height == 0) K.height = frame_height;
  if (K.fx == 0.0) {
    K.fx = frame_width;
    K.fy = frame_width;
    K.cx = (frame_width - 1) / 2.0;
    K.cy = (frame_height - 1) / 2.0;
  }
  K.validate();
  return K;
}

AnnealingParams PipelineConfig::resolved_annealing() const {
  AnnealingParams out = annealing;
  if (out.t_guide < 0) out.t_guide = sampler.steps / 2;
  out.validate(sampler.steps);
  return out;
}

void PipelineConfig::validate() const {
  if (n_views < 2 || n_frames < 2) throw std::invalid_argument("config: need N >= 2 and F >= 2");
  if (frame_height <= 0 || frame_width <= 0 || (channels != 1 && channels != 3)) {
    throw std::invalid_argument("config: bad frame dimensions");
  }
  if (png_bit_depth != 8 && png_bit_depth != 16) {
    throw std::invalid_argument("config: png bit depth must be 8 or 16");
  }
  resolved_intrinsics();
  resolved_annealing();
  sampler.build();
  if (!scene && !input) throw std::invalid_argument("config: need a scene block or an input block");
}

PipelineInputs load_inputs(const PipelineConfig& config) {
  PipelineInputs inputs;
  if (config.scene) {
    SyntheticScene scene = *config.scene;
    scene.n_frames = config.n_frames;
    scene.height = config.frame_height;
    scene.width = config.frame_width;
    scene.channels = config.channels;
    scene.validate();
    const Intrinsics K = config.resolved_intrinsics();
    const Pose input_pose = Pose::identity();
    for (int i = 0; i < config.n_frames; ++i) {
      inputs.frames.push_back(render_frame(scene, input_pose, i, K));
      inputs.depths.push_back(render_depth(scene, input_pose, i, K));
    }
    return inputs;
  }
  const InputFiles& files = *config.input;
  int count = files.count > 0 ? files.count : config.n_frames;
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "time%03d", i);
    inputs.frames.push_back(load_frame(files.frames_dir + "/" + name + ".png"));
    inputs.depths.push_back(load_depth(files.depths_dir + "/" + name + ".pfm"));
  }
  return inputs;
}

BackendPtr make_backend(const PipelineConfig& config) {
  const BackendSpec& spec = config.backend;
  if (spec.kind == "identity") return std::make_shared<IdentityDenoiser>();
  if (spec.kind == "gaussian") return std::make_shared<GaussianAnalyticDenoiser>(spec.mu, spec.tau);
  if (spec.kind == "external") {
    ExternalBackendOptions options;
    options.command = spec.command;
    options.timeout_seconds = spec.timeout_seconds;
    return std::make_shared<ExternalProcessDenoiser>(options);
  }
  if (spec.kind == "ideal" || spec.kind == "noisy-ideal") {
    if (!config.scene) {
      throw std::invalid_argument("backend '" + spec.kind + "' needs a synthetic scene block");
    }
    SyntheticScene scene = *config.scene;
    scene.n_frames = config.n_frames;
    scene.height = config.frame_height;
    scene.width = config.frame_width;
    scene.channels = config.channels;
    Trajectory traj = config.trajectory.build(config.n_views);
    Intrinsics K = config.resolved_intrinsics();
    if (spec.kind == "ideal") return std::make_shared<IdealDenoiser>(scene, traj, K);
    return std::make_shared<NoisyIdealDenoiser>(scene, traj, K, spec.persistence);
  }
  throw std::invalid_argument("unknown backend kind '" + spec.kind + "'");
}

void parallel_for(int count, bool parallel, const std::function<void(int)>& fn) {
  if (!parallel || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  unsigned n_threads = std::min<unsigned>(std::thread::hardware_concurrency(),
                                          static_cast<unsigned>(count));
  if (n_threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

void stage_a_keyframes(Grid4D& grid, const WarpGrid& warped, DenoiserBackend& denoiser,
                       const PipelineConfig& config, uint64_t seed) {
  const int n_views = grid.n_views();
  const int n_frames = grid.n_frames();
  const NoiseSchedule schedule = config.sampler.build();
  const AnnealingParams annealing = config.resolved_annealing();
  BidiStepConfig bidi_cfg;
  bidi_cfg.residual_mode = config.bidi_residual;

  // (a1) novel views of the first frame: column 0.
  {
    Rng rng(derive_seed(seed, {kTagStageA, 1}));
    std::vector<WarpedView> guidance = warped.column(0);
    ClipContext ctx{column_cells(n_views, 0), &guidance};
    Condition condition{{0, 0}, grid.state(0, 0)};
    std::vector<Frame> clip;
    try {
      clip = sample_warp_guided_clip(denoiser, guidance, condition, schedule, annealing, rng, ctx,
                                     config.sampler.residual_mode);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("stage A (a1), column 0: ") + e.what());
    }
    for (int n = 0; n < n_views; ++n) {
      if (grid.status(n, 0) == CellStatus::Final) continue;
      grid.set_state(n, 0, std::move(clip[n]), 0.0);
      grid.advance_status(n, 0, CellStatus::Key);
    }
  }

  // (a2) end-view video: row N-1, conditioned on the frame just generated.
  {
    Rng rng(derive_seed(seed, {kTagStageA, 2}));
    std::vector<WarpedView> guidance = warped.row(n_views - 1);
    ClipContext ctx{row_cells(n_views - 1, n_frames), &guidance};
    Condition condition{{n_views - 1, 0}, grid.state(n_views - 1, 0)};
    std::vector<Frame> clip;
    try {
      clip = sample_warp_guided_clip(denoiser, guidance, condition, schedule, annealing, rng, ctx,
                                     config.sampler.residual_mode);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("stage A (a2), row ") + std::to_string(n_views - 1) +
                               ": " + e.what());
    }
    for (int i = 0; i < n_frames; ++i) {
      if (grid.known(n_views - 1, i)) continue;
      grid.set_state(n_views - 1, i, std::move(clip[i]), 0.0);
      grid.advance_status(n_views - 1, i, CellStatus::Key);
    }
  }

  // (a3) end-frame novel views: column F-1, interpolated between its corners.
  {
    Rng rng(derive_seed(seed, {kTagStageA, 3}));
    std::vector<WarpedView> guidance = warped.column(n_frames - 1);
    ClipContext ctx{column_cells(n_views, n_frames - 1), &guidance};
    Condition c_start{{0, n_frames - 1}, grid.state(0, n_frames - 1)};
    Condition c_end{{n_views - 1, n_frames - 1}, grid.state(n_views - 1, n_frames - 1)};
    std::vector<Frame> clip;
    try {
      clip = interpolate_clip(guidance, c_start, c_end, denoiser, schedule, rng, bidi_cfg, ctx);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("stage A (a3), column ") + std::to_string(n_frames - 1) +
                               ": " + e.what());
    }
    for (int n = 0; n < n_views; ++n) {
      if (grid.known(n, n_frames - 1)) continue;
      grid.set_state(n, n_frames - 1, std::move(clip[n]), 0.0);
      grid.advance_status(n, n_frames - 1, CellStatus::Key);
    }
  }
}

void stage_b_fill(Grid4D& grid, const WarpGrid& warped, DenoiserBackend& denoiser,
                  const PipelineConfig& config, uint64_t seed) {
  require_stage_a_complete(grid);
  const int n_views = grid.n_views();
  const int n_frames = grid.n_frames();
  const NoiseSchedule schedule = config.sampler.build();
  const KeyBank bank(grid);
  BidiStepConfig bidi_cfg;
  bidi_cfg.residual_mode = config.bidi_residual;
  const bool parallel = config.parallel && denoiser.descriptor().concurrent_safe;

  auto finalize = [&] {
    for (int n = 0; n < n_views; ++n) {
      for (int i = 0; i < n_frames; ++i) {
        if (bank.known(n, i)) grid.set_state(n, i, bank.frame(n, i), 0.0);
        grid.advance_status(n, i, CellStatus::Final);
      }
    }
  };

  if (config.ablation.disable_stbi) {
    // Each interior row interpolates on its own; no camera-axis passes.
    parallel_for(n_views, parallel, [&](int j) {
      bool has_unknown = false;
      for (int i = 0; i < n_frames; ++i) has_unknown |= !bank.known(j, i);
      if (!has_unknown) return;
      Rng rng(derive_seed(seed, {kTagRowFill, static_cast<uint64_t>(j)}));
      std::vector<WarpedView> guidance = warped.row(j);
      ClipContext ctx{row_cells(j, n_frames), &guidance};
      std::vector<Frame> clip;
      try {
        clip = interpolate_clip(guidance, bank.condition(j, 0), bank.condition(j, n_frames - 1),
                                denoiser, schedule, rng, bidi_cfg, ctx);
      } catch (const std::exception& e) {
        throw std::runtime_error("stage B (row fill), row " + std::to_string(j) + ": " + e.what());
      }
      for (int i = 0; i < n_frames; ++i) {
        if (!bank.known(j, i)) grid.set_state(j, i, std::move(clip[i]), 0.0);
      }
    });
    finalize();
    return;
  }

  // Fresh top-level noise over the unknown interior.
  const double sigma_top = schedule.sigmas.front();
  for (int n = 0; n < n_views; ++n) {
    for (int i = 0; i < n_frames; ++i) {
      if (bank.known(n, i)) continue;
      Rng rng(derive_seed(seed, {kTagInit, static_cast<uint64_t>(n), static_cast<uint64_t>(i)}));
      Frame f = Frame::zeros(config.frame_height, config.frame_width, config.channels);
      for (float& v : f.data) v = static_cast<float>(sigma_top) * rng.normal_f();
      grid.set_state(n, i, std::move(f), sigma_top);
    }
  }

  const int total_steps = schedule.steps();
  for (int step = 0; step < total_steps; ++step) {
    const double sigma = schedule.sigmas[step];
    const double sigma_prev = schedule.sigmas[step + 1];
    const int rounds = config.symmetric_renoise ? 2 : 1;
    for (int round = 0; round < rounds; ++round) {
      const uint64_t step_tag = derive_seed(seed, {kTagStageB, static_cast<uint64_t>(step),
                                                   static_cast<uint64_t>(round)});

      // Camera-axis interpolation over every column, each re-noised back to
      // sigma for the following time-axis pass.
      parallel_for(n_frames, parallel, [&](int i) {
        Rng pin_rng(derive_seed(step_tag, {kTagPin, kAxisCamera, static_cast<uint64_t>(i)}));
        ClipState clip;
        clip.sigma = sigma;
        clip.frames.reserve(n_views);
        for (int n = 0; n < n_views; ++n) {
          clip.frames.push_back(bank.known(n, i) ? noised_copy(bank.frame(n, i), sigma, pin_rng)
                                                 : grid.state(n, i));
        }
        std::vector<WarpedView> guidance = warped.column(i);
        ClipContext ctx{column_cells(n_views, i), &guidance};
        Rng rng(derive_seed(step_tag, {kAxisCamera, static_cast<uint64_t>(i)}));
        ClipState stepped;
        try {
          stepped = bidi_step(clip, sigma, sigma_prev, bank.condition(0, i),
                              bank.condition(n_views - 1, i), guidance, denoiser, rng, bidi_cfg, ctx);
        } catch (const std::exception& e) {
          throw std::runtime_error("stage B (camera axis), step " + std::to_string(step) +
                                   ", column " + std::to_string(i) + ": " + e.what());
        }
        Rng renoise_rng(derive_seed(step_tag, {kTagColumnRenoise, static_cast<uint64_t>(i)}));
        ClipState renoised = renoise(stepped, sigma, sigma_prev, renoise_rng);
        for (int n = 0; n < n_views; ++n) grid.set_state(n, i, std::move(renoised.frames[n]), sigma);
      });

      // Time-axis interpolation over every row; transitions to sigma_prev.
      const bool more_rounds = round + 1 < rounds;
      parallel_for(n_views, parallel, [&](int j) {
        Rng pin_rng(derive_seed(step_tag, {kTagPin, kAxisTime, static_cast<uint64_t>(j)}));
        ClipState clip;
        clip.sigma = sigma;
        clip.frames.reserve(n_frames);
        for (int i = 0; i < n_frames; ++i) {
          clip.frames.push_back(bank.known(j, i) ? noised_copy(bank.frame(j, i), sigma, pin_rng)
                                                 : grid.state(j, i));
        }
        std::vector<WarpedView> guidance = warped.row(j);
        ClipContext ctx{row_cells(j, n_frames), &guidance};
        Rng rng(derive_seed(step_tag, {kAxisTime, static_cast<uint64_t>(j)}));
        ClipState stepped;
        try {
          stepped = bidi_step(clip, sigma, sigma_prev, bank.condition(j, 0),
                              bank.condition(j, n_frames - 1), guidance, denoiser, rng, bidi_cfg, ctx);
        } catch (const std::exception& e) {
          throw std::runtime_error("stage B (time axis), step " + std::to_string(step) + ", row " +
                                   std::to_string(j) + ": " + e.what());
        }
        double level = sigma_prev;
        if (more_rounds) {
          Rng renoise_rng(derive_seed(step_tag, {kTagRowRenoise, static_cast<uint64_t>(j)}));
          stepped = renoise(stepped, sigma, sigma_prev, renoise_rng);
          level = sigma;
        }
        for (int i = 0; i < n_frames; ++i) grid.set_state(j, i, std::move(stepped.frames[i]), level);
      });
    }
  }
  finalize();
}

namespace {

PipelineResult run_stages(const PipelineConfig& config, BackendPtr backend, bool fill_interior) {
  config.validate();
  PipelineInputs inputs = load_inputs(config);
  if (static_cast<int>(inputs.frames.size()) != config.n_frames) {
    throw std::invalid_argument("pipeline: input frame count does not match the grid");
  }
  for (const Frame& f : inputs.frames) {
    if (f.height != config.frame_height || f.width != config.frame_width ||
        f.channels != config.channels) {
      throw std::invalid_argument("pipeline: input frame dimensions do not match the config");
    }
  }

  Trajectory trajectory = config.trajectory.build(config.n_views);
  Intrinsics K = config.resolved_intrinsics();
  WarpGrid warped = warp_video_row(inputs.frames, inputs.depths, trajectory, K);
  if (config.ablation.disable_warp_guidance) force_all_missing(warped);

  if (!backend) backend = make_backend(config);

  Grid4D grid = Grid4D::from_input_row(inputs.frames, config.n_views);
  for (int n = 0; n < config.n_views; ++n) {
    for (int i = 0; i < config.n_frames; ++i) {
      if (grid.status(n, i) == CellStatus::Unknown) grid.advance_status(n, i, CellStatus::Warped);
    }
  }

  stage_a_keyframes(grid, warped, *backend, config, config.seed);
  if (fill_interior) stage_b_fill(grid, warped, *backend, config, config.seed);

  PipelineResult result{std::move(grid), std::move(warped), std::move(trajectory), K,
                        std::move(inputs.frames), std::move(inputs.depths)};
  return result;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  return run_stages(config, nullptr, true);
}

PipelineResult run_pipeline(const PipelineConfig& config, BackendPtr backend) {
  return run_stages(config, std::move(backend), true);
}

PipelineResult run_keyframes(const PipelineConfig& config, BackendPtr backend) {
  return run_stages(config, std::move(backend), false);
}

}  // namespace vgrid
