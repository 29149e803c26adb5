#include "vgrid/config.hpp"

#include <fstream>
#include <stdexcept>

#include "vgrid/rng.hpp"

namespace vgrid {

namespace {

using nlohmann::json;

TrajectoryKind trajectory_kind_from_string(const std::string& s) {
  if (s == "orbit") return TrajectoryKind::Orbit;
  if (s == "dolly") return TrajectoryKind::Dolly;
  if (s == "elevation") return TrajectoryKind::Elevation;
  if (s == "complex") return TrajectoryKind::Complex;
  if (s == "custom") return TrajectoryKind::Custom;
  throw std::invalid_argument("config: unknown trajectory kind '" + s + "'");
}

std::vector<Eigen::Vector3d> parse_points(const json& j) {
  std::vector<Eigen::Vector3d> points;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 3) {
      throw std::invalid_argument("config: points must be [x, y, z] triples");
    }
    points.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  }
  return points;
}

json points_to_json(const std::vector<Eigen::Vector3d>& points) {
  json out = json::array();
  for (const auto& p : points) out.push_back({p.x(), p.y(), p.z()});
  return out;
}

MotionKind motion_from_string(const std::string& s) {
  if (s == "linear") return MotionKind::Linear;
  if (s == "circular") return MotionKind::Circular;
  throw std::invalid_argument("config: unknown motion kind '" + s + "'");
}

}  // namespace

ResidualMode residual_mode_from_string(const std::string& s) {
  if (s == "unconditional") return ResidualMode::Unconditional;
  if (s == "conditional") return ResidualMode::Conditional;
  if (s == "guided") return ResidualMode::Guided;
  throw std::invalid_argument("config: unknown residual mode '" + s + "'");
}

std::string to_string(ResidualMode mode) {
  switch (mode) {
    case ResidualMode::Unconditional: return "unconditional";
    case ResidualMode::Conditional: return "conditional";
    case ResidualMode::Guided: return "guided";
  }
  return "conditional";
}

PipelineConfig parse_config(const nlohmann::json& j) {
  PipelineConfig config;
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    config.n_views = g.value("n_views", config.n_views);
    config.n_frames = g.value("n_frames", config.n_frames);
  }
  if (j.contains("frame")) {
    const auto& f = j.at("frame");
    config.frame_height = f.value("height", config.frame_height);
    config.frame_width = f.value("width", config.frame_width);
    config.channels = f.value("channels", config.channels);
  }
  if (j.contains("intrinsics")) {
    const auto& k = j.at("intrinsics");
    config.intrinsics.fx = k.value("fx", 0.0);
    config.intrinsics.fy = k.value("fy", 0.0);
    config.intrinsics.cx = k.value("cx", 0.0);
    config.intrinsics.cy = k.value("cy", 0.0);
    config.intrinsics.width = k.value("width", 0);
    config.intrinsics.height = k.value("height", 0);
  }
  if (j.contains("trajectory")) {
    const auto& t = j.at("trajectory");
    TrajectorySpec& spec = config.trajectory;
    spec.kind = trajectory_kind_from_string(t.value("kind", std::string("orbit")));
    spec.max_angle_deg = t.value("max_angle_deg", spec.max_angle_deg);
    spec.center_depth = t.value("center_depth", spec.center_depth);
    spec.distance = t.value("distance", spec.distance);
    spec.height = t.value("height", spec.height);
    spec.pivot_depth = t.value("pivot_depth", spec.pivot_depth);
    if (t.contains("waypoints")) spec.waypoints = parse_points(t.at("waypoints"));
    if (t.contains("centers")) spec.centers = parse_points(t.at("centers"));
  }
  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    config.sampler.steps = s.value("steps", config.sampler.steps);
    config.sampler.sigma_min = s.value("sigma_min", config.sampler.sigma_min);
    config.sampler.sigma_max = s.value("sigma_max", config.sampler.sigma_max);
    config.sampler.rho = s.value("rho", config.sampler.rho);
    if (s.contains("residual_mode")) {
      config.sampler.residual_mode = residual_mode_from_string(s.at("residual_mode"));
    }
  }
  if (j.contains("annealing")) {
    const auto& a = j.at("annealing");
    config.annealing.t_guide = a.value("t_guide", config.annealing.t_guide);
    config.annealing.r_total = a.value("r_total", config.annealing.r_total);
    config.annealing.r_guide = a.value("r_guide", config.annealing.r_guide);
  }
  if (j.contains("bidi") && j.at("bidi").contains("residual_mode")) {
    config.bidi_residual = residual_mode_from_string(j.at("bidi").at("residual_mode"));
  }
  config.seed = j.value("seed", config.seed);
  config.parallel = j.value("parallel", config.parallel);
  config.symmetric_renoise = j.value("symmetric_renoise", config.symmetric_renoise);
  if (j.contains("io")) config.png_bit_depth = j.at("io").value("bit_depth", config.png_bit_depth);
  if (j.contains("backend")) {
    const auto& b = j.at("backend");
    config.backend.kind = b.value("kind", config.backend.kind);
    config.backend.mu = b.value("mu", config.backend.mu);
    config.backend.tau = b.value("tau", config.backend.tau);
    config.backend.persistence = b.value("persistence", config.backend.persistence);
    config.backend.timeout_seconds = b.value("timeout_seconds", config.backend.timeout_seconds);
    if (b.contains("command")) {
      config.backend.command = b.at("command").get<std::vector<std::string>>();
    }
  }
  if (j.contains("ablation")) {
    const auto& a = j.at("ablation");
    config.ablation.disable_warp_guidance =
        a.value("disable_warp_guidance", config.ablation.disable_warp_guidance);
    config.ablation.disable_stbi = a.value("disable_stbi", config.ablation.disable_stbi);
  }
  if (j.contains("scene")) {
    const auto& s = j.at("scene");
    SyntheticScene scene;
    scene.z_bg = s.value("z_bg", scene.z_bg);
    scene.z_fg = s.value("z_fg", scene.z_fg);
    scene.fg_half_size = s.value("fg_half_size", scene.fg_half_size);
    scene.bg_cell = s.value("bg_cell", scene.bg_cell);
    scene.fg_cell = s.value("fg_cell", scene.fg_cell);
    scene.texture_seed = s.value("texture_seed", scene.texture_seed);
    scene.fg_orbit_radius = s.value("fg_orbit_radius", scene.fg_orbit_radius);
    scene.motion = motion_from_string(s.value("motion", std::string("linear")));
    if (s.contains("fg_start")) {
      scene.fg_start = {s.at("fg_start")[0].get<double>(), s.at("fg_start")[1].get<double>()};
    }
    if (s.contains("fg_end")) {
      scene.fg_end = {s.at("fg_end")[0].get<double>(), s.at("fg_end")[1].get<double>()};
    }
    config.scene = scene;
  }
  if (j.contains("input")) {
    const auto& in = j.at("input");
    InputFiles files;
    files.frames_dir = in.at("frames_dir").get<std::string>();
    files.depths_dir = in.at("depths_dir").get<std::string>();
    files.count = in.value("count", 0);
    config.input = files;
  }
  return config;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("config: parse error in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

nlohmann::json config_to_json(const PipelineConfig& config) {
  json j;
  j["grid"] = {{"n_views", config.n_views}, {"n_frames", config.n_frames}};
  j["frame"] = {{"height", config.frame_height},
                {"width", config.frame_width},
                {"channels", config.channels}};
  j["intrinsics"] = {{"fx", config.intrinsics.fx}, {"fy", config.intrinsics.fy},
                     {"cx", config.intrinsics.cx}, {"cy", config.intrinsics.cy},
                     {"width", config.intrinsics.width}, {"height", config.intrinsics.height}};
  json t;
  t["kind"] = to_string(config.trajectory.kind);
  switch (config.trajectory.kind) {
    case TrajectoryKind::Orbit:
      t["max_angle_deg"] = config.trajectory.max_angle_deg;
      t["center_depth"] = config.trajectory.center_depth;
      break;
    case TrajectoryKind::Dolly:
      t["distance"] = config.trajectory.distance;
      break;
    case TrajectoryKind::Elevation:
      t["height"] = config.trajectory.height;
      t["pivot_depth"] = config.trajectory.pivot_depth;
      break;
    case TrajectoryKind::Complex:
      t["waypoints"] = points_to_json(config.trajectory.waypoints);
      t["pivot_depth"] = config.trajectory.pivot_depth;
      break;
    case TrajectoryKind::Custom:
      t["centers"] = points_to_json(config.trajectory.centers);
      break;
  }
  j["trajectory"] = t;
  j["sampler"] = {{"steps", config.sampler.steps},
                  {"sigma_min", config.sampler.sigma_min},
                  {"sigma_max", config.sampler.sigma_max},
                  {"rho", config.sampler.rho},
                  {"residual_mode", to_string(config.sampler.residual_mode)}};
  j["annealing"] = {{"t_guide", config.annealing.t_guide},
                    {"r_total", config.annealing.r_total},
                    {"r_guide", config.annealing.r_guide}};
  j["bidi"] = {{"residual_mode", to_string(config.bidi_residual)}};
  j["seed"] = config.seed;
  j["parallel"] = config.parallel;
  j["symmetric_renoise"] = config.symmetric_renoise;
  j["io"] = {{"bit_depth", config.png_bit_depth}};
  json b;
  b["kind"] = config.backend.kind;
  if (config.backend.kind == "gaussian") {
    b["mu"] = config.backend.mu;
    b["tau"] = config.backend.tau;
  }
  if (config.backend.kind == "noisy-ideal") b["persistence"] = config.backend.persistence;
  if (config.backend.kind == "external") {
    b["command"] = config.backend.command;
    b["timeout_seconds"] = config.backend.timeout_seconds;
  }
  j["backend"] = b;
  j["ablation"] = {{"disable_warp_guidance", config.ablation.disable_warp_guidance},
                   {"disable_stbi", config.ablation.disable_stbi}};
  if (config.scene) {
    const SyntheticScene& s = *config.scene;
    j["scene"] = {{"z_bg", s.z_bg},
                  {"z_fg", s.z_fg},
                  {"fg_half_size", s.fg_half_size},
                  {"fg_start", {s.fg_start.x(), s.fg_start.y()}},
                  {"fg_end", {s.fg_end.x(), s.fg_end.y()}},
                  {"fg_orbit_radius", s.fg_orbit_radius},
                  {"motion", s.motion == MotionKind::Linear ? "linear" : "circular"},
                  {"bg_cell", s.bg_cell},
                  {"fg_cell", s.fg_cell},
                  {"texture_seed", s.texture_seed}};
  }
  if (config.input) {
    j["input"] = {{"frames_dir", config.input->frames_dir},
                  {"depths_dir", config.input->depths_dir},
                  {"count", config.input->count}};
  }
  return j;
}

std::string config_digest(const PipelineConfig& config) {
  std::string canonical = config_to_json(config).dump();
  uint64_t h = fnv1a64(canonical);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vgrid
