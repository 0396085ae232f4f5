#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zsim/engine.hpp"
#include "zsim/grid_world.hpp"
#include "zsim/montecarlo.hpp"

namespace zsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything one batch needs, loadable from a flat dotted-key config file.
// The defaults reproduce the base no-intervention scenario.
struct RunConfig {
  std::string map_path;
  Cell origin{};
  ScenarioPolicy scenario;
  BehaviorTable behavior;
  MovementParams movement;
  std::uint32_t incubation_steps = 1;
  std::uint32_t n_runs = 1000;
  std::uint64_t base_seed = 1;
  std::uint32_t max_steps = 2000;
  std::uint32_t max_parallel_runs = 1;
  std::uint32_t trajectory_stride = 1;
  std::string output_dir = "out";

  void validate() const {
    if (map_path.empty()) throw ConfigError("config: map.path is required");
    scenario.validate();
    behavior.validate();
    movement.validate();
    if (max_parallel_runs < 1) throw ConfigError("config: batch.max_parallel_runs must be >= 1");
    if (incubation_steps < 1 || incubation_steps > 255)
      throw ConfigError("config: engine.incubation_steps must lie in [1, 255]");
  }

  BatchConfig batch_config() const {
    BatchConfig b;
    b.n_runs = n_runs;
    b.base_seed = base_seed;
    b.max_parallel_runs = max_parallel_runs;
    b.policy = scenario;
    b.behavior = behavior;
    b.movement = movement;
    b.incubation_steps = incubation_steps;
    b.max_steps = max_steps;
    b.trajectory_stride = trajectory_stride;
    return b;
  }
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string scenario_kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::NoIntervention: return "none";
    case ScenarioKind::Strict: return "strict";
    case ScenarioKind::Leaky: return "leaky";
  }
  return "none";
}

inline ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "none") return ScenarioKind::NoIntervention;
  if (s == "strict") return ScenarioKind::Strict;
  if (s == "leaky") return ScenarioKind::Leaky;
  throw ConfigError("config: unknown scenario.kind '" + s + "' (none|strict|leaky)");
}

}  // namespace detail

// Parses the flat `key = value` config format: '#' comments, dotted keys,
// unknown keys rejected. Keys absent from the file keep their defaults.
inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");

  std::map<std::string, std::string> kv;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    std::string_view key = line.substr(0, eq);
    std::string_view value = line.substr(eq + 1);
    detail::trim(key);
    detail::trim(value);
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(std::string(key), std::string(value)).second)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
  }

  RunConfig cfg;
  auto take = [&](const char* key) -> std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    return &it->second;
  };
  auto take_string = [&](const char* key, std::string& out) {
    if (auto* v = take(key)) out = *v;
  };
  auto take_double = [&](const char* key, double& out) {
    if (auto* v = take(key)) {
      double d;
      const auto res = std::from_chars(v->data(), v->data() + v->size(), d);
      if (res.ec != std::errc() || res.ptr != v->data() + v->size())
        throw ConfigError(std::string("config: ") + key + ": not a number: '" + *v + "'");
      out = d;
    }
  };
  auto take_u64 = [&](const char* key, std::uint64_t& out) {
    if (auto* v = take(key)) {
      std::uint64_t d;
      const auto res = std::from_chars(v->data(), v->data() + v->size(), d);
      if (res.ec != std::errc() || res.ptr != v->data() + v->size())
        throw ConfigError(std::string("config: ") + key + ": not a nonnegative integer: '" + *v + "'");
      out = d;
    }
  };
  auto take_u32 = [&](const char* key, std::uint32_t& out) {
    std::uint64_t v = out;
    take_u64(key, v);
    if (v > UINT32_MAX) throw ConfigError(std::string("config: ") + key + ": value too large");
    out = static_cast<std::uint32_t>(v);
  };
  auto take_i32 = [&](const char* key, std::int32_t& out) {
    if (auto* v = take(key)) {
      std::int32_t d;
      const auto res = std::from_chars(v->data(), v->data() + v->size(), d);
      if (res.ec != std::errc() || res.ptr != v->data() + v->size())
        throw ConfigError(std::string("config: ") + key + ": not an integer: '" + *v + "'");
      out = d;
    }
  };

  take_string("map.path", cfg.map_path);
  take_i32("map.origin_x", cfg.origin.x);
  take_i32("map.origin_y", cfg.origin.y);
  if (auto* v = take("scenario.kind")) cfg.scenario.kind = detail::parse_scenario_kind(*v);
  take_u32("scenario.activation_step", cfg.scenario.activation_step);
  take_double("scenario.leak_probability", cfg.scenario.leak_probability);
  take_double("behavior.p_fight", cfg.behavior.p_fight);
  take_double("behavior.p_flight", cfg.behavior.p_flight);
  take_double("behavior.p_freeze", cfg.behavior.p_freeze);
  take_double("behavior.p_win_fight", cfg.behavior.p_win_fight);
  take_double("behavior.p_escape", cfg.behavior.p_escape);
  take_double("behavior.p_win_caught", cfg.behavior.p_win_caught);
  take_double("behavior.p_win_freeze", cfg.behavior.p_win_freeze);
  take_double("movement.base_weight", cfg.movement.base_weight);
  take_double("movement.bias_per_km", cfg.movement.bias_per_km);
  take_i32("movement.bias_cap_distance", cfg.movement.bias_cap_distance);
  take_i32("movement.full_bias_distance", cfg.movement.full_bias_distance);
  take_u32("engine.incubation_steps", cfg.incubation_steps);
  take_u32("batch.n_runs", cfg.n_runs);
  take_u64("batch.base_seed", cfg.base_seed);
  take_u32("batch.max_steps", cfg.max_steps);
  take_u32("batch.max_parallel_runs", cfg.max_parallel_runs);
  take_u32("batch.trajectory_stride", cfg.trajectory_stride);
  take_string("output.dir", cfg.output_dir);

  const char* known[] = {
      "map.path", "map.origin_x", "map.origin_y", "scenario.kind", "scenario.activation_step",
      "scenario.leak_probability", "behavior.p_fight", "behavior.p_flight", "behavior.p_freeze",
      "behavior.p_win_fight", "behavior.p_escape", "behavior.p_win_caught", "behavior.p_win_freeze",
      "movement.base_weight", "movement.bias_per_km", "movement.bias_cap_distance",
      "movement.full_bias_distance", "engine.incubation_steps", "batch.n_runs", "batch.base_seed",
      "batch.max_steps", "batch.max_parallel_runs", "batch.trajectory_stride", "output.dir"};
  for (const auto& [key, value] : kv) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) throw ConfigError("config: unknown key '" + key + "'");
  }

  cfg.validate();
  return cfg;
}

// Serializes the effective configuration (defaults applied) in a fixed key
// order. Doubles use shortest round-trip formatting, so reloading reproduces
// the exact values.
inline void save_run_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open for writing");
  out << "map.path = " << cfg.map_path << '\n';
  out << "map.origin_x = " << cfg.origin.x << '\n';
  out << "map.origin_y = " << cfg.origin.y << '\n';
  out << "scenario.kind = " << detail::scenario_kind_name(cfg.scenario.kind) << '\n';
  out << "scenario.activation_step = " << cfg.scenario.activation_step << '\n';
  out << "scenario.leak_probability = " << detail::format_double(cfg.scenario.leak_probability) << '\n';
  out << "behavior.p_fight = " << detail::format_double(cfg.behavior.p_fight) << '\n';
  out << "behavior.p_flight = " << detail::format_double(cfg.behavior.p_flight) << '\n';
  out << "behavior.p_freeze = " << detail::format_double(cfg.behavior.p_freeze) << '\n';
  out << "behavior.p_win_fight = " << detail::format_double(cfg.behavior.p_win_fight) << '\n';
  out << "behavior.p_escape = " << detail::format_double(cfg.behavior.p_escape) << '\n';
  out << "behavior.p_win_caught = " << detail::format_double(cfg.behavior.p_win_caught) << '\n';
  out << "behavior.p_win_freeze = " << detail::format_double(cfg.behavior.p_win_freeze) << '\n';
  out << "movement.base_weight = " << detail::format_double(cfg.movement.base_weight) << '\n';
  out << "movement.bias_per_km = " << detail::format_double(cfg.movement.bias_per_km) << '\n';
  out << "movement.bias_cap_distance = " << cfg.movement.bias_cap_distance << '\n';
  out << "movement.full_bias_distance = " << cfg.movement.full_bias_distance << '\n';
  out << "engine.incubation_steps = " << cfg.incubation_steps << '\n';
  out << "batch.n_runs = " << cfg.n_runs << '\n';
  out << "batch.base_seed = " << cfg.base_seed << '\n';
  out << "batch.max_steps = " << cfg.max_steps << '\n';
  out << "batch.max_parallel_runs = " << cfg.max_parallel_runs << '\n';
  out << "batch.trajectory_stride = " << cfg.trajectory_stride << '\n';
  out << "output.dir = " << cfg.output_dir << '\n';
  if (!out) throw ConfigError(path + ": write failed");
}

namespace detail {

inline const char* winner_name(Winner w) {
  switch (w) {
    case Winner::Humans: return "Humans";
    case Winner::Zombies: return "Zombies";
    case Winner::Unresolved: return "Unresolved";
  }
  return "Unresolved";
}

}  // namespace detail

// Writes runs.csv, trajectories.csv and histograms.csv into `dir`. Output is
// a byte-deterministic function of the summary: fixed column order, LF line
// endings, no locale involvement.
inline void write_batch_csv(const BatchSummary& summary, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);

  {
    std::ofstream out(fs::path(dir) / "runs.csv", std::ios::binary);
    if (!out) throw std::runtime_error(dir + ": cannot write runs.csv");
    out << "run_id,winner,end_step,peak_zombies,first_border_step\n";
    for (std::size_t i = 0; i < summary.outcomes.size(); ++i) {
      const RunOutcome& o = summary.outcomes[i];
      out << i << ',' << detail::winner_name(o.winner) << ',' << o.end_step << ','
          << o.peak_zombies << ',';
      if (o.first_border_step) out << *o.first_border_step;
      out << '\n';
    }
    if (!out) throw std::runtime_error(dir + ": write failed for runs.csv");
  }
  {
    std::ofstream out(fs::path(dir) / "trajectories.csv", std::ios::binary);
    if (!out) throw std::runtime_error(dir + ": cannot write trajectories.csv");
    out << "run_id,step,healthy,incubating,zombies,dead_zombies\n";
    for (std::size_t i = 0; i < summary.outcomes.size(); ++i)
      for (const TrajectoryRow& row : summary.outcomes[i].trajectory)
        out << i << ',' << row.step << ',' << row.healthy << ',' << row.incubating << ','
            << row.zombies << ',' << row.dead_zombies << '\n';
    if (!out) throw std::runtime_error(dir + ": write failed for trajectories.csv");
  }
  {
    std::ofstream out(fs::path(dir) / "histograms.csv", std::ios::binary);
    if (!out) throw std::runtime_error(dir + ": cannot write histograms.csv");
    out << "metric,bin,count\n";
    for (const auto& [bin, count] : summary.human_win_steps)
      out << "hours_to_win_humans," << bin << ',' << count << '\n';
    for (const auto& [bin, count] : summary.zombie_win_steps)
      out << "hours_to_win_zombies," << bin << ',' << count << '\n';
    for (const auto& [bin, count] : summary.first_border_steps)
      out << "first_border_step," << bin << ',' << count << '\n';
    for (const auto& [bin, count] : summary.peak_zombie_counts)
      out << "peak_zombies," << bin << ',' << count << '\n';
    if (!out) throw std::runtime_error(dir + ": write failed for histograms.csv");
  }
}

// Per-cell occupancy snapshot for rendering. Humans count both healthy and
// incubating agents (they have not transformed yet); zombies are the live
// ones.
struct OccupancySnapshot {
  std::vector<std::uint32_t> humans;
  std::vector<std::uint32_t> zombies;
};

inline OccupancySnapshot occupancy_snapshot(const SimState& st, const GridWorld& world) {
  OccupancySnapshot snap;
  snap.humans.assign(world.cell_count(), 0);
  snap.zombies.assign(world.cell_count(), 0);
  for (std::uint32_t cell = 0; cell < world.cell_count(); ++cell)
    snap.humans[cell] = static_cast<std::uint32_t>(st.cell_civilians[cell].size());
  for (std::uint32_t id : st.live_zombies) ++snap.zombies[st.pos[id]];
  return snap;
}

// Pixel intensity for a population count: logarithmic, since cell counts
// span 0 to ~20000.
inline std::uint8_t frame_intensity(std::uint32_t n) {
  const double v = 64.0 + std::floor(48.0 * std::log2(1.0 + static_cast<double>(n)));
  return static_cast<std::uint8_t>(v < 255.0 ? v : 255.0);
}

// Renders one binary PPM (P6) frame, one pixel per cell, rows top-to-bottom
// by decreasing y. Impassable cells are black, empty passable cells light
// gray, human-occupied cells green, zombie-occupied cells red.
inline std::vector<std::uint8_t> render_frame(const OccupancySnapshot& snap, const GridWorld& world) {
  if (snap.humans.size() != world.cell_count() || snap.zombies.size() != world.cell_count())
    throw std::invalid_argument("render: snapshot dimensions do not match the world");
  std::string header = "P6\n" + std::to_string(world.width()) + " " +
                       std::to_string(world.height()) + "\n255\n";
  std::vector<std::uint8_t> bytes;
  bytes.reserve(header.size() + 3u * world.width() * world.height());
  bytes.insert(bytes.end(), header.begin(), header.end());
  for (std::uint32_t row = 0; row < world.height(); ++row) {
    const std::uint32_t y = world.height() - 1 - row;
    for (std::uint32_t x = 0; x < world.width(); ++x) {
      const std::uint32_t idx = y * world.width() + x;
      std::uint8_t r = 0, g = 0, b = 0;
      if (!world.passable_index(idx)) {
        // black
      } else if (snap.zombies[idx] > 0) {
        r = frame_intensity(snap.zombies[idx]);
      } else if (snap.humans[idx] > 0) {
        g = frame_intensity(snap.humans[idx]);
      } else {
        r = g = b = 220;
      }
      bytes.push_back(r);
      bytes.push_back(g);
      bytes.push_back(b);
    }
  }
  return bytes;
}

inline void write_frame(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot write frame");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error(path + ": frame write failed");
}

inline std::string frame_filename(std::uint32_t step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06u.ppm", step);
  return std::string(buf);
}

}  // namespace zsim
