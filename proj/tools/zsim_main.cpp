// Command-line front end: map generation, single runs, Monte Carlo batches,
// the analytic chain solver and frame rendering.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zsim/analytic.hpp"
#include "zsim/engine.hpp"
#include "zsim/grid_world.hpp"
#include "zsim/montecarlo.hpp"
#include "zsim/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct GenMapArgs {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint64_t population = 0;
  std::string placement = "uniform";
  std::vector<std::int32_t> hotspot;     // x y
  double sigma = 0.0;
  std::vector<std::int32_t> quarantine;  // x0 y0 x1 y1
  std::vector<std::vector<std::int32_t>> impassable;
  std::string out;
};

int cmd_gen_map(const GenMapArgs& args) {
  zsim::SyntheticSpec spec;
  spec.width = args.width;
  spec.height = args.height;
  spec.total_population = args.population;
  if (args.placement == "uniform")
    spec.placement = zsim::Placement::Uniform;
  else if (args.placement == "hotspot")
    spec.placement = zsim::Placement::Hotspot;
  else
    throw zsim::ConfigError("gen-map: placement must be uniform or hotspot");
  if (!args.hotspot.empty()) spec.hotspot_center = zsim::Cell{args.hotspot[0], args.hotspot[1]};
  spec.hotspot_sigma = args.sigma;
  if (!args.quarantine.empty())
    spec.quarantine = zsim::RectSpec{args.quarantine[0], args.quarantine[1], args.quarantine[2],
                                     args.quarantine[3]};
  for (const auto& r : args.impassable)
    spec.impassable.push_back(zsim::RectSpec{r[0], r[1], r[2], r[3]});

  const zsim::GridWorld world = zsim::synthetic_world(spec);
  zsim::save_raster(world, args.out);
  std::cout << "wrote " << args.out << ": " << world.width() << "x" << world.height()
            << ", population " << world.total_population() << "\n";
  return kExitOk;
}

void print_outcome(const zsim::RunOutcome& o) {
  const char* winner = o.winner == zsim::Winner::Humans    ? "Humans"
                       : o.winner == zsim::Winner::Zombies ? "Zombies"
                                                           : "Unresolved";
  std::cout << "winner=" << winner << " end_step=" << o.end_step
            << " peak_zombies=" << o.peak_zombies << " first_border_step=";
  if (o.first_border_step)
    std::cout << *o.first_border_step;
  else
    std::cout << "-";
  std::cout << "\n";
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& frames_dir, std::uint32_t frame_every) {
  if (frame_every == 0) frame_every = 1;
  zsim::RunConfig cfg = zsim::load_run_config(config_path);
  const zsim::GridWorld world = zsim::load_raster(cfg.map_path, cfg.origin);
  const std::uint64_t run_seed = seed.value_or(cfg.base_seed);

  if (frames_dir.empty()) {
    const zsim::RunOutcome o = zsim::run(world, cfg.scenario, cfg.behavior, cfg.movement,
                                         run_seed, cfg.max_steps, cfg.incubation_steps,
                                         cfg.trajectory_stride);
    print_outcome(o);
    return kExitOk;
  }

  std::filesystem::create_directories(frames_dir);
  zsim::SimState st = zsim::init_run(world, cfg.scenario, run_seed, cfg.incubation_steps,
                                     cfg.trajectory_stride);
  auto dump = [&](std::uint32_t step_no) {
    if (step_no % frame_every != 0) return;
    const auto frame = zsim::render_frame(zsim::occupancy_snapshot(st, world), world);
    zsim::write_frame(frame, (std::filesystem::path(frames_dir) / zsim::frame_filename(step_no)).string());
  };
  dump(0);
  zsim::RunOutcome o;
  for (;;) {
    const zsim::Termination t = zsim::check_termination(st);
    if (t == zsim::Termination::HumansWin) {
      o.winner = zsim::Winner::Humans;
      break;
    }
    if (t == zsim::Termination::ZombiesWin) {
      o.winner = zsim::Winner::Zombies;
      break;
    }
    if (st.step >= cfg.max_steps) {
      o.winner = zsim::Winner::Unresolved;
      break;
    }
    zsim::step(st, world, cfg.behavior, cfg.movement);
    dump(st.step);
  }
  st.force_record_final();
  o.end_step = st.step;
  o.peak_zombies = st.peak_zombies;
  if (st.first_border_step >= 0) o.first_border_step = static_cast<std::uint32_t>(st.first_border_step);
  o.trajectory = std::move(st.trajectory);
  print_outcome(o);
  return kExitOk;
}

int cmd_batch(const std::string& config_path, std::optional<std::uint32_t> runs,
              std::optional<std::uint64_t> seed, std::optional<std::string> scenario,
              std::optional<std::uint32_t> parallel, std::optional<std::string> out_dir) {
  zsim::RunConfig cfg = zsim::load_run_config(config_path);
  if (runs) cfg.n_runs = *runs;
  if (seed) cfg.base_seed = *seed;
  if (scenario) cfg.scenario.kind = zsim::detail::parse_scenario_kind(*scenario);
  if (parallel) cfg.max_parallel_runs = *parallel;
  if (out_dir) cfg.output_dir = *out_dir;
  cfg.validate();

  const zsim::GridWorld world = zsim::load_raster(cfg.map_path, cfg.origin);
  const zsim::BatchSummary summary = zsim::run_batch(world, cfg.batch_config());
  zsim::write_batch_csv(summary, cfg.output_dir);
  zsim::save_run_config(cfg, (std::filesystem::path(cfg.output_dir) / "effective_config.txt").string());

  std::cout << "runs=" << summary.n_runs << " human_wins=" << summary.human_wins
            << " zombie_wins=" << summary.zombie_wins << " unresolved=" << summary.unresolved
            << "\n";
  return kExitOk;
}

int cmd_analyze_chain(double q, std::uint32_t cap) {
  zsim::ChainSpec spec{q, cap, zsim::ChainKernel::SingleEvent};
  const zsim::ExtinctionResult single = zsim::extinction_probability(spec);
  spec.kernel = zsim::ChainKernel::PerZombieWave;
  const zsim::ExtinctionResult wave = zsim::extinction_probability(spec);

  std::cout << "q = " << q << ", win cap = " << cap << "\n";
  std::cout << "single-event kernel  : extinction " << single.extinction_probability
            << ", zombie win " << single.zombie_win_probability << "\n";
  std::cout << "per-zombie-wave      : extinction " << wave.extinction_probability
            << ", zombie win " << wave.zombie_win_probability << "\n";
  std::cout << "reference (published probability-tree estimate): zombie win 0.691\n";
  return kExitOk;
}

int cmd_render(const std::string& config_path, std::optional<std::uint64_t> seed,
               const std::string& out_dir, std::uint32_t every) {
  return cmd_run(config_path, seed, out_dir, every);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zsim - stochastic epidemic simulator on a population raster"};
  app.require_subcommand(1);

  GenMapArgs gen;
  CLI::App* gen_map = app.add_subcommand("gen-map", "Generate a synthetic map CSV");
  gen_map->add_option("--width", gen.width, "grid width in cells")->required();
  gen_map->add_option("--height", gen.height, "grid height in cells")->required();
  gen_map->add_option("--population", gen.population, "total population")->required();
  gen_map->add_option("--placement", gen.placement, "uniform|hotspot");
  gen_map->add_option("--hotspot", gen.hotspot, "hotspot center: X Y")->expected(2);
  gen_map->add_option("--sigma", gen.sigma, "hotspot radial decay scale");
  gen_map->add_option("--quarantine", gen.quarantine, "quarantine rect: X0 Y0 X1 Y1")->expected(4);
  gen_map
      ->add_option("--impassable", gen.impassable,
                   "impassable rect: X0 Y0 X1 Y1 (repeatable)")
      ->expected(4);
  gen_map->add_option("--out", gen.out, "output CSV path")->required();

  std::string run_config;
  std::optional<std::uint64_t> run_seed;
  std::string run_frames;
  std::uint32_t run_every = 1;
  CLI::App* run_cmd = app.add_subcommand("run", "Execute a single run");
  run_cmd->add_option("--config", run_config, "run config file")->required();
  run_cmd->add_option("--seed", run_seed, "seed override");
  run_cmd->add_option("--frames", run_frames, "write PPM frames into this directory");
  run_cmd->add_option("--every", run_every, "frame stride in steps");

  std::string batch_config;
  std::optional<std::uint32_t> batch_runs;
  std::optional<std::uint64_t> batch_seed;
  std::optional<std::string> batch_scenario;
  std::optional<std::uint32_t> batch_parallel;
  std::optional<std::string> batch_out;
  CLI::App* batch_cmd = app.add_subcommand("batch", "Execute a Monte Carlo batch");
  batch_cmd->add_option("--config", batch_config, "run config file")->required();
  batch_cmd->add_option("--runs", batch_runs, "override batch.n_runs");
  batch_cmd->add_option("--seed", batch_seed, "override batch.base_seed");
  batch_cmd->add_option("--scenario", batch_scenario, "override scenario.kind (none|strict|leaky)");
  batch_cmd->add_option("--parallel", batch_parallel, "override batch.max_parallel_runs");
  batch_cmd->add_option("--out", batch_out, "override output.dir");

  CLI::App* analyze = app.add_subcommand("analyze", "Analytic results");
  double chain_q = 0.246341;
  std::uint32_t chain_cap = 5;
  CLI::App* chain_cmd = analyze->add_subcommand("chain", "Absorbing-chain outbreak outcome");
  chain_cmd->add_option("--q", chain_q, "conditional zombie defeat probability");
  chain_cmd->add_option("--cap", chain_cap, "zombie count treated as a zombie win");
  analyze->require_subcommand(1);

  std::string render_config;
  std::optional<std::uint64_t> render_seed;
  std::string render_out;
  std::uint32_t render_every = 1;
  CLI::App* render_cmd = app.add_subcommand("render", "Re-simulate a run and write PPM frames");
  render_cmd->add_option("--config", render_config, "run config file")->required();
  render_cmd->add_option("--seed", render_seed, "seed override");
  render_cmd->add_option("--out", render_out, "output frame directory")->required();
  render_cmd->add_option("--every", render_every, "frame stride in steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen_map) return cmd_gen_map(gen);
    if (*run_cmd) return cmd_run(run_config, run_seed, run_frames, run_every);
    if (*batch_cmd)
      return cmd_batch(batch_config, batch_runs, batch_seed, batch_scenario, batch_parallel,
                       batch_out);
    if (*chain_cmd) return cmd_analyze_chain(chain_q, chain_cap);
    if (*render_cmd) return cmd_render(render_config, render_seed, render_out, render_every);
  } catch (const zsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const zsim::MapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
