// Command-line front end: train tables, evaluate them greedily, run the
// optimal-control baseline, compare the two on shared episodes, re-emit
// plots from metrics files, and dump FIFO schedules for audit.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "crossq/config.hpp"
#include "crossq/harness.hpp"
#include "crossq/io.hpp"
#include "crossq/plots.hpp"

namespace fs = std::filesystem;
using namespace crossq;

namespace {

struct CommonOpts {
  std::string preset;
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  long episodes = 0;  // 0: command-specific default
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config = true) {
  if (needs_config) {
    cmd->add_option("--preset", opts.preset, "built-in preset (scenario1, scenario2)");
    cmd->add_option("--config", opts.config_path,
                    "JSON config file (overrides the preset when both are given)");
  }
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "master seed");
  cmd->add_option("--episodes", opts.episodes, "episode count override");
}

Config resolve_config(const CommonOpts& opts) {
  Config cfg;
  if (!opts.preset.empty()) cfg = preset_by_name(opts.preset);
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path, cfg);
  if (opts.preset.empty() && opts.config_path.empty())
    throw std::invalid_argument("provide --preset or --config");
  cfg.validate();
  for (const auto& w : cfg.warnings()) std::cerr << "warning: " << w << "\n";
  return cfg;
}

fs::path prepare_out(const CommonOpts& opts, const Config& cfg) {
  fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  save_config(cfg, (dir / "config.json").string());
  return dir;
}

std::string table_path(const fs::path& dir, int vehicle) {
  return (dir / ("cav" + std::to_string(vehicle) + ".qt")).string();
}

std::vector<QTable> load_tables(const std::string& dir, int n) {
  std::vector<QTable> tables;
  for (int i = 1; i <= n; ++i)
    tables.push_back(load_qtable(table_path(fs::path(dir), i)));
  return tables;
}

int cmd_train(const CommonOpts& opts) {
  Config cfg = resolve_config(opts);
  if (opts.episodes > 0) cfg.learner.total_episodes = opts.episodes;
  const fs::path dir = prepare_out(opts, cfg);

  auto progress = [](long ep, long total, long crashes) {
    std::fprintf(stderr, "episode %ld / %ld (crashes so far: %ld)\n", ep, total,
                 crashes);
  };
  TrainResult result = train(cfg, opts.seed, progress);

  SnapshotMeta meta;
  meta.mode = cfg.learner.mode;
  meta.episode = result.episodes;
  meta.grid = make_grid(cfg.sim, cfg.intersection);
  for (std::size_t i = 0; i < result.tables.size(); ++i)
    save_qtable(result.tables[i], meta, table_path(dir, static_cast<int>(i + 1)));

  write_norms_csv(result.norm_history, (dir / "norms.csv").string());
  write_qnorm_plot(result.norm_history, (dir / "norms.svg").string());

  char buf[160];
  std::snprintf(buf, sizeof(buf), "episodes,crashes\n%ld,%ld\n", result.episodes,
                result.crashes);
  write_text_file((dir / "train_summary.csv").string(), buf);

  std::printf("trained %ld episodes (%ld crashed); tables in %s\n", result.episodes,
              result.crashes, dir.string().c_str());
  return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& tables_dir) {
  Config cfg = resolve_config(opts);
  const long episodes = opts.episodes > 0 ? opts.episodes : 1000;
  const fs::path dir = prepare_out(opts, cfg);
  auto tables = load_tables(tables_dir, cfg.scenario.n_vehicles);

  std::vector<StepRecord> trace;
  EvalSummary sum = evaluate(cfg, tables, episodes, opts.seed, &trace);

  write_eval_csv(sum, (dir / "eval.csv").string());
  write_eval_summary_csv(sum, (dir / "eval_summary.csv").string());
  std::string traj = trace_csv_header();
  append_trace_csv(traj, "rl", 0, trace);
  write_text_file((dir / "trajectory_ep0.csv").string(), traj);
  write_position_plot(trace, nullptr, (dir / "positions_ep0.svg").string());

  std::printf("episodes %ld crashes %ld rear %ld lateral %ld mean_travel %.3f "
              "fifo_respected %.4f merge_err %.4f\n",
              sum.episodes, sum.crashes, sum.rear_violations,
              sum.lateral_violations, sum.mean_travel_time,
              sum.fifo_respected_fraction, sum.mean_merge_abs_err);
  return 0;
}

int cmd_baseline(const CommonOpts& opts) {
  Config cfg = resolve_config(opts);
  const long episodes = opts.episodes > 0 ? opts.episodes : 1;
  const fs::path dir = prepare_out(opts, cfg);

  std::string traj = trace_csv_header();
  long warnings = 0;
  for (long ep = 0; ep < episodes; ++ep) {
    auto rng = episode_rng(opts.seed, RngStream::Setup, ep);
    auto setup = sample_episode_setup(cfg, rng);
    BaselineEpisode base = run_baseline_episode(cfg, setup);
    warnings += base.bound_warnings;
    append_baseline_trace_csv(traj, ep, base.result, cfg.intersection);
    if (ep == 0) {
      write_text_file((dir / "schedule_ep0.csv").string(),
                      schedule_csv(base.result.schedule));
      write_position_plot({}, &base.result, (dir / "positions_ep0.svg").string());
    }
  }
  write_text_file((dir / "baseline_trajectories.csv").string(), traj);
  std::printf("baseline over %ld episodes, %ld bound warnings; output in %s\n",
              episodes, warnings, dir.string().c_str());
  return 0;
}

int cmd_compare(const CommonOpts& opts, const std::string& tables_dir) {
  Config cfg = resolve_config(opts);
  const long episodes = opts.episodes > 0 ? opts.episodes : 1000;
  const fs::path dir = prepare_out(opts, cfg);
  auto tables = load_tables(tables_dir, cfg.scenario.n_vehicles);

  CompareReport rep = compare(cfg, tables, episodes, opts.seed);
  write_compare_csv(rep, (dir / "compare.csv").string());

  // overlay of the first shared episode
  auto setup_rng = episode_rng(opts.seed, RngStream::Setup, 0);
  auto policy_rng = episode_rng(opts.seed, RngStream::Policy, 0);
  auto setup = sample_episode_setup(cfg, setup_rng);
  std::vector<StepRecord> trace;
  run_episode(cfg, setup, tables, false, 0.0, policy_rng, &trace);
  BaselineEpisode base = run_baseline_episode(cfg, setup);
  write_position_plot(trace, &base.result, (dir / "overlay_ep0.svg").string());
  std::string traj = trace_csv_header();
  append_trace_csv(traj, "rl", 0, trace);
  append_baseline_trace_csv(traj, 0, base.result, cfg.intersection);
  write_text_file((dir / "overlay_ep0.csv").string(), traj);

  std::printf("compared %ld episodes: mean travel delta %.3f s, mean fuel delta "
              "%.3f, rl crashes %ld\n",
              static_cast<long>(rep.rows.size()), rep.mean_travel_delta,
              rep.mean_fuel_delta, rep.rl_crashes);
  return 0;
}

int cmd_plot(const std::string& norms_csv, const std::string& out_dir) {
  // rebuild the norm chart from a previously written metrics file
  std::ifstream in(norms_csv);
  if (!in) throw std::runtime_error("cannot open: " + norms_csv);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty metrics file");
  std::vector<NormRecord> history;
  while (std::getline(in, line)) {
    NormRecord rec;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() < 2) continue;
    rec.episode = static_cast<long>(vals[0]);
    rec.per_vehicle.assign(vals.begin() + 1, vals.end() - 1);
    rec.average = vals.back();
    history.push_back(std::move(rec));
  }
  fs::create_directories(out_dir);
  write_qnorm_plot(history, (fs::path(out_dir) / "norms.svg").string());
  std::printf("wrote %s/norms.svg (%zu records)\n", out_dir.c_str(), history.size());
  return 0;
}

int cmd_fifo_dump(const CommonOpts& opts) {
  Config cfg = resolve_config(opts);
  const long episodes = opts.episodes > 0 ? opts.episodes : 1;
  const fs::path dir = prepare_out(opts, cfg);
  for (long ep = 0; ep < episodes; ++ep) {
    auto rng = episode_rng(opts.seed, RngStream::Setup, ep);
    auto setup = sample_episode_setup(cfg, rng);
    auto sched = schedule(setup.plans, cfg.intersection, cfg.sim, cfg.time_headway);
    write_text_file((dir / ("schedule_ep" + std::to_string(ep) + ".csv")).string(),
                    schedule_csv(sched));
  }
  std::printf("wrote %ld schedule dumps to %s\n", episodes, dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signal-free intersection coordination: tabular multi-agent "
               "Q-learning, FIFO scheduling, and an optimal-control baseline"};
  app.require_subcommand(1);

  CommonOpts train_opts, eval_opts, base_opts, cmp_opts, fifo_opts;
  std::string eval_tables, cmp_tables, norms_csv, plot_out = "out";

  auto* c_train = app.add_subcommand("train", "train Q-tables for a scenario");
  add_common(c_train, train_opts);

  auto* c_eval = app.add_subcommand("eval", "greedy evaluation of trained tables");
  add_common(c_eval, eval_opts);
  c_eval->add_option("--tables", eval_tables, "directory holding cavN.qt files")
      ->required();

  auto* c_base = app.add_subcommand("baseline", "run the optimal-control baseline");
  add_common(c_base, base_opts);

  auto* c_cmp = app.add_subcommand("compare", "paired RL vs baseline comparison");
  add_common(c_cmp, cmp_opts);
  c_cmp->add_option("--tables", cmp_tables, "directory holding cavN.qt files")
      ->required();

  auto* c_plot = app.add_subcommand("plot", "re-emit charts from metrics CSVs");
  c_plot->add_option("--norms", norms_csv, "norms.csv from a training run")
      ->required();
  c_plot->add_option("--out", plot_out, "output directory");

  auto* c_fifo = app.add_subcommand("fifo-dump", "dump FIFO schedules for audit");
  add_common(c_fifo, fifo_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_train->parsed()) return cmd_train(train_opts);
    if (c_eval->parsed()) return cmd_eval(eval_opts, eval_tables);
    if (c_base->parsed()) return cmd_baseline(base_opts);
    if (c_cmp->parsed()) return cmd_compare(cmp_opts, cmp_tables);
    if (c_plot->parsed()) return cmd_plot(norms_csv, plot_out);
    if (c_fifo->parsed()) return cmd_fifo_dump(fifo_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
