// Command-line front end: run, sweep, bench, train.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amcoedge/bench.hpp"
#include "amcoedge/checkpoint.hpp"
#include "amcoedge/config.hpp"
#include "amcoedge/csv.hpp"
#include "amcoedge/simulator.hpp"
#include "amcoedge/sweep.hpp"

namespace fs = std::filesystem;
using namespace amcoedge;

namespace {

struct CommonOptions
{
  std::string config_path;
  std::vector<std::string> overrides;
  std::string policy;
  std::string alloc;
  long long seed = -1;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
  cmd->add_option("--config", o.config_path, "config file (key = value lines)")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "override a config key, e.g. --set episodes=20");
  cmd->add_option("--policy", o.policy, "AMCoEdge, AMCoEdge-H, RandCoEdge, DRLCoEdge, SMCoEdge(k), Optimal");
  cmd->add_option("--alloc", o.alloc, "cwa or hecwa");
  cmd->add_option("--seed", o.seed, "master seed")->check(CLI::NonNegativeNumber);
}

RunConfig resolve(const CommonOptions& o)
{
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.policy.empty()) cfg.policy = parse_policy(o.policy);
  if (!o.alloc.empty()) cfg.alloc = parse_alloc(o.alloc);
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  cfg.validate();
  return cfg;
}

std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

void ensure_dir(const fs::path& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Multi-edge collaborative task offloading simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string run_out = "out";
  std::string run_checkpoint;
  auto* run = app.add_subcommand("run", "simulate one policy; writes metrics.csv and timing.csv");
  add_common(run, run_opts);
  run->add_option("--out", run_out, "output directory");
  run->add_option("--load-checkpoint", run_checkpoint, "start learning agents from a checkpoint")
      ->check(CLI::ExistingFile);

  CommonOptions sweep_opts;
  std::string sweep_param, sweep_values, sweep_policies = "AMCoEdge,RandCoEdge,DRLCoEdge,SMCoEdge(3)";
  std::string sweep_out = "out";
  int sweep_seeds = 1;
  auto* sw = app.add_subcommand("sweep", "vary one parameter across policies and seeds; writes sweep.csv");
  add_common(sw, sweep_opts);
  sw->add_option("--param", sweep_param, "N, p_n, tau, f-range or d-range")->required();
  sw->add_option("--values", sweep_values, "comma separated; ranges as low:high")->required();
  sw->add_option("--policies", sweep_policies, "comma separated policy tags");
  sw->add_option("--seeds", sweep_seeds, "number of seeds per point")->check(CLI::PositiveNumber);
  sw->add_option("--out", sweep_out, "output directory");

  int bench_kmax = 16, bench_reps = 31;
  long long bench_seed = 1;
  std::string bench_out = "out";
  auto* bench = app.add_subcommand("bench", "time CWA and HECWA per selection size; writes bench.csv");
  bench->add_option("--kmax", bench_kmax, "largest selection size")->check(CLI::Range(1, 32));
  bench->add_option("--reps", bench_reps, "timed repetitions per size")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed)->check(CLI::NonNegativeNumber);
  bench->add_option("--out", bench_out, "output directory");

  CommonOptions train_opts;
  std::string train_checkpoint, train_out;
  auto* train = app.add_subcommand("train", "run a learning policy and save its agents");
  add_common(train, train_opts);
  train->add_option("--checkpoint", train_checkpoint, "checkpoint file to write")->required();
  train->add_option("--out", train_out, "also write metrics.csv here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const RunConfig cfg = resolve(run_opts);
      Simulation sim(cfg);
      if (!run_checkpoint.empty()) {
        if (!cfg.policy.learns()) throw std::invalid_argument("--load-checkpoint needs a learning policy");
        load_checkpoint(run_checkpoint, sim.agents());
      }
      const auto records = sim.run_experiment();
      ensure_dir(run_out);
      write_csv(metrics_table(records, cfg), fs::path(run_out) / "metrics.csv");
      write_csv(timing_table(records, cfg), fs::path(run_out) / "timing.csv");
    } else if (*sw) {
      const RunConfig cfg = resolve(sweep_opts);
      std::vector<PolicySpec> policies;
      for (const auto& tag : split(sweep_policies, ',')) policies.push_back(parse_policy(tag));
      const auto rows = sweep(cfg, sweep_param, split(sweep_values, ','), policies, sweep_seeds);
      ensure_dir(sweep_out);
      write_csv(sweep_table(rows), fs::path(sweep_out) / "sweep.csv");
    } else if (*bench) {
      const auto rows = bench_allocation(bench_kmax, bench_reps, static_cast<std::uint64_t>(bench_seed));
      ensure_dir(bench_out);
      write_csv(bench_table(rows), fs::path(bench_out) / "bench.csv");
    } else if (*train) {
      const RunConfig cfg = resolve(train_opts);
      if (!cfg.policy.learns()) throw std::invalid_argument("train needs a learning policy");
      Simulation sim(cfg);
      const auto records = sim.run_experiment();
      save_checkpoint(train_checkpoint, sim.agents());
      if (!train_out.empty()) {
        ensure_dir(train_out);
        write_csv(metrics_table(records, cfg), fs::path(train_out) / "metrics.csv");
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "amcoedge: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
