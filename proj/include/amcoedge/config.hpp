#ifndef AMCOEDGE_CONFIG_HPP_
#define AMCOEDGE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "amcoedge/policies.hpp"

namespace amcoedge {

struct Range
{
  double low = 0.0;
  double high = 0.0;
};

/// Everything that determines one simulation run. Stored in base units
/// (bits, cycles/bit, cycles/s, bits/s, seconds); the text format uses Mbit,
/// GHz and Mbit/s and is converted on parse.
struct RunConfig
{
  int num_servers = 5;
  int slots = 60;
  double slot_length = 1.0;
  int episodes = 300;
  int tasks_per_slot = 50;
  double arrival_prob = 0.3;
  Range data_size{2e6, 5e6};
  Range compute_density{100.0, 300.0};
  Range capacity{10e9, 50e9};
  Range rate{400e6, 500e6};
  double deadline = 1.0;
  PolicySpec policy{};
  AllocVariant alloc = AllocVariant::kCwa;
  std::uint64_t seed = 1;

  std::int64_t warmup_actions = 200;
  std::int64_t train_every = 10;
  std::size_t batch_size = 32;
  std::int64_t target_sync_interval = 100;
  std::size_t replay_capacity = 500;
  double learning_rate = 1e-3;
  double gamma = 0.9;
  double epsilon_step = 0.001;
  double epsilon_ceiling = 0.99;

  void validate() const;

  /// Allocation variant actually used: AMCoEdge-H always runs HECWA.
  AllocVariant effective_alloc() const
  {
    return policy.kind == PolicyKind::kAMCoEdgeH ? AllocVariant::kHecwa : alloc;
  }

  /// Smaller scenario used for quick experiments: B = 5, E = 100, N = 20.
  static RunConfig desk();
};

/// Sets one field from its text form, e.g. ("capacity_ghz", "10,50").
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` lines; '#' starts a comment.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Inverse of parse_config; every key is written.
std::string format_config(const RunConfig& config);

}  // namespace amcoedge

#endif  // AMCOEDGE_CONFIG_HPP_
