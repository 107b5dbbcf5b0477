#ifndef AMCOEDGE_CHECKPOINT_HPP_
#define AMCOEDGE_CHECKPOINT_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>

#include "amcoedge/adqn.hpp"

// Text checkpoint of a set of agents. Every floating-point value is written
// as a C99 hex float, so a save/load cycle reproduces the agents bit-exactly.
// Layout (one token group per line):
//
//   amcoedge-checkpoint <version>
//   agents <count>
//   agent <index>
//   layers <n> <width_0> ... <width_n-1>
//   head <mask|per_server> <top_k>
//   epsilon <value> <step> <ceiling>
//   counters <act_steps> <train_steps>
//   adam <learning_rate> <beta1> <beta2> <epsilon> <step>
//   eval <count> <values...>
//   target <count> <values...>
//   adam_m <count> <values...>
//   adam_v <count> <values...>
//   end
//
// Replay pools and random streams are not saved.
namespace amcoedge {

inline constexpr int kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, std::span<const DqnAgent> agents);

/// Restores into agents built with the same layer layout and head; throws
/// std::runtime_error on any mismatch or malformed input.
void read_checkpoint(std::istream& in, std::span<DqnAgent> agents);

void save_checkpoint(const std::filesystem::path& path, std::span<const DqnAgent> agents);
void load_checkpoint(const std::filesystem::path& path, std::span<DqnAgent> agents);

}  // namespace amcoedge

#endif  // AMCOEDGE_CHECKPOINT_HPP_
