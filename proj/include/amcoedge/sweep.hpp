#ifndef AMCOEDGE_SWEEP_HPP_
#define AMCOEDGE_SWEEP_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "amcoedge/config.hpp"
#include "amcoedge/csv.hpp"
#include "amcoedge/simulator.hpp"

namespace amcoedge {

/// Mean of every metric over the last `fraction` of episodes (at least one).
MetricsRecord summarize_tail(const std::vector<MetricsRecord>& records, double fraction = 0.1);

/// Mean of every metric over the first `fraction` of episodes (at least one).
MetricsRecord summarize_head(const std::vector<MetricsRecord>& records, double fraction = 0.1);

bool is_sweep_parameter(std::string_view parameter);

/// Applies one sweep point. Parameters: N (tasks per slot), p_n (arrival
/// probability), tau (deadline, s), f-range (GHz, "low:high") and
/// d-range (Mbit, "low:high").
void apply_sweep_value(RunConfig& config, std::string_view parameter, std::string_view value);

struct SweepRow
{
  std::string parameter;
  std::string value;
  PolicySpec policy;
  std::uint64_t seed = 0;
  int episodes_averaged = 0;
  MetricsRecord summary;
};

/// One experiment per (value, policy, seed); seeds are base.seed .. base.seed + seeds - 1.
std::vector<SweepRow> sweep(const RunConfig& base, std::string_view parameter, const std::vector<std::string>& values,
                            const std::vector<PolicySpec>& policies, int seeds);

/// parameter, value, policy, seed, episodes_averaged, then the metric columns.
CsvTable sweep_table(const std::vector<SweepRow>& rows);

}  // namespace amcoedge

#endif  // AMCOEDGE_SWEEP_HPP_
