#include "amcoedge/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amcoedge {

namespace {

MetricsRecord average(std::vector<MetricsRecord>::const_iterator first, std::vector<MetricsRecord>::const_iterator last)
{
  MetricsRecord out;
  const auto n = static_cast<double>(std::distance(first, last));
  if (n == 0) return out;
  out.episode = first->episode;
  for (auto it = first; it != last; ++it) {
    out.mean_make_span += it->mean_make_span / n;
    out.failure_rate += it->failure_rate / n;
    out.mean_waiting += it->mean_waiting / n;
    out.mean_transmission += it->mean_transmission / n;
    out.mean_computing += it->mean_computing / n;
    out.decision_ms += it->decision_ms / n;
    out.tasks_arrived += it->tasks_arrived;
    out.tasks_dropped += it->tasks_dropped;
  }
  return out;
}

std::size_t window(std::size_t total, double fraction)
{
  const auto n = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(total) - 1e-9));
  return std::clamp<std::size_t>(n, 1, std::max<std::size_t>(total, 1));
}

}  // namespace

MetricsRecord summarize_tail(const std::vector<MetricsRecord>& records, double fraction)
{
  const std::size_t n = std::min(window(records.size(), fraction), records.size());
  return average(records.end() - static_cast<std::ptrdiff_t>(n), records.end());
}

MetricsRecord summarize_head(const std::vector<MetricsRecord>& records, double fraction)
{
  const std::size_t n = std::min(window(records.size(), fraction), records.size());
  return average(records.begin(), records.begin() + static_cast<std::ptrdiff_t>(n));
}

bool is_sweep_parameter(std::string_view p)
{
  return p == "N" || p == "p_n" || p == "tau" || p == "f-range" || p == "d-range";
}

void apply_sweep_value(RunConfig& config, std::string_view parameter, std::string_view value)
{
  const std::string v(value);
  if (parameter == "N") set_config_value(config, "tasks_per_slot", v);
  else if (parameter == "p_n") set_config_value(config, "arrival_prob", v);
  else if (parameter == "tau") set_config_value(config, "deadline", v);
  else if (parameter == "f-range") set_config_value(config, "capacity_ghz", v);
  else if (parameter == "d-range") set_config_value(config, "data_size_mbit", v);
  else throw std::invalid_argument("unknown sweep parameter: '" + std::string(parameter) + "' (expected N, p_n, tau, f-range, d-range)");
}

std::vector<SweepRow> sweep(const RunConfig& base, std::string_view parameter, const std::vector<std::string>& values,
                            const std::vector<PolicySpec>& policies, int seeds)
{
  if (!is_sweep_parameter(parameter))
    throw std::invalid_argument("unknown sweep parameter: '" + std::string(parameter) + "' (expected N, p_n, tau, f-range, d-range)");
  std::vector<SweepRow> rows;
  for (const auto& value : values) {
    for (const auto& policy : policies) {
      for (int s = 0; s < seeds; ++s) {
        RunConfig config = base;
        apply_sweep_value(config, parameter, value);
        config.policy = policy;
        config.seed = base.seed + static_cast<std::uint64_t>(s);
        Simulation sim(config);
        const auto records = sim.run_experiment();
        SweepRow row;
        row.parameter = std::string(parameter);
        row.value = value;
        row.policy = policy;
        row.seed = config.seed;
        row.episodes_averaged = static_cast<int>(std::min(window(records.size(), 0.1), records.size()));
        row.summary = summarize_tail(records);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

CsvTable sweep_table(const std::vector<SweepRow>& rows)
{
  CsvTable t;
  t.header = {"parameter",      "value",        "policy",       "seed",
              "episodes_averaged", "mean_make_span", "failure_rate", "mean_waiting",
              "mean_transmission", "mean_computing", "tasks_arrived", "tasks_dropped"};
  for (const auto& r : rows) {
    std::vector<std::string> row{r.parameter, r.value, to_string(r.policy), std::to_string(r.seed),
                                 std::to_string(r.episodes_averaged)};
    const auto& m = r.summary;
    for (double v : {m.mean_make_span, m.failure_rate, m.mean_waiting, m.mean_transmission, m.mean_computing})
      row.push_back(format_number(v));
    row.push_back(std::to_string(m.tasks_arrived));
    row.push_back(std::to_string(m.tasks_dropped));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace amcoedge
