#ifndef AMCOEDGE_SIMULATOR_HPP_
#define AMCOEDGE_SIMULATOR_HPP_

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "amcoedge/adqn.hpp"
#include "amcoedge/config.hpp"
#include "amcoedge/core_model.hpp"
#include "amcoedge/random.hpp"

namespace amcoedge {

struct MetricsRecord
{
  int episode = 0;
  double mean_make_span = 0.0;
  double failure_rate = 0.0;
  // Delay components of each task's bottleneck ES, averaged over tasks.
  double mean_waiting = 0.0;
  double mean_transmission = 0.0;
  double mean_computing = 0.0;
  std::int64_t tasks_arrived = 0;
  std::int64_t tasks_dropped = 0;
  // Wall-clock per decision, training excluded. Not reproducible, so kept
  // out of the metrics CSV.
  double decision_ms = 0.0;
};

/// Cycle accounting for one episode: arrived = drained + final backlog.
struct WorkloadLedger
{
  double arrived = 0.0;
  double drained = 0.0;
  double final_backlog = 0.0;
};

struct EpisodeResult
{
  MetricsRecord metrics;
  QueueState final_queues;
  WorkloadLedger workload;
};

/// Arrivals of one slot, one list per BS. Each of the N candidate tasks at a
/// BS materialises with the configured probability.
std::vector<std::vector<Task>> generate_tasks(const RunConfig& config, int slot, Rng& rng);

/// Capacities and pairwise rates, drawn once per run.
ClusterTopology generate_topology(const RunConfig& config, Rng& rng);

/// One run: a fixed topology, a persistent agent per BS (for learning
/// policies) and an episode counter. The run is a pure function of its config.
class Simulation
{
 public:
  explicit Simulation(RunConfig config);
  Simulation(RunConfig config, ClusterTopology topology);

  EpisodeResult run_episode();
  std::vector<MetricsRecord> run_experiment();

  const RunConfig& config() const { return config_; }
  const ClusterTopology& topology() const { return topology_; }
  const StateNormalization& normalization() const { return norm_; }
  std::vector<DqnAgent>& agents() { return agents_; }
  const std::vector<DqnAgent>& agents() const { return agents_; }
  int episodes_run() const { return episode_; }

 private:
  struct Decision
  {
    SelectionSet selection;
    AllocationFractions<double> fractions;
  };

  Decision decide(const Task& task, int source, const QueueState& queues);

  RunConfig config_;
  ClusterTopology topology_;
  StateNormalization norm_;
  std::vector<DqnAgent> agents_;
  Rng arrivals_rng_;
  Rng policy_rng_;
  int episode_ = 0;
};

/// Per-agent network settings derived from the run config and policy.
AgentConfig agent_config_for(const RunConfig& config);

}  // namespace amcoedge

#endif  // AMCOEDGE_SIMULATOR_HPP_
