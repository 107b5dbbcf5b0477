#include "amcoedge/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "amcoedge/policies.hpp"

namespace amcoedge {

std::vector<std::vector<Task>> generate_tasks(const RunConfig& config, int slot, Rng& rng)
{
  std::bernoulli_distribution arrives(config.arrival_prob);
  std::vector<std::vector<Task>> out(static_cast<std::size_t>(config.num_servers));
  for (int b = 0; b < config.num_servers; ++b) {
    auto& list = out[static_cast<std::size_t>(b)];
    for (int n = 0; n < config.tasks_per_slot; ++n) {
      if (!arrives(rng)) continue;
      Task t;
      t.id = (static_cast<std::int64_t>(slot) * config.num_servers + b) * config.tasks_per_slot + n;
      t.data_size = uniform(rng, config.data_size.low, config.data_size.high);
      t.compute_density = uniform(rng, config.compute_density.low, config.compute_density.high);
      t.deadline = config.deadline;
      t.arrival_slot = slot;
      t.origin_bs = b;
      list.push_back(t);
    }
  }
  return out;
}

ClusterTopology generate_topology(const RunConfig& config, Rng& rng)
{
  const int b = config.num_servers;
  ClusterTopology topo;
  topo.compute_capacity.resize(b);
  for (int e = 0; e < b; ++e) topo.compute_capacity(e) = uniform(rng, config.capacity.low, config.capacity.high);
  topo.tx_rate = Eigen::MatrixXd::Zero(b, b);
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j)
      if (i != j) topo.tx_rate(i, j) = uniform(rng, config.rate.low, config.rate.high);
  return topo;
}

AgentConfig agent_config_for(const RunConfig& config)
{
  AgentConfig a;
  a.num_servers = config.num_servers;
  switch (config.policy.kind) {
    case PolicyKind::kDRLCoEdge: a.head = {HeadKind::kPerServer, 1}; break;
    case PolicyKind::kSMCoEdge: a.head = {HeadKind::kPerServer, config.policy.k}; break;
    default: a.head = {HeadKind::kMask, 1}; break;
  }
  a.learning_rate = config.learning_rate;
  a.gamma = config.gamma;
  a.replay_capacity = config.replay_capacity;
  a.batch_size = config.batch_size;
  a.warmup_actions = config.warmup_actions;
  a.train_every = config.train_every;
  a.target_sync_interval = config.target_sync_interval;
  a.epsilon_step = config.epsilon_step;
  a.epsilon_ceiling = config.epsilon_ceiling;
  return a;
}

namespace {

ClusterTopology topology_for(const RunConfig& config)
{
  config.validate();
  Rng rng = make_stream(config.seed, Stream::kTopology);
  return generate_topology(config, rng);
}

}  // namespace

Simulation::Simulation(RunConfig config) : Simulation(config, topology_for(config)) {}

Simulation::Simulation(RunConfig config, ClusterTopology topology)
    : config_(std::move(config)),
      topology_(std::move(topology)),
      arrivals_rng_(make_stream(config_.seed, Stream::kArrivals)),
      policy_rng_(make_stream(config_.seed, Stream::kPolicy))
{
  config_.validate();
  topology_.validate();
  if (topology_.num_servers() != config_.num_servers)
    throw std::invalid_argument("Simulation: topology size does not match num_servers");

  norm_.task_size = config_.data_size.high > 0.0 ? config_.data_size.high : 1.0;
  norm_.backlog = config_.capacity.high * config_.slot_length;

  if (config_.policy.learns()) {
    const AgentConfig ac = agent_config_for(config_);
    agents_.reserve(static_cast<std::size_t>(config_.num_servers));
    for (int b = 0; b < config_.num_servers; ++b) agents_.emplace_back(ac, config_.seed, b);
  }
}

Simulation::Decision Simulation::decide(const Task& task, int source, const QueueState& queues)
{
  const int b = config_.num_servers;
  SelectionSet selection;
  switch (config_.policy.kind) {
    case PolicyKind::kAMCoEdge:
    case PolicyKind::kAMCoEdgeH:
    case PolicyKind::kSMCoEdge: {
      const auto action = agents_[static_cast<std::size_t>(source)].act(encode_state(task, queues, norm_));
      selection = SelectionSet::from_mask(action, b);
      break;
    }
    case PolicyKind::kDRLCoEdge: {
      const auto action = agents_[static_cast<std::size_t>(source)].act(encode_state(task, queues, norm_));
      selection = SelectionSet::from_mask(action | (std::uint32_t{1} << source), b);
      break;
    }
    case PolicyKind::kRandCoEdge:
      selection = rand_co_edge(source, b, policy_rng_);
      break;
    case PolicyKind::kOptimal: {
      auto best = optimal_enumeration(task, source, queues, topology_);
      return {best.selection, std::move(best.fractions)};
    }
  }
  const auto coeffs = delay_coefficients(task, source, queues, topology_);
  return {selection, allocate(config_.effective_alloc(), coeffs, selection)};
}

EpisodeResult Simulation::run_episode()
{
  using Clock = std::chrono::steady_clock;
  const int b = config_.num_servers;

  EpisodeResult result;
  MetricsRecord& m = result.metrics;
  m.episode = episode_;

  QueueState queues = QueueState::zeros(b);
  SlotClock clock{0, config_.slot_length, config_.slots};
  double make_span_sum = 0.0;
  double waiting_sum = 0.0, transmission_sum = 0.0, computing_sum = 0.0;
  Clock::duration decision_time{};

  for (int slot = 0; slot < config_.slots; ++slot) {
    clock.slot_index = slot;
    const auto arrivals = generate_tasks(config_, slot, arrivals_rng_);
    Eigen::VectorXd slot_workload = Eigen::VectorXd::Zero(b);

    for (int source = 0; source < b; ++source) {
      for (const Task& task : arrivals[static_cast<std::size_t>(source)]) {
        const auto t0 = Clock::now();
        const Decision d = decide(task, source, queues);
        const AllocationOutcome outcome = evaluate_allocation(task, source, d.fractions, queues, topology_);
        decision_time += Clock::now() - t0;

        if (config_.policy.learns())
          agents_[static_cast<std::size_t>(source)].feedback(reward(outcome.make_span, task.deadline));

        ++m.tasks_arrived;
        if (outcome.make_span >= task.deadline) ++m.tasks_dropped;
        make_span_sum += outcome.make_span;
        waiting_sum += outcome.bottleneck_delay.waiting;
        transmission_sum += outcome.bottleneck_delay.transmission;
        computing_sum += outcome.bottleneck_delay.computing;

        for (int e = 0; e < b; ++e) {
          const double x = d.fractions(e);
          if (!(x > 0.0)) continue;
          const double cycles = workload_of(task, x);
          queues.proc_pending(source, e) += cycles;
          slot_workload(e) += cycles;
          if (e != source) queues.tx_pending(source) += x * task.data_size;
        }
        result.workload.arrived += workload_of(task, 1.0);
      }
    }

    const Eigen::VectorXd capacity = topology_.compute_capacity * config_.slot_length;
    result.workload.drained += (queues.proc_backlog + slot_workload).cwiseMin(capacity).sum();
    queues = queue_update(queues, slot_workload, topology_, clock);
  }

  result.workload.final_backlog = queues.proc_backlog.sum();
  result.final_queues = queues;
  if (m.tasks_arrived > 0) {
    const double n = static_cast<double>(m.tasks_arrived);
    m.mean_make_span = make_span_sum / n;
    m.failure_rate = static_cast<double>(m.tasks_dropped) / n;
    m.mean_waiting = waiting_sum / n;
    m.mean_transmission = transmission_sum / n;
    m.mean_computing = computing_sum / n;
    m.decision_ms = std::chrono::duration<double, std::milli>(decision_time).count() / n;
  }
  ++episode_;
  return result;
}

std::vector<MetricsRecord> Simulation::run_experiment()
{
  std::vector<MetricsRecord> out;
  out.reserve(static_cast<std::size_t>(config_.episodes));
  for (int e = 0; e < config_.episodes; ++e) out.push_back(run_episode().metrics);
  return out;
}

}  // namespace amcoedge
