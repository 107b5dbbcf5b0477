#ifndef AMCOEDGE_ADQN_HPP_
#define AMCOEDGE_ADQN_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "amcoedge/allocation.hpp"
#include "amcoedge/core_model.hpp"
#include "amcoedge/qnetwork.hpp"
#include "amcoedge/random.hpp"

// Deep Q-learning agent that picks which edge servers collaborate on a task.
namespace amcoedge {

using StateVector = Eigen::VectorXd;

/// Divisors applied to the raw state: task size and per-ES backlog.
struct StateNormalization
{
  double task_size = 1.0;  // bits
  double backlog = 1.0;    // cycles
};

/// [d_n, q_{t-1,1..B}], each divided by its normalization constant.
StateVector encode_state(const Task& task, const QueueState& queues, const StateNormalization& norm);

/// Non-empty subset of B servers. The index is the mask read as an integer,
/// so index i in [1, 2^B - 1] maps to Q-network output i - 1.
class ActionMask
{
 public:
  static ActionMask from_index(std::uint32_t index, int num_servers);
  static ActionMask from_bits(const std::vector<bool>& bits);

  std::uint32_t index() const { return index_; }
  int num_servers() const { return num_servers_; }
  std::vector<bool> bits() const;
  SelectionSet selection() const { return SelectionSet::from_mask(index_, num_servers_); }

  static std::uint32_t count(int num_servers) { return (std::uint32_t{1} << num_servers) - 1; }

  friend bool operator==(const ActionMask&, const ActionMask&) = default;

 private:
  std::uint32_t index_ = 1;
  int num_servers_ = 1;
};

/// How network outputs map to actions.
///
/// kMask: one output per non-empty mask; the action is the mask index.
/// kPerServer: one output per ES; an action selects `top_k` servers and its
/// Q-value is the mean of their outputs.
enum class HeadKind
{
  kMask,
  kPerServer,
};

struct ActionHead
{
  HeadKind kind = HeadKind::kMask;
  int top_k = 1;

  int output_size(int num_servers) const;
  /// Q(s, a) for an action encoded as a server bit mask (or mask index).
  double action_value(const Eigen::Ref<const Eigen::VectorXd>& q, std::uint32_t action) const;
  /// max_a Q(s, a) under this head.
  double best_value(const Eigen::Ref<const Eigen::VectorXd>& q) const;
  /// Greedy action, ties broken towards the lowest index.
  std::uint32_t greedy_action(const Eigen::Ref<const Eigen::VectorXd>& q) const;
  std::uint32_t random_action(int num_servers, Rng& rng) const;
};

struct Transition
{
  StateVector state;
  std::uint32_t action = 1;
  double reward = 0.0;
  StateVector next_state;
};

class ReplayBuffer
{
 public:
  explicit ReplayBuffer(std::size_t capacity = 500);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  /// Uniform sampling with replacement.
  std::vector<std::size_t> sample(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> items_;
};

/// Greedy probability that ramps from 0 to the ceiling in fixed steps.
/// With probability `value` the agent exploits; otherwise it explores.
struct EpsilonSchedule
{
  double value = 0.0;
  double step = 0.001;
  double ceiling = 0.99;

  void advance() { value = std::min(value + step, ceiling); }
};

struct AdamState
{
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;

  static AdamState for_parameters(Eigen::Index count, double learning_rate = 1e-3);
  void apply(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
};

Eigen::VectorXd forward_q(const QNetwork& params, const StateVector& state);

/// Mask-head action selection: argmax-Q with probability sched.value,
/// otherwise a uniform draw over all 2^B - 1 masks.
ActionMask select_action(const QNetwork& params, const StateVector& state, const EpsilonSchedule& sched, Rng& rng);

/// r + gamma * max_a Q(s', a; target).
double td_target(const QNetwork& target_params, const Transition& transition, double gamma,
                 const ActionHead& head = {});

struct TrainResult
{
  double loss = 0.0;
};

/// One Adam step on the mean squared TD error of a uniformly sampled batch.
/// Returns std::nullopt, leaving everything untouched, if the buffer holds
/// fewer than `batch` transitions.
std::optional<TrainResult> train_step(QNetwork& params, const QNetwork& target_params, const ReplayBuffer& buffer,
                                      AdamState& adam, std::size_t batch, Rng& rng, double gamma = 0.9,
                                      const ActionHead& head = {});

/// Mean squared TD error of the given transitions and its parameter gradient.
double td_loss(const QNetwork& params, const QNetwork& target_params, std::span<const Transition> batch,
               double gamma, const ActionHead& head, Eigen::VectorXd* grad);

void sync_target(const QNetwork& params, QNetwork& target_params);

struct AgentConfig
{
  int num_servers = 5;
  ActionHead head{};
  std::vector<int> hidden{20, 20};
  double learning_rate = 1e-3;
  double gamma = 0.9;
  std::size_t replay_capacity = 500;
  std::size_t batch_size = 32;
  std::int64_t warmup_actions = 200;
  std::int64_t train_every = 10;
  std::int64_t target_sync_interval = 100;
  double epsilon_step = 0.001;
  double epsilon_ceiling = 0.99;
};

/// One BS's learner: evaluation and target networks, replay pool, optimizer
/// and schedule, plus the bookkeeping that chains each transition to the
/// next observed state.
class DqnAgent
{
 public:
  DqnAgent(AgentConfig config, std::uint64_t seed, int agent_id);

  /// Chooses an action for `state` and advances the greedy schedule. A
  /// transition left open by the previous decision is completed with `state`
  /// as its next state.
  std::uint32_t act(const StateVector& state);

  /// Reports the reward of the last action, counts the action step and runs
  /// the training cadence. Returns true if a training step ran.
  bool feedback(double reward);

  Eigen::VectorXd q_values(const StateVector& state) const { return forward_q(eval_, state); }

  const AgentConfig& config() const { return config_; }
  const QNetwork& eval_network() const { return eval_; }
  const QNetwork& target_network() const { return target_; }
  QNetwork& eval_network() { return eval_; }
  QNetwork& target_network() { return target_; }
  const ReplayBuffer& replay() const { return replay_; }
  const EpsilonSchedule& epsilon() const { return epsilon_; }
  EpsilonSchedule& epsilon() { return epsilon_; }
  const AdamState& adam() const { return adam_; }
  AdamState& adam() { return adam_; }
  std::int64_t act_steps() const { return act_steps_; }
  std::int64_t train_steps() const { return train_steps_; }
  void set_counters(std::int64_t act_steps, std::int64_t train_steps)
  {
    act_steps_ = act_steps;
    train_steps_ = train_steps;
  }
  std::optional<double> last_loss() const { return last_loss_; }

 private:
  AgentConfig config_;
  QNetwork eval_;
  QNetwork target_;
  ReplayBuffer replay_;
  EpsilonSchedule epsilon_;
  AdamState adam_;
  Rng explore_rng_;
  Rng replay_rng_;
  std::int64_t act_steps_ = 0;
  std::int64_t train_steps_ = 0;
  std::optional<Transition> open_;
  bool awaiting_feedback_ = false;
  std::optional<double> last_loss_;
};

}  // namespace amcoedge

#endif  // AMCOEDGE_ADQN_HPP_
