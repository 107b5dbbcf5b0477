#include "amcoedge/adqn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace amcoedge {

StateVector encode_state(const Task& task, const QueueState& queues, const StateNormalization& norm)
{
  const int b = queues.num_servers();
  StateVector s(b + 1);
  s(0) = task.data_size / norm.task_size;
  s.tail(b) = queues.proc_backlog / norm.backlog;
  return s;
}

ActionMask ActionMask::from_index(std::uint32_t index, int num_servers)
{
  if (num_servers < 1 || num_servers >= 32) throw std::invalid_argument("ActionMask: server count out of range");
  if (index < 1 || index > count(num_servers)) throw std::invalid_argument("ActionMask: index out of range");
  ActionMask m;
  m.index_ = index;
  m.num_servers_ = num_servers;
  return m;
}

ActionMask ActionMask::from_bits(const std::vector<bool>& bits)
{
  std::uint32_t index = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) index |= std::uint32_t{1} << i;
  return from_index(index, static_cast<int>(bits.size()));
}

std::vector<bool> ActionMask::bits() const
{
  std::vector<bool> out(static_cast<std::size_t>(num_servers_));
  for (int i = 0; i < num_servers_; ++i) out[static_cast<std::size_t>(i)] = (index_ >> i) & 1u;
  return out;
}

namespace {

// Indices of the k largest entries; ties resolved towards the lower index.
std::uint32_t top_k_mask(const Eigen::Ref<const Eigen::VectorXd>& q, int k)
{
  std::vector<int> order(static_cast<std::size_t>(q.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return q(a) > q(b); });
  std::uint32_t mask = 0;
  for (int i = 0; i < k; ++i) mask |= std::uint32_t{1} << order[static_cast<std::size_t>(i)];
  return mask;
}

}  // namespace

int ActionHead::output_size(int num_servers) const
{
  if (kind == HeadKind::kMask) return static_cast<int>(ActionMask::count(num_servers));
  if (top_k < 1 || top_k > num_servers) throw std::invalid_argument("ActionHead: top_k must be in [1, B]");
  return num_servers;
}

double ActionHead::action_value(const Eigen::Ref<const Eigen::VectorXd>& q, std::uint32_t action) const
{
  if (kind == HeadKind::kMask) return q(static_cast<Eigen::Index>(action) - 1);
  double sum = 0.0;
  int n = 0;
  for (std::uint32_t m = action; m != 0; m &= m - 1, ++n) sum += q(std::countr_zero(m));
  return sum / n;
}

double ActionHead::best_value(const Eigen::Ref<const Eigen::VectorXd>& q) const
{
  if (kind == HeadKind::kMask) return q.maxCoeff();
  return action_value(q, top_k_mask(q, top_k));
}

std::uint32_t ActionHead::greedy_action(const Eigen::Ref<const Eigen::VectorXd>& q) const
{
  if (kind == HeadKind::kPerServer) return top_k_mask(q, top_k);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < q.size(); ++i)
    if (q(i) > q(best)) best = i;
  return static_cast<std::uint32_t>(best + 1);
}

std::uint32_t ActionHead::random_action(int num_servers, Rng& rng) const
{
  if (kind == HeadKind::kMask)
    return std::uniform_int_distribution<std::uint32_t>(1, ActionMask::count(num_servers))(rng);
  // partial Fisher-Yates: the first top_k slots form a uniform k-subset
  std::vector<int> pool(static_cast<std::size_t>(num_servers));
  std::iota(pool.begin(), pool.end(), 0);
  std::uint32_t mask = 0;
  for (int i = 0; i < top_k; ++i) {
    const int j = std::uniform_int_distribution<int>(i, num_servers - 1)(rng);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    mask |= std::uint32_t{1} << pool[static_cast<std::size_t>(i)];
  }
  return mask;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity)
{
  if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  items_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t)
{
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[cursor_] = std::move(t);
  }
  cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample(std::size_t batch, Rng& rng) const
{
  if (items_.empty()) throw std::logic_error("ReplayBuffer::sample on empty buffer");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<std::size_t> out(batch);
  for (auto& i : out) i = pick(rng);
  return out;
}

AdamState AdamState::for_parameters(Eigen::Index count, double learning_rate)
{
  AdamState s;
  s.learning_rate = learning_rate;
  s.first_moment = Eigen::VectorXd::Zero(count);
  s.second_moment = Eigen::VectorXd::Zero(count);
  return s;
}

void AdamState::apply(Eigen::VectorXd& params, const Eigen::VectorXd& grad)
{
  if (params.size() != grad.size() || first_moment.size() != grad.size())
    throw std::invalid_argument("AdamState::apply: size mismatch");
  ++step;
  first_moment = beta1 * first_moment + (1.0 - beta1) * grad;
  second_moment = beta2 * second_moment + (1.0 - beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  params.array() -= learning_rate * (first_moment.array() / c1) / ((second_moment.array() / c2).sqrt() + epsilon);
}

Eigen::VectorXd forward_q(const QNetwork& params, const StateVector& state) { return params.forward(state); }

ActionMask select_action(const QNetwork& params, const StateVector& state, const EpsilonSchedule& sched, Rng& rng)
{
  const int b = static_cast<int>(state.size()) - 1;
  const ActionHead head{};
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < sched.value) return ActionMask::from_index(head.greedy_action(forward_q(params, state)), b);
  return ActionMask::from_index(head.random_action(b, rng), b);
}

double td_target(const QNetwork& target_params, const Transition& transition, double gamma, const ActionHead& head)
{
  return transition.reward + gamma * head.best_value(forward_q(target_params, transition.next_state));
}

double td_loss(const QNetwork& params, const QNetwork& target_params, std::span<const Transition> batch, double gamma,
               const ActionHead& head, Eigen::VectorXd* grad)
{
  const auto n = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd states(params.input_size(), n);
  Eigen::MatrixXd next_states(params.input_size(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    states.col(i) = batch[static_cast<std::size_t>(i)].state;
    next_states.col(i) = batch[static_cast<std::size_t>(i)].next_state;
  }
  const Eigen::MatrixXd q = params.forward_batch(states);
  const Eigen::MatrixXd q_next = target_params.forward_batch(next_states);

  Eigen::MatrixXd out_grad = Eigen::MatrixXd::Zero(q.rows(), n);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = batch[static_cast<std::size_t>(i)];
    const double target = t.reward + gamma * head.best_value(q_next.col(i));
    const double err = head.action_value(q.col(i), t.action) - target;
    loss += err * err;
    const double g = 2.0 * err / static_cast<double>(n);
    if (head.kind == HeadKind::kMask) {
      out_grad(static_cast<Eigen::Index>(t.action) - 1, i) = g;
    } else {
      const int members = std::popcount(t.action);
      for (std::uint32_t m = t.action; m != 0; m &= m - 1) out_grad(std::countr_zero(m), i) = g / members;
    }
  }
  if (grad) *grad = params.backward(states, out_grad);
  return loss / static_cast<double>(n);
}

std::optional<TrainResult> train_step(QNetwork& params, const QNetwork& target_params, const ReplayBuffer& buffer,
                                      AdamState& adam, std::size_t batch, Rng& rng, double gamma,
                                      const ActionHead& head)
{
  if (batch == 0 || buffer.size() < batch) return std::nullopt;
  const auto picks = buffer.sample(batch, rng);
  std::vector<Transition> sampled;
  sampled.reserve(batch);
  for (auto i : picks) sampled.push_back(buffer[i]);

  Eigen::VectorXd grad;
  const double loss = td_loss(params, target_params, sampled, gamma, head, &grad);
  adam.apply(params.parameters(), grad);
  return TrainResult{loss};
}

void sync_target(const QNetwork& params, QNetwork& target_params)
{
  if (!params.same_shape(target_params)) throw std::invalid_argument("sync_target: shape mismatch");
  target_params.parameters() = params.parameters();
}

DqnAgent::DqnAgent(AgentConfig config, std::uint64_t seed, int agent_id)
    : config_(std::move(config)),
      replay_(config_.replay_capacity),
      explore_rng_(make_stream(seed, Stream::kExploration, static_cast<std::uint64_t>(agent_id))),
      replay_rng_(make_stream(seed, Stream::kReplay, static_cast<std::uint64_t>(agent_id)))
{
  std::vector<int> sizes{config_.num_servers + 1};
  sizes.insert(sizes.end(), config_.hidden.begin(), config_.hidden.end());
  sizes.push_back(config_.head.output_size(config_.num_servers));

  Rng init = make_stream(seed, Stream::kWeightInit, static_cast<std::uint64_t>(agent_id));
  eval_ = QNetwork::initialized(sizes, init);
  target_ = eval_;
  adam_ = AdamState::for_parameters(eval_.parameters().size(), config_.learning_rate);
  epsilon_.step = config_.epsilon_step;
  epsilon_.ceiling = config_.epsilon_ceiling;
}

std::uint32_t DqnAgent::act(const StateVector& state)
{
  if (awaiting_feedback_) throw std::logic_error("DqnAgent::act called twice without feedback");
  if (open_) {
    open_->next_state = state;
    replay_.push(std::move(*open_));
    open_.reset();
  }

  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(explore_rng_);
  const std::uint32_t action = u < epsilon_.value ? config_.head.greedy_action(forward_q(eval_, state))
                                                  : config_.head.random_action(config_.num_servers, explore_rng_);
  epsilon_.advance();

  open_ = Transition{state, action, 0.0, {}};
  awaiting_feedback_ = true;
  return action;
}

bool DqnAgent::feedback(double reward)
{
  if (!awaiting_feedback_) throw std::logic_error("DqnAgent::feedback without a pending action");
  open_->reward = reward;
  awaiting_feedback_ = false;
  ++act_steps_;

  if (act_steps_ <= config_.warmup_actions || act_steps_ % config_.train_every != 0) return false;
  const auto result = train_step(eval_, target_, replay_, adam_, config_.batch_size, replay_rng_, config_.gamma,
                                 config_.head);
  if (!result) return false;
  last_loss_ = result->loss;
  ++train_steps_;
  if (train_steps_ % config_.target_sync_interval == 0) sync_target(eval_, target_);
  return true;
}

}  // namespace amcoedge
