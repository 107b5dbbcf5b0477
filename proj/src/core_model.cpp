#include "amcoedge/core_model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace amcoedge {

void Task::validate() const
{
  if (!(data_size >= 0.0)) throw std::invalid_argument("task data_size must be >= 0");
  if (!(compute_density > 0.0)) throw std::invalid_argument("task compute_density must be > 0");
  if (!(deadline > 0.0)) throw std::invalid_argument("task deadline must be > 0");
}

void ClusterTopology::validate() const
{
  const int b = num_servers();
  if (b < 1) throw std::invalid_argument("topology needs at least one server");
  if (tx_rate.rows() != b || tx_rate.cols() != b)
    throw std::invalid_argument("tx_rate must be " + std::to_string(b) + "x" + std::to_string(b));
  if ((compute_capacity.array() <= 0.0).any())
    throw std::invalid_argument("compute capacities must be positive");
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < b; ++j)
      if (i != j && !(tx_rate(i, j) > 0.0))
        throw std::invalid_argument("transmission rates must be positive");
}

QueueState QueueState::zeros(int num_servers)
{
  QueueState q;
  q.proc_backlog = Eigen::VectorXd::Zero(num_servers);
  q.tx_pending = Eigen::VectorXd::Zero(num_servers);
  q.proc_pending = Eigen::MatrixXd::Zero(num_servers, num_servers);
  return q;
}

double dnn_workload_flops(std::span<const DnnLayerSpec> layers)
{
  if (layers.empty()) throw std::invalid_argument("dnn_workload_flops: empty layer list");
  double total = 0.0;
  for (const auto& l : layers) {
    if (l.out_height <= 0 || l.out_width <= 0 || l.in_channels <= 0 || l.out_channels <= 0 ||
        l.kernel_height <= 0 || l.kernel_width <= 0)
      throw std::invalid_argument("dnn layer dimensions must be positive");
    total += 2.0 * static_cast<double>(l.out_height) * static_cast<double>(l.out_width) *
             static_cast<double>(l.in_channels) * static_cast<double>(l.out_channels) *
             static_cast<double>(l.kernel_height) * static_cast<double>(l.kernel_width);
  }
  return total;
}

double delay_coefficient(const Task& task, int source, int target, const ClusterTopology& topo)
{
  const double compute = task.compute_density * task.data_size / topo.compute_capacity(target);
  if (source == target) return compute;
  return task.data_size / topo.tx_rate(source, target) + compute;
}

double waiting_time(const Task& task, int source, int target, const QueueState& queues,
                    const ClusterTopology& topo)
{
  double wait = (queues.proc_backlog(target) + queues.proc_pending(source, target)) /
                topo.compute_capacity(target);
  if (source != target) wait += queues.tx_pending(source) / topo.tx_rate(source, target);
  return std::min(wait, task.deadline);
}

DelayBreakdown processing_delay(const Task& task, double fraction, int source, int target,
                                const QueueState& queues, const ClusterTopology& topo)
{
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw std::invalid_argument("processing_delay: fraction outside [0, 1]");
  DelayBreakdown out;
  if (fraction == 0.0) return out;

  if (source != target) out.transmission = fraction * task.data_size / topo.tx_rate(source, target);
  out.computing = fraction * task.compute_density * task.data_size / topo.compute_capacity(target);
  out.waiting = waiting_time(task, source, target, queues, topo);

  const double raw = out.transmission + out.waiting + out.computing;
  out.clipped_at_deadline = raw >= task.deadline;
  out.total = std::min(raw, task.deadline);
  return out;
}

QueueState queue_update(const QueueState& queues, const Eigen::VectorXd& allocated_workload,
                        const ClusterTopology& topo, const SlotClock& clock)
{
  if ((allocated_workload.array() < 0.0).any())
    throw std::invalid_argument("queue_update: negative allocated workload");
  const int b = queues.num_servers();
  QueueState next = QueueState::zeros(b);
  next.proc_backlog = (queues.proc_backlog + allocated_workload -
                       topo.compute_capacity * clock.slot_length)
                          .cwiseMax(0.0);
  return next;
}

double make_span(std::span<const DelayBreakdown> delays)
{
  if (delays.empty()) throw std::invalid_argument("make_span: empty selection");
  double worst = delays.front().total;
  for (const auto& d : delays) worst = std::max(worst, d.total);
  return worst;
}

}  // namespace amcoedge
