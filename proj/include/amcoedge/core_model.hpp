#ifndef AMCOEDGE_CORE_MODEL_HPP_
#define AMCOEDGE_CORE_MODEL_HPP_

#include <cstdint>
#include <span>

#include <Eigen/Dense>

// System model of a collaborative multi-edge cluster: B base stations, each
// co-located with one edge server (ES). All quantities are in base units:
// bits, CPU cycles, seconds.
namespace amcoedge {

struct Task
{
  std::int64_t id = 0;
  double data_size = 0.0;        // bits
  double compute_density = 1.0;  // cycles per bit
  double deadline = 1.0;         // seconds
  int arrival_slot = 0;
  int origin_bs = 0;

  void validate() const;
};

struct DnnLayerSpec
{
  std::int64_t out_height = 1;
  std::int64_t out_width = 1;
  std::int64_t in_channels = 1;
  std::int64_t out_channels = 1;
  std::int64_t kernel_height = 1;
  std::int64_t kernel_width = 1;
};

struct ClusterTopology
{
  Eigen::VectorXd compute_capacity;  // cycles/s per ES
  Eigen::MatrixXd tx_rate;           // bits/s, row = source BS, col = target; diagonal unused

  int num_servers() const { return static_cast<int>(compute_capacity.size()); }
  void validate() const;
};

// Backlogs observed by the schedulers during one slot.
//
// proc_backlog is q_{t-1}: per-ES cycles left at the end of the previous slot.
// tx_pending(b) holds the bits BS b already queued for remote ESs this slot.
// proc_pending(b, e) holds the cycles BS b already sent to ES e this slot;
// a scheduler at BS b sees only its own row.
struct QueueState
{
  Eigen::VectorXd proc_backlog;
  Eigen::VectorXd tx_pending;
  Eigen::MatrixXd proc_pending;

  static QueueState zeros(int num_servers);
  int num_servers() const { return static_cast<int>(proc_backlog.size()); }
};

struct SlotClock
{
  int slot_index = 0;
  double slot_length = 1.0;
  int horizon = 1;
};

struct DelayBreakdown
{
  double transmission = 0.0;
  double waiting = 0.0;
  double computing = 0.0;
  double total = 0.0;
  bool clipped_at_deadline = false;
};

double dnn_workload_flops(std::span<const DnnLayerSpec> layers);

/// Cycles placed on an ES when it receives `fraction` of the task.
inline double workload_of(const Task& task, double fraction)
{
  return fraction * task.data_size * task.compute_density;
}

/// Per-unit-fraction delay of sending the task from `source` and computing it
/// on `target`: d/v + rho*d/f, with no transfer term when source == target.
double delay_coefficient(const Task& task, int source, int target, const ClusterTopology& topo);

/// Queueing delay before the task's share starts on `target`, capped at the deadline.
double waiting_time(const Task& task, int source, int target, const QueueState& queues,
                    const ClusterTopology& topo);

DelayBreakdown processing_delay(const Task& task, double fraction, int source, int target,
                                const QueueState& queues, const ClusterTopology& topo);

/// End-of-slot backlog update. `allocated_workload` holds the cycles every
/// BS sent to each ES during the slot. Intra-slot accumulators are cleared.
QueueState queue_update(const QueueState& queues, const Eigen::VectorXd& allocated_workload,
                        const ClusterTopology& topo, const SlotClock& clock);

/// Longest sub-workload delay over the ESs serving a task.
double make_span(std::span<const DelayBreakdown> delays);

/// -make_span when the task finishes before its deadline, -10*deadline otherwise.
inline double reward(double make_span, double deadline)
{
  return make_span < deadline ? -make_span : -10.0 * deadline;
}

}  // namespace amcoedge

#endif  // AMCOEDGE_CORE_MODEL_HPP_
