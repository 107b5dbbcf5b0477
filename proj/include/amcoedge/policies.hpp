#ifndef AMCOEDGE_POLICIES_HPP_
#define AMCOEDGE_POLICIES_HPP_

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "amcoedge/allocation.hpp"
#include "amcoedge/core_model.hpp"
#include "amcoedge/random.hpp"

namespace amcoedge {

enum class PolicyKind
{
  kAMCoEdge,
  kAMCoEdgeH,
  kRandCoEdge,
  kDRLCoEdge,
  kSMCoEdge,
  kOptimal,
};

struct PolicySpec
{
  PolicyKind kind = PolicyKind::kAMCoEdge;
  int k = 3;  // only meaningful for SMCoEdge

  bool learns() const
  {
    return kind == PolicyKind::kAMCoEdge || kind == PolicyKind::kAMCoEdgeH || kind == PolicyKind::kDRLCoEdge ||
           kind == PolicyKind::kSMCoEdge;
  }
  friend bool operator==(const PolicySpec&, const PolicySpec&) = default;
};

/// Accepts AMCoEdge, AMCoEdge-H, RandCoEdge, DRLCoEdge, SMCoEdge, SMCoEdge(k)
/// and Optimal (case-insensitive).
PolicySpec parse_policy(std::string_view tag);
std::string to_string(const PolicySpec& spec);

enum class AllocVariant
{
  kCwa,
  kHecwa,
};

AllocVariant parse_alloc(std::string_view tag);
std::string to_string(AllocVariant v);

/// T and waiting offsets of every ES for a task scheduled at `source`.
DelayCoefficients<double> delay_coefficients(const Task& task, int source, const QueueState& queues,
                                             const ClusterTopology& topo);

AllocationFractions<double> allocate(AllocVariant variant, const DelayCoefficients<double>& coeffs,
                                     const SelectionSet& selection);

struct AllocationOutcome
{
  double make_span = 0.0;
  int bottleneck = -1;
  DelayBreakdown bottleneck_delay;
};

/// Delays of every ES receiving a positive share, reduced to the make-span.
AllocationOutcome evaluate_allocation(const Task& task, int source, const AllocationFractions<double>& x,
                                      const QueueState& queues, const ClusterTopology& topo);

/// Local ES plus one uniformly drawn ES; a self-draw leaves only the local ES.
SelectionSet rand_co_edge(int local, int num_servers, Rng& rng);

/// Local ES plus the partner with the highest per-ES Q-value.
SelectionSet drl_co_edge(const Eigen::VectorXd& per_server_q, int local);

/// The k ESs with the highest per-ES Q-values, ties towards lower indices.
SelectionSet smco_edge_topk(const Eigen::VectorXd& per_server_q, int k);

struct OptimalDecision
{
  SelectionSet selection;
  AllocationFractions<double> fractions;
  double make_span = 0.0;
};

/// Exhaustive per-task search: every non-empty mask is allocated with CWA
/// and the smallest make-span wins; ties go to fewer ESs, then the lower mask.
OptimalDecision optimal_enumeration(const Task& task, int source, const QueueState& queues,
                                    const ClusterTopology& topo);

}  // namespace amcoedge

#endif  // AMCOEDGE_POLICIES_HPP_
