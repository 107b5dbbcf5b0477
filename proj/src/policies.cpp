#include "amcoedge/policies.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace amcoedge {

namespace {

std::string lower(std::string_view s)
{
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

PolicySpec parse_policy(std::string_view tag)
{
  const std::string t = lower(tag);
  if (t == "amcoedge") return {PolicyKind::kAMCoEdge};
  if (t == "amcoedge-h") return {PolicyKind::kAMCoEdgeH};
  if (t == "randcoedge") return {PolicyKind::kRandCoEdge};
  if (t == "drlcoedge") return {PolicyKind::kDRLCoEdge};
  if (t == "optimal") return {PolicyKind::kOptimal};
  if (t == "smcoedge") return {PolicyKind::kSMCoEdge, 3};
  if (t.starts_with("smcoedge(") && t.ends_with(")")) {
    const std::string inner = t.substr(9, t.size() - 10);
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(inner, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != inner.size() || inner.empty() || k < 1) throw std::invalid_argument("bad SMCoEdge k in policy tag: " + std::string(tag));
    return {PolicyKind::kSMCoEdge, k};
  }
  throw std::invalid_argument("unknown policy tag: " + std::string(tag));
}

std::string to_string(const PolicySpec& spec)
{
  switch (spec.kind) {
    case PolicyKind::kAMCoEdge: return "AMCoEdge";
    case PolicyKind::kAMCoEdgeH: return "AMCoEdge-H";
    case PolicyKind::kRandCoEdge: return "RandCoEdge";
    case PolicyKind::kDRLCoEdge: return "DRLCoEdge";
    case PolicyKind::kSMCoEdge: return "SMCoEdge(" + std::to_string(spec.k) + ")";
    case PolicyKind::kOptimal: return "Optimal";
  }
  return "?";
}

AllocVariant parse_alloc(std::string_view tag)
{
  const std::string t = lower(tag);
  if (t == "cwa") return AllocVariant::kCwa;
  if (t == "hecwa") return AllocVariant::kHecwa;
  throw std::invalid_argument("unknown allocation variant: " + std::string(tag));
}

std::string to_string(AllocVariant v) { return v == AllocVariant::kCwa ? "cwa" : "hecwa"; }

DelayCoefficients<double> delay_coefficients(const Task& task, int source, const QueueState& queues,
                                             const ClusterTopology& topo)
{
  const int b = topo.num_servers();
  auto coeffs = DelayCoefficients<double>::zeros(b);
  for (int e = 0; e < b; ++e) {
    coeffs.coefficient(e) = delay_coefficient(task, source, e, topo);
    coeffs.waiting(e) = waiting_time(task, source, e, queues, topo);
  }
  return coeffs;
}

AllocationFractions<double> allocate(AllocVariant variant, const DelayCoefficients<double>& coeffs,
                                     const SelectionSet& selection)
{
  return variant == AllocVariant::kCwa ? cwa_allocate(coeffs, selection) : hecwa_allocate(coeffs, selection);
}

AllocationOutcome evaluate_allocation(const Task& task, int source, const AllocationFractions<double>& x,
                                      const QueueState& queues, const ClusterTopology& topo)
{
  AllocationOutcome out;
  for (int e = 0; e < topo.num_servers(); ++e) {
    if (!(x(e) > 0.0)) continue;
    const DelayBreakdown d = processing_delay(task, std::min(x(e), 1.0), source, e, queues, topo);
    if (out.bottleneck < 0 || d.total > out.make_span) {
      out.make_span = d.total;
      out.bottleneck = e;
      out.bottleneck_delay = d;
    }
  }
  if (out.bottleneck < 0) throw std::invalid_argument("evaluate_allocation: no ES receives work");
  return out;
}

SelectionSet rand_co_edge(int local, int num_servers, Rng& rng)
{
  const int partner = std::uniform_int_distribution<int>(0, num_servers - 1)(rng);
  if (partner == local) return SelectionSet::from_indices({local}, num_servers);
  return SelectionSet::from_indices({local, partner}, num_servers);
}

SelectionSet drl_co_edge(const Eigen::VectorXd& per_server_q, int local)
{
  const int b = static_cast<int>(per_server_q.size());
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < per_server_q.size(); ++i)
    if (per_server_q(i) > per_server_q(best)) best = i;
  if (best == local) return SelectionSet::from_indices({local}, b);
  return SelectionSet::from_indices({local, static_cast<int>(best)}, b);
}

SelectionSet smco_edge_topk(const Eigen::VectorXd& per_server_q, int k)
{
  const int b = static_cast<int>(per_server_q.size());
  if (k < 1 || k > b) throw std::invalid_argument("SMCoEdge: k must be in [1, B]");
  std::vector<int> order(static_cast<std::size_t>(b));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int c) { return per_server_q(a) > per_server_q(c); });
  return SelectionSet::from_range(order.begin(), order.begin() + k, b);
}

OptimalDecision optimal_enumeration(const Task& task, int source, const QueueState& queues,
                                    const ClusterTopology& topo)
{
  const int b = topo.num_servers();
  const auto coeffs = delay_coefficients(task, source, queues, topo);
  const std::uint32_t masks = (std::uint32_t{1} << b) - 1;

  std::optional<OptimalDecision> best;
  int best_size = 0;
  for (std::uint32_t m = 1; m <= masks; ++m) {
    const auto sel = SelectionSet::from_mask(m, b);
    auto x = cwa_allocate(coeffs, sel);
    const double ms = evaluate_allocation(task, source, x, queues, topo).make_span;
    const int size = sel.size();
    bool take = !best;
    if (best) {
      const double tol = 1e-12 * std::max(1.0, best->make_span);
      if (ms < best->make_span - tol) take = true;
      else if (ms <= best->make_span + tol && size < best_size) take = true;
    }
    if (take) {
      best = OptimalDecision{sel, std::move(x), ms};
      best_size = size;
    }
  }
  return *best;
}

}  // namespace amcoedge
