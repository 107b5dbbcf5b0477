#ifndef AMCOEDGE_ALLOCATION_HPP_
#define AMCOEDGE_ALLOCATION_HPP_

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "amcoedge/linear_solve.hpp"

// Workload allocation over a selected set of edge servers.
//
// Every routine here returns fractions x over all B servers with x = 0 off the
// selection. The equal-delay solve (CWA) balances T_i * x_i + w_i across the
// selection, where T_i is the per-unit-fraction delay and w_i the waiting
// offset of server i. The closed form (HECWA) drops the offsets and sets
// x_i proportional to the product of the other servers' coefficients.
namespace amcoedge {

inline constexpr int kMaxServers = 32;

/// Relative tolerance used by the simplex and equal-delay checks.
inline constexpr double kResidualTolerance = 1e-9;

template <typename Scalar>
using ServerVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxServers, 1>;

template <typename Scalar>
using ServerMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxServers, kMaxServers>;

template <typename Scalar>
using AllocationFractions = ServerVector<Scalar>;

/// Non-empty set of ES indices, stored as a bit mask (bit e selects ES e).
class SelectionSet
{
 public:
  struct Indices
  {
    std::array<int, kMaxServers> data;
    int count = 0;
    const int* begin() const { return data.data(); }
    const int* end() const { return data.data() + count; }
    int operator[](int i) const { return data[static_cast<std::size_t>(i)]; }
  };

  SelectionSet() = default;

  static SelectionSet from_mask(std::uint32_t mask, int num_servers)
  {
    if (num_servers < 1 || num_servers > kMaxServers)
      throw std::invalid_argument("selection: server count out of range");
    if (mask == 0) throw std::invalid_argument("selection: empty set");
    if (num_servers < kMaxServers && (mask >> num_servers) != 0)
      throw std::invalid_argument("selection: index beyond server count");
    SelectionSet s;
    s.mask_ = mask;
    s.num_servers_ = num_servers;
    return s;
  }

  static SelectionSet from_indices(std::initializer_list<int> indices, int num_servers)
  {
    return from_range(indices.begin(), indices.end(), num_servers);
  }

  template <typename It>
  static SelectionSet from_range(It first, It last, int num_servers)
  {
    std::uint32_t mask = 0;
    for (; first != last; ++first) {
      const int e = *first;
      if (e < 0 || e >= num_servers) throw std::invalid_argument("selection: index out of range");
      const std::uint32_t bit = std::uint32_t{1} << e;
      if (mask & bit) throw std::invalid_argument("selection: duplicate index");
      mask |= bit;
    }
    return from_mask(mask, num_servers);
  }

  static SelectionSet all(int num_servers)
  {
    const std::uint32_t mask = num_servers >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << num_servers) - 1;
    return from_mask(mask, num_servers);
  }

  std::uint32_t mask() const { return mask_; }
  int num_servers() const { return num_servers_; }
  int size() const { return std::popcount(mask_); }
  bool contains(int e) const { return e >= 0 && e < num_servers_ && ((mask_ >> e) & 1u); }

  Indices indices() const
  {
    Indices out;
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.data[static_cast<std::size_t>(out.count++)] = std::countr_zero(m);
    return out;
  }

  SelectionSet without(int e) const { return from_mask(mask_ & ~(std::uint32_t{1} << e), num_servers_); }

  friend bool operator==(const SelectionSet&, const SelectionSet&) = default;

 private:
  std::uint32_t mask_ = 0;
  int num_servers_ = 0;
};

/// Per-ES linear delay coefficient T and waiting offset w, both sized B.
template <typename Scalar>
struct DelayCoefficients
{
  ServerVector<Scalar> coefficient;
  ServerVector<Scalar> waiting;

  static DelayCoefficients zeros(int num_servers)
  {
    return {ServerVector<Scalar>::Zero(num_servers), ServerVector<Scalar>::Zero(num_servers)};
  }
};

namespace detail {

template <typename Scalar>
void check_inputs(const DelayCoefficients<Scalar>& coeffs, const SelectionSet& selection)
{
  if (coeffs.coefficient.size() != selection.num_servers() || coeffs.waiting.size() != selection.num_servers())
    throw std::invalid_argument("allocation: coefficient size does not match server count");
  for (int e : selection.indices()) {
    if (!(coeffs.coefficient(e) > Scalar(0)))
      throw std::invalid_argument("allocation: delay coefficient must be positive");
    if (!(coeffs.waiting(e) >= Scalar(0)))
      throw std::invalid_argument("allocation: waiting offset must be non-negative");
  }
}

template <typename Scalar>
AllocationFractions<Scalar> unit_at(int num_servers, int e)
{
  AllocationFractions<Scalar> x = AllocationFractions<Scalar>::Zero(num_servers);
  x(e) = Scalar(1);
  return x;
}

// x_i proportional to 1 / T_i, evaluated as exp(-log T_i - max_j(-log T_j)).
// Used when the scaled running products under- or overflow.
template <typename Scalar>
AllocationFractions<Scalar> hecwa_log_domain(const DelayCoefficients<Scalar>& coeffs, const SelectionSet& selection)
{
  using std::exp;
  using std::log;
  const auto idx = selection.indices();
  Scalar top = -std::numeric_limits<Scalar>::infinity();
  for (int e : idx) top = std::max(top, -log(coeffs.coefficient(e)));
  AllocationFractions<Scalar> x = AllocationFractions<Scalar>::Zero(selection.num_servers());
  Scalar total = Scalar(0);
  for (int e : idx) {
    x(e) = exp(-log(coeffs.coefficient(e)) - top);
    total += x(e);
  }
  for (int e : idx) x(e) /= total;
  return x;
}

}  // namespace detail

/// Solves the k equal-delay equations without any feasibility repair.
///
/// Rows 0..k-2 equate each non-pivot ES against the first selected ES
/// (T_p x_p + w_p = T_i x_i + w_i); the last row is the simplex constraint.
/// Entries may fall outside [0, 1] when waiting offsets are very unbalanced.
template <typename Scalar>
AllocationFractions<Scalar> cwa_equal_delay(const DelayCoefficients<Scalar>& coeffs, const SelectionSet& selection)
{
  detail::check_inputs(coeffs, selection);
  const auto idx = selection.indices();
  const int k = idx.count;
  const int b = selection.num_servers();
  if (k == 1) return detail::unit_at<Scalar>(b, idx[0]);

  ServerMatrix<Scalar> a = ServerMatrix<Scalar>::Zero(k, k);
  ServerVector<Scalar> rhs(k);
  const int pivot = idx[0];
  for (int r = 0; r + 1 < k; ++r) {
    const int other = idx[r + 1];
    a(r, 0) = coeffs.coefficient(pivot);
    a(r, r + 1) = -coeffs.coefficient(other);
    rhs(r) = coeffs.waiting(other) - coeffs.waiting(pivot);
  }
  a.row(k - 1).setOnes();
  rhs(k - 1) = Scalar(1);

  if (!solve_linear_system_in_place(a, rhs)) throw std::logic_error("cwa: singular equal-delay system");

  AllocationFractions<Scalar> x = AllocationFractions<Scalar>::Zero(b);
  for (int i = 0; i < k; ++i) x(idx[i]) = rhs(i);
  return x;
}

/// Repairs an equal-delay solution with negative entries by removing the
/// most-negative ES and re-solving on the survivors until all entries lie in
/// [0, 1]. Terminates because the selection shrinks each round.
template <typename Scalar>
AllocationFractions<Scalar> project_feasible(AllocationFractions<Scalar> raw, const DelayCoefficients<Scalar>& coeffs,
                                             SelectionSet selection)
{
  for (;;) {
    int worst = -1;
    Scalar worst_value = Scalar(0);
    for (int e : selection.indices()) {
      if (raw(e) < worst_value) {
        worst_value = raw(e);
        worst = e;
      }
    }
    if (worst < 0) break;
    selection = selection.without(worst);
    raw = cwa_equal_delay(coeffs, selection);
  }
  return raw.cwiseMin(Scalar(1));
}

/// Equal-delay allocation over the selection, projected to the simplex.
template <typename Scalar>
AllocationFractions<Scalar> cwa_allocate(const DelayCoefficients<Scalar>& coeffs, const SelectionSet& selection)
{
  return project_feasible(cwa_equal_delay(coeffs, selection), coeffs, selection);
}

/// Closed-form allocation ignoring waiting offsets, in O(k).
///
/// x_i = prod_{u != i} T_u / sum_v prod_{u != v} T_u. The leave-one-out
/// products come from prefix/suffix running products of coefficients scaled
/// by their maximum, so no division by T_i is needed.
template <typename Scalar>
AllocationFractions<Scalar> hecwa_allocate(const DelayCoefficients<Scalar>& coeffs, const SelectionSet& selection)
{
  detail::check_inputs(coeffs, selection);
  const auto idx = selection.indices();
  const int k = idx.count;
  const int b = selection.num_servers();
  if (k == 1) return detail::unit_at<Scalar>(b, idx[0]);

  Scalar largest = Scalar(0);
  for (int e : idx) largest = std::max(largest, coeffs.coefficient(e));

  std::array<Scalar, kMaxServers + 1> suffix;
  suffix[static_cast<std::size_t>(k)] = Scalar(1);
  for (int i = k - 1; i >= 0; --i)
    suffix[static_cast<std::size_t>(i)] = suffix[static_cast<std::size_t>(i + 1)] * (coeffs.coefficient(idx[i]) / largest);

  AllocationFractions<Scalar> x = AllocationFractions<Scalar>::Zero(b);
  Scalar prefix = Scalar(1);
  Scalar total = Scalar(0);
  for (int i = 0; i < k; ++i) {
    const Scalar leave_one_out = prefix * suffix[static_cast<std::size_t>(i + 1)];
    x(idx[i]) = leave_one_out;
    total += leave_one_out;
    prefix *= coeffs.coefficient(idx[i]) / largest;
  }
  if (!(total > Scalar(0)) || !std::isfinite(total)) return detail::hecwa_log_domain<Scalar>(coeffs, selection);
  for (int e : idx) x(e) /= total;
  return x;
}

/// Splits n indivisible items according to x. Non-maximal entries get
/// round(n * x); the first entry holding the maximum takes the remainder so
/// the counts sum to n exactly.
template <typename Derived>
std::vector<int> integerize_allocation(const Eigen::MatrixBase<Derived>& x, int n_items)
{
  if (n_items < 1) throw std::invalid_argument("integerize_allocation: n_items must be >= 1");
  const Eigen::Index b = x.size();
  if (b < 1) throw std::invalid_argument("integerize_allocation: empty allocation");

  Eigen::Index max_entry = 0;
  for (Eigen::Index i = 1; i < b; ++i)
    if (x(i) > x(max_entry)) max_entry = i;

  std::vector<int> counts(static_cast<std::size_t>(b), 0);
  long others = 0;
  for (Eigen::Index i = 0; i < b; ++i) {
    if (i == max_entry) continue;
    const long c = std::lround(static_cast<double>(n_items) * static_cast<double>(x(i)));
    counts[static_cast<std::size_t>(i)] = static_cast<int>(std::max(0L, c));
    others += counts[static_cast<std::size_t>(i)];
  }
  // Rounding can overshoot when many entries round up; take items back from
  // the largest rounded entries.
  while (others > n_items) {
    std::size_t largest = counts.size();
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (static_cast<Eigen::Index>(i) == max_entry) continue;
      if (largest == counts.size() || counts[i] > counts[largest]) largest = i;
    }
    --counts[largest];
    --others;
  }
  counts[static_cast<std::size_t>(max_entry)] = n_items - static_cast<int>(others);
  return counts;
}

}  // namespace amcoedge

#endif  // AMCOEDGE_ALLOCATION_HPP_
