#ifndef AMCOEDGE_LINEAR_SOLVE_HPP_
#define AMCOEDGE_LINEAR_SOLVE_HPP_

#include <cmath>
#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace amcoedge {

/// Pivot magnitudes below this (relative to the row scale) are treated as singular.
inline constexpr double kPivotFloor = 1e-12;

/// Gaussian elimination with scaled partial pivoting, in place: `a` is
/// overwritten by its eliminated form and `x` goes from the right-hand side
/// to the solution. Returns false when a pivot falls below kPivotFloor after
/// row scaling; `a` and `x` are then unspecified.
template <typename MatrixType, typename VectorType>
bool solve_linear_system_in_place(Eigen::MatrixBase<MatrixType>& a, Eigen::MatrixBase<VectorType>& x)
{
  using Scalar = typename MatrixType::Scalar;
  using std::abs;

  const Eigen::Index n = a.rows();
  eigen_assert(a.cols() == n && x.size() == n);

  typename VectorType::PlainObject scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    scale(i) = a.row(i).cwiseAbs().maxCoeff();
    if (scale(i) == Scalar(0)) return false;
  }

  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    Scalar best = abs(a(col, col)) / scale(col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const Scalar cand = abs(a(r, col)) / scale(r);
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (best < Scalar(kPivotFloor)) return false;
    if (pivot != col) {
      a.row(col).swap(a.row(pivot));
      std::swap(x(col), x(pivot));
      std::swap(scale(col), scale(pivot));
    }
    const Scalar diag = a(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const Scalar factor = a(r, col) / diag;
      if (factor == Scalar(0)) continue;
      for (Eigen::Index c = col + 1; c < n; ++c) a(r, c) -= factor * a(col, c);
      a(r, col) = Scalar(0);
      x(r) -= factor * x(col);
    }
  }

  for (Eigen::Index r = n - 1; r >= 0; --r) {
    Scalar acc = x(r);
    for (Eigen::Index c = r + 1; c < n; ++c) acc -= a(r, c) * x(c);
    x(r) = acc / a(r, r);
  }
  return true;
}

/// Copying wrapper: leaves the inputs untouched and returns std::nullopt on
/// singularity. Works with fixed- and bounded-size Eigen types without heap
/// traffic.
template <typename MatrixType, typename VectorType>
std::optional<typename VectorType::PlainObject> solve_linear_system(
    const Eigen::MatrixBase<MatrixType>& a_in, const Eigen::MatrixBase<VectorType>& b_in)
{
  typename MatrixType::PlainObject a = a_in;
  typename VectorType::PlainObject x = b_in;
  if (!solve_linear_system_in_place(a, x)) return std::nullopt;
  return x;
}

}  // namespace amcoedge

#endif  // AMCOEDGE_LINEAR_SOLVE_HPP_
