#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "amcoedge/allocation.hpp"
#include "support/grid_oracle.hpp"

using namespace amcoedge;

namespace {

DelayCoefficients<double> coeffs(std::initializer_list<double> t, std::initializer_list<double> w)
{
  auto c = DelayCoefficients<double>::zeros(static_cast<int>(t.size()));
  int i = 0;
  for (double v : t) c.coefficient(i++) = v;
  i = 0;
  for (double v : w) c.waiting(i++) = v;
  return c;
}

double max_delay(const DelayCoefficients<double>& c, const AllocationFractions<double>& x)
{
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) > 0.0) worst = std::max(worst, c.coefficient(i) * x(i) + c.waiting(i));
  return worst;
}

struct Instance
{
  DelayCoefficients<double> c;
  SelectionSet sel;
};

Instance random_instance(std::mt19937_64& rng, int b_max, bool zero_waits)
{
  std::uniform_int_distribution<int> nb(1, b_max);
  const int b = nb(rng);
  std::uniform_real_distribution<double> t(0.005, 0.1), w(0.0, 0.08);
  auto c = DelayCoefficients<double>::zeros(b);
  for (int e = 0; e < b; ++e) {
    c.coefficient(e) = t(rng);
    c.waiting(e) = zero_waits ? 0.0 : w(rng);
  }
  const std::uint32_t mask = std::uniform_int_distribution<std::uint32_t>(1, (1u << b) - 1)(rng);
  return {c, SelectionSet::from_mask(mask, b)};
}

}  // namespace

TEST(SelectionSet, Construction)
{
  const auto s = SelectionSet::from_indices({3, 1}, 5);
  EXPECT_EQ(s.size(), 2);
  EXPECT_TRUE(s.contains(1));
  EXPECT_TRUE(s.contains(3));
  EXPECT_FALSE(s.contains(0));
  const auto ind = s.indices();
  std::vector<int> idx(ind.begin(), ind.end());
  EXPECT_EQ(idx, (std::vector<int>{1, 3}));
  EXPECT_EQ(s.without(3), SelectionSet::from_indices({1}, 5));
  EXPECT_EQ(SelectionSet::all(3).mask(), 7u);
  EXPECT_THROW(SelectionSet::from_indices({1, 1}, 5), std::invalid_argument);
  EXPECT_THROW(SelectionSet::from_indices({5}, 5), std::invalid_argument);
  EXPECT_THROW(SelectionSet::from_mask(0, 5), std::invalid_argument);
  EXPECT_THROW(SelectionSet::from_mask(1u << 5, 5), std::invalid_argument);
}

TEST(Cwa, SingletonTakesEverything)
{
  const auto c = coeffs({1, 1, 1}, {0, 0, 0});
  const auto x = cwa_allocate(c, SelectionSet::from_indices({2}, 3));
  EXPECT_EQ(x, Eigen::Vector3d(0, 0, 1));
}

TEST(Cwa, TwoServerHandSolve)
{
  const auto x = cwa_allocate(coeffs({1, 1}, {0.2, 0}), SelectionSet::all(2));
  EXPECT_NEAR(x(0), 0.4, 1e-12);
  EXPECT_NEAR(x(1), 0.6, 1e-12);
}

TEST(Cwa, SymmetricSplit)
{
  const auto x = cwa_allocate(coeffs({0.3, 0.3}, {0.1, 0.1}), SelectionSet::all(2));
  EXPECT_NEAR(x(0), 0.5, 1e-15);
  EXPECT_NEAR(x(1), 0.5, 1e-15);
}

TEST(Cwa, UnselectedEntriesAreZero)
{
  const auto x = cwa_allocate(coeffs({0.1, 0.2, 0.3, 0.4}, {0, 0, 0, 0}), SelectionSet::from_indices({0, 2}, 4));
  EXPECT_EQ(x(1), 0.0);
  EXPECT_EQ(x(3), 0.0);
  EXPECT_NEAR(x(0) + x(2), 1.0, 1e-15);
}

TEST(ProjectFeasible, DropsMostNegative)
{
  const auto c = coeffs({1, 1}, {10, 0});
  const auto raw = cwa_equal_delay(c, SelectionSet::all(2));
  EXPECT_NEAR(raw(0), -4.5, 1e-12);
  EXPECT_NEAR(raw(1), 5.5, 1e-12);
  const auto x = project_feasible(raw, c, SelectionSet::all(2));
  EXPECT_EQ(x, Eigen::Vector2d(0, 1));
}

TEST(ProjectFeasible, FeasibleInputUnchanged)
{
  const auto c = coeffs({1, 1}, {0.2, 0});
  const auto raw = cwa_equal_delay(c, SelectionSet::all(2));
  EXPECT_EQ(project_feasible(raw, c, SelectionSet::all(2)), raw);
}

TEST(ProjectFeasible, CanReduceToSingleton)
{
  const auto c = coeffs({1, 1, 1}, {5, 9, 0});
  const auto x = cwa_allocate(c, SelectionSet::all(3));
  EXPECT_EQ(x, Eigen::Vector3d(0, 0, 1));
}

TEST(Hecwa, HandExamples)
{
  auto x = hecwa_allocate(coeffs({2, 3}, {0, 0}), SelectionSet::all(2));
  EXPECT_NEAR(x(0), 0.6, 1e-15);
  EXPECT_NEAR(x(1), 0.4, 1e-15);
  x = hecwa_allocate(coeffs({1, 2, 4}, {0, 0, 0}), SelectionSet::all(3));
  EXPECT_NEAR(x(0), 4.0 / 7.0, 1e-15);
  EXPECT_NEAR(x(1), 2.0 / 7.0, 1e-15);
  EXPECT_NEAR(x(2), 1.0 / 7.0, 1e-15);
  x = hecwa_allocate(coeffs({1, 2, 4}, {0, 0, 0}), SelectionSet::from_indices({1}, 3));
  EXPECT_EQ(x, Eigen::Vector3d(0, 1, 0));
}

TEST(Hecwa, IgnoresWaits)
{
  const auto a = hecwa_allocate(coeffs({1, 2, 4}, {0, 0, 0}), SelectionSet::all(3));
  const auto b = hecwa_allocate(coeffs({1, 2, 4}, {0.5, 0, 3}), SelectionSet::all(3));
  EXPECT_EQ(a, b);
}

TEST(Hecwa, ExtremeCoefficientsStayFinite)
{
  auto c = DelayCoefficients<double>::zeros(32);
  for (int e = 0; e < 32; ++e) c.coefficient(e) = e % 2 ? 1e-30 : 1e30;
  const auto x = hecwa_allocate(c, SelectionSet::all(32));
  EXPECT_TRUE(x.allFinite());
  EXPECT_NEAR(x.sum(), 1.0, 1e-12);
}

TEST(Allocation, RejectsBadCoefficients)
{
  EXPECT_THROW(cwa_allocate(coeffs({0, 1}, {0, 0}), SelectionSet::all(2)), std::invalid_argument);
  EXPECT_THROW(hecwa_allocate(coeffs({1, -1}, {0, 0}), SelectionSet::all(2)), std::invalid_argument);
  EXPECT_THROW(cwa_allocate(coeffs({1, 1}, {-0.1, 0}), SelectionSet::all(2)), std::invalid_argument);
  EXPECT_THROW(cwa_allocate(coeffs({1, 1}, {0, 0}), SelectionSet::all(3)), std::invalid_argument);
}

TEST(Allocation, FloatScalar)
{
  auto c = DelayCoefficients<float>::zeros(2);
  c.coefficient << 2.0f, 3.0f;
  const auto x = cwa_allocate(c, SelectionSet::all(2));
  EXPECT_NEAR(x(0), 0.6f, 1e-6f);
  const auto y = hecwa_allocate(c, SelectionSet::all(2));
  EXPECT_NEAR(y(1), 0.4f, 1e-6f);
}

TEST(Property, SimplexAndEqualDelay)
{
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto [c, sel] = random_instance(rng, 8, false);
    for (const auto& x : {cwa_allocate(c, sel), hecwa_allocate(c, sel)}) {
      ASSERT_NEAR(x.sum(), 1.0, 1e-9);
      ASSERT_TRUE((x.array() >= 0.0).all() && (x.array() <= 1.0).all());
      for (int e = 0; e < sel.num_servers(); ++e)
        if (!sel.contains(e)) ASSERT_EQ(x(e), 0.0);
    }
    const auto x = cwa_allocate(c, sel);
    bool interior = true;
    for (int e : sel.indices()) interior = interior && x(e) > 0.0 && x(e) < 1.0;
    if (!interior) continue;
    const double top = max_delay(c, x);
    for (int e : sel.indices()) ASSERT_NEAR(c.coefficient(e) * x(e) + c.waiting(e), top, 1e-9 * top);
  }
}

TEST(Property, HecwaEqualsCwaWithoutWaits)
{
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto [c, sel] = random_instance(rng, 8, true);
    ASSERT_LE((cwa_allocate(c, sel) - hecwa_allocate(c, sel)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Property, HecwaMonotoneInOwnCoefficient)
{
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> grow(1.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    auto [c, sel] = random_instance(rng, 8, true);
    const int u = sel.indices()[0];
    const double before = hecwa_allocate(c, sel)(u);
    c.coefficient(u) *= grow(rng);
    ASSERT_LE(hecwa_allocate(c, sel)(u), before + 1e-15);
  }
}

TEST(Property, GridOracleNeverBeatsCwa)
{
  std::mt19937_64 rng(24);
  const double h = 1e-3;
  for (int trial = 0; trial < 60; ++trial) {
    const auto [c, sel] = random_instance(rng, 3, false);
    std::vector<double> t, w;
    for (int e : sel.indices()) {
      t.push_back(c.coefficient(e));
      w.push_back(c.waiting(e));
    }
    const double cwa = max_delay(c, cwa_allocate(c, sel));
    const double grid = amcoedge::testing::grid_min_makespan(t, w, h);
    ASSERT_GE(grid, cwa - h * *std::max_element(t.begin(), t.end())) << "trial " << trial;
    ASSERT_LE(cwa, grid + 1e-12);
  }
}

TEST(Integerize, Examples)
{
  EXPECT_EQ(integerize_allocation(Eigen::Vector2d(0.5, 0.5), 10), (std::vector<int>{5, 5}));
  EXPECT_EQ(integerize_allocation(Eigen::Vector3d(0.34, 0.33, 0.33), 10), (std::vector<int>{4, 3, 3}));
  EXPECT_EQ(integerize_allocation(Eigen::VectorXd::Ones(1), 7), (std::vector<int>{7}));
  EXPECT_THROW(integerize_allocation(Eigen::Vector2d(0.5, 0.5), 0), std::invalid_argument);
}

TEST(Integerize, OvershootGuard)
{
  // the six non-max entries all round up to 1 with n = 5
  Eigen::VectorXd x(7);
  x << 0.1, 0.15, 0.15, 0.15, 0.15, 0.15, 0.15;
  const auto counts = integerize_allocation(x, 5);
  int sum = 0;
  for (int v : counts) {
    EXPECT_GE(v, 0);
    sum += v;
  }
  EXPECT_EQ(sum, 5);
}

TEST(Property, IntegerizeSumsExactly)
{
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const int b = 1 + trial % 8;
    Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(b, [&] { return u(rng); });
    x /= x.sum();
    const int n = 1 + static_cast<int>(u(rng) * 40);
    const auto counts = integerize_allocation(x, n);
    int sum = 0;
    for (int v : counts) {
      ASSERT_GE(v, 0);
      sum += v;
    }
    ASSERT_EQ(sum, n);
  }
}
