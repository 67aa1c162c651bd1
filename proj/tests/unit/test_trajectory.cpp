#include "entrolab/trajectory.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace entrolab;
using support::set_of;

namespace {

const double kGolden = std::log((1 + std::sqrt(5.0)) / 2);

Endo unipotent() { return Endo::make(Group::free(2), IntMatrix{{1, 0}, {1, 1}}); }

ElementSet zero_e1_e2(const Group& g) { return ElementSet(g, {{0, 0}, {1, 0}, {0, 1}}); }

TauSequence synthetic(std::size_t n, double (*f)(double)) {
  TauSequence s;
  for (std::size_t k = 1; k <= n; ++k) s.values.push_back(static_cast<std::uint64_t>(std::llround(f(static_cast<double>(k)))));
  return s;
}

}  // namespace

TEST(Trajectory, Singleton) {
  Endo phi = Endo::make(Group::free(2), IntMatrix{{2, 1}, {1, 1}});
  ElementSet f(phi.group(), {{3, -1}});
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_EQ(n_trajectory(phi, f, n).size(), 1u);
  EXPECT_EQ(tau_sequence(phi, f, 10).values, std::vector<std::uint64_t>(10, 1));
}

TEST(Trajectory, IdentityOnZ) {
  Group z = Group::free(1);
  ElementSet t = n_trajectory(Endo::identity(z), ElementSet(z, {{0}, {1}}), 3);
  EXPECT_EQ(t, ElementSet(z, {{0}, {1}, {2}, {3}}));
}

TEST(Trajectory, FirstValuesOfUnipotent) {
  Endo phi = unipotent();
  TauSequence s = tau_sequence(phi, zero_e1_e2(phi.group()), 2);
  EXPECT_EQ(s[1], 3u);
  EXPECT_EQ(s[2], 7u);
  oracle::DiagFlow fl{{0, 0}, {{1, 0}, {1, 1}}};
  EXPECT_EQ(oracle::brute_tau(fl, {{0, 0}, {1, 0}, {0, 1}}, 2), 7u);
}

TEST(Trajectory, BudgetIsReportedDistinctly) {
  Endo cat = Endo::make(Group::free(2), IntMatrix{{2, 1}, {1, 1}});
  ElementSet f(cat.group(), {{0, 0}, {1, 0}});
  try {
    tau_sequence(cat, f, 30, 1000);
    FAIL() << "expected the budget to trip";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.budget(), 1000u);
    EXPECT_EQ(e.reached_n(), 10u);  // 2^10 > 1000
  }
  TauSequence prefix = tau_sequence_prefix(cat, f, 30, 1000);
  EXPECT_TRUE(prefix.truncated);
  EXPECT_EQ(prefix.size(), 9u);
  EXPECT_EQ(prefix[9], 512u);
}

TEST(Trajectory, OverflowFallsBackToBigIntegers) {
  // entries of phi^k reach 10^k, far beyond int64 by k = 25
  Endo phi = Endo::make(Group::free(1), IntMatrix{{10}});
  ElementSet f(phi.group(), {{0}, {1}});
  TauSequence s = tau_sequence(phi, f, 20);
  for (std::size_t n = 1; n <= 20; ++n) EXPECT_EQ(s[n], std::uint64_t{1} << n);
}

TEST(Trajectory, MatchesBruteForce) {
  std::mt19937_64 rng(41);
  const std::vector<std::vector<long long>> shapes = {{0}, {0, 0}, {6}, {2, 4}, {0, 3}, {3, 9}, {0, 0, 5}};
  for (int t = 0; t < 120; ++t) {
    auto fl = support::random_flow(rng, shapes[t % shapes.size()]);
    auto fr = support::random_set(rng, fl, 1 + t % 3);
    Endo phi = support::endo_of(fl);
    ElementSet f = set_of(phi.group(), fr);
    for (int n = 1; n <= 5; ++n) {
      auto brute = oracle::brute_trajectory(fl, fr, n);
      ElementSet mine = n_trajectory(phi, f, n);
      ASSERT_EQ(mine, set_of(phi.group(), {brute.begin(), brute.end()})) << "t=" << t << " n=" << n;
    }
  }
}

TEST(TrajectoryProperties, CardinalityBounds) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 60; ++t) {
    auto fl = support::random_flow(rng, t % 2 ? std::vector<long long>{0, 0} : std::vector<long long>{4, 0, 0});
    auto fr = support::random_set(rng, fl, 2 + t % 3);
    Endo phi = support::endo_of(fl);
    ElementSet f = set_of(phi.group(), fr);
    TauSequence s = tau_sequence(phi, f, 6);
    double pow = 1;
    for (std::size_t n = 1; n <= 6; ++n) {
      pow *= static_cast<double>(f.size());
      ASSERT_GE(s[n], f.size());
      ASSERT_LE(static_cast<double>(s[n]), pow);
      if (f.contains_zero() && n > 1) ASSERT_GE(s[n], s[n - 1]);
    }
    if (f.contains_zero())
      for (std::size_t n = 1; n < 5; ++n)
        ASSERT_TRUE(n_trajectory(phi, f, n).is_subset_of(n_trajectory(phi, f, n + 1)));
  }
}

TEST(TrajectoryProperties, PowerIdentities) {
  std::mt19937_64 rng(47);
  for (int t = 0; t < 40; ++t) {
    auto fl = support::random_flow(rng, {3, 0});
    auto fr = support::random_set(rng, fl, 2);
    Endo phi = support::endo_of(fl);
    ElementSet f = set_of(phi.group(), fr);
    const std::size_t n = 1 + t % 3, k = 1 + t % 4;
    Endo phik = power(phi, k);
    // T_n(phi^k, F) is inside T_{nk - n + 1}(phi, F) ... when 0 in F; in general
    // the sum f_0 + phi^k f_1 + ... uses n of the nk - n + 1 slots
    ElementSet lhs = n_trajectory(phik, f, n);
    ElementSet f0(phi.group(), [&] {
      std::vector<IntVector> r = f.rows();
      r.push_back(IntVector(2));
      return r;
    }());
    EXPECT_TRUE(lhs.is_subset_of(n_trajectory(phi, f0, n * k - k + 1)));
    // T_{nk}(phi, F) = T_n(phi^k, T_k(phi, F))
    EXPECT_EQ(n_trajectory(phi, f, n * k), n_trajectory(phik, n_trajectory(phi, f, k), n));
  }
}

TEST(TrajectoryProperties, IdentityAndUnipotentBounds) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 30; ++t) {
    auto fl = support::random_flow(rng, {0, 0});
    auto fr = support::random_set(rng, fl, 3);
    Group g = support::group_of(fl);
    ElementSet f = set_of(g, fr);
    TauSequence s = tau_sequence(Endo::identity(g), f, 8);
    for (std::size_t n = 1; n <= 8; ++n)
      ASSERT_LE(static_cast<double>(s[n]), std::pow(n + 1.0, static_cast<double>(f.size())));
    // (phi - id)^2 = 0 for the unipotent shear
    IntMatrix a{{1, 0}, {t % 5 - 2, 1}};
    Endo phi = Endo::make(g, a);
    ASSERT_TRUE(power(phi - Endo::identity(g), 2).matrix().is_zero());
    TauSequence u = tau_sequence(phi, f, 8);
    for (std::size_t n = 1; n <= 8; ++n)
      ASSERT_LE(static_cast<double>(u[n]), std::pow(std::pow(n, 2.0) + 1, 2.0 * static_cast<double>(f.size())));
  }
}

TEST(TrajectorySubgroup, Examples) {
  Group z2 = Group::free(2);
  EXPECT_TRUE(trajectory_subgroup(unipotent(), ElementSet(z2, {{0, 0}})).is_zero());
  EXPECT_TRUE(trajectory_subgroup(unipotent(), ElementSet(z2, {{1, 0}})).is_whole());
  EXPECT_EQ(trajectory_subgroup(Endo::identity(z2), ElementSet(z2, {{0, 1}})),
            Subgroup::generated_by(z2, IntMatrix{{0}, {1}}));
  Endo dbl = Endo::make(z2, IntMatrix{{2, 0}, {0, 2}});
  Subgroup v = trajectory_subgroup(dbl, ElementSet(z2, {{1, 1}}));
  EXPECT_EQ(v, Subgroup::generated_by(z2, IntMatrix{{1}, {1}}));
}

TEST(EntropyEstimate, SyntheticSequences) {
  EXPECT_EQ(entropy_estimate(synthetic(20, [](double) { return 1.0; })), 0.0);
  EXPECT_NEAR(entropy_estimate(synthetic(20, [](double n) { return std::pow(2.0, n); })), std::log(2.0), 1e-12);
  EXPECT_LT(entropy_estimate(synthetic(30, [](double n) { return (n + 1) * (n + 1); })), 0.07);
  EXPECT_LT(entropy_estimate(synthetic(32, [](double n) { return n + 1; })), kExponentialThreshold);
  EXPECT_LT(entropy_estimate(synthetic(32, [](double n) { return std::pow(n, 6.0); })), kExponentialThreshold);
  EXPECT_THROW(entropy_estimate(synthetic(7, [](double) { return 1.0; })), InvalidArgument);
}

TEST(Growth, Unipotent) {
  Endo phi = unipotent();
  GrowthVerdict v = growth_classify(phi, zero_e1_e2(phi.group()));
  EXPECT_EQ(v.kind, GrowthKind::Polynomial);
  EXPECT_EQ(v.mode, GrowthMode::Exact);
  EXPECT_TRUE(v.exact->exact_zero);
  ASSERT_TRUE(v.degree.has_value());
  EXPECT_LE(*v.degree, 2.0 * 3);
  GrowthVerdict e = growth_classify(phi, zero_e1_e2(phi.group()), {GrowthMode::Empirical});
  EXPECT_EQ(e.kind, GrowthKind::Polynomial);
}

TEST(Growth, Fibonacci) {
  Endo fib = Endo::make(Group::free(2), IntMatrix{{0, 1}, {1, 1}});
  GrowthVerdict v = growth_classify(fib, zero_e1_e2(fib.group()));
  EXPECT_EQ(v.kind, GrowthKind::Exponential);
  EXPECT_NEAR(*v.rate, kGolden, 1e-9);
  GrowthVerdict e = growth_classify(fib, zero_e1_e2(fib.group()), {GrowthMode::Empirical});
  EXPECT_EQ(e.kind, GrowthKind::Exponential);
  EXPECT_TRUE(e.sequence.truncated);
}

TEST(Growth, TranslatedSetsShareTheVerdict) {
  Endo fib = Endo::make(Group::free(2), IntMatrix{{0, 1}, {1, 1}});
  ElementSet f(fib.group(), {{3, 1}, {4, 1}});
  ElementSet f0(fib.group(), {{0, 0}, {1, 0}});
  EXPECT_EQ(tau_sequence(fib, f, 12).values, tau_sequence(fib, f0, 12).values);
  EXPECT_EQ(growth_classify(fib, f).kind, GrowthKind::Exponential);
}

TEST(Growth, Singleton) {
  Endo fib = Endo::make(Group::free(2), IntMatrix{{0, 1}, {1, 1}});
  GrowthVerdict v = growth_classify(fib, ElementSet(fib.group(), {{1, 2}}));
  EXPECT_EQ(v.kind, GrowthKind::Polynomial);
  EXPECT_EQ(v.entropy, 0.0);
  EXPECT_EQ(growth_classify(fib, ElementSet(fib.group(), {{1, 2}}), {GrowthMode::Empirical}).kind,
            GrowthKind::Polynomial);
}

TEST(Growth, ExactVerdictIsConjugationInvariant) {
  std::mt19937_64 rng(59);
  std::uniform_int_distribution<int> k(-2, 2);
  for (int t = 0; t < 20; ++t) {
    auto fl = support::random_flow(rng, {0, 0, 0}, -2, 2);
    Endo phi = support::endo_of(fl);
    Group g = phi.group();
    IntMatrix u = IntMatrix::identity(3);
    u.add_row_multiple(0, 1, k(rng));
    u.add_row_multiple(2, 0, k(rng));
    u.add_row_multiple(1, 2, k(rng));
    IntMatrix ui = hermite_with_transform(u).transform;
    ASSERT_EQ(u * ui, IntMatrix::identity(3));
    Endo psi = Endo::make(g, u * phi.matrix() * ui);
    ElementSet f = set_of(g, support::random_set(rng, fl, 2));
    std::vector<IntVector> moved;
    for (const auto& r : f.rows()) moved.push_back(u * r);
    ElementSet uf(g, moved);
    ASSERT_EQ(growth_classify(phi, f, {GrowthMode::Exact, 4}).kind,
              growth_classify(psi, uf, {GrowthMode::Exact, 4}).kind);
    // phi in Pol_F iff phi^k in Pol over T_k(phi, F)
    for (int p : {2, 3})
      ASSERT_EQ(growth_classify(phi, f, {GrowthMode::Exact, 4}).kind,
                growth_classify(power(phi, p), n_trajectory(phi, f, p), {GrowthMode::Exact, 4}).kind);
  }
}

TEST(Shift, BernoulliBasics) {
  ShiftGroup k2 = ShiftGroup::cyclic(2);
  Bernoulli beta = bernoulli(k2);
  EXPECT_EQ(beta(ShiftElement::unit(0, 1)), ShiftElement::unit(1, 1));
  EXPECT_TRUE(beta(ShiftElement{}).is_zero());
  EXPECT_THROW(ShiftGroup::over(Group::free(1)), InvalidArgument);

  ShiftSet f{ShiftElement{}, ShiftElement::unit(0, 1)};
  ShiftSet t3 = n_trajectory(beta, f, 3);
  EXPECT_EQ(t3.size(), 8u);
  EXPECT_TRUE(std::binary_search(t3.begin(), t3.end(), ShiftElement({1, 1, 1})));
}

TEST(Shift, TauOfBernoulli) {
  for (std::size_t q : {2u, 3u, 5u}) {
    ShiftGroup k = ShiftGroup::cyclic(q);
    Bernoulli beta = bernoulli(k);
    // {0, e_0} gives two choices per coordinate whatever q is
    TauSequence two = tau_sequence(beta, {ShiftElement{}, ShiftElement::unit(0, 1)}, 10);
    ShiftSet whole;
    for (std::uint32_t i = 0; i < q; ++i) whole.push_back(ShiftElement::unit(0, i));
    TauSequence full = tau_sequence(beta, whole, 8);
    std::uint64_t p2 = 1, pq = 1;
    for (std::size_t n = 1; n <= 10; ++n) {
      p2 *= 2;
      EXPECT_EQ(two[n], p2);
      if (n <= 8) {
        pq *= q;
        EXPECT_EQ(full[n], pq);
      }
    }
  }
}

TEST(Shift, SparseAndDenseAgree) {
  // supports far apart push the window past the dense limit
  ShiftGroup k3 = ShiftGroup::cyclic(3);
  Bernoulli beta = bernoulli(k3);
  ShiftSet f{ShiftElement{}, ShiftElement::unit(0, 1), ShiftElement::unit(25, 2)};
  TauSequence s = tau_sequence(beta, f, 6);
  ShiftSet g{ShiftElement{}, ShiftElement::unit(0, 1), ShiftElement::unit(3, 2)};
  TauSequence d = tau_sequence(beta, g, 6);
  EXPECT_EQ(s.values.front(), 3u);
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_EQ(n_trajectory(beta, f, n).size(), s[n]);
  for (std::size_t n = 1; n <= 6; ++n) EXPECT_EQ(n_trajectory(beta, g, n).size(), d[n]);
  // brute force over tuples for the far-apart set
  for (std::size_t n = 1; n <= 4; ++n) {
    std::set<ShiftElement> brute;
    std::vector<std::size_t> idx(n, 0);
    for (;;) {
      ShiftElement acc;
      for (std::size_t j = 0; j < n; ++j) {
        ShiftElement x = f[idx[j]];
        for (std::size_t r = 0; r < j; ++r) x = beta(x);
        acc = add(k3, acc, x);
      }
      brute.insert(acc);
      std::size_t j = 0;
      while (j < n && ++idx[j] == f.size()) idx[j++] = 0;
      if (j == n) break;
    }
    EXPECT_EQ(brute.size(), s[n]);
  }
}

TEST(Shift, TruncatedShiftHasZeroEntropy) {
  // beta_n on Z(2)^n: the last coordinate falls off
  for (long long n : {2, 3, 4}) {
    oracle::DiagFlow fl{std::vector<long long>(n, 2), std::vector<std::vector<long long>>(n, std::vector<long long>(n, 0))};
    for (long long i = 1; i < n; ++i) fl.a[i][i - 1] = 1;
    Endo phi = support::endo_of(fl);
    oracle::Vec e1(n, 0);
    e1[0] = 1;
    ElementSet f = set_of(phi.group(), {oracle::Vec(n, 0), e1});
    TauSequence s = tau_sequence(phi, f, 12);
    for (std::size_t m = n; m <= 12; ++m) EXPECT_EQ(s[m], s[n]);
    EXPECT_TRUE(algebraic_entropy(phi).exact_zero);
    EXPECT_EQ(growth_classify(phi, f, {GrowthMode::Empirical, 12}).kind, GrowthKind::Polynomial);
  }
}

TEST(Shift, GrowthAndCsv) {
  Bernoulli beta = bernoulli(ShiftGroup::cyclic(2));
  GrowthVerdict v = growth_classify(beta, {ShiftElement{}, ShiftElement::unit(0, 1)}, {GrowthMode::Empirical});
  EXPECT_EQ(v.kind, GrowthKind::Exponential);
  EXPECT_NEAR(*v.rate, std::log(2.0), 1e-9);
  EXPECT_THROW(growth_classify(beta, {ShiftElement{}}, {GrowthMode::Exact}), Unsupported);

  std::ostringstream os;
  write_csv(os, tau_sequence(beta, {ShiftElement{}, ShiftElement::unit(0, 1)}, 3));
  EXPECT_EQ(os.str(), "n,tau,log_tau\n1,2,0.693147180560\n2,4,1.386294361120\n3,8,2.079441541680\n");
}
