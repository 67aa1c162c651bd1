#include "entrolab/duality.hpp"
#include "entrolab/pinsker.hpp"
#include "oracle/oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace entrolab;

namespace {

Subgroup span(const Group& g, const IntMatrix& gens) { return Subgroup::generated_by(g, gens); }

Endo on_free(const IntMatrix& a) { return Endo::make(Group::free(a.rows()), a); }

IntMatrix unitriangular(std::size_t r) {
  IntMatrix a(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i; j < r; ++j) a(i, j) = 1;
  return a;
}

IntMatrix first_basis_vectors(std::size_t r, std::size_t n) {
  IntMatrix m(r, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

/// X_n of a chain, held constant past stabilization.
const Subgroup& term(const ChainReport& c, std::size_t n) { return c.terms[std::min(n, c.terms.size() - 1)]; }

/// Random singular integer matrix of size r.
IntMatrix random_singular(std::mt19937_64& rng, std::size_t r) {
  std::uniform_int_distribution<int> e(-2, 2);
  for (;;) {
    IntMatrix a(r, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) a(i, j) = e(rng);
    // force a dependent column so the kernel is nontrivial
    const std::size_t c = rng() % r;
    for (std::size_t i = 0; i < r; ++i) a(i, c) = r > 1 ? BigInt(e(rng) % 2 * a(i, (c + 1) % r)) : BigInt(0);
    if (determinant(a) == 0) return a;
  }
}

/// Random invariant subgroup: the smallest one containing a random element.
Subgroup random_invariant(std::mt19937_64& rng, const Endo& phi) {
  std::uniform_int_distribution<int> e(-2, 2);
  const Group& g = phi.group();
  IntVector v(g.ambient_rank());
  for (auto& x : v) x = e(rng);
  Subgroup h = Subgroup::generated_by(g, std::vector<Element>{Element(g, v)});
  for (;;) {
    Subgroup next = join(h, image(phi, h));
    if (next == h) return h;
    h = std::move(next);
  }
}

std::vector<std::vector<long long>> finite_moduli() {
  return {{2, 4}, {3, 9}, {6}, {2, 2, 2}, {4, 8}, {5, 5}, {2, 6, 12}, {3, 3, 9}, {12}, {2, 4, 4}};
}

}  // namespace

TEST(Periodic, Rotation) {
  const Endo rot = on_free(IntMatrix{{0, -1}, {1, 0}});
  const PeriodicReport rep = periodic_report(rot);
  EXPECT_TRUE(rep.subgroup.is_whole());
  EXPECT_TRUE(rep.certified);
  EXPECT_EQ(rep.free_period, 4);
}

TEST(Periodic, Hyperbolic) {
  EXPECT_TRUE(periodic_subgroup(on_free(IntMatrix{{2, 1}, {1, 1}})).is_zero());
}

TEST(Periodic, Unipotent) {
  const Endo phi = on_free(IntMatrix{{1, 1}, {0, 1}});
  EXPECT_EQ(periodic_subgroup(phi), span(phi.group(), IntMatrix{{1}, {0}}));
}

TEST(Periodic, MixedPointNeedsTorsionMultiple) {
  // on Z + Z(4): x -> (x_0, x_1 + x_0); (1, 0) has period 4, not 1
  const Group g = Group::from_presentation(2, IntMatrix{{0, 0}, {0, 4}});
  const Endo phi = Endo::make(g, IntMatrix{{1, 0}, {1, 1}});
  EXPECT_TRUE(periodic_subgroup(phi).is_whole());
}

TEST(Periodic, UncertifiedFallbackAgrees) {
  const Group g = Group::finite_cyclic_sum({2, 4, 8});
  const Endo phi = Endo::make(g, IntMatrix{{1, 1, 0}, {0, 1, 1}, {0, 0, 2}});
  const PeriodicReport exact = periodic_report(phi);
  const PeriodicReport probe = periodic_report(phi, 1);
  EXPECT_TRUE(exact.certified);
  EXPECT_FALSE(probe.certified);
  EXPECT_FALSE(probe.note.empty());
  EXPECT_EQ(exact.subgroup, probe.subgroup);
}

TEST(Quasiperiodic, Nilpotent) {
  EXPECT_TRUE(quasiperiodic_subgroup(on_free(IntMatrix{{0, 0}, {1, 0}})).is_whole());
}

TEST(Quasiperiodic, DoublingPlusZero) {
  const Endo phi = on_free(IntMatrix{{2, 0}, {0, 0}});
  EXPECT_TRUE(periodic_subgroup(phi).is_zero());
  EXPECT_EQ(quasiperiodic_subgroup(phi), span(phi.group(), IntMatrix{{0}, {1}}));
}

TEST(Quasiperiodic, InjectiveAddsNothing) {
  const Endo phi = on_free(IntMatrix{{1, 1, 0}, {0, 1, 0}, {0, 0, 3}});
  EXPECT_EQ(quasiperiodic_subgroup(phi), periodic_subgroup(phi));
}

TEST(Chain, UnipotentTwoByTwo) {
  const Endo phi = on_free(IntMatrix{{1, 1}, {0, 1}});
  const ChainReport c = q_chain(phi);
  ASSERT_EQ(c.terms.size(), 3u);
  EXPECT_EQ(c.stabilization_index, 2u);
  EXPECT_TRUE(c.terms[0].is_zero());
  EXPECT_EQ(c.terms[1], span(phi.group(), IntMatrix{{1}, {0}}));
  EXPECT_TRUE(c.terms[2].is_whole());
  EXPECT_TRUE(pinsker_subgroup(phi).is_whole());
  EXPECT_TRUE(algebraic_entropy(phi).exact_zero);
}

TEST(Chain, LowerUnipotentGoesThroughSecondAxis) {
  const Endo phi = on_free(IntMatrix{{1, 0}, {1, 1}});
  const ChainReport c = q_chain(phi);
  ASSERT_EQ(c.terms.size(), 3u);
  EXPECT_EQ(c.terms[1], span(phi.group(), IntMatrix{{0}, {1}}));
}

TEST(Chain, UnitriangularTruncations) {
  for (std::size_t r : {3u, 4u, 5u}) {
    const Endo phi = on_free(unitriangular(r));
    const ChainReport q = q_chain(phi);
    const ChainReport p = p_chain(phi);
    ASSERT_EQ(q.terms.size(), r + 1) << r;
    for (std::size_t n = 0; n <= r; ++n) {
      EXPECT_EQ(q.terms[n], span(phi.group(), first_basis_vectors(r, n))) << r << ' ' << n;
      EXPECT_EQ(term(p, n), q.terms[n]);
    }
  }
}

TEST(Chain, HyperbolicStopsAtZero) {
  const ChainReport c = q_chain(on_free(IntMatrix{{2, 1}, {1, 1}}));
  EXPECT_EQ(c.terms.size(), 1u);
  EXPECT_EQ(c.stabilization_index, 0u);
}

TEST(Pinsker, FibonacciPlusIdentity) {
  IntMatrix a(4, 4);
  a(0, 1) = a(1, 0) = a(1, 1) = 1;
  a(2, 2) = a(3, 3) = 1;
  const Endo phi = on_free(a);
  const Subgroup p = pinsker_subgroup(phi);
  EXPECT_EQ(p, span(phi.group(), IntMatrix{{0, 0}, {0, 0}, {1, 0}, {0, 1}}));
  EXPECT_TRUE(algebraic_entropy(restrict_to(phi, p).endo).exact_zero);
}

TEST(Pinsker, PhiTorsion) {
  const Endo on_z2 = on_free(IntMatrix{{2, 1}, {1, 1}});
  EXPECT_TRUE(phi_torsion_subgroup(on_z2).is_zero());

  const Group finite = Group::finite_cyclic_sum({2, 6});
  EXPECT_TRUE(phi_torsion_subgroup(Endo::make(finite, IntMatrix{{1, 0}, {3, 5}})).is_whole());

  const Group g = Group::from_presentation(2, IntMatrix{{0, 0}, {0, 4}});
  const Endo phi = Endo::make(g, IntMatrix{{2, 0}, {0, 3}});
  EXPECT_EQ(phi_torsion_subgroup(phi), span(g, IntMatrix{{0}, {1}}));
}

TEST(Pinsker, ErgodicPredicates) {
  const Endo hyp = on_free(IntMatrix{{2, 1}, {1, 1}});
  EXPECT_TRUE(is_algebraically_ergodic(hyp));
  EXPECT_TRUE(has_completely_positive_entropy(hyp));

  const Endo id = on_free(IntMatrix{{1}});
  EXPECT_FALSE(is_algebraically_ergodic(id));
  EXPECT_FALSE(has_completely_positive_entropy(id));

  const Group g = Group::from_presentation(2, IntMatrix{{0, 0}, {0, 3}});
  EXPECT_FALSE(is_algebraically_ergodic(Endo::zero(g)));
  EXPECT_TRUE(is_algebraically_ergodic(Endo::zero(Group::free(0))));
}

TEST(Pinsker, QEqualsPPlusHyperkernel) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t r = 1 + trial % 4;
    const Endo phi = on_free(random_singular(rng, r));
    const Subgroup k = hyperkernel(phi);
    const ChainReport q = q_chain(phi);
    const ChainReport p = p_chain(phi);
    const std::size_t len = std::max(q.terms.size(), p.terms.size());
    for (std::size_t n = 1; n <= len; ++n) {
      EXPECT_EQ(join(term(p, n), k), term(q, n)) << phi.matrix() << " n=" << n;
      EXPECT_TRUE(intersect(term(p, n), k).is_zero()) << phi.matrix() << " n=" << n;
    }
  }
}

namespace {

/// Mixed corpus: random flows on Z^a + finite cyclic summands.
std::vector<Endo> mixed_corpus(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  const std::vector<std::vector<long long>> shapes{{0, 0}, {0, 0, 0}, {0, 4}, {0, 6, 0}, {2, 0, 0}, {0, 0, 0, 0}, {3, 0}};
  std::vector<Endo> out;
  for (int i = 0; i < count; ++i) out.push_back(support::endo_of(support::random_flow(rng, shapes[i % shapes.size()], -2, 2)));
  return out;
}

}  // namespace

TEST(Pinsker, ChainTermsAreFullPreimages) {
  for (const Endo& phi : mixed_corpus(12, 40)) {
    const ChainReport q = q_chain(phi);
    for (std::size_t n = 1; n < q.terms.size(); ++n) {
      const Subgroup& t = q.terms[n];
      EXPECT_EQ(preimage(phi, t), t) << phi.matrix();
      EXPECT_TRUE(is_invariant(phi, t));
    }
  }
}

TEST(Pinsker, QuotientByLimitHasNoQuasiperiodicPoints) {
  for (const Endo& phi : mixed_corpus(13, 40)) {
    const Subgroup p = pinsker_subgroup(phi);
    EXPECT_TRUE(quasiperiodic_subgroup(induce(phi, p)).is_zero()) << phi.matrix();
    EXPECT_TRUE(algebraic_entropy(restrict_to(phi, p).endo).exact_zero) << phi.matrix();
  }
}

TEST(Pinsker, RestrictionToInvariantSubgroups) {
  std::mt19937_64 rng(14);
  for (const Endo& phi : mixed_corpus(15, 40)) {
    const Subgroup h = random_invariant(rng, phi);
    const Restriction res = restrict_to(phi, h);
    auto lift = [&](const Subgroup& s) { return Subgroup::generated_by(phi.group(), res.embedding * s.basis()); };
    EXPECT_EQ(lift(quasiperiodic_subgroup(res.endo)), intersect(quasiperiodic_subgroup(phi), h)) << phi.matrix();
    EXPECT_EQ(lift(pinsker_subgroup(res.endo)), intersect(pinsker_subgroup(phi), h)) << phi.matrix();
  }
}

TEST(Pinsker, ChainQuotientsOfFreeGroupsAreFree) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 40; ++trial) {
    const Endo phi = on_free(random_singular(rng, 1 + trial % 4));
    for (const Subgroup& t : q_chain(phi).terms) EXPECT_TRUE(quotient(phi.group(), t).group.is_torsion_free());
  }
  for (const Endo& phi : mixed_corpus(17, 40)) {
    if (!phi.group().is_torsion_free()) continue;
    for (const Subgroup& t : q_chain(phi).terms) EXPECT_TRUE(quotient(phi.group(), t).group.is_torsion_free());
  }
}

TEST(Pinsker, AddingAnEntropicGeneratorGivesPositiveEntropy) {
  std::mt19937_64 rng(18);
  for (const Endo& phi : mixed_corpus(19, 30)) {
    const Subgroup p = pinsker_subgroup(phi);
    const Subgroup h = join(p, random_invariant(rng, phi));
    if (h == p) continue;
    EXPECT_FALSE(algebraic_entropy(restrict_to(phi, h).endo).exact_zero) << phi.matrix();
  }
}

TEST(Oracle, PeriodicAndQuasiperiodicOnFiniteGroups) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 60; ++trial) {
    const auto mods = finite_moduli()[trial % finite_moduli().size()];
    const auto fl = support::random_flow(rng, mods);
    const Endo phi = support::endo_of(fl);
    const Subgroup p1 = periodic_subgroup(phi);
    const Subgroup q1 = quasiperiodic_subgroup(phi);
    for (const auto& x : fl.elements()) {
      const Element e(phi.group(), support::to_int(x));
      EXPECT_EQ(p1.contains(e), oracle::brute_periodic(fl, x));
      EXPECT_EQ(q1.contains(e), oracle::brute_quasiperiodic(fl, x));
    }
  }
}

TEST(Oracle, PeriodicOnBoxes) {
  // free blocks of finite order keep brute-force orbits bounded
  std::mt19937_64 rng(21);
  const std::vector<std::vector<long long>> shapes{{0, 4}, {0, 6}, {2, 0, 3}};
  for (int trial = 0; trial < 30; ++trial) {
    auto fl = support::random_flow(rng, shapes[trial % shapes.size()]);
    for (std::size_t i = 0; i < fl.dim(); ++i) {
      if (fl.mods[i] != 0) continue;
      for (std::size_t j = 0; j < fl.dim(); ++j)
        if (j != i && fl.mods[j] == 0) fl.a[i][j] = 0;
      fl.a[i][i] = std::vector<long long>{-1, 0, 1}[rng() % 3];
    }
    const Endo phi = support::endo_of(fl);
    const Subgroup p1 = periodic_subgroup(phi);
    const Subgroup q1 = quasiperiodic_subgroup(phi);
    for (const auto& x : fl.box(3)) {
      const Element e(phi.group(), support::to_int(x));
      EXPECT_EQ(p1.contains(e), oracle::brute_periodic(fl, x)) << phi.matrix();
      EXPECT_EQ(q1.contains(e), oracle::brute_quasiperiodic(fl, x)) << phi.matrix();
    }
  }
}

TEST(Dual, Hyperbolic) {
  const Endo phi = on_free(IntMatrix{{2, 1}, {1, 1}});
  const DualReport r = dual_report(phi);
  EXPECT_NEAR(r.topological_entropy.nats(), std::log((3 + std::sqrt(5.0)) / 2), 1e-9);
  ASSERT_TRUE(r.ergodic.has_value());
  EXPECT_TRUE(*r.ergodic);
  EXPECT_TRUE(r.pinsker.is_zero());
  EXPECT_TRUE(r.pinsker_factor.group.is_trivial());
  ASSERT_TRUE(r.ergodicity_domain.has_value());
  EXPECT_EQ(r.ergodicity_domain->group, phi.group());
}

TEST(Dual, RotationAndUnipotent) {
  for (const IntMatrix& a : {IntMatrix{{0, -1}, {1, 0}}, IntMatrix{{1, 1}, {0, 1}}}) {
    const DualReport r = dual_report(on_free(a));
    EXPECT_TRUE(r.topological_entropy.exact_zero);
    ASSERT_TRUE(r.ergodic.has_value());
    EXPECT_FALSE(*r.ergodic);
    EXPECT_TRUE(r.pinsker.is_whole());
    ASSERT_TRUE(r.ergodicity_domain.has_value());
    EXPECT_TRUE(r.ergodicity_domain->group.is_trivial());
  }
}

TEST(Dual, NonSurjectiveHasNoVerdict) {
  const DualReport r = dual_report(on_free(IntMatrix{{2, 0}, {0, 3}}));
  EXPECT_FALSE(r.ergodic.has_value());
  EXPECT_FALSE(r.ergodicity_domain.has_value());
  EXPECT_TRUE(r.pinsker.is_zero());
}

TEST(Dual, AutomorphismCheckMatchesSurjectivity) {
  for (const Endo& phi : mixed_corpus(22, 60)) EXPECT_EQ(is_automorphism(phi), is_surjective(phi)) << phi.matrix();
}

TEST(Dual, FourWayAgreementOnAutomorphisms) {
  int seen = 0;
  for (const Endo& phi : mixed_corpus(24, 200)) {
    if (!is_automorphism(phi)) continue;
    ++seen;
    const bool p1 = periodic_subgroup(phi).is_zero();
    EXPECT_EQ(p1, quasiperiodic_subgroup(phi).is_zero());
    EXPECT_EQ(p1, pinsker_subgroup(phi).is_zero());
    EXPECT_EQ(p1, *dual_report(phi).ergodic);
    const Endo bar = induce(phi, pinsker_subgroup(phi));
    EXPECT_TRUE(is_automorphism(bar));
  }
  EXPECT_GT(seen, 10);
}

TEST(Dual, ErgodicityIsConjugationInvariant) {
  const IntMatrix u{{2, 1}, {1, 1}}, u_inv{{1, -1}, {-1, 2}};
  for (const IntMatrix& a : {IntMatrix{{2, 1}, {1, 1}}, IntMatrix{{0, -1}, {1, 0}}, IntMatrix{{1, 1}, {0, 1}},
                             IntMatrix{{3, 2}, {1, 1}}}) {
    EXPECT_EQ(dual_report(on_free(a)).ergodic, dual_report(on_free(u * a * u_inv)).ergodic);
  }
}
