#pragma once

// Periodic and quasi-periodic subgroups, the P_n / Q_n chains and the
// Pinsker subgroup P(G, phi) = Q(G, phi).
//
// P_1 is computed exactly as ker(phi^(K e) - id). Here e is the exponent of
// t(G) and K is a common multiple of every free-part period and of the
// eventual period of phi on t(G), taken past its preperiod. With psi = phi^K
// and x periodic, t = psi x - x is torsion and psi t = t, so psi^j x = x + j t
// and e kills t.

#include "entrolab/entropy.hpp"
#include "entrolab/group.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace entrolab {

inline constexpr std::size_t kDefaultProbeBudget = 100'000;

struct PeriodicReport {
  Subgroup subgroup;
  bool certified = true;
  BigInt exponent;           ///< the probe exponent N with P_1 = ker(phi^N - id)
  BigInt free_period;        ///< lcm of d with Phi_d dividing the free-part char poly
  BigInt torsion_period;     ///< eventual period of phi on t(G)
  std::size_t torsion_preperiod = 0;
  std::string note;
};

namespace pinsker_detail {

/// Eventual period and preperiod of T^k for the torsion action; entries of
/// row i live mod d_i. nullopt once `budget` powers have been seen.
inline std::optional<std::pair<std::size_t, std::size_t>> torsion_cycle(const IntMatrix& t, const IntVector& d,
                                                                         std::size_t budget) {
  const std::size_t k = d.size();
  auto reduce = [&](IntMatrix m) {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m(i, j) = floor_mod(m(i, j), d[i]);
    return m;
  };
  auto key = [&](const IntMatrix& m) {
    std::vector<BigInt> v;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) v.push_back(m(i, j));
    return v;
  };
  std::map<std::vector<BigInt>, std::size_t> seen;
  IntMatrix cur = reduce(t);
  const IntMatrix base = cur;
  for (std::size_t e = 1; e <= budget; ++e) {
    auto [it, fresh] = seen.emplace(key(cur), e);
    if (!fresh) return std::make_pair(e - it->second, it->second);
    cur = reduce(cur * base);
  }
  return std::nullopt;
}

/// Action of phi on t(G) in Smith coordinates, with the invariant factors.
inline std::pair<IntMatrix, IntVector> torsion_action(const Endo& phi) {
  const Group& g = phi.group();
  const auto& tc = g.torsion_coords();
  const IntMatrix b = g.smith().U * phi.matrix() * g.smith().U_inv;
  IntMatrix t(tc.size(), tc.size());
  for (std::size_t a = 0; a < tc.size(); ++a)
    for (std::size_t c = 0; c < tc.size(); ++c) t(a, c) = b(tc[a], tc[c]);
  return {t, g.invariant_factors()};
}

/// lcm of the d with Phi_d | char poly of the free-part action.
inline BigInt free_period(const Endo& phi) {
  const IntMatrix f = free_part_matrix(phi);
  const IntPoly p = scale_to_integer(char_poly(f), 1);
  BigInt k = 1;
  for (const auto& [d, mult] : cyclotomic_split(p).factors) k = lcm(k, BigInt(d));
  return k;
}

/// pi^{-1}(ker(F^k - I)) for the projection pi onto the free quotient.
inline Subgroup free_periodic_preimage(const Endo& phi, const BigInt& k) {
  const Group& g = phi.group();
  const std::size_t n = g.ambient_rank();
  const IntMatrix f = free_part_matrix(phi);
  const std::size_t r = f.rows();
  if (r == 0) return Subgroup::whole(g);
  const IntMatrix w = integer_kernel(matrix_power(f, k) - IntMatrix::identity(r));
  IntMatrix neg_w = w;
  for (std::size_t j = 0; j < neg_w.cols(); ++j) neg_w.negate_column(j);
  const IntMatrix ker = integer_kernel(hcat(free_projection_matrix(g), neg_w));
  IntMatrix xs(n, ker.cols());
  for (std::size_t j = 0; j < ker.cols(); ++j)
    for (std::size_t i = 0; i < n; ++i) xs(i, j) = ker(i, j);
  return Subgroup::generated_by(g, xs);
}

inline Subgroup fixed_subgroup(const Endo& phi, const BigInt& exponent) {
  return kernel(power(phi, exponent) - Endo::identity(phi.group()));
}

}  // namespace pinsker_detail

/// P_1(G, phi) = { x : phi^k x = x for some k >= 1 }.
inline PeriodicReport periodic_report(const Endo& phi, std::size_t probe_budget = kDefaultProbeBudget) {
  using namespace pinsker_detail;
  const Group& g = phi.group();
  PeriodicReport rep{Subgroup::zero(g)};
  rep.free_period = free_period(phi);
  // only points over the free-periodic part can be periodic; work inside it
  const Subgroup m = free_periodic_preimage(phi, rep.free_period);
  const Restriction res = restrict_to(phi, m);
  const Group& h = res.group;
  const BigInt e = h.torsion_exponent();

  auto [t, d] = torsion_action(res.endo);
  auto cycle = torsion_cycle(t, d, probe_budget);
  Subgroup inner = Subgroup::zero(h);
  if (cycle) {
    rep.torsion_period = cycle->first;
    rep.torsion_preperiod = cycle->second;
    BigInt k = lcm(rep.free_period, rep.torsion_period);
    if (k < rep.torsion_preperiod) k *= (BigInt(rep.torsion_preperiod) + k - 1) / k;
    rep.exponent = k * e;
    inner = fixed_subgroup(res.endo, rep.exponent);
  } else {
    // no certified period: grow the exponent through lcm(1..j) until two
    // consecutive kernels agree
    rep.certified = false;
    rep.torsion_period = 0;
    rep.note = "torsion action did not repeat within " + std::to_string(probe_budget) + " powers";
    BigInt k = rep.free_period * e;
    inner = fixed_subgroup(res.endo, k);
    for (unsigned j = 2;; ++j) {
      k = lcm(k, BigInt(j));
      Subgroup next = fixed_subgroup(res.endo, k);
      if (next == inner) break;
      inner = std::move(next);
    }
    rep.exponent = k;
  }
  rep.subgroup = Subgroup::generated_by(g, res.embedding * inner.basis());
  return rep;
}

inline Subgroup periodic_subgroup(const Endo& phi) { return periodic_report(phi).subgroup; }

/// Q_1 = union of phi^{-n}(P_1).
inline Subgroup quasiperiodic_from(const Endo& phi, Subgroup p1) {
  for (;;) {
    Subgroup next = preimage(phi, p1);
    if (next == p1) return p1;
    p1 = std::move(next);
  }
}

inline Subgroup quasiperiodic_subgroup(const Endo& phi) {
  return quasiperiodic_from(phi, periodic_subgroup(phi));
}

enum class ChainKind { P, Q };

inline const char* to_string(ChainKind k) { return k == ChainKind::P ? "P" : "Q"; }

struct ChainReport {
  ChainKind kind = ChainKind::Q;
  std::vector<Subgroup> terms;  ///< X_0 = 0 < X_1 < ... < X_s, strictly increasing
  std::size_t stabilization_index = 0;  ///< s: X_s = X_{s+1}
  bool certified = true;
  const Subgroup& limit() const { return terms.back(); }
};

/// X_{n+1} / X_n = X_1(G / X_n), for X = P or Q.
inline ChainReport chain(const Endo& phi, ChainKind kind, std::size_t probe_budget = kDefaultProbeBudget) {
  const Group& g = phi.group();
  ChainReport rep;
  rep.kind = kind;
  rep.terms.push_back(Subgroup::zero(g));
  for (;;) {
    const Subgroup& cur = rep.terms.back();
    const Quotient q = quotient(g, cur);
    const Endo bar = induce(phi, cur);
    PeriodicReport p1 = periodic_report(bar, probe_budget);
    rep.certified = rep.certified && p1.certified;
    const Subgroup step = kind == ChainKind::P ? p1.subgroup : quasiperiodic_from(bar, p1.subgroup);
    Subgroup next = q.pull_back(step);
    if (next == cur) break;
    rep.terms.push_back(std::move(next));
  }
  rep.stabilization_index = rep.terms.size() - 1;
  return rep;
}

inline ChainReport q_chain(const Endo& phi) { return chain(phi, ChainKind::Q); }
inline ChainReport p_chain(const Endo& phi) { return chain(phi, ChainKind::P); }

/// The union of the Q-chain.
inline Subgroup q_infinity(const Endo& phi) { return q_chain(phi).limit(); }

/// P(G, phi), the greatest invariant subgroup of zero entropy; equal to the
/// limit of the Q-chain.
inline Subgroup pinsker_subgroup(const Endo& phi) { return q_infinity(phi); }

/// t_phi(G) = t(G) intersected with Q_1.
inline Subgroup phi_torsion_subgroup(const Endo& phi) {
  return intersect(torsion_subgroup(phi.group()), quasiperiodic_subgroup(phi));
}

/// No nonzero quasi-periodic points.
inline bool is_algebraically_ergodic(const Endo& phi) { return quasiperiodic_subgroup(phi).is_zero(); }

/// Every nonzero invariant subgroup has positive entropy, i.e. P(G, phi) = 0.
inline bool has_completely_positive_entropy(const Endo& phi) { return pinsker_subgroup(phi).is_zero(); }

}  // namespace entrolab
