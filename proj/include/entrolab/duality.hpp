#pragma once

// Reports on the dual compact flow, computed on the discrete side. The dual
// of G is never built: every object is the dual of a discrete presentation,
// with E(K, psi) the annihilator of P(G, phi).

#include "entrolab/entropy.hpp"
#include "entrolab/pinsker.hpp"

#include <optional>
#include <string>
#include <vector>

namespace entrolab {

/// A group with an endomorphism, as a presentation.
struct Flow {
  Group group;
  Endo endo;
};

struct DualReport {
  EntropyValue topological_entropy;
  std::optional<bool> ergodic;          ///< only when phi is an automorphism
  Flow pinsker_factor;                  ///< P(G, phi) with the restricted map
  Subgroup pinsker;                     ///< P(G, phi) inside G
  std::optional<Flow> ergodicity_domain;  ///< G / P(G, phi), only when phi is surjective
  bool automorphism = false;
  bool surjective = false;
  std::vector<std::string> notes;
};

/// phi is bijective: the free part is unimodular and phi is injective on t(G).
inline bool is_automorphism(const Endo& phi) {
  const IntMatrix f = free_part_matrix(phi);
  if (f.rows() > 0) {
    if (abs(determinant(f)) != 1) return false;
  }
  return intersect(kernel(phi), torsion_subgroup(phi.group())).is_zero();
}

inline bool is_surjective(const Endo& phi) { return image(phi).is_whole(); }

inline DualReport dual_report(const Endo& phi, double epsilon = kDefaultEpsilon) {
  const Group& g = phi.group();
  DualReport rep{algebraic_entropy(phi, epsilon), std::nullopt, Flow{g, phi}, Subgroup::zero(g)};
  rep.automorphism = is_automorphism(phi);
  rep.surjective = is_surjective(phi);
  rep.notes.push_back(std::string("phi automorphism: ") + (rep.automorphism ? "verified" : "no"));
  rep.notes.push_back(std::string("phi surjective: ") + (rep.surjective ? "verified" : "no"));

  const ChainReport chain = q_chain(phi);
  rep.pinsker = chain.limit();
  const Restriction res = restrict_to(phi, rep.pinsker);
  rep.pinsker_factor = Flow{res.group, res.endo};
  if (!chain.certified) rep.notes.push_back("periodic subgroup probing was not certified");

  if (rep.automorphism) {
    rep.ergodic = periodic_subgroup(phi).is_zero();
  } else {
    rep.notes.push_back("no ergodicity verdict: the dual map is not an automorphism");
  }
  if (rep.surjective) {
    rep.ergodicity_domain = Flow{quotient(g, rep.pinsker).group, induce(phi, rep.pinsker)};
    rep.notes.push_back("the induced map on G/P(G, phi) is an automorphism; E(K, psi) is the annihilator of P(G, phi)");
  } else {
    rep.notes.push_back("no ergodicity domain: the dual map is not injective");
  }
  return rep;
}

}  // namespace entrolab
