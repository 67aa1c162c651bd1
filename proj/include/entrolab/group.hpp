#pragma once

// Finitely presented abelian groups G = Z^n / L, their elements, subgroups
// and endomorphisms.
//
// Every object lives in the ambient Z^n of its parent group. Subgroups are
// lattices M with L <= M <= Z^n, stored by the canonical column HNF of M;
// elements are stored by their canonical representative modulo L. Both
// make equality a plain comparison.

#include "entrolab/errors.hpp"
#include "entrolab/matrix.hpp"
#include "entrolab/normal_form.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <vector>

namespace entrolab {

class Group {
 public:
  /// Z^n / (column lattice of relations). `relations` must have n rows.
  static Group from_presentation(std::size_t n, const IntMatrix& relations) {
    if (relations.rows() != n && !(relations.cols() == 0 && relations.rows() == 0))
      throw DimensionMismatch("relation matrix must have " + std::to_string(n) + " rows");
    auto d = std::make_shared<Data>();
    d->n = n;
    d->relations = relations.rows() == n ? relations : IntMatrix(n, 0);
    d->lattice = hnf(d->relations);
    d->pivots = hnf_pivots(d->lattice);
    d->smith = snf(d->relations);
    const IntVector diag = d->smith.diagonal();
    std::size_t nonzero = 0;
    for (const auto& x : diag)
      if (x != 0) ++nonzero;
    d->relation_rank = nonzero;
    d->free_rank = n - nonzero;
    for (std::size_t i = 0; i < nonzero; ++i) {
      if (diag[i] >= 2) {
        d->invariant_factors.push_back(diag[i]);
        d->torsion_coords.push_back(i);
      }
    }
    for (std::size_t i = nonzero; i < n; ++i) d->free_coords.push_back(i);
    return Group(std::move(d));
  }

  static Group free(std::size_t n) { return from_presentation(n, IntMatrix(n, 0)); }

  /// Z(d_1) + ... + Z(d_k) on ambient rank k.
  static Group finite_cyclic_sum(const IntVector& orders) {
    IntMatrix r(orders.size(), orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) r(i, i) = orders[i];
    return from_presentation(orders.size(), r);
  }

  std::size_t ambient_rank() const noexcept { return d_->n; }
  const IntMatrix& relations() const noexcept { return d_->relations; }
  /// Canonical HNF basis of the relation lattice L.
  const IntMatrix& relation_lattice() const noexcept { return d_->lattice; }
  const std::vector<std::size_t>& relation_pivots() const noexcept { return d_->pivots; }
  /// Invariant factors d_1 | d_2 | ... (each >= 2) of the torsion part.
  const IntVector& invariant_factors() const noexcept { return d_->invariant_factors; }
  std::size_t free_rank() const noexcept { return d_->free_rank; }
  bool is_finite() const noexcept { return d_->free_rank == 0; }
  bool is_trivial() const noexcept { return d_->free_rank == 0 && d_->invariant_factors.empty(); }
  bool is_torsion_free() const noexcept { return d_->invariant_factors.empty(); }

  /// |G| for finite G.
  BigInt order() const {
    if (!is_finite()) throw InvalidArgument("order of an infinite group");
    BigInt o = 1;
    for (const auto& x : d_->invariant_factors) o *= x;
    return o;
  }

  /// Largest invariant factor (1 for torsion-free groups).
  BigInt torsion_exponent() const {
    return d_->invariant_factors.empty() ? BigInt(1) : d_->invariant_factors.back();
  }

  const SmithForm& smith() const noexcept { return d_->smith; }
  /// Smith coordinates (rows of U) carrying a Z(d) summand with d >= 2.
  const std::vector<std::size_t>& torsion_coords() const noexcept { return d_->torsion_coords; }
  /// Smith coordinates carrying a free Z summand.
  const std::vector<std::size_t>& free_coords() const noexcept { return d_->free_coords; }

  /// Canonical coset representative of `coords` modulo L.
  IntVector canonical(IntVector coords) const {
    if (coords.size() != d_->n) throw DimensionMismatch("element has wrong ambient rank");
    reduce_mod_lattice(d_->lattice, d_->pivots, coords);
    return coords;
  }

  bool lattice_contains(const IntVector& v) const {
    return entrolab::lattice_contains(d_->lattice, d_->pivots, v);
  }

  /// Structural equality: same ambient rank and same relation lattice.
  friend bool operator==(const Group& a, const Group& b) {
    return a.d_ == b.d_ || (a.d_->n == b.d_->n && a.d_->lattice == b.d_->lattice);
  }

 private:
  struct Data {
    std::size_t n = 0;
    IntMatrix relations;
    IntMatrix lattice;
    std::vector<std::size_t> pivots;
    SmithForm smith;
    IntVector invariant_factors;
    std::vector<std::size_t> torsion_coords;
    std::vector<std::size_t> free_coords;
    std::size_t relation_rank = 0;
    std::size_t free_rank = 0;
  };

  explicit Group(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

inline void require_same_parent(const Group& a, const Group& b, const char* what) {
  if (!(a == b)) throw ParentMismatch(std::string(what) + ": operands live in different groups");
}

class Element {
 public:
  Element(Group g, IntVector coords) : group_(std::move(g)), coords_(group_.canonical(std::move(coords))) {}

  static Element zero(const Group& g) { return Element(g, IntVector(g.ambient_rank())); }
  static Element basis(const Group& g, std::size_t i) {
    IntVector v(g.ambient_rank());
    v.at(i) = 1;
    return Element(g, std::move(v));
  }

  const Group& group() const noexcept { return group_; }
  const IntVector& coords() const noexcept { return coords_; }
  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const BigInt& x) { return x == 0; });
  }

  friend Element operator+(const Element& a, const Element& b) {
    require_same_parent(a.group_, b.group_, "element sum");
    IntVector v = a.coords_;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.coords_[i];
    return Element(a.group_, std::move(v));
  }
  friend Element operator-(const Element& a, const Element& b) {
    require_same_parent(a.group_, b.group_, "element difference");
    IntVector v = a.coords_;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b.coords_[i];
    return Element(a.group_, std::move(v));
  }
  friend Element operator*(const BigInt& k, const Element& a) {
    IntVector v = a.coords_;
    for (auto& x : v) x *= k;
    return Element(a.group_, std::move(v));
  }
  friend bool operator==(const Element& a, const Element& b) {
    return a.coords_ == b.coords_ && a.group_ == b.group_;
  }
  friend bool operator<(const Element& a, const Element& b) { return a.coords_ < b.coords_; }

 private:
  Group group_;
  IntVector coords_;
};

/// Deduplicated finite set of elements, kept sorted by canonical coordinates.
class ElementSet {
 public:
  explicit ElementSet(Group g) : group_(std::move(g)) {}
  ElementSet(Group g, std::vector<IntVector> rows) : group_(std::move(g)) {
    for (auto& r : rows) r = group_.canonical(std::move(r));
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    rows_ = std::move(rows);
  }
  static ElementSet of(const Group& g, const std::vector<Element>& xs) {
    std::vector<IntVector> rows;
    for (const auto& x : xs) {
      require_same_parent(g, x.group(), "element set");
      rows.push_back(x.coords());
    }
    return ElementSet(g, std::move(rows));
  }

  const Group& group() const noexcept { return group_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  const std::vector<IntVector>& rows() const noexcept { return rows_; }
  std::vector<Element> elements() const {
    std::vector<Element> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.emplace_back(group_, r);
    return out;
  }
  bool contains(const Element& x) const {
    return std::binary_search(rows_.begin(), rows_.end(), x.coords());
  }
  bool contains_zero() const { return contains(Element::zero(group_)); }
  bool is_subset_of(const ElementSet& other) const {
    return std::includes(other.rows_.begin(), other.rows_.end(), rows_.begin(), rows_.end());
  }
  friend bool operator==(const ElementSet& a, const ElementSet& b) {
    return a.rows_ == b.rows_ && a.group_ == b.group_;
  }

 private:
  Group group_;
  std::vector<IntVector> rows_;
};

/// A subgroup L <= M <= Z^n of G = Z^n / L, identified by the HNF of M.
class Subgroup {
 public:
  /// Subgroup generated by the columns of `generators` (n rows).
  static Subgroup generated_by(const Group& g, const IntMatrix& generators) {
    if (generators.rows() != g.ambient_rank() && generators.cols() != 0)
      throw DimensionMismatch("generator matrix must have ambient-rank rows");
    IntMatrix gens = generators.cols() == 0 ? IntMatrix(g.ambient_rank(), 0) : generators;
    return Subgroup(g, hnf(hcat(gens, g.relation_lattice())));
  }
  static Subgroup generated_by(const Group& g, const std::vector<Element>& gens) {
    std::vector<IntVector> cols;
    for (const auto& x : gens) {
      require_same_parent(g, x.group(), "subgroup generators");
      cols.push_back(x.coords());
    }
    return generated_by(g, IntMatrix::from_columns(g.ambient_rank(), cols));
  }
  static Subgroup zero(const Group& g) { return Subgroup(g, g.relation_lattice()); }
  static Subgroup whole(const Group& g) { return Subgroup(g, IntMatrix::identity(g.ambient_rank())); }

  const Group& group() const noexcept { return group_; }
  /// Canonical HNF basis of the lifted lattice (relations included).
  const IntMatrix& basis() const noexcept { return basis_; }
  const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

  bool contains(const Element& x) const {
    require_same_parent(group_, x.group(), "subgroup membership");
    return lattice_contains(basis_, pivots_, x.coords());
  }
  bool contains_vector(const IntVector& v) const { return lattice_contains(basis_, pivots_, v); }
  bool contains(const Subgroup& other) const {
    require_same_parent(group_, other.group_, "subgroup inclusion");
    for (std::size_t j = 0; j < other.basis_.cols(); ++j)
      if (!contains_vector(other.basis_.column(j))) return false;
    return true;
  }
  bool is_zero() const { return basis_ == group_.relation_lattice(); }
  bool is_whole() const { return basis_ == IntMatrix::identity(group_.ambient_rank()); }

  /// Canonical basis columns that are nonzero in G.
  std::vector<Element> generators() const {
    std::vector<Element> out;
    for (std::size_t j = 0; j < basis_.cols(); ++j) {
      Element e(group_, basis_.column(j));
      if (!e.is_zero()) out.push_back(std::move(e));
    }
    return out;
  }

  friend bool operator==(const Subgroup& a, const Subgroup& b) {
    return a.basis_ == b.basis_ && a.group_ == b.group_;
  }

 private:
  Subgroup(Group g, IntMatrix basis)
      : group_(std::move(g)), basis_(std::move(basis)), pivots_(hnf_pivots(basis_)) {}
  Group group_;
  IntMatrix basis_;
  std::vector<std::size_t> pivots_;
};

class Endo {
 public:
  /// The endomorphism x -> A x of G; throws NotWellDefined unless A L <= L.
  static Endo make(const Group& g, const IntMatrix& a) {
    const std::size_t n = g.ambient_rank();
    if (a.rows() != n || a.cols() != n)
      throw DimensionMismatch("endomorphism matrix must be " + std::to_string(n) + "x" +
                              std::to_string(n));
    const IntMatrix image = a * g.relation_lattice();
    for (std::size_t j = 0; j < image.cols(); ++j)
      if (!g.lattice_contains(image.column(j)))
        throw NotWellDefined("matrix does not preserve the relation lattice (column " +
                             std::to_string(j) + ")");
    return Endo(g, reduce_columns(g, a));
  }
  static Endo identity(const Group& g) { return Endo(g, reduce_columns(g, IntMatrix::identity(g.ambient_rank()))); }
  static Endo zero(const Group& g) { return Endo(g, IntMatrix(g.ambient_rank(), g.ambient_rank())); }

  const Group& group() const noexcept { return group_; }
  const IntMatrix& matrix() const noexcept { return a_; }

  Element apply(const Element& x) const {
    require_same_parent(group_, x.group(), "apply");
    return Element(group_, a_ * x.coords());
  }
  Element operator()(const Element& x) const { return apply(x); }

  friend bool operator==(const Endo& a, const Endo& b) { return a.group_ == b.group_ && a.a_ == b.a_; }

 private:
  friend Endo compose(const Endo&, const Endo&);
  friend Endo power(const Endo&, const BigInt&);
  friend Endo operator-(const Endo&, const Endo&);
  friend Endo operator+(const Endo&, const Endo&);

  Endo(Group g, IntMatrix a) : group_(std::move(g)), a_(std::move(a)) {}

  /// Replace each column by its canonical representative; same map on G.
  static IntMatrix reduce_columns(const Group& g, IntMatrix a) {
    if (g.relation_lattice().cols() == 0) return a;
    for (std::size_t j = 0; j < a.cols(); ++j) a.set_column(j, g.canonical(a.column(j)));
    return a;
  }

  Group group_;
  IntMatrix a_;
};

/// phi o psi.
inline Endo compose(const Endo& phi, const Endo& psi) {
  require_same_parent(phi.group_, psi.group_, "compose");
  return Endo(phi.group_, Endo::reduce_columns(phi.group_, phi.a_ * psi.a_));
}

/// phi^k by repeated squaring; phi^0 = id.
inline Endo power(const Endo& phi, const BigInt& k) {
  if (k < 0) throw InvalidArgument("negative endomorphism power");
  Endo result = Endo::identity(phi.group_);
  Endo base = phi;
  BigInt e = k;
  while (e > 0) {
    if ((e & 1) != 0) result = compose(result, base);
    e >>= 1;
    if (e > 0) base = compose(base, base);
  }
  return result;
}

inline Endo operator-(const Endo& a, const Endo& b) {
  require_same_parent(a.group_, b.group_, "endomorphism difference");
  return Endo(a.group_, Endo::reduce_columns(a.group_, a.a_ - b.a_));
}

inline Endo operator+(const Endo& a, const Endo& b) {
  require_same_parent(a.group_, b.group_, "endomorphism sum");
  return Endo(a.group_, Endo::reduce_columns(a.group_, a.a_ + b.a_));
}

// ---------------------------------------------------------------------------
// Lattice algebra

/// {x : phi(x) in H}.
inline Subgroup preimage(const Endo& phi, const Subgroup& h) {
  require_same_parent(phi.group(), h.group(), "preimage");
  const Group& g = phi.group();
  const std::size_t n = g.ambient_rank();
  // kernel of [A | -B] projected onto the first n coordinates
  IntMatrix neg_b = h.basis();
  for (std::size_t j = 0; j < neg_b.cols(); ++j) neg_b.negate_column(j);
  const IntMatrix ker = integer_kernel(hcat(phi.matrix(), neg_b));
  IntMatrix xs(n, ker.cols());
  for (std::size_t j = 0; j < ker.cols(); ++j)
    for (std::size_t i = 0; i < n; ++i) xs(i, j) = ker(i, j);
  return Subgroup::generated_by(g, xs);
}

inline Subgroup kernel(const Endo& phi) { return preimage(phi, Subgroup::zero(phi.group())); }

inline Subgroup image(const Endo& phi) { return Subgroup::generated_by(phi.group(), phi.matrix()); }

/// phi(H).
inline Subgroup image(const Endo& phi, const Subgroup& h) {
  require_same_parent(phi.group(), h.group(), "image");
  return Subgroup::generated_by(phi.group(), phi.matrix() * h.basis());
}

inline Subgroup join(const Subgroup& a, const Subgroup& b) {
  require_same_parent(a.group(), b.group(), "join");
  return Subgroup::generated_by(a.group(), hcat(a.basis(), b.basis()));
}

inline Subgroup intersect(const Subgroup& a, const Subgroup& b) {
  require_same_parent(a.group(), b.group(), "intersect");
  IntMatrix neg_b = b.basis();
  for (std::size_t j = 0; j < neg_b.cols(); ++j) neg_b.negate_column(j);
  const IntMatrix ker = integer_kernel(hcat(a.basis(), neg_b));
  const IntMatrix coeffs = ker.cols() == 0 ? IntMatrix(a.basis().cols(), 0)
                                           : [&] {
                                               IntMatrix c(a.basis().cols(), ker.cols());
                                               for (std::size_t i = 0; i < c.rows(); ++i)
                                                 for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) = ker(i, j);
                                               return c;
                                             }();
  return Subgroup::generated_by(a.group(), a.basis() * coeffs);
}

inline bool is_invariant(const Endo& phi, const Subgroup& h) { return h.contains(image(phi, h)); }

/// G/H presented on the same ambient rank: relations = lattice of H.
struct Quotient {
  Group group;
  Group source;
  Element project(const Element& x) const {
    require_same_parent(source, x.group(), "projection");
    return Element(group, x.coords());
  }
  /// The subgroup pi^{-1}(K) of the source for a subgroup K of the quotient.
  Subgroup pull_back(const Subgroup& k) const {
    require_same_parent(group, k.group(), "pull back");
    return Subgroup::generated_by(source, k.basis());
  }
  Subgroup push_forward(const Subgroup& h) const {
    require_same_parent(source, h.group(), "push forward");
    return Subgroup::generated_by(group, h.basis());
  }
};

inline Quotient quotient(const Group& g, const Subgroup& h) {
  require_same_parent(g, h.group(), "quotient");
  return {Group::from_presentation(g.ambient_rank(), h.basis()), g};
}

/// Induced endomorphism on G/H; requires phi(H) <= H.
inline Endo induce(const Endo& phi, const Subgroup& h) {
  if (!is_invariant(phi, h)) throw NotInvariant("subgroup is not invariant under the endomorphism");
  return Endo::make(quotient(phi.group(), h).group, phi.matrix());
}

/// Union of the chain ker phi <= ker phi^2 <= ..., stopped at the first repeat.
inline Subgroup hyperkernel(const Endo& phi) {
  Subgroup current = Subgroup::zero(phi.group());
  for (;;) {
    Subgroup next = preimage(phi, current);
    if (next == current) return current;
    current = std::move(next);
  }
}

/// t(G): the saturation of the relation lattice.
inline Subgroup torsion_subgroup(const Group& g) {
  const SmithForm& sf = g.smith();
  const std::size_t n = g.ambient_rank();
  std::vector<IntVector> cols;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(g.free_coords().begin(), g.free_coords().end(), i) != g.free_coords().end())
      continue;
    cols.push_back(sf.U_inv.column(i));
  }
  return Subgroup::generated_by(g, IntMatrix::from_columns(n, cols));
}

/// Matrix (rows of the Smith transform U) sending G onto its free quotient Z^r.
inline IntMatrix free_projection_matrix(const Group& g) {
  const auto& fc = g.free_coords();
  IntMatrix p(fc.size(), g.ambient_rank());
  for (std::size_t a = 0; a < fc.size(); ++a)
    for (std::size_t j = 0; j < g.ambient_rank(); ++j) p(a, j) = g.smith().U(fc[a], j);
  return p;
}

/// r x r action induced by phi on G / t(G) = Z^r.
inline IntMatrix free_part_matrix(const Endo& phi) {
  const Group& g = phi.group();
  const auto& fc = g.free_coords();
  const IntMatrix conj = g.smith().U * phi.matrix() * g.smith().U_inv;
  IntMatrix m(fc.size(), fc.size());
  for (std::size_t a = 0; a < fc.size(); ++a)
    for (std::size_t b = 0; b < fc.size(); ++b) m(a, b) = conj(fc[a], fc[b]);
  return m;
}

struct FreeQuotient {
  Group group;            ///< Z^r
  IntMatrix projection;   ///< r x n, x -> projection * x
  Element project(const Element& x) const { return Element(group, projection * x.coords()); }
};

inline FreeQuotient free_quotient(const Group& g) {
  return {Group::free(g.free_rank()), free_projection_matrix(g)};
}

/// A subgroup H = M/L presented as a group in its own right, with the
/// restricted endomorphism and the embedding back into the parent.
struct Restriction {
  Group group;           ///< Z^k / C where basis * C = relation lattice
  Endo endo;             ///< D with A * basis = basis * D
  IntMatrix embedding;   ///< n x k: the HNF basis of M
  Group parent;
  Element embed(const Element& x) const { return Element(parent, embedding * x.coords()); }
};

/// H as an abstract group Z^k / C, with basis * C = the relation lattice.
inline Group as_group(const Subgroup& h) {
  const IntMatrix& l = h.group().relation_lattice();
  std::vector<IntVector> rel_cols;
  for (std::size_t j = 0; j < l.cols(); ++j) rel_cols.push_back(*lattice_coordinates(h.basis(), h.pivots(), l.column(j)));
  return Group::from_presentation(h.basis().cols(), IntMatrix::from_columns(h.basis().cols(), rel_cols));
}

inline Restriction restrict_to(const Endo& phi, const Subgroup& h) {
  require_same_parent(phi.group(), h.group(), "restrict");
  const Group& g = phi.group();
  const IntMatrix& b = h.basis();
  const std::size_t k = b.cols();
  auto coords_of = [&](const IntVector& v) {
    auto c = lattice_coordinates(b, h.pivots(), v);
    if (!c) throw NotInvariant("subgroup is not invariant under the endomorphism");
    return *c;
  };
  Group sub = as_group(h);
  const IntMatrix ab = phi.matrix() * b;
  std::vector<IntVector> d_cols;
  for (std::size_t j = 0; j < k; ++j) d_cols.push_back(coords_of(ab.column(j)));
  Endo d = Endo::make(sub, IntMatrix::from_columns(k, d_cols));
  return {sub, std::move(d), b, g};
}

}  // namespace entrolab
