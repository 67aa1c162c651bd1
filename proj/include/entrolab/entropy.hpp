#pragma once

// Exact algebraic entropy of endomorphisms of finitely generated abelian
// groups: h = log s + sum_{|lambda| > 1} log|lambda| over the eigenvalues of
// the rational matrix, with s the denominator lcm of its characteristic
// polynomial. Cyclotomic factors are removed exactly, so a zero verdict
// never rests on floating point.

#include "entrolab/group.hpp"
#include "entrolab/polynomial.hpp"
#include "entrolab/roots.hpp"

#include <cmath>
#include <string>

namespace entrolab {

inline constexpr double kDefaultEpsilon = 1e-9;

struct EntropyValue {
  BigInt s = 1;
  double mahler_lo = 0;   ///< lower bound of the sum over |lambda| > 1, nats
  double mahler_hi = 0;
  bool exact_zero = true;

  double log_s() const { return s == 1 ? 0.0 : log_abs(s); }
  double lo() const { return log_s() + mahler_lo; }
  double hi() const { return log_s() + mahler_hi; }
  /// Midpoint estimate in nats.
  double nats() const { return exact_zero ? 0.0 : log_s() + 0.5 * (mahler_lo + mahler_hi); }
  double bits() const { return nats() / std::log(2.0); }
};

/// det(tI - A), by fraction-free elimination over Q[t]. The leading principal
/// minors of tI - A are monic, so no pivoting is needed.
inline RatPoly char_poly(const RatMatrix& a) {
  if (!a.is_square()) throw DimensionMismatch("characteristic polynomial of a non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return RatPoly::constant(Rational(1));
  Matrix<RatPoly> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = (i == j ? RatPoly::monomial(1, Rational(1)) : RatPoly{}) - RatPoly::constant(a(i, j));
  RatPoly prev = RatPoly::constant(Rational(1));
  for (std::size_t k = 0; k + 1 < n; ++k) {
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m(i, j) = exact_quotient(m(k, k) * m(i, j) - m(i, k) * m(k, j), prev);
    prev = m(k, k);
  }
  return m(n - 1, n - 1);
}

inline RatPoly char_poly(const IntMatrix& a) { return char_poly(to_rational(a)); }

/// Smallest s >= 1 with s * p integral.
inline BigInt denominator_lcm(const RatPoly& p) {
  if (!p.is_monic()) throw InvalidArgument("denominator_lcm expects a monic polynomial");
  BigInt s = 1;
  for (const auto& c : p.coeffs()) s = lcm(s, boost::multiprecision::denominator(c));
  return s;
}

inline IntPoly scale_to_integer(const RatPoly& p, const BigInt& s) {
  std::vector<BigInt> c;
  for (const auto& x : p.coeffs()) {
    const Rational y = x * s;
    if (boost::multiprecision::denominator(y) != 1) throw InvalidArgument("scaling did not clear denominators");
    c.push_back(boost::multiprecision::numerator(y));
  }
  return IntPoly(std::move(c));
}

struct CyclotomicSplit {
  IntPoly cyclo = IntPoly::constant(1);
  IntPoly rest;
  std::size_t t_power = 0;
  /// (d, multiplicity) for every Phi_d dividing p.
  std::vector<std::pair<unsigned long, std::size_t>> factors;
};

/// p = t^k * (product of cyclotomic factors) * rest, rest free of both.
inline CyclotomicSplit cyclotomic_split(const IntPoly& p) {
  if (p.is_zero()) throw InvalidArgument("cyclotomic split of the zero polynomial");
  CyclotomicSplit out;
  std::size_t k = 0;
  while (p.coeffs()[k] == 0) ++k;
  out.t_power = k;
  out.rest = IntPoly(std::vector<BigInt>(p.coeffs().begin() + static_cast<long>(k), p.coeffs().end()));
  const unsigned long deg = static_cast<unsigned long>(out.rest.degree());
  if (deg == 0) return out;
  // phi(d) >= sqrt(d / 2), so phi(d) <= deg forces d <= 2 deg^2
  for (unsigned long d = 1; d <= 2 * deg * deg && out.rest.degree() > 0; ++d) {
    if (euler_phi(d) > static_cast<unsigned long>(out.rest.degree())) continue;
    const IntPoly phi = cyclotomic(d);
    std::size_t mult = 0;
    IntPoly q;
    while (out.rest.degree() >= phi.degree() && divide_exact(out.rest, phi, q)) {
      out.rest = q;
      out.cyclo = out.cyclo * phi;
      ++mult;
    }
    if (mult > 0) out.factors.emplace_back(d, mult);
  }
  return out;
}

/// Interval for sum_{|lambda|>1} log|lambda| over the roots (with multiplicity)
/// of a nonzero polynomial; width at most 2 * epsilon.
inline Interval outer_log_sum(const IntPoly& p, double epsilon) {
  const CyclotomicSplit sp = cyclotomic_split(p);
  Interval total;
  if (sp.rest.degree() <= 0) return total;
  const auto parts = squarefree_decomposition(to_rational(sp.rest));
  std::size_t weighted_degree = 0;
  for (std::size_t k = 0; k < parts.size(); ++k)
    weighted_degree += (k + 1) * static_cast<std::size_t>(std::max<long>(0, parts[k].degree()));
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].degree() <= 0) continue;
    const double mult = static_cast<double>(k + 1);
    const double share = 2 * epsilon * static_cast<double>(parts[k].degree()) /
                         static_cast<double>(weighted_degree);
    const Interval iv = outer_root_log_sum(primitive_part(parts[k]), share / mult);
    total.lo += mult * iv.lo;
    total.hi += mult * iv.hi;
  }
  return total;
}

/// log M(p) = log|lead| + sum_{|lambda|>1} log|lambda|.
inline Interval mahler_measure(const IntPoly& p, double epsilon = kDefaultEpsilon) {
  if (p.is_zero()) throw InvalidArgument("Mahler measure of the zero polynomial");
  Interval iv = outer_log_sum(p, epsilon);
  const double ll = log_abs(p.lead());
  iv.lo += ll;
  iv.hi += ll;
  return iv;
}

inline bool mahler_is_exact_zero(const IntPoly& p) {
  const CyclotomicSplit sp = cyclotomic_split(p);
  return sp.rest.degree() == 0 && abs(sp.rest.lead()) == 1;
}

/// Yuzvinski formula on a rational matrix; singular matrices are accepted.
inline EntropyValue yuzvinski_entropy(const RatMatrix& a, double epsilon = kDefaultEpsilon) {
  if (!(epsilon > 0)) throw InvalidArgument("epsilon must be positive");
  const RatPoly p = char_poly(a);
  EntropyValue v;
  v.s = denominator_lcm(p);
  const IntPoly sp = scale_to_integer(p, v.s);
  const CyclotomicSplit split = cyclotomic_split(sp);
  v.exact_zero = v.s == 1 && split.rest.degree() == 0;
  if (v.exact_zero) return v;
  const Interval iv = outer_log_sum(sp, epsilon);
  v.mahler_lo = iv.lo;
  v.mahler_hi = iv.hi;
  return v;
}

inline EntropyValue yuzvinski_entropy(const IntMatrix& a, double epsilon = kDefaultEpsilon) {
  return yuzvinski_entropy(to_rational(a), epsilon);
}

/// h(phi) for an endomorphism of a finitely generated group: the torsion part
/// is finite and contributes nothing, so this is the entropy of the induced
/// action on G / t(G).
inline EntropyValue algebraic_entropy(const Endo& phi, double epsilon = kDefaultEpsilon) {
  return yuzvinski_entropy(free_part_matrix(phi), epsilon);
}

}  // namespace entrolab
