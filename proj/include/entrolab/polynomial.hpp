#pragma once

// Dense univariate polynomials over Z and Q, coefficients low-to-high.

#include "entrolab/bigint.hpp"
#include "entrolab/errors.hpp"

#include <ostream>
#include <utility>
#include <vector>

namespace entrolab {

template <class T>
class Poly {
 public:
  Poly() = default;
  Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }  // NOLINT(implicit)
  Poly(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }

  static Poly constant(const T& a) { return Poly(std::vector<T>{a}); }
  static Poly monomial(std::size_t k, const T& a = T(1)) {
    std::vector<T> c(k + 1);
    c[k] = a;
    return Poly(std::move(c));
  }
  /// t - a
  static Poly linear(const T& a) { return Poly(std::vector<T>{-a, T(1)}); }

  bool is_zero() const noexcept { return c_.empty(); }
  /// Degree; -1 for the zero polynomial.
  long degree() const noexcept { return static_cast<long>(c_.size()) - 1; }
  const T& lead() const { return c_.back(); }
  const std::vector<T>& coeffs() const noexcept { return c_; }
  T coeff(std::size_t k) const { return k < c_.size() ? c_[k] : T(0); }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }

  Poly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<T> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * T(static_cast<long>(k));
    return Poly(std::move(d));
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<T> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
    return Poly(std::move(c));
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    return Poly(std::move(c));
  }
  friend Poly operator*(const T& k, const Poly& a) { return Poly::constant(k) * a; }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

  friend std::ostream& operator<<(std::ostream& os, const Poly& p) {
    if (p.is_zero()) return os << "0";
    bool first = true;
    for (std::size_t k = p.c_.size(); k-- > 0;) {
      if (p.c_[k] == 0) continue;
      if (!first) os << " + ";
      first = false;
      os << '(' << p.c_[k] << ')';
      if (k > 0) os << "*t^" << k;
    }
    return os;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<T> c_;
};

using IntPoly = Poly<BigInt>;
using RatPoly = Poly<Rational>;

/// Quotient and remainder over Q.
inline std::pair<RatPoly, RatPoly> divmod(const RatPoly& a, const RatPoly& b) {
  if (b.is_zero()) throw InvalidArgument("polynomial division by zero");
  std::vector<Rational> r = a.coeffs();
  const long db = b.degree();
  if (a.degree() < db) return {RatPoly{}, a};
  std::vector<Rational> q(static_cast<std::size_t>(a.degree() - db + 1));
  for (long k = a.degree(); k >= db; --k) {
    const Rational f = r[static_cast<std::size_t>(k)] / b.lead();
    q[static_cast<std::size_t>(k - db)] = f;
    if (f == 0) continue;
    for (long j = 0; j <= db; ++j) r[static_cast<std::size_t>(k - db + j)] -= f * b.coeffs()[static_cast<std::size_t>(j)];
  }
  return {RatPoly(std::move(q)), RatPoly(std::move(r))};
}

/// Exact division of integer polynomials by a divisor with leading coefficient
/// +-1; returns false (leaving `q` unspecified) when the remainder is nonzero.
inline bool divide_exact(const IntPoly& a, const IntPoly& b, IntPoly& q) {
  if (b.is_zero() || abs(b.lead()) != 1) throw InvalidArgument("divisor must be monic up to sign");
  const long db = b.degree();
  if (a.is_zero()) {
    q = IntPoly{};
    return true;
  }
  if (a.degree() < db) return false;
  std::vector<BigInt> r = a.coeffs();
  std::vector<BigInt> qc(static_cast<std::size_t>(a.degree() - db + 1));
  for (long k = a.degree(); k >= db; --k) {
    const BigInt f = r[static_cast<std::size_t>(k)] * b.lead();
    qc[static_cast<std::size_t>(k - db)] = f;
    if (f == 0) continue;
    for (long j = 0; j <= db; ++j) r[static_cast<std::size_t>(k - db + j)] -= f * b.coeffs()[static_cast<std::size_t>(j)];
  }
  for (long k = 0; k < db; ++k)
    if (r[static_cast<std::size_t>(k)] != 0) return false;
  q = IntPoly(std::move(qc));
  return true;
}

inline RatPoly make_monic(const RatPoly& p) {
  if (p.is_zero()) return p;
  std::vector<Rational> c = p.coeffs();
  const Rational l = p.lead();
  for (auto& x : c) x /= l;
  return RatPoly(std::move(c));
}

/// Monic gcd over Q (zero if both are zero).
inline RatPoly gcd(RatPoly a, RatPoly b) {
  while (!b.is_zero()) {
    RatPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(a);
}

inline RatPoly exact_quotient(const RatPoly& a, const RatPoly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw InvalidArgument("polynomial division is not exact");
  return q;
}

inline RatPoly to_rational(const IntPoly& p) {
  std::vector<Rational> c;
  for (const auto& x : p.coeffs()) c.emplace_back(x);
  return RatPoly(std::move(c));
}

/// Primitive integer polynomial with the same roots, positive leading coefficient.
inline IntPoly primitive_part(const RatPoly& p) {
  if (p.is_zero()) return {};
  BigInt den = 1;
  for (const auto& x : p.coeffs()) den = lcm(den, boost::multiprecision::denominator(x));
  std::vector<BigInt> c;
  BigInt content = 0;
  for (const auto& x : p.coeffs()) {
    c.push_back(boost::multiprecision::numerator(x) * (den / boost::multiprecision::denominator(x)));
    content = gcd(content, c.back());
  }
  if (p.lead() < 0) content = -content;
  for (auto& x : c) x /= content;
  return IntPoly(std::move(c));
}

/// Yun's square-free decomposition over Q: p = lead * prod_k f_k^k, with the
/// f_k monic, square-free and pairwise coprime. Entry k-1 holds f_k.
inline std::vector<RatPoly> squarefree_decomposition(const RatPoly& p) {
  if (p.degree() <= 0) return {};
  std::vector<RatPoly> out;
  const RatPoly f = make_monic(p);
  const RatPoly df = f.derivative();
  const RatPoly a0 = gcd(f, df);
  RatPoly b = exact_quotient(f, a0);
  RatPoly c = exact_quotient(df, a0);
  RatPoly d = c - b.derivative();
  while (b.degree() > 0) {
    RatPoly a = gcd(b, d);
    out.push_back(a);
    b = exact_quotient(b, a);
    c = exact_quotient(d, a);
    d = c - b.derivative();
  }
  while (!out.empty() && out.back().is_one()) out.pop_back();
  return out;
}

inline unsigned long euler_phi(unsigned long n) {
  unsigned long result = n;
  for (unsigned long p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

inline int moebius(unsigned long n) {
  int mu = 1;
  for (unsigned long p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

/// The d-th cyclotomic polynomial, prod_{e | d} (t^(d/e) - 1)^mu(e).
inline IntPoly cyclotomic(unsigned long d) {
  if (d == 0) throw InvalidArgument("cyclotomic index must be positive");
  IntPoly num = IntPoly::constant(1);
  std::vector<IntPoly> dens;
  for (unsigned long e = 1; e <= d; ++e) {
    if (d % e != 0) continue;
    const int mu = moebius(e);
    if (mu == 0) continue;
    IntPoly f = IntPoly::monomial(d / e) - IntPoly::constant(1);
    if (mu > 0) num = num * f;
    else dens.push_back(std::move(f));
  }
  for (const auto& f : dens) {
    IntPoly q;
    divide_exact(num, f, q);
    num = std::move(q);
  }
  return num;
}

}  // namespace entrolab
