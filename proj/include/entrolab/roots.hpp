#pragma once

// Certified bounds on sum_{|z| > 1} log|z| over the roots of a square-free
// integer polynomial.
//
// Roots are approximated by Aberth-Ehrlich iteration and enclosed by the
// Braess-Hadeler disks D(z_i, d |W_i|), W_i = p(z_i) / (a_d prod_{j != i}
// (z_i - z_j)): every connected component of k disks holds exactly k roots.
// Rounding in the evaluation of p is charged to the disk radii. Precision
// climbs double -> 128 -> 256 -> 512 bits until the requested width is met.

#include "entrolab/bigint.hpp"
#include "entrolab/errors.hpp"
#include "entrolab/polynomial.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace entrolab {

struct Interval {
  double lo = 0;
  double hi = 0;
  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
};

namespace roots_detail {

namespace mp = boost::multiprecision;
using Float128 = mp::number<mp::cpp_bin_float<128, mp::digit_base_2>, mp::et_off>;
using Float256 = mp::number<mp::cpp_bin_float<256, mp::digit_base_2>, mp::et_off>;
using Float512 = mp::number<mp::cpp_bin_float<512, mp::digit_base_2>, mp::et_off>;

template <class R>
struct Cx {
  R re{0}, im{0};
  Cx() = default;
  Cx(R r, R i) : re(std::move(r)), im(std::move(i)) {}
  friend Cx operator+(const Cx& a, const Cx& b) { return {a.re + b.re, a.im + b.im}; }
  friend Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
  friend Cx operator*(const Cx& a, const Cx& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Cx operator/(const Cx& a, const Cx& b) {
    const R den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
  }
};

template <class R>
R modulus(const Cx<R>& z) {
  using std::hypot;
  return hypot(z.re, z.im);
}

template <class R>
R to_real(const BigInt& x) {
  if constexpr (std::is_same_v<R, double>) return x.convert_to<double>();
  else return R(x);
}

template <class R>
double to_double(const R& x) {
  if constexpr (std::is_same_v<R, double>) return x;
  else return x.template convert_to<double>();
}

template <class R>
struct Approximation {
  std::vector<Cx<R>> z;
  std::vector<R> radius;
  bool converged = false;
};

/// Aberth-Ehrlich iteration from `start` (or a spread circle when empty).
template <class R>
Approximation<R> aberth(const IntPoly& p, const std::vector<Cx<double>>& start) {
  using std::abs;
  using std::cos;
  using std::sin;
  const std::size_t d = static_cast<std::size_t>(p.degree());
  std::vector<R> a(d + 1), abs_a(d + 1);
  for (std::size_t k = 0; k <= d; ++k) {
    a[k] = to_real<R>(p.coeffs()[k]);
    abs_a[k] = abs(a[k]);
  }
  std::vector<Cx<R>> z(d);
  if (start.size() == d) {
    for (std::size_t i = 0; i < d; ++i) z[i] = {R(start[i].re), R(start[i].im)};
  } else {
    // circle of the geometric-mean radius, rotated off the real axis
    const double rad = std::exp((log_abs(p.coeffs()[0]) - log_abs(p.lead())) / static_cast<double>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const double th = 2 * M_PI * (static_cast<double>(i) + 0.25) / static_cast<double>(d) + 0.4;
      z[i] = {R(rad * std::cos(th)), R(rad * std::sin(th))};
    }
  }

  auto eval = [&](const Cx<R>& x, Cx<R>& val, Cx<R>& der) {
    val = {a[d], R(0)};
    der = {R(0), R(0)};
    for (std::size_t k = d; k-- > 0;) {
      der = der * x + val;
      val = val * x + Cx<R>{a[k], R(0)};
    }
  };

  const R eps = std::numeric_limits<R>::epsilon();
  const std::size_t max_iter = 100 + 20 * d;
  Approximation<R> out;
  std::vector<bool> done(d, false);
  for (std::size_t it = 0; it < max_iter; ++it) {
    bool all_done = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (done[i]) continue;
      Cx<R> val, der;
      eval(z[i], val, der);
      if (val.re == 0 && val.im == 0) {
        done[i] = true;
        continue;
      }
      const Cx<R> ratio = val / der;
      Cx<R> s{R(0), R(0)};
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) s = s + Cx<R>{R(1), R(0)} / (z[i] - z[j]);
      const Cx<R> step = ratio / (Cx<R>{R(1), R(0)} - ratio * s);
      z[i] = z[i] - step;
      if (modulus(step) <= 4 * eps * (R(1) + modulus(z[i]))) done[i] = true;
      else all_done = false;
    }
    if (all_done) {
      out.converged = true;
      break;
    }
  }

  // inclusion radii, with the Horner rounding error charged to |p(z_i)|
  const R gamma = R(static_cast<double>(4 * d + 4)) * eps;
  out.radius.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    Cx<R> val, der;
    eval(z[i], val, der);
    const R m = modulus(z[i]);
    R bound{0};
    for (std::size_t k = d + 1; k-- > 0;) bound = bound * m + abs_a[k];
    R denom = abs(a[d]);
    for (std::size_t j = 0; j < d; ++j)
      if (j != i) denom *= modulus(z[i] - z[j]);
    const R num = modulus(val) + gamma * bound;
    if (denom == 0) {
      out.radius[i] = std::numeric_limits<R>::infinity();
    } else {
      out.radius[i] = R(static_cast<double>(d)) * num / denom * (R(1) + gamma);
    }
  }
  out.z = std::move(z);
  return out;
}

/// Interval for sum_{|z|>1} log|z| from the inclusion disks.
template <class R>
Interval bound_from_disks(const Approximation<R>& ap) {
  using std::log;
  const std::size_t d = ap.z.size();
  std::vector<std::size_t> parent(d);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (modulus(ap.z[i] - ap.z[j]) <= ap.radius[i] + ap.radius[j]) parent[find(i)] = find(j);

  Interval total;
  std::vector<bool> seen(d, false);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t root = find(i);
    if (seen[root]) continue;
    seen[root] = true;
    // moduli are tracked as excess over 1, computed at working precision
    double lo_ex = std::numeric_limits<double>::infinity(), hi_ex = -1;
    std::size_t count = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (find(j) != root) continue;
      ++count;
      const R m = modulus(ap.z[j]);
      lo_ex = std::min(lo_ex, to_double<R>(m - ap.radius[j] - R(1)));
      hi_ex = std::max(hi_ex, to_double<R>(m + ap.radius[j] - R(1)));
    }
    if (!std::isfinite(hi_ex) || std::isnan(lo_ex)) return {0, std::numeric_limits<double>::infinity()};
    auto clamp_log = [](double ex) { return ex <= 0 ? 0.0 : std::log1p(ex); };
    const double k = static_cast<double>(count);
    total.lo += k * clamp_log(lo_ex);
    total.hi += k * clamp_log(hi_ex);
  }
  // outward slack for the final double conversion
  const double slack = 8 * std::numeric_limits<double>::epsilon() * (1 + std::abs(total.hi)) *
                       static_cast<double>(d);
  total.lo = std::max(0.0, total.lo - slack);
  total.hi += slack;
  return total;
}

template <class R>
std::vector<Cx<double>> to_double_roots(const Approximation<R>& ap) {
  std::vector<Cx<double>> out;
  for (const auto& z : ap.z) out.push_back({to_double<R>(z.re), to_double<R>(z.im)});
  return out;
}

template <class R>
bool attempt(const IntPoly& p, double width, std::vector<Cx<double>>& start, Interval& out) {
  auto ap = aberth<R>(p, start);
  start = to_double_roots(ap);
  for (const auto& z : start)
    if (!std::isfinite(z.re) || !std::isfinite(z.im)) {
      start.clear();
      break;
    }
  out = bound_from_disks(ap);
  return out.width() <= width;
}

}  // namespace roots_detail

/// Certified interval of width <= `width` for sum over roots z of p with
/// |z| > 1 of log|z|. p must be square-free with p(0) != 0.
inline Interval outer_root_log_sum(const IntPoly& p, double width) {
  using namespace roots_detail;
  if (p.degree() <= 0) return {0, 0};
  if (p.coeffs()[0] == 0) throw InvalidArgument("polynomial has a root at zero");
  if (p.degree() == 1) {
    // single rational root -a0/a1
    const double v = log_abs(p.coeffs()[0]) - log_abs(p.coeffs()[1]);
    if (abs(p.coeffs()[0]) <= abs(p.coeffs()[1])) return {0, 0};
    const double slack = 4 * std::numeric_limits<double>::epsilon() * (1 + v);
    return {std::max(0.0, v - slack), v + slack};
  }
  std::size_t max_bits = 0;
  for (const auto& c : p.coeffs())
    if (c != 0) max_bits = std::max<std::size_t>(max_bits, boost::multiprecision::msb(abs(c)) + 1);
  std::vector<Cx<double>> start;
  Interval out;
  if (max_bits < 900 && attempt<double>(p, width, start, out)) return out;
  if (attempt<Float128>(p, width, start, out)) return out;
  if (attempt<Float256>(p, width, start, out)) return out;
  if (attempt<Float512>(p, width, start, out)) return out;
  throw PrecisionError("root enclosure did not reach width " + std::to_string(width) +
                       " at 512 bits (last width " + std::to_string(out.width()) + ")");
}

}  // namespace entrolab
