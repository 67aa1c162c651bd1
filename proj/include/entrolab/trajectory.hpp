#pragma once

// Trajectories T_n(phi, F) = F + phi(F) + ... + phi^{n-1}(F), their sizes,
// trajectory subgroups V(phi, F), growth classification, and the Bernoulli
// shift on finitely supported sequences over a finite group.
//
// Enumeration runs on flat int64 rows with overflow checks and restarts on
// arbitrary-precision vectors if any coordinate overflows. Shift trajectories
// use a bitset over mixed-radix codes while the window is small enough.

#include "entrolab/entropy.hpp"
#include "entrolab/group.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace entrolab {

inline constexpr std::size_t kDefaultSetBudget = 2'000'000;
inline constexpr std::size_t kDefaultTauTerms = 32;
inline constexpr double kExponentialThreshold = 0.02;

namespace traj_detail {

struct Overflow {};

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}
inline std::int64_t floor_div64(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Open-addressing hash set of fixed-width rows, stored contiguously.
template <class Word>
class RowSet {
 public:
  explicit RowSet(std::size_t dim) : dim_(dim) { rehash(64); }

  std::size_t size() const noexcept { return count_; }
  std::size_t dim() const noexcept { return dim_; }
  const Word* row(std::size_t i) const { return data_.data() + i * dim_; }

  bool insert(const Word* r) {
    if (2 * (count_ + 1) > table_.size()) rehash(table_.size() * 2);
    std::size_t slot = hash(r) & mask_;
    for (;;) {
      const std::uint32_t t = table_[slot];
      if (t == 0) break;
      if (std::memcmp(row(t - 1), r, dim_ * sizeof(Word)) == 0) return false;
      slot = (slot + 1) & mask_;
    }
    data_.insert(data_.end(), r, r + dim_);
    table_[slot] = static_cast<std::uint32_t>(++count_);
    return true;
  }

  bool contains(const Word* r) const {
    std::size_t slot = hash(r) & mask_;
    for (;;) {
      const std::uint32_t t = table_[slot];
      if (t == 0) return false;
      if (std::memcmp(row(t - 1), r, dim_ * sizeof(Word)) == 0) return true;
      slot = (slot + 1) & mask_;
    }
  }

 private:
  std::size_t hash(const Word* r) const {
    std::uint64_t h = 0x243F6A8885A308D3ull;
    for (std::size_t i = 0; i < dim_; ++i) {
      h ^= static_cast<std::uint64_t>(r[i]);
      h *= 0x9E3779B97F4A7C15ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
  void rehash(std::size_t cap) {
    table_.assign(cap, 0);
    mask_ = cap - 1;
    for (std::size_t i = 0; i < count_; ++i) {
      std::size_t slot = hash(row(i)) & mask_;
      while (table_[slot] != 0) slot = (slot + 1) & mask_;
      table_[slot] = static_cast<std::uint32_t>(i + 1);
    }
  }

  std::size_t dim_;
  std::size_t count_ = 0;
  std::size_t mask_ = 0;
  std::vector<Word> data_;
  std::vector<std::uint32_t> table_;
};

/// Endomorphism and relation lattice lowered to int64.
struct Int64Flow {
  std::size_t n = 0;
  std::vector<std::int64_t> a;      // row-major n x n
  std::vector<std::int64_t> basis;  // row-major n x k
  std::size_t k = 0;
  std::vector<std::size_t> pivots;

  static std::optional<Int64Flow> lower(const Endo& phi) {
    Int64Flow f;
    const Group& g = phi.group();
    f.n = g.ambient_rank();
    const IntMatrix& b = g.relation_lattice();
    f.k = b.cols();
    f.pivots = g.relation_pivots();
    for (std::size_t i = 0; i < f.n; ++i)
      for (std::size_t j = 0; j < f.n; ++j) {
        if (!fits_int64(phi.matrix()(i, j))) return std::nullopt;
        f.a.push_back(phi.matrix()(i, j).convert_to<std::int64_t>());
      }
    for (std::size_t i = 0; i < f.n; ++i)
      for (std::size_t j = 0; j < f.k; ++j) {
        if (!fits_int64(b(i, j))) return std::nullopt;
        f.basis.push_back(b(i, j).convert_to<std::int64_t>());
      }
    return f;
  }

  void reduce(std::int64_t* x) const {
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t p = pivots[j];
      const std::int64_t q = floor_div64(x[p], basis[p * k + j]);
      if (q == 0) continue;
      for (std::size_t i = p; i < n; ++i) x[i] = checked_add(x[i], -checked_mul(q, basis[i * k + j]));
    }
  }
  void apply(const std::int64_t* x, std::int64_t* out) const {
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t s = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (x[j] != 0) s = checked_add(s, checked_mul(a[i * n + j], x[j]));
      out[i] = s;
    }
    reduce(out);
  }
  void add(const std::int64_t* x, const std::int64_t* y, std::int64_t* out) const {
    for (std::size_t i = 0; i < n; ++i) out[i] = checked_add(x[i], y[i]);
    reduce(out);
  }
};

/// Sizes of T_1..T_N, stopping early when the budget is exceeded.
struct Run {
  std::vector<std::uint64_t> tau;
  bool truncated = false;
  std::vector<IntVector> last;  // rows of the last completed trajectory, if requested
};

inline Run run_int64(const Int64Flow& f, const std::vector<IntVector>& seed, std::size_t steps,
                     std::size_t budget, bool keep) {
  const std::size_t n = f.n;
  Run out;
  std::vector<std::int64_t> layer;
  for (const auto& r : seed)
    for (const auto& x : r) {
      if (!fits_int64(x)) throw Overflow{};
      layer.push_back(x.convert_to<std::int64_t>());
    }
  RowSet<std::int64_t> cur(n);
  for (std::size_t i = 0; i < seed.size(); ++i) cur.insert(layer.data() + i * n);
  out.tau.push_back(cur.size());
  if (n == 0) {
    // the trivial group: every trajectory is {0}
    out.tau.assign(steps, 1);
    if (keep) out.last.emplace_back();
    return out;
  }
  std::size_t layer_size = seed.size();
  std::vector<std::int64_t> tmp(n);
  for (std::size_t step = 2; step <= steps; ++step) {
    // next layer phi^{step-1}(F), deduplicated
    RowSet<std::int64_t> next_layer(n);
    for (std::size_t i = 0; i < layer_size; ++i) {
      f.apply(layer.data() + i * n, tmp.data());
      next_layer.insert(tmp.data());
    }
    layer_size = next_layer.size();
    layer.assign(next_layer.row(0), next_layer.row(0) + layer_size * n);
    RowSet<std::int64_t> next(n);
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t j = 0; j < layer_size; ++j) {
        f.add(cur.row(i), layer.data() + j * n, tmp.data());
        if (next.insert(tmp.data()) && next.size() > budget) {
          out.truncated = true;
          return out;
        }
      }
    cur = std::move(next);
    out.tau.push_back(cur.size());
  }
  if (keep) {
    for (std::size_t i = 0; i < cur.size(); ++i) {
      IntVector v(cur.row(i), cur.row(i) + n);
      out.last.push_back(std::move(v));
    }
  }
  return out;
}

inline Run run_bigint(const Endo& phi, const std::vector<IntVector>& seed, std::size_t steps,
                      std::size_t budget, bool keep) {
  const Group& g = phi.group();
  Run out;
  std::set<IntVector> cur(seed.begin(), seed.end());
  std::set<IntVector> layer(seed.begin(), seed.end());
  out.tau.push_back(cur.size());
  for (std::size_t step = 2; step <= steps; ++step) {
    std::set<IntVector> nl;
    for (const auto& x : layer) nl.insert(g.canonical(phi.matrix() * x));
    layer = std::move(nl);
    std::set<IntVector> next;
    for (const auto& x : cur)
      for (const auto& y : layer) {
        IntVector s = x;
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += y[i];
        next.insert(g.canonical(std::move(s)));
        if (next.size() > budget) {
          out.truncated = true;
          return out;
        }
      }
    cur = std::move(next);
    out.tau.push_back(cur.size());
  }
  if (keep) out.last.assign(cur.begin(), cur.end());
  return out;
}

inline Run run(const Endo& phi, const ElementSet& f, std::size_t steps, std::size_t budget, bool keep) {
  require_same_parent(phi.group(), f.group(), "trajectory");
  if (f.empty()) throw InvalidArgument("the finite set F must be non-empty");
  if (steps == 0) throw InvalidArgument("trajectory length must be at least 1");
  if (auto low = Int64Flow::lower(phi)) {
    try {
      return run_int64(*low, f.rows(), steps, budget, keep);
    } catch (const Overflow&) {
    }
  }
  return run_bigint(phi, f.rows(), steps, budget, keep);
}

}  // namespace traj_detail

struct TauSequence {
  std::vector<std::uint64_t> values;  ///< tau(1), ..., tau(N')
  std::size_t requested = 0;          ///< N asked for
  bool truncated = false;             ///< stopped early at the set budget

  std::size_t size() const noexcept { return values.size(); }
  std::uint64_t operator[](std::size_t n) const { return values.at(n - 1); }  ///< 1-based
};

/// CSV with header `n,tau,log_tau`, logs in nats to 12 decimals.
inline void write_csv(std::ostream& os, const TauSequence& seq) {
  os << "n,tau,log_tau\n";
  char buf[64];
  for (std::size_t i = 0; i < seq.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12f", std::log(static_cast<double>(seq.values[i])));
    os << (i + 1) << ',' << seq.values[i] << ',' << buf << '\n';
  }
}

inline ElementSet n_trajectory(const Endo& phi, const ElementSet& f, std::size_t n,
                               std::size_t budget = kDefaultSetBudget) {
  auto r = traj_detail::run(phi, f, n, budget, true);
  if (r.truncated) throw BudgetExceeded(budget, r.tau.size() + 1);
  return ElementSet(phi.group(), std::move(r.last));
}

/// tau(1..N); throws BudgetExceeded when some T_n outgrows the budget.
inline TauSequence tau_sequence(const Endo& phi, const ElementSet& f, std::size_t n,
                                std::size_t budget = kDefaultSetBudget) {
  auto r = traj_detail::run(phi, f, n, budget, false);
  if (r.truncated) throw BudgetExceeded(budget, r.tau.size() + 1);
  return {std::move(r.tau), n, false};
}

/// Like tau_sequence, but returns the completed prefix instead of throwing.
inline TauSequence tau_sequence_prefix(const Endo& phi, const ElementSet& f, std::size_t n,
                                       std::size_t budget = kDefaultSetBudget) {
  auto r = traj_detail::run(phi, f, n, budget, false);
  return {std::move(r.tau), n, r.truncated};
}

inline std::uint64_t tau(const Endo& phi, const ElementSet& f, std::size_t n,
                         std::size_t budget = kDefaultSetBudget) {
  return tau_sequence(phi, f, n, budget).values.back();
}

/// V(phi, F): the smallest phi-invariant subgroup containing F.
inline Subgroup trajectory_subgroup(const Endo& phi, const ElementSet& f) {
  require_same_parent(phi.group(), f.group(), "trajectory subgroup");
  if (f.empty()) throw InvalidArgument("the finite set F must be non-empty");
  Subgroup h = Subgroup::generated_by(f.group(), f.elements());
  for (;;) {
    Subgroup next = join(h, image(phi, h));
    if (next == h) return h;
    h = std::move(next);
  }
}

/// Limit of log tau(n) / n, from a least-squares fit of log tau(n) on
/// {1, log n, n, 1/n} over the last max(ceil(N/2), 6) terms. The log n
/// column absorbs polynomial growth; for exact exponentials the fit is exact.
inline double entropy_estimate(const TauSequence& seq) {
  const std::size_t big_n = seq.values.size();
  if (big_n < 8) throw InvalidArgument("entropy estimate needs at least 8 terms");
  const std::size_t m = std::max<std::size_t>((big_n + 1) / 2, 6);
  const std::size_t first = big_n - m + 1;
  Eigen::MatrixXd x(m, 4);
  Eigen::VectorXd y(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double n = static_cast<double>(first + i);
    x(i, 0) = 1;
    x(i, 1) = std::log(n);
    x(i, 2) = n;
    x(i, 3) = 1 / n;
    y(i) = std::log(static_cast<double>(seq.values[first + i - 1]));
  }
  const Eigen::VectorXd c = x.colPivHouseholderQr().solve(y);
  return std::max(0.0, c(2));
}

/// Slope of log tau against log n over the last third, to one decimal.
inline double degree_estimate(const TauSequence& seq) {
  const std::size_t big_n = seq.values.size();
  if (big_n < 2) return 0;
  const std::size_t m = std::max<std::size_t>((big_n + 2) / 3, 2);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t n = big_n - m + 1; n <= big_n; ++n) {
    const double lx = std::log(static_cast<double>(n)), ly = std::log(static_cast<double>(seq.values[n - 1]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double k = static_cast<double>(m);
  const double den = k * sxx - sx * sx;
  const double slope = den == 0 ? 0 : (k * sxy - sx * sy) / den;
  return std::round(std::max(0.0, slope) * 10) / 10;
}

enum class GrowthKind { Polynomial, Exponential };
enum class GrowthMode { Empirical, Exact };

inline const char* to_string(GrowthKind k) { return k == GrowthKind::Polynomial ? "polynomial" : "exponential"; }
inline const char* to_string(GrowthMode m) { return m == GrowthMode::Empirical ? "empirical" : "exact"; }

struct GrowthVerdict {
  GrowthKind kind = GrowthKind::Polynomial;
  GrowthMode mode = GrowthMode::Empirical;
  double entropy = 0;                  ///< H in nats (exact h of phi on V in Exact mode)
  std::optional<double> rate;          ///< log b, Exponential only
  std::optional<double> degree;        ///< informational, Polynomial only
  std::optional<EntropyValue> exact;   ///< Exact mode only
  TauSequence sequence;                ///< the tau data the verdict used
};

struct GrowthOptions {
  GrowthMode mode = GrowthMode::Exact;
  std::size_t terms = kDefaultTauTerms;
  std::size_t budget = kDefaultSetBudget;
  double epsilon = kDefaultEpsilon;
};

/// Empirical verdict from a tau sequence of at least 8 terms.
inline GrowthVerdict classify_sequence(TauSequence seq) {
  GrowthVerdict v;
  v.mode = GrowthMode::Empirical;
  v.entropy = entropy_estimate(seq);
  if (v.entropy > kExponentialThreshold) {
    v.kind = GrowthKind::Exponential;
    v.rate = v.entropy;
  } else {
    v.kind = GrowthKind::Polynomial;
    v.degree = degree_estimate(seq);
  }
  v.sequence = std::move(seq);
  return v;
}

inline GrowthVerdict growth_classify(const Endo& phi, const ElementSet& f, const GrowthOptions& opt = {}) {
  TauSequence seq = tau_sequence_prefix(phi, f, opt.terms, opt.budget);
  if (opt.mode == GrowthMode::Empirical) {
    if (seq.values.size() < 8) throw BudgetExceeded(opt.budget, seq.values.size() + 1);
    return classify_sequence(std::move(seq));
  }
  // tau is translation invariant, so classify F - f_0, which contains 0;
  // V(phi, F) itself can carry entropy that F never sees (F a singleton)
  const Element f0 = f.elements().front();
  std::vector<IntVector> shifted;
  for (const auto& x : f.elements()) shifted.push_back((x - f0).coords());
  const Subgroup v = trajectory_subgroup(phi, ElementSet(f.group(), std::move(shifted)));
  const Restriction r = restrict_to(phi, v);
  GrowthVerdict out;
  out.mode = GrowthMode::Exact;
  out.exact = algebraic_entropy(r.endo, opt.epsilon);
  out.entropy = out.exact->nats();
  if (out.exact->exact_zero) {
    out.kind = GrowthKind::Polynomial;
    if (!seq.values.empty()) out.degree = degree_estimate(seq);
  } else {
    out.kind = GrowthKind::Exponential;
    out.rate = out.entropy;
  }
  out.sequence = std::move(seq);
  return out;
}

// ---------------------------------------------------------------------------
// Shift groups K^(N) over a finite group K

class ShiftGroup {
 public:
  static constexpr std::size_t kMaxBaseOrder = 1024;

  static ShiftGroup over(const Group& base) {
    if (!base.is_finite()) throw InvalidArgument("shift base must be a finite group");
    if (base.order() > kMaxBaseOrder)
      throw Unsupported("shift base order above " + std::to_string(kMaxBaseOrder));
    auto d = std::make_shared<Data>(base);
    const std::size_t q = base.order().convert_to<std::size_t>();
    // enumerate K in mixed radix over the invariant factors
    const auto& tc = base.torsion_coords();
    const auto& inv = base.invariant_factors();
    std::vector<std::size_t> digit(tc.size(), 0);
    for (std::size_t idx = 0; idx < q; ++idx) {
      IntVector v(base.ambient_rank());
      for (std::size_t t = 0; t < tc.size(); ++t) {
        const IntVector col = base.smith().U_inv.column(tc[t]);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += BigInt(digit[t]) * col[i];
      }
      v = base.canonical(std::move(v));
      d->index.emplace(v, static_cast<std::uint32_t>(idx));
      d->elements.push_back(std::move(v));
      for (std::size_t t = 0; t < tc.size(); ++t) {
        if (++digit[t] < inv[t].convert_to<std::size_t>()) break;
        digit[t] = 0;
      }
    }
    d->add.resize(q * q);
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t b = 0; b < q; ++b) {
        IntVector s = d->elements[a];
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += d->elements[b][i];
        d->add[a * q + b] = d->index.at(base.canonical(std::move(s)));
      }
    return ShiftGroup(std::move(d));
  }

  /// K = Z(q).
  static ShiftGroup cyclic(std::size_t q) {
    if (q < 2) throw InvalidArgument("shift base order must be at least 2");
    return over(Group::finite_cyclic_sum({BigInt(q)}));
  }

  const Group& base() const noexcept { return d_->base; }
  std::size_t base_order() const noexcept { return d_->elements.size(); }
  /// Index of a base element; 0 is the identity.
  std::uint32_t index_of(const Element& x) const {
    require_same_parent(d_->base, x.group(), "shift coordinate");
    return d_->index.at(x.coords());
  }
  Element base_element(std::uint32_t i) const { return Element(d_->base, d_->elements.at(i)); }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const { return d_->add[a * base_order() + b]; }

  friend bool operator==(const ShiftGroup& a, const ShiftGroup& b) { return a.d_ == b.d_ || a.d_->base == b.d_->base; }

 private:
  struct Data {
    explicit Data(Group g) : base(std::move(g)) {}
    Group base;
    std::vector<IntVector> elements;
    std::map<IntVector, std::uint32_t> index;
    std::vector<std::uint32_t> add;
  };
  explicit ShiftGroup(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

/// Finitely supported sequence; digits are base-element indices, trailing zeros trimmed.
class ShiftElement {
 public:
  ShiftElement() = default;
  explicit ShiftElement(std::vector<std::uint32_t> digits) : d_(std::move(digits)) { trim(); }

  /// The base element with index `k` placed at coordinate `i`.
  static ShiftElement unit(std::size_t i, std::uint32_t k) {
    std::vector<std::uint32_t> d(i + 1, 0);
    d[i] = k;
    return ShiftElement(std::move(d));
  }

  const std::vector<std::uint32_t>& digits() const noexcept { return d_; }
  std::size_t support_end() const noexcept { return d_.size(); }
  bool is_zero() const noexcept { return d_.empty(); }
  std::uint32_t at(std::size_t i) const { return i < d_.size() ? d_[i] : 0; }

  friend bool operator==(const ShiftElement& a, const ShiftElement& b) { return a.d_ == b.d_; }
  friend bool operator<(const ShiftElement& a, const ShiftElement& b) { return a.d_ < b.d_; }

 private:
  void trim() {
    while (!d_.empty() && d_.back() == 0) d_.pop_back();
  }
  std::vector<std::uint32_t> d_;
};

inline ShiftElement add(const ShiftGroup& g, const ShiftElement& a, const ShiftElement& b) {
  std::vector<std::uint32_t> d(std::max(a.support_end(), b.support_end()));
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = g.add(a.at(i), b.at(i));
  return ShiftElement(std::move(d));
}

/// The right shift (x_0, x_1, ...) -> (0, x_0, x_1, ...).
struct Bernoulli {
  ShiftGroup group;
  ShiftElement apply(const ShiftElement& x) const {
    if (x.is_zero()) return x;
    std::vector<std::uint32_t> d(x.support_end() + 1, 0);
    std::copy(x.digits().begin(), x.digits().end(), d.begin() + 1);
    return ShiftElement(std::move(d));
  }
  ShiftElement operator()(const ShiftElement& x) const { return apply(x); }
};

inline ShiftGroup shift_group(const Group& base) { return ShiftGroup::over(base); }
inline Bernoulli bernoulli(const ShiftGroup& g) { return {g}; }

using ShiftSet = std::vector<ShiftElement>;  ///< sorted, deduplicated

inline ShiftSet normalize(ShiftSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

namespace traj_detail {

inline constexpr std::uint64_t kDenseBitLimit = std::uint64_t{1} << 31;

struct ShiftRun {
  std::vector<std::uint64_t> tau;
  bool truncated = false;
  ShiftSet last;
};

/// T_k over K^(N); a bitset on mixed-radix codes while q^window fits, then rows.
inline ShiftRun run_shift(const Bernoulli& beta, const ShiftSet& fin, std::size_t steps, std::size_t budget,
                          bool keep) {
  if (fin.empty()) throw InvalidArgument("the finite set F must be non-empty");
  if (steps == 0) throw InvalidArgument("trajectory length must be at least 1");
  const ShiftGroup& g = beta.group;
  const std::uint64_t q = g.base_order();
  const ShiftSet f = normalize(fin);
  std::size_t len = 1;
  for (const auto& x : f) len = std::max(len, x.support_end());
  const std::size_t final_window = len + steps - 1;

  auto window_fits = [&](std::size_t w) {
    std::uint64_t cap = 1;
    for (std::size_t i = 0; i < w; ++i) {
      if (cap > kDenseBitLimit / q) return false;
      cap *= q;
    }
    return true;
  };

  ShiftRun out;
  // layer k holds beta^{k-1}(F); its elements are F shifted by k - 1
  auto shifted = [&](const ShiftElement& x, std::size_t k) {
    if (x.is_zero()) return x;
    std::vector<std::uint32_t> d(k, 0);
    d.insert(d.end(), x.digits().begin(), x.digits().end());
    return ShiftElement(std::move(d));
  };

  std::size_t step = 1;
  std::vector<std::uint64_t> pow;
  std::vector<std::uint64_t> bits;
  std::uint64_t count = 0;
  bool dense = window_fits(len);
  if (dense) {
    pow.assign(final_window + 1, 0);
    pow[0] = 1;
    auto code_of = [&](const ShiftElement& x) {
      std::uint64_t c = 0;
      for (std::size_t i = 0; i < x.support_end(); ++i) c += x.at(i) * pow[i];
      return c;
    };
    std::size_t w = len;
    for (std::size_t i = 1; i <= w; ++i) pow[i] = pow[i - 1] * q;
    bits.assign((pow[w] + 63) / 64, 0);
    for (const auto& x : f) {
      const std::uint64_t c = code_of(x);
      if (!(bits[c >> 6] >> (c & 63) & 1)) ++count;
      bits[c >> 6] |= std::uint64_t{1} << (c & 63);
    }
    out.tau.push_back(count);
    for (step = 2; step <= steps; ++step) {
      if (!window_fits(w + 1)) break;
      ++w;
      pow[w] = pow[w - 1] * q;
      std::vector<std::uint64_t> next((pow[w] + 63) / 64, 0);
      std::uint64_t next_count = 0;
      for (const auto& x0 : f) {
        const ShiftElement s = shifted(x0, step - 1);
        std::vector<std::pair<std::size_t, std::uint32_t>> supp;
        for (std::size_t i = 0; i < s.support_end(); ++i)
          if (s.at(i) != 0) supp.emplace_back(i, s.at(i));
        for (std::size_t word = 0; word < bits.size(); ++word) {
          std::uint64_t m = bits[word];
          while (m) {
            const std::uint64_t c = (word << 6) | static_cast<std::uint64_t>(std::countr_zero(m));
            m &= m - 1;
            std::uint64_t r = c;
            for (const auto& [i, v] : supp) {
              const std::uint64_t dgt = (c / pow[i]) % q;
              r = r - dgt * pow[i] + static_cast<std::uint64_t>(g.add(static_cast<std::uint32_t>(dgt), v)) * pow[i];
            }
            std::uint64_t& slot = next[r >> 6];
            const std::uint64_t bit = std::uint64_t{1} << (r & 63);
            if (!(slot & bit)) {
              slot |= bit;
              if (++next_count > budget) {
                out.truncated = true;
                return out;
              }
            }
          }
        }
      }
      bits = std::move(next);
      count = next_count;
      out.tau.push_back(count);
    }
    if (step > steps) {
      if (keep) {
        for (std::size_t word = 0; word < bits.size(); ++word) {
          std::uint64_t m = bits[word];
          while (m) {
            std::uint64_t c = (word << 6) | static_cast<std::uint64_t>(std::countr_zero(m));
            m &= m - 1;
            std::vector<std::uint32_t> d;
            while (c) {
              d.push_back(static_cast<std::uint32_t>(c % q));
              c /= q;
            }
            out.last.emplace_back(std::move(d));
          }
        }
        out.last = normalize(std::move(out.last));
      }
      return out;
    }
  }

  // row representation over the final window
  RowSet<std::uint32_t> cur(final_window);
  std::vector<std::uint32_t> row(final_window);
  if (dense) {
    for (std::size_t word = 0; word < bits.size(); ++word) {
      std::uint64_t m = bits[word];
      while (m) {
        std::uint64_t c = (word << 6) | static_cast<std::uint64_t>(std::countr_zero(m));
        m &= m - 1;
        std::fill(row.begin(), row.end(), 0);
        for (std::size_t i = 0; c; ++i, c /= q) row[i] = static_cast<std::uint32_t>(c % q);
        cur.insert(row.data());
      }
    }
    bits.clear();
  } else {
    for (const auto& x : f) {
      std::fill(row.begin(), row.end(), 0);
      for (std::size_t i = 0; i < x.support_end(); ++i) row[i] = x.at(i);
      cur.insert(row.data());
    }
    out.tau.push_back(cur.size());
    step = 2;
  }
  for (; step <= steps; ++step) {
    RowSet<std::uint32_t> next(final_window);
    for (const auto& x0 : f) {
      const ShiftElement s = shifted(x0, step - 1);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        const std::uint32_t* r = cur.row(i);
        for (std::size_t c = 0; c < final_window; ++c) row[c] = g.add(r[c], s.at(c));
        if (next.insert(row.data()) && next.size() > budget) {
          out.truncated = true;
          return out;
        }
      }
    }
    cur = std::move(next);
    out.tau.push_back(cur.size());
  }
  if (keep) {
    for (std::size_t i = 0; i < cur.size(); ++i)
      out.last.emplace_back(std::vector<std::uint32_t>(cur.row(i), cur.row(i) + final_window));
    out.last = normalize(std::move(out.last));
  }
  return out;
}

}  // namespace traj_detail

inline ShiftSet n_trajectory(const Bernoulli& beta, const ShiftSet& f, std::size_t n,
                             std::size_t budget = kDefaultSetBudget) {
  auto r = traj_detail::run_shift(beta, f, n, budget, true);
  if (r.truncated) throw BudgetExceeded(budget, r.tau.size() + 1);
  return std::move(r.last);
}

inline TauSequence tau_sequence(const Bernoulli& beta, const ShiftSet& f, std::size_t n,
                                std::size_t budget = kDefaultSetBudget) {
  auto r = traj_detail::run_shift(beta, f, n, budget, false);
  if (r.truncated) throw BudgetExceeded(budget, r.tau.size() + 1);
  return {std::move(r.tau), n, false};
}

inline TauSequence tau_sequence_prefix(const Bernoulli& beta, const ShiftSet& f, std::size_t n,
                                       std::size_t budget = kDefaultSetBudget) {
  auto r = traj_detail::run_shift(beta, f, n, budget, false);
  return {std::move(r.tau), n, r.truncated};
}

/// Shift flows only support the empirical classifier.
inline GrowthVerdict growth_classify(const Bernoulli& beta, const ShiftSet& f, const GrowthOptions& opt = {}) {
  if (opt.mode == GrowthMode::Exact)
    throw Unsupported("exact growth classification needs a finitely presented group");
  TauSequence seq = tau_sequence_prefix(beta, f, opt.terms, opt.budget);
  if (seq.values.size() < 8) throw BudgetExceeded(opt.budget, seq.values.size() + 1);
  return classify_sequence(std::move(seq));
}

}  // namespace entrolab
