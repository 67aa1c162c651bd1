#pragma once

// Smith and Hermite normal forms over Z, plus the lattice helpers built on
// them (kernels, membership, canonical coset representatives).
//
// Lattices are always column lattices: the Z-span of the columns of a
// matrix. The canonical basis is the column Hermite form: lower-triangular
// echelon, positive pivots, entries left of a pivot reduced into [0, pivot).

#include "entrolab/matrix.hpp"

#include <optional>
#include <vector>

namespace entrolab {

struct HermiteForm {
  IntMatrix basis;                  ///< n x rank, canonical column HNF
  std::vector<std::size_t> pivots;  ///< pivot row of each basis column
  IntMatrix transform;              ///< unimodular, M * transform = [basis | 0]
};

namespace detail {

/// Index of the smallest nonzero |m(row, j)| for j in [from, cols), or npos.
inline std::size_t min_abs_in_row(const IntMatrix& m, std::size_t row, std::size_t from) {
  std::size_t best = static_cast<std::size_t>(-1);
  for (std::size_t j = from; j < m.cols(); ++j) {
    if (m(row, j) == 0) continue;
    if (best == static_cast<std::size_t>(-1) || abs(m(row, j)) < abs(m(row, best))) best = j;
  }
  return best;
}

template <bool kTrackTransform>
HermiteForm hermite_impl(const IntMatrix& input) {
  IntMatrix w = input;
  IntMatrix t;
  if constexpr (kTrackTransform) t = IntMatrix::identity(input.cols());
  const std::size_t n = w.rows(), m = w.cols();
  std::vector<std::size_t> pivots;
  std::size_t c = 0;
  for (std::size_t r = 0; r < n && c < m; ++r) {
    bool has_pivot = false;
    for (;;) {
      const std::size_t j = min_abs_in_row(w, r, c);
      if (j == static_cast<std::size_t>(-1)) break;
      has_pivot = true;
      w.swap_columns(c, j);
      if constexpr (kTrackTransform) t.swap_columns(c, j);
      bool clean = true;
      for (std::size_t k = c + 1; k < m; ++k) {
        if (w(r, k) == 0) continue;
        const BigInt q = floor_div(w(r, k), w(r, c));
        w.add_column_multiple(k, c, -q);
        if constexpr (kTrackTransform) t.add_column_multiple(k, c, -q);
        if (w(r, k) != 0) clean = false;
      }
      if (clean) break;
    }
    if (!has_pivot) continue;
    if (w(r, c) < 0) {
      w.negate_column(c);
      if constexpr (kTrackTransform) t.negate_column(c);
    }
    for (std::size_t k = 0; k < c; ++k) {
      const BigInt q = floor_div(w(r, k), w(r, c));
      w.add_column_multiple(k, c, -q);
      if constexpr (kTrackTransform) t.add_column_multiple(k, c, -q);
    }
    pivots.push_back(r);
    ++c;
  }
  return {w.columns(0, c), std::move(pivots), std::move(t)};
}

}  // namespace detail

/// Column HNF with the unimodular transform; kernel vectors of M are the
/// trailing columns of the transform.
inline HermiteForm hermite_with_transform(const IntMatrix& m) {
  return detail::hermite_impl<true>(m);
}

/// Canonical column-HNF basis of the column lattice of `m`, zero columns dropped.
inline IntMatrix hnf(const IntMatrix& m) { return detail::hermite_impl<false>(m).basis; }

/// Pivot rows of a matrix already in column HNF.
inline std::vector<std::size_t> hnf_pivots(const IntMatrix& basis) {
  std::vector<std::size_t> p;
  p.reserve(basis.cols());
  std::size_t row = 0;
  for (std::size_t j = 0; j < basis.cols(); ++j) {
    while (row < basis.rows() && basis(row, j) == 0) ++row;
    p.push_back(row);
    ++row;
  }
  return p;
}

/// Basis (as columns) of the integer kernel {x in Z^m : M x = 0}.
inline IntMatrix integer_kernel(const IntMatrix& m) {
  HermiteForm h = hermite_with_transform(m);
  return h.transform.columns(h.basis.cols(), m.cols());
}

/// Coefficients c with basis * c = x, or nullopt when x is outside the lattice.
inline std::optional<IntVector> lattice_coordinates(const IntMatrix& basis,
                                                     std::span<const std::size_t> pivots,
                                                     IntVector x) {
  IntVector coeff(basis.cols());
  for (std::size_t j = 0; j < basis.cols(); ++j) {
    const std::size_t p = pivots[j];
    for (std::size_t i = 0; i < p; ++i)
      if (x[i] != 0) return std::nullopt;
    BigInt q, r;
    boost::multiprecision::divide_qr(x[p], basis(p, j), q, r);
    if (r != 0) return std::nullopt;
    coeff[j] = q;
    if (q != 0)
      for (std::size_t i = p; i < x.size(); ++i) x[i] -= q * basis(i, j);
  }
  for (const auto& v : x)
    if (v != 0) return std::nullopt;
  return coeff;
}

inline bool lattice_contains(const IntMatrix& basis, std::span<const std::size_t> pivots,
                             IntVector x) {
  return lattice_coordinates(basis, pivots, std::move(x)).has_value();
}

/// Unique representative of x + lattice: each pivot coordinate lands in [0, pivot).
inline void reduce_mod_lattice(const IntMatrix& basis, std::span<const std::size_t> pivots,
                               IntVector& x) {
  for (std::size_t j = 0; j < basis.cols(); ++j) {
    const std::size_t p = pivots[j];
    const BigInt q = floor_div(x[p], basis(p, j));
    if (q == 0) continue;
    for (std::size_t i = p; i < x.size(); ++i) x[i] -= q * basis(i, j);
  }
}

struct SmithForm {
  IntMatrix U;      ///< unimodular n x n
  IntMatrix S;      ///< n x m diagonal, d_1 | d_2 | ..., all >= 0
  IntMatrix V;      ///< unimodular m x m
  IntMatrix U_inv;  ///< inverse of U, tracked alongside it
  /// Diagonal entries d_1..d_min(n,m).
  IntVector diagonal() const {
    IntVector d;
    for (std::size_t i = 0; i < std::min(S.rows(), S.cols()); ++i) d.push_back(S(i, i));
    return d;
  }
};

/// Smith normal form S = U * M * V with minimal-|entry| pivoting.
inline SmithForm snf(const IntMatrix& m) {
  const std::size_t n = m.rows(), k = m.cols();
  SmithForm f{IntMatrix::identity(n), m, IntMatrix::identity(k), IntMatrix::identity(n)};
  IntMatrix& s = f.S;

  auto row_swap = [&](std::size_t a, std::size_t b) {
    s.swap_rows(a, b);
    f.U.swap_rows(a, b);
    f.U_inv.swap_columns(a, b);
  };
  auto col_swap = [&](std::size_t a, std::size_t b) {
    s.swap_columns(a, b);
    f.V.swap_columns(a, b);
  };
  // row dst += q * row src
  auto row_add = [&](std::size_t dst, std::size_t src, const BigInt& q) {
    s.add_row_multiple(dst, src, q);
    f.U.add_row_multiple(dst, src, q);
    f.U_inv.add_column_multiple(src, dst, -q);
  };
  auto col_add = [&](std::size_t dst, std::size_t src, const BigInt& q) {
    s.add_column_multiple(dst, src, q);
    f.V.add_column_multiple(dst, src, q);
  };

  for (std::size_t t = 0; t < std::min(n, k); ++t) {
    // smallest nonzero entry of the trailing block goes to (t, t)
    std::size_t bi = n, bj = k;
    for (std::size_t i = t; i < n; ++i)
      for (std::size_t j = t; j < k; ++j)
        if (s(i, j) != 0 && (bi == n || abs(s(i, j)) < abs(s(bi, bj)))) bi = i, bj = j;
    if (bi == n) break;
    row_swap(t, bi);
    col_swap(t, bj);

    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < n; ++i) {
        if (s(i, t) == 0) continue;
        row_add(i, t, -floor_div(s(i, t), s(t, t)));
        if (s(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < k; ++j) {
        if (s(t, j) == 0) continue;
        col_add(j, t, -floor_div(s(t, j), s(t, t)));
        if (s(t, j) != 0) clean = false;
      }
      if (!clean) {
        std::size_t pi = t, pj = t;
        for (std::size_t i = t + 1; i < n; ++i)
          if (s(i, t) != 0 && abs(s(i, t)) < abs(s(pi, pj))) pi = i, pj = t;
        for (std::size_t j = t + 1; j < k; ++j)
          if (s(t, j) != 0 && abs(s(t, j)) < abs(s(pi, pj))) pi = t, pj = j;
        row_swap(t, pi);
        col_swap(t, pj);
        continue;
      }
      // divisibility: fold a row with a non-multiple entry into row t
      std::size_t bad = n;
      for (std::size_t i = t + 1; i < n && bad == n; ++i)
        for (std::size_t j = t + 1; j < k; ++j)
          if (s(i, j) % s(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad == n) break;
      row_add(t, bad, 1);
    }
    if (s(t, t) < 0) {
      s.negate_row(t);
      f.U.negate_row(t);
      f.U_inv.negate_column(t);
    }
  }
  return f;
}

}  // namespace entrolab
