#pragma once

// Bridges between the oracle's plain flows and library objects, plus random
// instance generators shared by the suites.

#include "entrolab/group.hpp"
#include "oracle/oracle.hpp"

#include <random>

namespace support {

using namespace entrolab;

inline Group group_of(const oracle::DiagFlow& fl) {
  std::vector<IntVector> cols;
  for (std::size_t i = 0; i < fl.dim(); ++i) {
    if (fl.mods[i] == 0) continue;
    IntVector c(fl.dim());
    c[i] = fl.mods[i];
    cols.push_back(c);
  }
  return Group::from_presentation(fl.dim(), IntMatrix::from_columns(fl.dim(), cols));
}

inline IntMatrix matrix_of(const oracle::DiagFlow& fl) {
  IntMatrix m(fl.dim(), fl.dim());
  for (std::size_t i = 0; i < fl.dim(); ++i)
    for (std::size_t j = 0; j < fl.dim(); ++j) m(i, j) = fl.a[i][j];
  return m;
}

inline Endo endo_of(const oracle::DiagFlow& fl) { return Endo::make(group_of(fl), matrix_of(fl)); }

inline IntVector to_int(const oracle::Vec& v) { return IntVector(v.begin(), v.end()); }

inline ElementSet set_of(const Group& g, const std::vector<oracle::Vec>& rows) {
  std::vector<IntVector> r;
  for (const auto& v : rows) r.push_back(to_int(v));
  return ElementSet(g, r);
}

/// A random well-defined flow on Z(m_1) + ... with the given moduli.
inline oracle::DiagFlow random_flow(std::mt19937_64& rng, std::vector<long long> mods, int lo = -3, int hi = 3) {
  std::uniform_int_distribution<int> e(lo, hi);
  oracle::DiagFlow fl{mods, {}};
  for (;;) {
    fl.a.assign(mods.size(), std::vector<long long>(mods.size()));
    for (auto& row : fl.a)
      for (auto& x : row) x = e(rng);
    // repair entries that break A L <= L: zero them, the zero map is always fine
    for (std::size_t j = 0; j < mods.size(); ++j) {
      if (mods[j] == 0) continue;
      for (std::size_t i = 0; i < mods.size(); ++i) {
        const long long v = fl.a[i][j] * mods[j];
        if (mods[i] == 0 ? v != 0 : v % mods[i] != 0) fl.a[i][j] = 0;
      }
    }
    if (fl.well_defined()) return fl;
  }
}

inline std::vector<oracle::Vec> random_set(std::mt19937_64& rng, const oracle::DiagFlow& fl, std::size_t size,
                                           int radius = 2) {
  std::uniform_int_distribution<int> e(-radius, radius);
  std::vector<oracle::Vec> out;
  for (std::size_t s = 0; s < size; ++s) {
    oracle::Vec v(fl.dim());
    for (auto& x : v) x = e(rng);
    out.push_back(fl.reduce(v));
  }
  return out;
}

}  // namespace support
