#pragma once

// JSON flow descriptions and report serialization.
//
// Input document:
//   { "group": {"rank": n, "relations": [[...], ...]} | {"shift_base": q},
//     "endomorphism": [[...], ...] | "bernoulli",
//     "finite_set": [[...], ...],
//     "options": {"epsilon", "tau_max_n", "set_budget", "probe_budget"} }
// Matrices are lists of rows and act on column vectors; each relation is one
// vector of length n. Integers may be JSON numbers or decimal strings;
// endomorphism entries may also be "p/q" strings, read as a map of Q^n
// (entropy only).

#include "entrolab/duality.hpp"
#include "entrolab/entropy.hpp"
#include "entrolab/pinsker.hpp"
#include "entrolab/trajectory.hpp"

#include <json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace entrolab {

using Json = nlohmann::ordered_json;

struct FlowOptions {
  double epsilon = kDefaultEpsilon;
  std::size_t tau_max_n = kDefaultTauTerms;
  std::size_t set_budget = kDefaultSetBudget;
  std::size_t probe_budget = kDefaultProbeBudget;
};

struct FlowSpec {
  std::optional<Group> group;            ///< finitely presented case
  std::optional<ShiftGroup> shift;       ///< shift_base case
  std::optional<IntMatrix> matrix;       ///< integer endomorphism
  std::optional<RatMatrix> rational;     ///< set when some entry is not an integer
  bool bernoulli = false;
  std::optional<std::vector<std::vector<BigInt>>> finite_set;
  FlowOptions options;

  bool is_shift() const { return shift.has_value(); }

  Endo endo() const {
    if (!group) throw InvalidArgument("command needs a finitely presented group, not a shift");
    if (!matrix) throw InvalidArgument("endomorphism has non-integer entries; only `entropy` accepts rational maps");
    return Endo::make(*group, *matrix);
  }

  Bernoulli beta() const {
    if (!shift) throw InvalidArgument("command needs a shift group");
    return Bernoulli{*shift};
  }

  ElementSet element_set() const {
    if (!finite_set) throw InvalidArgument("command needs `finite_set`");
    const Group& g = *group;
    std::vector<IntVector> rows;
    for (const auto& r : *finite_set) {
      if (r.size() != g.ambient_rank())
        throw DimensionMismatch("finite_set vectors must have length " + std::to_string(g.ambient_rank()));
      rows.emplace_back(r.begin(), r.end());
    }
    return ElementSet(g, std::move(rows));
  }

  /// Each vector lists base-group values at coordinates 0, 1, ...
  ShiftSet shift_set() const {
    if (!finite_set) throw InvalidArgument("command needs `finite_set`");
    const Group& base = shift->base();
    ShiftSet out;
    for (const auto& r : *finite_set) {
      std::vector<std::uint32_t> digits;
      for (const auto& v : r) digits.push_back(shift->index_of(Element(base, IntVector{v})));
      out.emplace_back(std::move(digits));
    }
    return normalize(std::move(out));
  }
};

namespace io_detail {

inline std::string where(const std::string& path) { return path.empty() ? "document" : "`" + path + "`"; }

inline Rational parse_rational(const Json& v, const std::string& path) {
  if (v.is_number_integer()) {
    if (v.is_number_unsigned()) return Rational(BigInt(v.get<std::uint64_t>()));
    return Rational(BigInt(v.get<std::int64_t>()));
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    const auto slash = s.find('/');
    try {
      auto whole = [&](const std::string& t) {
        if (t.empty() || t.find_first_not_of("+-0123456789") != std::string::npos) throw std::invalid_argument(t);
        return BigInt(t);
      };
      if (slash == std::string::npos) return Rational(whole(s));
      const BigInt den = whole(s.substr(slash + 1));
      if (den == 0) throw InvalidArgument(where(path) + ": zero denominator");
      return Rational(whole(s.substr(0, slash)), den);
    } catch (const InvalidArgument&) {
      throw;
    } catch (const std::exception&) {
      throw InvalidArgument(where(path) + ": not a number: \"" + s + "\"");
    }
  }
  throw InvalidArgument(where(path) + ": expected an integer or a numeric string");
}

inline BigInt parse_integer(const Json& v, const std::string& path) {
  const Rational r = parse_rational(v, path);
  if (boost::multiprecision::denominator(r) != 1) throw InvalidArgument(where(path) + ": expected an integer");
  return boost::multiprecision::numerator(r);
}

inline std::vector<std::vector<Rational>> parse_rows(const Json& v, const std::string& path) {
  if (!v.is_array()) throw InvalidArgument(where(path) + ": expected a list of rows");
  std::vector<std::vector<Rational>> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array()) throw InvalidArgument(where(p) + ": expected a list");
    std::vector<Rational> row;
    for (std::size_t j = 0; j < v[i].size(); ++j) row.push_back(parse_rational(v[i][j], p + "[" + std::to_string(j) + "]"));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<std::vector<BigInt>> parse_int_rows(const Json& v, const std::string& path) {
  std::vector<std::vector<BigInt>> out;
  const auto rows = parse_rows(v, path);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<BigInt> row;
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (boost::multiprecision::denominator(rows[i][j]) != 1)
        throw InvalidArgument(where(path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]") +
                              ": expected an integer");
      row.push_back(boost::multiprecision::numerator(rows[i][j]));
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline std::size_t parse_count(const Json& v, const std::string& path, std::size_t min) {
  const BigInt x = parse_integer(v, path);
  if (x < min || x > BigInt(std::numeric_limits<std::uint32_t>::max()))
    throw InvalidArgument(where(path) + ": out of range");
  return x.convert_to<std::size_t>();
}

inline void reject_unknown(const Json& obj, std::initializer_list<const char*> keys, const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw InvalidArgument(where(path) + ": unknown key `" + it.key() + "`");
  }
}

}  // namespace io_detail

/// Validates a FlowSpec document; throws InvalidArgument / DimensionMismatch /
/// NotWellDefined with the offending path.
inline FlowSpec parse_flow_spec(const Json& doc) {
  using namespace io_detail;
  if (!doc.is_object()) throw InvalidArgument("flow spec must be a JSON object");
  reject_unknown(doc, {"group", "endomorphism", "finite_set", "options"}, "");
  FlowSpec spec;

  if (!doc.contains("group")) throw InvalidArgument("missing `group`");
  const Json& g = doc["group"];
  if (!g.is_object()) throw InvalidArgument("`group` must be an object");
  reject_unknown(g, {"rank", "relations", "shift_base"}, "group");
  std::size_t rank = 0;
  if (g.contains("shift_base")) {
    if (g.contains("rank") || g.contains("relations"))
      throw InvalidArgument("`group`: give either `shift_base` or `rank`/`relations`");
    spec.shift = ShiftGroup::cyclic(parse_count(g["shift_base"], "group.shift_base", 2));
  } else {
    if (!g.contains("rank")) throw InvalidArgument("`group`: missing `rank`");
    rank = parse_count(g["rank"], "group.rank", 0);
    IntMatrix rel(rank, 0);
    if (g.contains("relations")) {
      const auto rows = parse_int_rows(g["relations"], "group.relations");
      rel = IntMatrix(rank, rows.size());
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].size() != rank)
          throw DimensionMismatch("`group.relations[" + std::to_string(j) + "]` must have length " +
                                  std::to_string(rank));
        for (std::size_t i = 0; i < rank; ++i) rel(i, j) = rows[j][i];
      }
    }
    spec.group = Group::from_presentation(rank, rel);
  }

  if (!doc.contains("endomorphism")) throw InvalidArgument("missing `endomorphism`");
  const Json& e = doc["endomorphism"];
  if (e.is_string()) {
    if (e.get<std::string>() != "bernoulli") throw InvalidArgument("`endomorphism`: unknown name");
    if (!spec.shift) throw InvalidArgument("`endomorphism`: \"bernoulli\" needs `group.shift_base`");
    spec.bernoulli = true;
  } else {
    if (spec.shift) throw InvalidArgument("`endomorphism`: a shift group takes \"bernoulli\"");
    const auto rows = parse_rows(e, "endomorphism");
    if (rows.size() != rank) throw DimensionMismatch("`endomorphism` must have " + std::to_string(rank) + " rows");
    RatMatrix a(rank, rank);
    bool integral = true;
    for (std::size_t i = 0; i < rank; ++i) {
      if (rows[i].size() != rank)
        throw DimensionMismatch("`endomorphism[" + std::to_string(i) + "]` must have " + std::to_string(rank) +
                                " entries");
      for (std::size_t j = 0; j < rank; ++j) {
        a(i, j) = rows[i][j];
        integral = integral && boost::multiprecision::denominator(rows[i][j]) == 1;
      }
    }
    if (integral) {
      IntMatrix m(rank, rank);
      for (std::size_t i = 0; i < rank; ++i)
        for (std::size_t j = 0; j < rank; ++j) m(i, j) = boost::multiprecision::numerator(a(i, j));
      Endo::make(*spec.group, m);  // validates A L <= L
      spec.matrix = std::move(m);
    } else {
      if (spec.group->relations().cols() > 0)
        throw InvalidArgument("`endomorphism`: rational entries need a group without relations");
      spec.rational = std::move(a);
    }
  }

  if (doc.contains("finite_set")) {
    spec.finite_set = parse_int_rows(doc["finite_set"], "finite_set");
    if (spec.finite_set->empty()) throw InvalidArgument("`finite_set` must be nonempty");
    if (spec.group) spec.element_set();  // validates lengths
    if (spec.shift) spec.shift_set();
  }

  if (doc.contains("options")) {
    const Json& o = doc["options"];
    if (!o.is_object()) throw InvalidArgument("`options` must be an object");
    reject_unknown(o, {"epsilon", "tau_max_n", "set_budget", "probe_budget"}, "options");
    if (o.contains("epsilon")) {
      if (!o["epsilon"].is_number() || !(o["epsilon"].get<double>() > 0))
        throw InvalidArgument("`options.epsilon` must be a positive number");
      spec.options.epsilon = o["epsilon"].get<double>();
    }
    if (o.contains("tau_max_n")) spec.options.tau_max_n = parse_count(o["tau_max_n"], "options.tau_max_n", 1);
    if (o.contains("set_budget")) spec.options.set_budget = parse_count(o["set_budget"], "options.set_budget", 1);
    if (o.contains("probe_budget"))
      spec.options.probe_budget = parse_count(o["probe_budget"], "options.probe_budget", 1);
  }
  return spec;
}

inline FlowSpec parse_flow_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
  return parse_flow_spec(doc);
}

// ---- serialization ----

/// Integers as JSON numbers when they fit in 53 bits, decimal strings otherwise.
inline Json to_json(const BigInt& x) {
  if (abs(x) < (BigInt(1) << 53)) return x.convert_to<std::int64_t>();
  return x.str();
}

inline Json to_json(const Rational& x) {
  if (boost::multiprecision::denominator(x) == 1) return to_json(boost::multiprecision::numerator(x));
  return x.str();
}

inline Json to_json(const IntVector& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

inline Json rows_json(const IntMatrix& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    a.push_back(to_json(IntVector(r.begin(), r.end())));
  }
  return a;
}

inline Json columns_json(const IntMatrix& m) {
  Json a = Json::array();
  for (std::size_t j = 0; j < m.cols(); ++j) a.push_back(to_json(m.column(j)));
  return a;
}

inline Json to_json(const EntropyValue& v, bool log2 = false) {
  Json j;
  j["s"] = to_json(v.s);
  j["log_s"] = v.log_s();
  j["mahler_lo"] = v.mahler_lo;
  j["mahler_hi"] = v.mahler_hi;
  j["exact_zero"] = v.exact_zero;
  j["nats"] = v.nats();
  if (log2) j["bits"] = v.bits();
  return j;
}

inline Json structure_json(const Group& g) {
  Json j;
  j["invariant_factors"] = to_json(g.invariant_factors());
  j["free_rank"] = g.free_rank();
  return j;
}

inline Json to_json(const Group& g) {
  Json j;
  j["rank"] = g.ambient_rank();
  j["relations"] = columns_json(g.relations());
  j["structure"] = structure_json(g);
  return j;
}

/// A subgroup by its generators modulo the relations, its lattice basis, and
/// the structure of the subgroup and of the quotient.
inline Json to_json(const Subgroup& h) {
  Json j;
  Json gens = Json::array();
  for (const auto& x : h.generators()) gens.push_back(to_json(x.coords()));
  j["generators"] = gens;
  j["hnf_basis"] = columns_json(h.basis());
  j["is_zero"] = h.is_zero();
  j["is_whole"] = h.is_whole();
  j["structure"] = structure_json(as_group(h));
  j["quotient"] = structure_json(quotient(h.group(), h).group);
  return j;
}

inline Json to_json(const ChainReport& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  Json terms = Json::array();
  for (const auto& t : c.terms) terms.push_back(to_json(t));
  j["terms"] = terms;
  j["stabilization_index"] = c.stabilization_index;
  j["certified"] = c.certified;
  return j;
}

inline Json to_json(const TauSequence& s) {
  Json j;
  Json v = Json::array();
  for (auto x : s.values) v.push_back(x);
  j["tau"] = v;
  j["requested"] = s.requested;
  j["truncated"] = s.truncated;
  return j;
}

inline Json to_json(const GrowthVerdict& v, bool log2 = false) {
  const double unit = log2 ? std::log(2.0) : 1.0;
  Json j;
  j["kind"] = to_string(v.kind);
  j["mode"] = to_string(v.mode);
  j["entropy"] = v.entropy / unit;
  j["units"] = log2 ? "bits" : "nats";
  j["rate"] = v.rate ? Json(*v.rate / unit) : Json(nullptr);
  j["degree"] = v.degree ? Json(*v.degree) : Json(nullptr);
  if (v.exact) j["exact"] = to_json(*v.exact, log2);
  j["sequence"] = to_json(v.sequence);
  return j;
}

inline Json to_json(const Flow& f) {
  Json j;
  j["group"] = to_json(f.group);
  j["endomorphism"] = rows_json(f.endo.matrix());
  return j;
}

inline Json to_json(const DualReport& r, bool log2 = false) {
  Json j;
  j["topological_entropy"] = to_json(r.topological_entropy, log2);
  j["ergodic"] = r.ergodic ? Json(*r.ergodic) : Json(nullptr);
  j["automorphism"] = r.automorphism;
  j["surjective"] = r.surjective;
  j["pinsker_subgroup"] = to_json(r.pinsker);
  j["pinsker_factor"] = to_json(r.pinsker_factor);
  j["pinsker_factor_note"] = "dual of the topological Pinsker factor";
  j["ergodicity_domain"] = r.ergodicity_domain ? to_json(*r.ergodicity_domain) : Json(nullptr);
  if (r.ergodicity_domain) j["ergodicity_domain_note"] = "dual of E(K, psi), the annihilator of P(G, phi)";
  j["hypothesis_notes"] = r.notes;
  return j;
}

}  // namespace entrolab
