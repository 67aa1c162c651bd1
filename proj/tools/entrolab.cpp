// entrolab: entropy, growth, Pinsker and ergodicity reports for algebraic flows.
//
// Exit codes: 0 success, 2 invalid input, 3 set budget or precision exhausted.
// Reports go to stdout as JSON; errors go to stderr as JSON.

#include "entrolab/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

using namespace entrolab;

namespace {

struct Args {
  std::string command;
  std::string input;
  std::string mode;
  std::optional<double> epsilon;
  std::optional<std::size_t> max_n;
  std::string csv;
  bool log2 = false;
};

constexpr int kExitInvalid = 2;
constexpr int kExitResource = 3;

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read input file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FlowSpec load(const Args& a) {
  FlowSpec spec = parse_flow_text(read_input(a.input));
  if (a.epsilon) {
    if (!(*a.epsilon > 0)) throw InvalidArgument("--epsilon must be positive");
    spec.options.epsilon = *a.epsilon;
  }
  if (a.max_n) {
    if (*a.max_n == 0) throw InvalidArgument("--max-n must be positive");
    spec.options.tau_max_n = *a.max_n;
  }
  if (const char* env = std::getenv("ENTROLAB_BUDGET")) {
    char* end = nullptr;
    const unsigned long long b = std::strtoull(env, &end, 10);
    if (*env == '\0' || *end != '\0' || b == 0) throw InvalidArgument("ENTROLAB_BUDGET must be a positive integer");
    spec.options.set_budget = static_cast<std::size_t>(b);
  }
  return spec;
}

GrowthMode growth_mode(const Args& a, const FlowSpec& spec) {
  if (a.mode.empty()) return spec.is_shift() ? GrowthMode::Empirical : GrowthMode::Exact;
  return a.mode == "exact" ? GrowthMode::Exact : GrowthMode::Empirical;
}

Json flow_json(const FlowSpec& spec) {
  Json j;
  if (spec.shift) {
    j["group"] = {{"shift_base", spec.shift->base_order()}};
    j["endomorphism"] = "bernoulli";
  } else {
    j["group"] = to_json(*spec.group);
    if (spec.matrix) {
      j["endomorphism"] = rows_json(*spec.matrix);
    } else {
      Json rows = Json::array();
      for (std::size_t i = 0; i < spec.rational->rows(); ++i) {
        Json r = Json::array();
        for (std::size_t k = 0; k < spec.rational->cols(); ++k) r.push_back(to_json((*spec.rational)(i, k)));
        rows.push_back(r);
      }
      j["endomorphism"] = rows;
      j["domain"] = "Q^" + std::to_string(spec.rational->rows());
    }
  }
  return j;
}

Json poly_json(const RatPoly& p) {
  Json a = Json::array();
  for (const auto& c : p.coeffs()) a.push_back(to_json(c));
  return a;
}

void write_csv_file(const std::string& path, const TauSequence& seq) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write CSV file " + path);
  write_csv(out, seq);
}

Json cmd_entropy(const Args& a, const FlowSpec& spec) {
  const double eps = spec.options.epsilon;
  Json j;
  j["command"] = "entropy";
  j["flow"] = flow_json(spec);
  if (spec.rational) {
    j["char_poly"] = poly_json(char_poly(*spec.rational));
    j["entropy"] = to_json(yuzvinski_entropy(*spec.rational, eps), a.log2);
  } else {
    const Endo phi = spec.endo();
    const IntMatrix f = free_part_matrix(phi);
    j["free_part_matrix"] = rows_json(f);
    j["char_poly"] = poly_json(char_poly(f));
    j["entropy"] = to_json(algebraic_entropy(phi, eps), a.log2);
  }
  j["epsilon"] = eps;
  return j;
}

Json cmd_growth(const Args& a, const FlowSpec& spec) {
  GrowthOptions opt;
  opt.mode = growth_mode(a, spec);
  opt.terms = spec.options.tau_max_n;
  opt.budget = spec.options.set_budget;
  opt.epsilon = spec.options.epsilon;
  const GrowthVerdict v =
      spec.is_shift() ? growth_classify(spec.beta(), spec.shift_set(), opt) : growth_classify(spec.endo(), spec.element_set(), opt);
  if (!a.csv.empty()) write_csv_file(a.csv, v.sequence);
  Json j;
  j["command"] = "growth";
  j["flow"] = flow_json(spec);
  j["verdict"] = to_json(v, a.log2);
  j["threshold"] = kExponentialThreshold;
  return j;
}

Json cmd_pinsker(const Args& a, const FlowSpec& spec) {
  const Endo phi = spec.endo();
  const std::size_t probes = spec.options.probe_budget;
  const PeriodicReport p1 = periodic_report(phi, probes);
  const Subgroup q1 = quasiperiodic_from(phi, p1.subgroup);
  const ChainReport q = chain(phi, ChainKind::Q, probes);
  const Subgroup& p = q.limit();
  Json j;
  j["command"] = "pinsker";
  j["flow"] = flow_json(spec);
  j["periodic"] = to_json(p1.subgroup);
  j["periodic_certified"] = p1.certified;
  if (!p1.note.empty()) j["periodic_note"] = p1.note;
  j["quasiperiodic"] = to_json(q1);
  j["q_chain"] = to_json(q);
  j["pinsker"] = to_json(p);
  j["entropy_on_pinsker"] = to_json(algebraic_entropy(restrict_to(phi, p).endo, spec.options.epsilon), a.log2);
  j["phi_torsion"] = to_json(intersect(torsion_subgroup(phi.group()), q1));
  j["algebraically_ergodic"] = q1.is_zero();
  j["completely_positive_entropy"] = p.is_zero();
  return j;
}

Json cmd_chain(const Args&, const FlowSpec& spec) {
  const Endo phi = spec.endo();
  Json j;
  j["command"] = "chain";
  j["flow"] = flow_json(spec);
  j["q_chain"] = to_json(chain(phi, ChainKind::Q, spec.options.probe_budget));
  j["p_chain"] = to_json(chain(phi, ChainKind::P, spec.options.probe_budget));
  j["hyperkernel"] = to_json(hyperkernel(phi));
  return j;
}

std::string summary(const DualReport& r) {
  std::ostringstream s;
  s << "h_top(dual) = h(phi) = " << r.topological_entropy.nats() << " nats"
    << (r.topological_entropy.exact_zero ? " (exactly zero)" : "") << "; ";
  if (r.ergodic) s << "dual map " << (*r.ergodic ? "ergodic" : "not ergodic") << "; ";
  else s << "no ergodicity verdict; ";
  s << "Pinsker factor is the dual of a group with invariant factors [";
  const auto& inv = r.pinsker_factor.group.invariant_factors();
  for (std::size_t i = 0; i < inv.size(); ++i) s << (i ? ", " : "") << inv[i];
  s << "] and free rank " << r.pinsker_factor.group.free_rank();
  return s.str();
}

Json cmd_ergodic(const Args& a, const FlowSpec& spec) {
  const DualReport r = dual_report(spec.endo(), spec.options.epsilon);
  Json j;
  j["command"] = "ergodic";
  j["flow"] = flow_json(spec);
  j["dual"] = to_json(r, a.log2);
  j["summary"] = summary(r);
  return j;
}

void cmd_trajectory(const Args& a, const FlowSpec& spec) {
  const std::size_t n = spec.options.tau_max_n;
  const std::size_t budget = spec.options.set_budget;
  const TauSequence seq = spec.is_shift() ? tau_sequence(spec.beta(), spec.shift_set(), n, budget)
                                          : tau_sequence(spec.endo(), spec.element_set(), n, budget);
  if (a.csv.empty()) {
    write_csv(std::cout, seq);
  } else {
    write_csv_file(a.csv, seq);
    Json j;
    j["command"] = "trajectory";
    j["flow"] = flow_json(spec);
    j["sequence"] = to_json(seq);
    j["csv"] = a.csv;
    std::cout << j.dump(2) << '\n';
  }
}

int fail(const char* kind, const std::string& message, int code) {
  Json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return code;
}

int run(const Args& a) {
  try {
    const FlowSpec spec = load(a);
    if (a.command == "trajectory") {
      cmd_trajectory(a, spec);
      return 0;
    }
    if (spec.rational && a.command != "entropy")
      throw InvalidArgument("rational endomorphisms are only accepted by `entropy`");
    Json out;
    if (a.command == "entropy") out = cmd_entropy(a, spec);
    else if (a.command == "growth") out = cmd_growth(a, spec);
    else if (a.command == "pinsker") out = cmd_pinsker(a, spec);
    else if (a.command == "chain") out = cmd_chain(a, spec);
    else out = cmd_ergodic(a, spec);
    std::cout << out.dump(2) << '\n';
    return 0;
  } catch (const BudgetExceeded& e) {
    return fail(e.kind(), e.what(), kExitResource);
  } catch (const PrecisionError& e) {
    return fail(e.kind(), e.what(), kExitResource);
  } catch (const Error& e) {
    return fail(e.kind(), e.what(), kExitInvalid);
  } catch (const std::exception& e) {
    return fail("invalid_argument", e.what(), kExitInvalid);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Algebraic entropy, Pinsker subgroups and growth of endomorphisms of abelian groups"};
  app.require_subcommand(1, 1);
  Args args;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"entropy", "exact algebraic entropy by the Yuzvinski formula"},
      {"growth", "polynomial or exponential growth of tau(n) for the finite set"},
      {"pinsker", "P_1, Q_1, the Q-chain and the Pinsker subgroup"},
      {"chain", "the P- and Q-chains with their quotients"},
      {"ergodic", "dual flow report: entropy, ergodicity, Pinsker factor, ergodicity domain"},
      {"trajectory", "tau(n) as CSV with header n,tau,log_tau"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--input,-i", args.input, "flow spec JSON file (default: stdin)");
    sub->add_option("--epsilon", args.epsilon, "entropy interval half-width in nats");
    sub->add_option("--max-n", args.max_n, "number of tau terms");
    sub->add_option("--mode", args.mode, "growth classifier mode")->check(CLI::IsMember({"exact", "empirical"}));
    sub->add_option("--csv", args.csv, "write tau(n) as CSV to this file");
    sub->add_flag("--log2", args.log2, "also report entropies in bits");
    sub->callback([&args, n = std::string(name)] { args.command = n; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), kExitInvalid);
  }
  return run(args);
}
