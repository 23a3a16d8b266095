// polylat: construct, export and evaluate tent-folded polynomial lattice rules.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "polylat/cbc.hpp"
#include "polylat/criterion.hpp"
#include "polylat/qmc.hpp"
#include "polylat/rule_io.hpp"
#include "polylat/selftest.hpp"

using nlohmann::json;
using namespace polylat;

namespace {

struct CliError : std::runtime_error {
  CliError(std::string kind, const std::string& msg) : std::runtime_error(msg), kind(std::move(kind)) {}
  std::string kind;
};

void print_error(const std::string& kind, const std::string& message, int exit_code) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", exit_code}}}}.dump() << '\n';
}

double num(real v) { return static_cast<double>(v); }

/// Writes to the file or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text, bool binary = false) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw CliError("io", "cannot write '" + path + "'");
  out << text;
}

RuleFile load_rule(const std::string& path) {
  try {
    return load_rule_file(path);
  } catch (const std::runtime_error& e) {
    throw CliError("io", e.what());
  } catch (const std::invalid_argument& e) {
    throw CliError("validation", e.what());
  }
}

WeightModel weights_arg(const std::string& spec, int s) {
  try {
    return parse_weight_spec(spec, s);
  } catch (const std::invalid_argument& e) {
    throw CliError("validation", std::string("--weights: ") + e.what());
  } catch (const std::exception& e) {
    throw CliError("io", std::string("--weights: ") + e.what());
  }
}

json bounds_json(const std::vector<LambdaBound>& grid) {
  json out = json::array();
  for (const auto& g : grid) out.push_back({{"lambda", num(g.lambda)}, {"bound", num(g.value)}});
  return out;
}

// construct ------------------------------------------------------------------

struct ConstructArgs {
  int s = 1;
  int m = 0;
  int mprime = 0;
  int alpha = 2;
  std::string weights;
  std::string method = "auto";
  std::string modulus;
  std::string output;
  std::string report;
  bool verify = true;
};

void cmd_construct(const ConstructArgs& a) {
  CbcParams p;
  p.s = a.s;
  p.m = a.m;
  p.mprime = a.mprime;
  p.alpha = a.alpha;
  p.weights = weights_arg(a.weights, a.s);
  if (!a.modulus.empty()) {
    try {
      p.modulus = F2Poly::from_hex(a.modulus);
    } catch (const std::exception& e) {
      throw CliError("validation", std::string("--modulus: ") + e.what());
    }
  }
  std::string method = a.method;
  if (method == "auto") method = p.weights.is_product() ? "fast" : "slow";
  if (method == "fast" && !p.weights.is_product()) throw CliError("validation", "--method fast needs product weights");

  CbcResult built;
  try {
    built = method == "fast" ? cbc_fast(p) : cbc_slow(p);
  } catch (const std::invalid_argument& e) {
    throw CliError("validation", e.what());
  }
  const auto check = verify_construction(built.rule, false);
  if (a.verify && !check.holds) throw CliError("bound_violation", "constructed rule violates the CBC error bound");

  RuleFile f;
  f.rule = built.rule;
  f.provenance.construction = method == "fast" ? "cbc_fast" : "cbc_slow";
  emit(a.output, write_rule(f));

  if (!a.report.empty()) {
    json steps = json::array();
    for (const auto& st : built.report.steps) {
      steps.push_back({{"tau", st.tau}, {"q_hex", st.q.to_hex()}, {"B", num(st.b)}, {"seconds", st.seconds},
                       {"exact_scores", st.exact_scores}});
    }
    const json rep{{"method", built.report.method},
                   {"B", num(check.b)},
                   {"tightest_bound", {{"lambda", num(check.tightest.lambda)}, {"bound", num(check.tightest.value)}}},
                   {"bound_holds", check.holds},
                   {"steps", steps},
                   {"bounds", bounds_json(built.report.bounds)},
                   {"total_seconds", built.report.total_seconds}};
    emit(a.report, rep.dump(2) + "\n");
  }
}

// points ---------------------------------------------------------------------

struct PointsArgs {
  std::string rule;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::uint64_t replicate = 0;
  int precision = kDefaultShiftPrecision;
  std::string output;
};

void cmd_points(const PointsArgs& a) {
  const RuleFile f = load_rule(a.rule);
  PointSet pts = generate_point_set(f.rule);
  if (a.seed) pts = randomize(pts, draw_shift(f.rule.s, replicate_seed(*a.seed, a.replicate), a.precision));
  std::ostringstream out;
  const bool binary = a.format != "csv";
  if (binary) {
    write_points_binary(out, pts, f.rule.m, f.rule.mprime);
  } else {
    write_points_csv(out, pts);
  }
  emit(a.output, out.str(), binary);
}

// criterion ------------------------------------------------------------------

struct CriterionArgs {
  std::string rule;
  std::optional<std::uint64_t> oracle;
  std::string output;
  unsigned threads = 1;
};

void cmd_criterion(const CriterionArgs& a) {
  const RuleFile f = load_rule(a.rule);
  CriterionOptions opt;
  opt.threads = a.threads;
  const auto b = b_points(f.rule, opt);
  const auto grid = cbc_bounds_on_grid(f.rule.alpha, f.rule.weights, f.rule.m, f.rule.mprime);
  LambdaBound best = grid.front();
  for (const auto& g : grid) {
    if (g.value < best.value) best = g;
  }
  json out{{"rule_id", b.rule_id},
           {"s", b.s},
           {"m", b.m},
           {"mprime", b.mprime},
           {"alpha", b.alpha},
           {"value", num(b.value)},
           {"tightest_bound", {{"lambda", num(best.lambda)}, {"bound", num(best.value)}}},
           {"bound_holds", b.value <= best.value},
           {"lambda_bounds", bounds_json(grid)}};
  if (a.oracle) {
    DualTruncation d;
    try {
      d = b_dual_oracle(f.rule, *a.oracle);
    } catch (const std::invalid_argument& e) {
      throw CliError("validation", std::string("--oracle: ") + e.what());
    }
    out["oracle"] = {{"k_max", d.k_max}, {"value", num(d.value)}, {"tail", num(d.tail)}};
  }
  emit(a.output, out.dump(2) + "\n");
}

// integrate ------------------------------------------------------------------

struct IntegrateArgs {
  std::string rule;
  std::string integrand = "b2prod";
  int replicates = 16;
  std::uint64_t seed = 0;
  int precision = kDefaultShiftPrecision;
  std::string output;
};

void cmd_integrate(const IntegrateArgs& a) {
  const RuleFile f = load_rule(a.rule);
  Integrand fn;
  try {
    fn = make_integrand(a.integrand, f.rule.s);
  } catch (const std::invalid_argument& e) {
    throw CliError("validation", e.what());
  }
  const auto r = integrate(f.rule, fn, a.replicates, a.seed, a.precision);
  json reps = json::array();
  for (std::size_t i = 0; i < r.replicates.size(); ++i) reps.push_back({{"seed", r.seeds[i]}, {"estimate", num(r.replicates[i])}});
  json out{{"integrand", fn.name},
           {"n", std::uint64_t{1} << f.rule.m},
           {"replicates", a.replicates},
           {"seed", a.seed},
           {"estimate", num(r.estimate)},
           {"std_error", num(r.std_error)},
           {"per_replicate", reps}};
  if (r.exact) out["exact"] = num(*r.exact);
  if (r.rms_error) out["rms_error"] = num(*r.rms_error);
  emit(a.output, out.dump(2) + "\n");
}

// convergence ----------------------------------------------------------------

struct ConvergenceArgs {
  int s = 2;
  int alpha = 2;
  std::string weights;
  int m_lo = 6;
  int m_hi = 12;
  StudyOptions study;
  bool no_mse = false;
  std::string output;
};

void cmd_convergence(ConvergenceArgs a) {
  a.study.kernel_mse = !a.no_mse;
  ErrorStudy st;
  try {
    st = convergence_study(a.s, a.alpha, weights_arg(a.weights, a.s), a.m_lo, a.m_hi, a.study);
  } catch (const std::invalid_argument& e) {
    throw CliError("validation", e.what());
  }
  std::ostringstream out;
  write_study_csv(out, st);
  emit(a.output, out.str());
}

// selftest -------------------------------------------------------------------

int cmd_selftest(bool constants, int max_alpha) {
  if (constants) {
    std::cout << constants_report(max_alpha).dump(2) << '\n';
    return 0;
  }
  int failed = 0;
  for (const auto& c : run_selftest()) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.module << ": " << c.name << " (" << c.detail << ")\n";
    failed += !c.passed;
  }
  std::cout << (failed ? "selftest failed: " + std::to_string(failed) + " check(s)" : std::string("selftest passed")) << '\n';
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construct and evaluate tent-folded higher order polynomial lattice rules over F2"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads for internal parallel maps")->check(CLI::Range(1u, 256u));

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "Build a rule by component-by-component search");
  construct->add_option("-s,--dim", ca.s, "Dimension")->required()->check(CLI::Range(1, 64));
  construct->add_option("-m", ca.m, "log2 of the number of points")->required()->check(CLI::Range(0, 30));
  construct->add_option("--mprime", ca.mprime, "Modulus degree (default ceil(alpha m / 2))")->check(CLI::Range(0, 30));
  construct->add_option("--alpha", ca.alpha, "Smoothness")->check(CLI::Range(2, 10));
  construct->add_option("--weights", ca.weights, "prod:c | prod:c^j | prod:c*j^-k | prod:a,b,.. | general:@file.json")->required();
  construct->add_option("--method", ca.method, "Search method")->check(CLI::IsMember({"auto", "fast", "slow"}));
  construct->add_option("--modulus", ca.modulus, "Modulus in hex (default: smallest irreducible of degree m')");
  construct->add_option("-o,--output", ca.output, "Rule file (default stdout)");
  construct->add_option("--report", ca.report, "Write a JSON construction report with timings");
  construct->add_flag("!--no-verify", ca.verify, "Skip the error-bound check");

  PointsArgs pa;
  auto* points = app.add_subcommand("points", "Export the points of a rule");
  points->add_option("--rule", pa.rule, "Rule file")->required();
  points->add_option("--format", pa.format, "csv, or bin for the binary format")->check(CLI::IsMember({"csv", "bin", "binary"}));
  points->add_option("--seed", pa.seed, "Apply a random digital shift and the tent transform");
  points->add_option("--replicate", pa.replicate, "Shift index r; seed of shift r is derived from --seed");
  points->add_option("--precision", pa.precision, "Shift precision in bits")->check(CLI::Range(1, 62));
  points->add_option("-o,--output", pa.output, "Output file (default stdout)");

  CriterionArgs cra;
  auto* criterion = app.add_subcommand("criterion", "Evaluate the error criterion B of a rule");
  criterion->add_option("--rule", cra.rule, "Rule file")->required();
  criterion->add_option("--oracle", cra.oracle, "Also evaluate the truncated dual-lattice sum with k_j < Kmax");
  criterion->add_option("-o,--output", cra.output, "Output file (default stdout)");

  IntegrateArgs ia;
  auto* integ = app.add_subcommand("integrate", "Randomized QMC integration of a test integrand");
  integ->add_option("--rule", ia.rule, "Rule file")->required();
  integ->add_option("--integrand", ia.integrand, "Test integrand")->check(CLI::IsMember(integrand_names()));
  integ->add_option("-R,--replicates", ia.replicates, "Independent randomizations")->check(CLI::Range(1, 1 << 20));
  integ->add_option("--seed", ia.seed, "Master seed");
  integ->add_option("--precision", ia.precision, "Shift precision in bits")->check(CLI::Range(1, 62));
  integ->add_option("-o,--output", ia.output, "Output file (default stdout)");

  ConvergenceArgs cva;
  auto* conv = app.add_subcommand("convergence", "Error study over a range of m, written as CSV");
  conv->add_option("-s,--dim", cva.s, "Dimension")->check(CLI::Range(1, 64));
  conv->add_option("--alpha", cva.alpha, "Smoothness")->check(CLI::Range(2, 10));
  conv->add_option("--weights", cva.weights, "Weight specification")->required();
  conv->add_option("--m-lo", cva.m_lo, "Smallest m")->check(CLI::Range(0, 30));
  conv->add_option("--m-hi", cva.m_hi, "Largest m")->check(CLI::Range(0, 30));
  conv->add_option("--mprime", cva.study.mprime, "Fixed modulus degree (default ceil(alpha m / 2))")->check(CLI::Range(0, 30));
  conv->add_option("-R,--replicates", cva.study.replicates, "Randomizations per m")->check(CLI::Range(2, 1 << 20));
  conv->add_option("--seed", cva.study.seed, "Master seed");
  conv->add_option("--integrand", cva.study.integrand, "Test integrand")->check(CLI::IsMember(integrand_names()));
  conv->add_option("--exact-max-m", cva.study.kernel.exact_max_m, "Exact kernel sums up to 2^m points")->check(CLI::Range(0, 20));
  conv->add_flag("--no-mse", cva.no_mse, "Skip the kernel mean-square error");
  conv->add_option("-o,--output", cva.output, "CSV file (default stdout)");

  bool constants = false;
  int max_alpha = 4;
  auto* self = app.add_subcommand("selftest", "Run the built-in invariant checks");
  self->add_flag("--constants", constants, "Print the kernel constants as JSON instead");
  self->add_option("--max-alpha", max_alpha, "Largest alpha in the constants report")->check(CLI::Range(2, 10));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what(), 2);
    return 2;
  }

  try {
    if (*construct) cmd_construct(ca);
    if (*points) cmd_points(pa);
    if (*criterion) {
      cra.threads = threads;
      cmd_criterion(cra);
    }
    if (*integ) cmd_integrate(ia);
    if (*conv) {
      cva.study.kernel.threads = threads;
      cmd_convergence(cva);
    }
    if (*self) return cmd_selftest(constants, max_alpha);
  } catch (const CliError& e) {
    print_error(e.kind, e.what(), 1);
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what(), 1);
    return 1;
  }
  return 0;
}
