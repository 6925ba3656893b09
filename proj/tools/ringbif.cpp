// ringbif: spectra, bifurcation tables, branch continuation, classification
// and self-checks for polygonal ring equilibria.
//
// Exit status: 0 success, 1 numerical failure, 2 usage error.
// Environment: RINGBIF_NEWTON_TOL and RINGBIF_SYMMETRY_TOL override the
// default Newton and classification tolerances.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ringbif/ringbif.hpp"

using namespace ringbif;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FamilyArgs {
  std::string family = "vortex";
  std::optional<double> alpha;
  int n = 0;
  std::optional<double> mu;
};

struct OutputArgs {
  std::string path;
  std::string format = "json";
};

double env_tolerance(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const double d = std::strtod(v, &end);
  if (end == v || *end != '\0' || !(d > 0.0)) throw UsageError(std::string(name) + " must be a positive number");
  return d;
}

SystemSpec make_spec(const FamilyArgs& f, double mu) {
  if (f.n <= 0) throw UsageError("--n is required");
  if (f.alpha && f.family != "alpha") throw UsageError("--alpha applies only to --family alpha");
  try {
    if (f.family == "vortex") return SystemSpec::vortex(f.n, mu);
    if (f.family == "body") return SystemSpec::body(f.n, mu);
    if (f.family == "alpha") {
      if (!f.alpha) throw UsageError("--family alpha needs --alpha");
      return SystemSpec::celestial(*f.alpha, f.n, mu);
    }
    if (f.family == "dnls-cubic") return SystemSpec::dnls(DnlsPotential::cubic(), f.n, mu);
    if (f.family == "dnls-saturable") return SystemSpec::dnls(DnlsPotential::saturable(), f.n, mu);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  throw UsageError("unknown family " + f.family);
}

void add_family_options(CLI::App* cmd, FamilyArgs& f, bool with_mu) {
  cmd->add_option("--family", f.family, "vortex | body | alpha | dnls-cubic | dnls-saturable")
      ->check(CLI::IsMember({"vortex", "body", "alpha", "dnls-cubic", "dnls-saturable"}));
  cmd->add_option("--alpha", f.alpha, "exponent for --family alpha (>= 1)");
  cmd->add_option("--n", f.n, "ring size")->required();
  if (with_mu) cmd->add_option("--mu", f.mu, "central mass/circulation, or dNLS amplitude");
}

void add_output_options(CLI::App* cmd, OutputArgs& o) {
  cmd->add_option("-o,--output", o.path, "output file (default: standard output)");
  cmd->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
}

void emit(const OutputArgs& o, const std::string& text) {
  if (o.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + o.path);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int run_spectrum(const FamilyArgs& f, const OutputArgs& o) {
  if (!f.mu) throw UsageError("spectrum needs --mu");
  const SpectrumReport rep = compute_spectrum(make_spec(f, *f.mu));
  emit(o, o.format == "csv" ? spectrum_csv(rep) : dump(to_json(rep)));
  return kExitOk;
}

int run_bifpoints(const FamilyArgs& f, const OutputArgs& o, bool asymptotics) {
  const SystemSpec spec = make_spec(f, 0.0);
  const auto pts = bif_points(spec);
  std::vector<std::pair<int, std::vector<AsymptoticRow>>> asym;
  if (asymptotics) {
    if (!(spec.is_celestial() && spec.alpha() == 2.0)) throw UsageError("--asymptotics applies to --family body");
    for (int k = 1; k <= 3; ++k) asym.emplace_back(k, body_asymptotics_check(k, {500, 1000, 2000, 4000}));
  }
  emit(o, o.format == "csv" ? bifpoints_csv(pts) : dump(bifpoints_json(spec, pts, asym)));
  return kExitOk;
}

struct ContinueArgs {
  int k = 0;
  std::optional<int> h;
  std::string side = "plus";
  std::string plot_csv;
  ContinuationOptions opts;
};

BifurcationPoint select_point(const SystemSpec& spec, const ContinueArgs& c, std::optional<double> near) {
  std::optional<BifurcationPoint> best;
  for (const auto& p : bif_points(spec)) {
    if (p.k != c.k) continue;
    if (c.h && p.h != *c.h) continue;
    if (near) {
      if (!best || std::abs(p.mu - *near) < std::abs(best->mu - *near)) best = p;
    } else if (!best || (p.simple && !best->simple)) {
      best = p;
    }
  }
  if (!best) {
    throw UsageError("no bifurcation point with k=" + std::to_string(c.k) + " for " + spec.family_name() +
                     " n=" + std::to_string(spec.n));
  }
  return *best;
}

int run_continue(const FamilyArgs& f, const OutputArgs& o, const ContinueArgs& c) {
  const SystemSpec spec = make_spec(f, 0.0);
  if (c.k < 1) throw UsageError("--k must be positive");
  const BifurcationPoint bp = select_point(spec, c, f.mu);
  const ReducedProblem rp(spec, bp.h);
  const BranchPoint start = branch_switch(rp, bp, c.side == "plus" ? Side::plus : Side::minus, c.opts.eps);
  Branch br = continue_branch(rp, start, bp, c.opts);
  const VerificationReport rep = verify_branch(br, spec);
  br.max_symmetry_verified = rep.maximality_pass;
  emit(o, o.format == "csv" ? branch_csv(br) : dump(branch_json(spec, br, rep)));
  if (!c.plot_csv.empty()) emit(OutputArgs{c.plot_csv, "csv"}, branch_csv(br));
  std::cerr << "termination=" << to_string(br.termination) << " steps=" << br.steps
            << " max_residual=" << rep.max_residual << " classification=" << (rep.classification_pass ? "pass" : "fail")
            << " maximality=" << (rep.maximality_pass ? "pass" : "fail") << '\n';
  return kExitOk;
}

int run_classify(const std::string& input, int h, double tol, const OutputArgs& o) {
  std::ifstream in(input);
  if (!in) throw UsageError("cannot read " + input);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed input: ") + e.what());
  }
  std::vector<Configuration> configs;
  try {
    if (j.contains("points")) {
      // A branch file: every point has a central body iff the family does.
      const bool center = j.at("spec").at("family").get<std::string>().rfind("dnls", 0) != 0;
      for (const auto& p : j.at("points")) {
        json c = p;
        c["has_center"] = center;
        configs.push_back(configuration_from_json(c));
      }
    } else {
      configs.push_back(configuration_from_json(j));
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed input: ") + e.what());
  }
  json out = json::array();
  std::string csv;
  for (const auto& x : configs) {
    const Classification c = classify_configuration(x, h, tol);
    out.push_back(to_json(c));
    csv = classification_csv(c);
  }
  if (o.format == "csv") {
    if (configs.size() != 1) throw UsageError("csv output classifies a single configuration");
    emit(o, csv);
  } else {
    emit(o, dump(configs.size() == 1 ? out[0] : out));
  }
  return kExitOk;
}

int run_check(const std::vector<int>& ns, double perturbation, const OutputArgs& o) {
  CheckGrid g = CheckGrid::standard();
  if (!ns.empty()) g.ns = ns;
  g.block_perturbation = perturbation;
  const auto results = run_checks(g);
  bool ok = true;
  json j;
  j["schema_version"] = kSchemaVersion;
  json arr = json::array();
  std::printf("%-24s %-6s %8s %12s %12s  %s\n", "check", "status", "cases", "worst", "threshold", "first failure");
  for (const auto& r : results) {
    ok = ok && r.passed;
    std::printf("%-24s %-6s %8d %12.3e %12.3e  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.cases, r.worst,
                r.threshold, r.detail.c_str());
    arr.push_back(json{{"name", r.name},
                       {"passed", r.passed},
                       {"cases", r.cases},
                       {"worst", json_number(r.worst)},
                       {"threshold", r.threshold},
                       {"detail", r.detail}});
  }
  j["checks"] = arr;
  if (!o.path.empty()) emit(o, dump(j));
  return ok ? kExitOk : kExitNumerical;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bifurcation analysis of polygonal ring equilibria"};
  // -h is taken by the symmetry order --h.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  FamilyArgs fam;
  OutputArgs out;
  ContinueArgs cont;
  bool asymptotics = false;
  std::string input;
  int classify_h = 0;
  std::optional<double> tol;
  std::vector<int> check_ns;
  double perturbation = 0.0;

  try {
    cont.opts.newton_tol = env_tolerance("RINGBIF_NEWTON_TOL", cont.opts.newton_tol);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  auto* spectrum = app.add_subcommand("spectrum", "Hessian blocks, eigenvalues, sign indices and n_h at one mu");
  add_family_options(spectrum, fam, true);
  add_output_options(spectrum, out);

  auto* bifpoints = app.add_subcommand("bifpoints", "Bifurcation table of the trivial branch");
  add_family_options(bifpoints, fam, false);
  add_output_options(bifpoints, out);
  bifpoints->add_flag("--asymptotics", asymptotics, "append the large-n table (body family)");

  auto* cont_cmd = app.add_subcommand("continue", "Switch onto and continue the branch of mode k");
  add_family_options(cont_cmd, fam, true);
  add_output_options(cont_cmd, out);
  cont_cmd->add_option("--k", cont.k, "mode number")->required();
  cont_cmd->add_option("--h", cont.h, "symmetry order (default: the table's gcd(k, n))");
  cont_cmd->add_option("--side", cont.side, "plus | minus")->check(CLI::IsMember({"plus", "minus"}));
  cont_cmd->add_option("--ds", cont.opts.ds)->check(CLI::PositiveNumber);
  cont_cmd->add_option("--ds-min", cont.opts.ds_min)->check(CLI::PositiveNumber);
  cont_cmd->add_option("--ds-max", cont.opts.ds_max)->check(CLI::PositiveNumber);
  cont_cmd->add_option("--newton-tol", cont.opts.newton_tol)->check(CLI::PositiveNumber);
  cont_cmd->add_option("--max-steps", cont.opts.max_steps)->check(CLI::NonNegativeNumber);
  cont_cmd->add_option("--mu-bound", cont.opts.mu_bound)->check(CLI::PositiveNumber);
  cont_cmd->add_option("--norm-bound", cont.opts.norm_bound)->check(CLI::PositiveNumber);
  cont_cmd->add_option("--collision-tol", cont.opts.collision_tol)->check(CLI::PositiveNumber);
  cont_cmd->add_option("--eps", cont.opts.eps, "branch-switch radius")->check(CLI::NonNegativeNumber);
  cont_cmd->add_option("--plot-csv", cont.plot_csv, "also write the (step, mu, norm, min_distance) table here");

  auto* classify = app.add_subcommand("classify", "Decompose a configuration (or every branch point) into polygons");
  classify->add_option("--input", input, "configuration JSON {x, has_center} or a branch file")->required();
  classify->add_option("--h", classify_h, "symmetry order")->required()->check(CLI::PositiveNumber);
  classify->add_option("--tol", tol, "symmetry tolerance")->check(CLI::PositiveNumber);
  add_output_options(classify, out);

  auto* check = app.add_subcommand("check", "Run the self-check suite; nonzero exit on any failure");
  check->add_option("--n", check_ns, "restrict the grid to these ring sizes");
  check->add_option("--perturb-blocks", perturbation, "add this to every formula block (mutation test)");
  check->add_option("-o,--output", out.path, "also write the results as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cont.opts.ds_min > cont.opts.ds_max) throw UsageError("--ds-min exceeds --ds-max");
    if (*spectrum) return run_spectrum(fam, out);
    if (*bifpoints) return run_bifpoints(fam, out, asymptotics);
    if (*cont_cmd) return run_continue(fam, out, cont);
    if (*classify) return run_classify(input, classify_h, tol.value_or(env_tolerance("RINGBIF_SYMMETRY_TOL", kSymmetryTol)), out);
    if (*check) return run_check(check_ns, perturbation, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidDivisor& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
