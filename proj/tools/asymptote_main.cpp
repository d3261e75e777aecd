// Scenario-driven verification runner for log-polyhomogeneous expansion
// models on the punctured disc.
//
// Exit codes: 0 all asserted checks pass, 1 check failure, 2 parse error,
// 3 precondition violation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "asymptote/gen.hpp"
#include "asymptote/reports.hpp"
#include "asymptote/scenario.hpp"
#include "asymptote/selftest.hpp"

namespace {

using namespace asymptote;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitParseError = 2;
constexpr int kExitPrecondition = 3;

struct CommonOpts {
  std::string scenario_path;
  std::optional<int> rays;
  std::optional<double> rho_min;
  std::optional<double> rho_max;
  std::optional<int> ppd;
  std::optional<double> fd_step_scale;
  std::optional<double> tol_exact;
  std::optional<double> tol_fd;
  std::string out_dir = ".";
  bool csv = false;
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts, bool with_scenario = true) {
  if (with_scenario)
    cmd->add_option("scenario", opts.scenario_path, "scenario JSON file")->required();
  cmd->add_option("--rays", opts.rays, "override: number of equally spaced rays");
  cmd->add_option("--rho-min", opts.rho_min, "override: innermost radius");
  cmd->add_option("--rho-max", opts.rho_max, "override: outermost radius");
  cmd->add_option("--ppd", opts.ppd, "override: radius samples per decade");
  cmd->add_option("--fd-step-scale", opts.fd_step_scale, "override: finite-difference step scale");
  cmd->add_option("--tol-exact", opts.tol_exact, "override: exact-identity tolerance");
  cmd->add_option("--tol-fd", opts.tol_fd, "override: finite-difference tolerance");
  cmd->add_option("--out", opts.out_dir, "report output directory");
  cmd->add_flag("--csv", opts.csv, "also write a CSV sample dump");
}

void apply_overrides(const CommonOpts& opts, Sweep& sweep, Tolerances& tol) {
  if (opts.rays) {
    sweep.rays = *opts.rays;
    sweep.angles.clear();
  }
  if (opts.rho_min) sweep.rho_min = *opts.rho_min;
  if (opts.rho_max) sweep.rho_max = *opts.rho_max;
  if (opts.ppd) sweep.points_per_decade = *opts.ppd;
  if (opts.fd_step_scale) tol.fd_step_scale = *opts.fd_step_scale;
  if (opts.tol_exact) tol.exact_rel = *opts.tol_exact;
  if (opts.tol_fd) tol.fd_rel = *opts.tol_fd;
  sweep.validate();
  tol.validate();
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw precondition_error("cannot write " + path.string());
  out << content;
  std::cout << "wrote " << path.string() << "\n";
}

Scenario load_for(const CommonOpts& opts, const std::string& expected_kind) {
  Scenario sc = load_scenario(opts.scenario_path);
  if (sc.kind != expected_kind)
    throw parse_error("scenario kind '" + sc.kind + "' does not match command (expected '" +
                      expected_kind + "')");
  return sc;
}

// Prints the checks array of a finished report and returns the exit code.
int finish(const JsonValue& report, const CommonOpts& opts, const std::string& name,
           bool pass) {
  write_file(opts.out_dir, name + "_report.json", report.dump());
  std::cout << (pass ? "RESULT: pass" : "RESULT: check failure") << "\n";
  return pass ? kExitPass : kExitCheckFailure;
}

int run_leading(const CommonOpts& opts) {
  Scenario sc = load_for(opts, "expansion");
  Tolerances tol = sc.tol;
  Sweep sweep = sc.sweep;
  apply_overrides(opts, sweep, tol);
  const Expansion g = payload_expansion(sc.payload);
  const LeadingAsymptotics la = leading_asymptotics(g);
  std::cout << "leading: a = " << to_string(la.a) << ", ell = " << la.ell
            << ", c = " << fmt_g9(la.c) << "\n";
  return finish(report_leading(la, g), opts, "leading", true);
}

int run_poincare(const CommonOpts& opts) {
  Scenario sc = load_for(opts, "expansion");
  Tolerances tol = sc.tol;
  Sweep sweep = sc.sweep;
  apply_overrides(opts, sweep, tol);
  const Expansion g = payload_expansion(sc.payload);
  const Grid grid = make_grid(sweep);
  const PoincareProfile profile = verify_poincare(g, grid, tol);
  std::cout << "ell = " << profile.ell << ", C_grad = " << fmt_g9(profile.C_grad)
            << ", C_hess = " << fmt_g9(profile.C_hess) << "\n";
  bool rays_ok = true;
  for (bool ok : profile.trend_ok_per_ray) rays_ok = rays_ok && ok;
  if (opts.csv) write_file(opts.out_dir, "poincare_samples.csv", csv_poincare(g, profile));
  return finish(report_poincare(profile, tol), opts, "poincare", profile.trend_ok && rays_ok);
}

int run_chern(const CommonOpts& opts) {
  Scenario sc = load_for(opts, "metric");
  Tolerances tol = sc.tol;
  Sweep sweep = sc.sweep;
  apply_overrides(opts, sweep, tol);
  const SemistableModel model = payload_model(sc.payload);
  const Grid grid = make_grid(sweep);
  const ChernAsymptotics chern = chern_asymptotics(model, grid, tol);
  std::cout << "ell_q = " << chern.ell_q << ", coefficient in ["
            << fmt_g9(chern.coefficient_min) << ", " << fmt_g9(chern.coefficient_max)
            << "], remainder constant (t) = " << fmt_g9(chern.remainder_constant)
            << ", (s) = " << fmt_g9(chern.remainder_constant_s) << "\n";
  if (opts.csv) write_file(opts.out_dir, "chern_samples.csv", csv_chern(chern));
  const bool coef_ok =
      chern.deepest_deviation <= 0.1 * std::max(1.0, static_cast<double>(chern.ell_q));
  return finish(report_chern(chern, tol), opts, "chern", chern.trend_ok && coef_ok);
}

int run_curvature(const CommonOpts& opts) {
  Scenario sc = load_for(opts, "metric");
  Tolerances tol = sc.tol;
  Sweep sweep = sc.sweep;
  apply_overrides(opts, sweep, tol);
  const SemistableModel model = payload_model(sc.payload);
  const Grid grid = make_grid(sweep);
  const Theorem1Report rep = verify_theorem1(model, grid, tol);
  std::cout << "C_upper = " << fmt_g9(rep.C_upper)
            << ", min eigenvalue = " << fmt_g9(rep.min_eigenvalue)
            << (rep.negativity_flagged ? " (negativity flagged)" : "")
            << ", accepted = " << rep.accepted << ", rejected = " << rep.rejections.size()
            << "\n";
  std::cout << "trace identity max rel dev = " << fmt_g9(rep.max_trace_rel_dev)
            << ", pole-cancellation max rel dev = " << fmt_g9(rep.max_cancellation_rel_dev)
            << "\n";
  if (opts.csv) write_file(opts.out_dir, "curvature_samples.csv", csv_curvature(rep));
  return finish(report_theorem1(rep, tol), opts, "curvature",
                rep.trace_ok && rep.cancellation_ok && rep.trend_ok);
}

int run_goodness(const CommonOpts& opts) {
  Scenario sc = load_for(opts, "metric");
  Tolerances tol = sc.tol;
  Sweep sweep = sc.sweep;
  apply_overrides(opts, sweep, tol);
  const SemistableModel model = payload_model(sc.payload);
  const Grid grid = make_grid(sweep);
  const GoodnessReport rep = mumford_goodness(model.H, grid, tol);
  std::cout << "ell = " << rep.ell << ", det bounds C = " << fmt_g9(rep.det_upper.constant)
            << " / " << fmt_g9(rep.det_inverse.constant)
            << ", grad C = " << fmt_g9(rep.grad.constant)
            << ", hess C = " << fmt_g9(rep.hess.constant) << "\n";
  std::cout << "matrix bounds: strong " << (rep.matrix1_strong.trend_ok ? "holds" : "fails")
            << "/" << (rep.matrix2_strong.trend_ok ? "holds" : "fails") << ", weak "
            << (rep.matrix1_weak.trend_ok ? "holds" : "fails") << "/"
            << (rep.matrix2_weak.trend_ok ? "holds" : "fails")
            << " (recorded; growth exponents " << fmt_g9(rep.growth_exponent_m1) << ", "
            << fmt_g9(rep.growth_exponent_m2) << ")\n";
  if (opts.csv) write_file(opts.out_dir, "goodness_samples.csv", csv_goodness(rep));
  const bool pass = rep.det_upper.trend_ok && rep.det_inverse.trend_ok && rep.grad.trend_ok &&
                    rep.hess.trend_ok;
  return finish(report_goodness(rep, tol), opts, "goodness", pass);
}

int run_bclass(const CommonOpts& opts) {
  Scenario sc = load_for(opts, "metric");
  Tolerances tol = sc.tol;
  Sweep sweep = sc.sweep;
  apply_overrides(opts, sweep, tol);
  const SemistableModel model = payload_model(sc.payload);
  if (model.nu != 1)
    throw precondition_error("bclass works in the base variable; scenario must have nu = 1");
  for (long long ea : model.e)
    if (ea != 0) throw precondition_error("bclass works with e = 0");
  const Grid grid = make_grid(sweep);
  const Expansion det = det_expansion(model.H);
  const BClassReport det_class = bclass_check(det, model.n);
  std::cout << "det membership: " << (det_class.member ? "member" : "NOT a member");
  if (det_class.r) std::cout << ", r = " << to_string(*det_class.r);
  std::cout << "\n";
  if (!det_class.member) {
    for (const auto& issue : det_class.offending)
      std::cout << "  offending term p=" << to_string(issue.p) << " q=" << to_string(issue.q)
                << " ell=" << issue.ell << ": " << issue.reason << "\n";
    return finish(report_bclass(det_class, nullptr, grid, tol), opts, "bclass", false);
  }
  const Prop51Report prop = prop51_verify(model.H, model.n, grid, tol);
  std::cout << "sharpened bound: C = " << fmt_g9(prop.C_bound)
            << ", trend " << (prop.trend_ok ? "bounded" : "growing") << " (recorded)"
            << ", growth exponent = " << fmt_g9(prop.growth_exponent) << "\n";
  if (opts.csv) write_file(opts.out_dir, "bclass_samples.csv", csv_prop51(prop));
  return finish(report_bclass(det_class, &prop, grid, tol), opts, "bclass",
                det_class.member && prop.entries_member);
}

int run_orbit(const CommonOpts& opts) {
  Scenario sc = load_for(opts, "monodromy");
  Tolerances tol = sc.tol;
  Sweep sweep = sc.sweep;
  apply_overrides(opts, sweep, tol);
  auto [data, coeffs] = payload_monodromy(sc.payload);
  OrbitOutcome outcome;
  outcome.n = data.n;
  outcome.sv = single_valuedness(pair_constants(data));
  if (!outcome.sv.ok) {
    std::cout << "single-valuedness FAILS at (j,k,m) = (" << outcome.sv.witness_j << ","
              << outcome.sv.witness_k << "," << outcome.sv.witness_m
              << "), deviation = " << fmt_g9(outcome.sv.max_deviation) << "\n";
    return finish(report_orbit(outcome, tol), opts, "orbit", false);
  }
  outcome.raw = fiber_integral_expansion(data, coeffs, outcome.sv);
  outcome.normalized = l2_normalized(outcome.raw, data.n);
  outcome.reality = is_real_symmetric(outcome.normalized);
  try {
    outcome.leading = leading_asymptotics(outcome.normalized);
    outcome.has_leading = true;
    std::cout << "leading: a = " << to_string(outcome.leading.a)
              << ", ell = " << outcome.leading.ell << ", c = " << fmt_g9(outcome.leading.c)
              << "\n";
  } catch (const precondition_error& e) {
    outcome.leading_error = e.what();
    std::cout << "leading extraction failed: " << e.what() << "\n";
  }
  return finish(report_orbit(outcome, tol), opts, "orbit",
                outcome.reality && outcome.has_leading);
}

int run_torsion(const CommonOpts& opts) {
  Scenario sc = load_for(opts, "torsion");
  Tolerances tol = sc.tol;
  Sweep sweep = sc.sweep;
  apply_overrides(opts, sweep, tol);
  const TorsionInput input = payload_torsion(sc.payload);
  const Grid grid = make_grid(sweep);
  const TorsionReport rep = torsion_hessian_profile(input.models, input.anomaly_r, grid, tol);
  std::cout << "ell_alt = " << rep.asym.ell_alt
            << ", max deviation = " << fmt_g9(rep.deviation_max) << ", trend "
            << (rep.trend_ok ? "ok" : "violated") << "\n";
  std::cout << rep.anomaly_note << "\n" << rep.template_note << "\n";
  if (opts.csv) write_file(opts.out_dir, "torsion_samples.csv", csv_torsion(rep));
  return finish(report_torsion(rep, tol), opts, "torsion", rep.trend_ok);
}

int run_selftest(const CommonOpts& opts) {
  Sweep sweep;
  Tolerances tol;
  apply_overrides(opts, sweep, tol);
  const std::uint64_t seed = seed_from_env();
  const SelftestReport rep = asymptote::run_selftest(seed, sweep, tol);
  for (const auto& c : rep.checks)
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  (metric " << fmt_g9(c.metric)
              << ")" << (c.detail.empty() ? "" : "  " + c.detail) << "\n";
  return finish(report_selftest(rep), opts, "selftest", rep.all_pass);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification engine for log-polyhomogeneous expansions on the punctured disc"};
  app.require_subcommand(1);

  CommonOpts leading_opts, poincare_opts, chern_opts, curvature_opts, goodness_opts,
      bclass_opts, orbit_opts, torsion_opts, selftest_opts;
  add_common_flags(app.add_subcommand("leading", "leading asymptotics of an expansion"),
                   leading_opts);
  add_common_flags(app.add_subcommand("poincare", "Poincare-growth verification"), poincare_opts);
  add_common_flags(app.add_subcommand("chern", "first Chern form asymptotics of det H"),
                   chern_opts);
  add_common_flags(app.add_subcommand("curvature", "curvature endomorphism bound sweep"),
                   curvature_opts);
  add_common_flags(app.add_subcommand("goodness", "Mumford-goodness estimates for det H"),
                   goodness_opts);
  add_common_flags(app.add_subcommand("bclass", "singularity-class membership and sharpened bound"),
                   bclass_opts);
  add_common_flags(app.add_subcommand("orbit", "monodromy fiber-integral expansion"), orbit_opts);
  add_common_flags(app.add_subcommand("torsion", "alternating torsion-Hessian profile"),
                   torsion_opts);
  add_common_flags(app.add_subcommand("selftest", "seeded invariant suite"), selftest_opts,
                   /*with_scenario=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParseError;
  }

  try {
    if (app.got_subcommand("leading")) return run_leading(leading_opts);
    if (app.got_subcommand("poincare")) return run_poincare(poincare_opts);
    if (app.got_subcommand("chern")) return run_chern(chern_opts);
    if (app.got_subcommand("curvature")) return run_curvature(curvature_opts);
    if (app.got_subcommand("goodness")) return run_goodness(goodness_opts);
    if (app.got_subcommand("bclass")) return run_bclass(bclass_opts);
    if (app.got_subcommand("orbit")) return run_orbit(orbit_opts);
    if (app.got_subcommand("torsion")) return run_torsion(torsion_opts);
    if (app.got_subcommand("selftest")) return run_selftest(selftest_opts);
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const precondition_error& e) {
    std::cerr << "precondition violation: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  return kExitParseError;
}
