#pragma once

#include <string>
#include <vector>

#include "asymptote/expansion_io.hpp"
#include "asymptote/json_writer.hpp"
#include "asymptote/log_calculus.hpp"
#include "asymptote/metric.hpp"
#include "asymptote/monodromy.hpp"
#include "asymptote/selftest.hpp"
#include "asymptote/sweep.hpp"
#include "asymptote/torsion.hpp"

namespace asymptote {

// Every report embeds the materialized grid and the tolerances it was
// produced with, plus a "checks" array. Only "asserted" checks decide the
// overall pass flag; "recorded" checks are informational.

namespace report_detail {

inline JsonValue doubles_json(const std::vector<double>& values) {
  JsonValue arr = JsonValue::array();
  for (double v : values) arr.push(JsonValue::number(v));
  return arr;
}

inline JsonValue witness_json(const Witness& w) {
  JsonValue o = JsonValue::object();
  o.set("value", JsonValue::number(w.value));
  o.set("rho", JsonValue::number(w.rho));
  o.set("theta", JsonValue::number(w.theta));
  return o;
}

inline JsonValue grid_json(const Grid& grid) {
  JsonValue o = JsonValue::object();
  o.set("angles", doubles_json(grid.angles));
  o.set("radii", doubles_json(grid.radii));
  o.set("decades", JsonValue::integer(grid.decades));
  return o;
}

inline JsonValue tolerances_json(const Tolerances& tol) {
  JsonValue o = JsonValue::object();
  o.set("fd_rel", JsonValue::number(tol.fd_rel));
  o.set("exact_rel", JsonValue::number(tol.exact_rel));
  o.set("trend_pct", JsonValue::number(tol.trend_pct));
  o.set("fd_step_scale", JsonValue::number(tol.fd_step_scale));
  return o;
}

class Checks {
 public:
  void add(const std::string& name, bool asserted, bool pass) {
    JsonValue o = JsonValue::object();
    o.set("name", JsonValue::string(name));
    o.set("kind", JsonValue::string(asserted ? "asserted" : "recorded"));
    o.set("pass", JsonValue::boolean(pass));
    arr_.push(std::move(o));
    if (asserted) all_pass_ = all_pass_ && pass;
  }

  JsonValue take() { return std::move(arr_); }
  bool all_pass() const { return all_pass_; }

 private:
  JsonValue arr_ = JsonValue::array();
  bool all_pass_ = true;
};

inline void finish_report(JsonValue& rep, Checks& checks, const Grid& grid,
                          const Tolerances& tol) {
  rep.set("checks", checks.take());
  rep.set("pass", JsonValue::boolean(checks.all_pass()));
  rep.set("grid", grid_json(grid));
  rep.set("tolerances", tolerances_json(tol));
}

}  // namespace report_detail

// ---------------------------------------------------------------------------

inline JsonValue report_leading(const LeadingAsymptotics& la, const Expansion& g) {
  JsonValue rep = JsonValue::object();
  rep.set("command", JsonValue::string("leading"));
  JsonValue body = JsonValue::object();
  body.set("a", JsonValue::string(to_string(la.a)));
  body.set("ell", JsonValue::integer(la.ell));
  body.set("c", JsonValue::number(la.c));
  rep.set("leading", std::move(body));
  rep.set("expansion", expansion_to_json(g));
  rep.set("pass", JsonValue::boolean(true));
  return rep;
}

inline JsonValue report_poincare(const PoincareProfile& p, const Tolerances& tol) {
  JsonValue rep = JsonValue::object();
  rep.set("command", JsonValue::string("poincare"));
  rep.set("ell", JsonValue::integer(p.ell));
  rep.set("C_grad", JsonValue::number(p.C_grad));
  rep.set("C_hess", JsonValue::number(p.C_hess));
  rep.set("grad_witness", report_detail::witness_json(p.grad_witness));
  rep.set("hess_witness", report_detail::witness_json(p.hess_witness));
  rep.set("hess_remainder_decade_max", report_detail::doubles_json(p.hess_decade_max));
  rep.set("max_imag_residual", JsonValue::number(p.max_imag_residual));
  report_detail::Checks checks;
  checks.add("hess-remainder-bounded-trend", true, p.trend_ok);
  bool rays_ok = true;
  for (bool ok : p.trend_ok_per_ray) rays_ok = rays_ok && ok;
  checks.add("hess-remainder-bounded-every-ray", true, rays_ok);
  report_detail::finish_report(rep, checks, p.grid, tol);
  return rep;
}

inline JsonValue report_chern(const ChernAsymptotics& c, const Tolerances& tol) {
  JsonValue rep = JsonValue::object();
  rep.set("command", JsonValue::string("chern"));
  rep.set("ell_q", JsonValue::integer(c.ell_q));
  rep.set("nu", JsonValue::integer(c.nu));
  rep.set("coefficient_max", JsonValue::number(c.coefficient_max));
  rep.set("coefficient_min", JsonValue::number(c.coefficient_min));
  rep.set("deepest_decade_deviation", JsonValue::number(c.deepest_deviation));
  rep.set("coefficient_witness", report_detail::witness_json(c.coefficient_witness));
  JsonValue tvar = JsonValue::object();
  tvar.set("leading_coefficient", JsonValue::integer(c.ell_q));
  tvar.set("remainder_constant", JsonValue::number(c.remainder_constant));
  rep.set("t_variable", std::move(tvar));
  JsonValue svar = JsonValue::object();
  svar.set("leading_coefficient", JsonValue::integer(c.ell_q));
  svar.set("remainder_constant", JsonValue::number(c.remainder_constant_s));
  rep.set("s_variable", std::move(svar));
  rep.set("remainder_decade_max", report_detail::doubles_json(c.remainder_decade_max));
  rep.set("det_H", expansion_to_json(c.det_H));
  report_detail::Checks checks;
  checks.add("remainder-bounded-trend", true, c.trend_ok);
  checks.add("coefficient-approaches-ell",
             true, c.deepest_deviation <= 0.1 * std::max(1.0, static_cast<double>(c.ell_q)));
  report_detail::finish_report(rep, checks, c.grid, tol);
  return rep;
}

inline JsonValue report_theorem1(const Theorem1Report& t, const Tolerances& tol) {
  JsonValue rep = JsonValue::object();
  rep.set("command", JsonValue::string("curvature"));
  rep.set("nu", JsonValue::integer(t.nu));
  rep.set("accepted_samples", JsonValue::integer(t.accepted));
  rep.set("rejected_samples", JsonValue::integer(static_cast<long long>(t.rejections.size())));
  rep.set("min_eigenvalue", JsonValue::number(t.min_eigenvalue));
  rep.set("negativity_flagged", JsonValue::boolean(t.negativity_flagged));
  rep.set("C_upper", JsonValue::number(t.C_upper));
  rep.set("C_upper_witness", report_detail::witness_json(t.c_upper_witness));
  rep.set("scaled_decade_max", report_detail::doubles_json(t.decade_max));
  rep.set("max_trace_rel_dev", JsonValue::number(t.max_trace_rel_dev));
  rep.set("max_cancellation_rel_dev", JsonValue::number(t.max_cancellation_rel_dev));
  rep.set("max_herm_residual", JsonValue::number(t.max_herm_residual));
  JsonValue rejects = JsonValue::array();
  for (const auto& r : t.rejections) {
    JsonValue o = JsonValue::object();
    o.set("rho", JsonValue::number(r.rho));
    o.set("theta", JsonValue::number(r.theta));
    o.set("reason", JsonValue::string(r.reason));
    rejects.push(std::move(o));
  }
  rep.set("rejections", std::move(rejects));
  report_detail::Checks checks;
  checks.add("trace-identity", true, t.trace_ok);
  checks.add("pole-factor-cancellation", true, t.cancellation_ok);
  checks.add("upper-bound-trend", true, t.trend_ok);
  checks.add("semi-positivity", false, !t.negativity_flagged);
  report_detail::finish_report(rep, checks, t.grid, tol);
  return rep;
}

inline JsonValue report_goodness(const GoodnessReport& g, const Tolerances& tol) {
  JsonValue rep = JsonValue::object();
  rep.set("command", JsonValue::string("goodness"));
  rep.set("ell", JsonValue::integer(g.ell));
  auto bound = [](const ScaledBound& b) {
    JsonValue o = JsonValue::object();
    o.set("constant", JsonValue::number(b.constant));
    o.set("witness", report_detail::witness_json(b.witness));
    o.set("decade_max", report_detail::doubles_json(b.decade_max));
    o.set("trend_ok", JsonValue::boolean(b.trend_ok));
    return o;
  };
  rep.set("det_upper", bound(g.det_upper));
  rep.set("det_inverse", bound(g.det_inverse));
  rep.set("grad", bound(g.grad));
  rep.set("hess", bound(g.hess));
  rep.set("matrix1_strong", bound(g.matrix1_strong));
  rep.set("matrix1_weak", bound(g.matrix1_weak));
  rep.set("matrix2_strong", bound(g.matrix2_strong));
  rep.set("matrix2_weak", bound(g.matrix2_weak));
  rep.set("growth_exponent_m1", JsonValue::number(g.growth_exponent_m1));
  rep.set("growth_exponent_m2", JsonValue::number(g.growth_exponent_m2));
  rep.set("rejected_samples", JsonValue::integer(g.rejected));
  report_detail::Checks checks;
  checks.add("det-upper-trend", true, g.det_upper.trend_ok);
  checks.add("det-inverse-trend", true, g.det_inverse.trend_ok);
  checks.add("grad-trend", true, g.grad.trend_ok);
  checks.add("hess-trend", true, g.hess.trend_ok);
  // Whether the matrix-level metric is good is open; outcomes are recorded.
  checks.add("matrix1-strong-trend", false, g.matrix1_strong.trend_ok);
  checks.add("matrix1-weak-trend", false, g.matrix1_weak.trend_ok);
  checks.add("matrix2-strong-trend", false, g.matrix2_strong.trend_ok);
  checks.add("matrix2-weak-trend", false, g.matrix2_weak.trend_ok);
  report_detail::finish_report(rep, checks, g.grid, tol);
  return rep;
}

inline JsonValue bclass_json(const BClassReport& b) {
  JsonValue o = JsonValue::object();
  o.set("member", JsonValue::boolean(b.member));
  JsonValue off = JsonValue::array();
  for (const auto& issue : b.offending) {
    JsonValue io = JsonValue::object();
    io.set("p", JsonValue::string(to_string(issue.p)));
    io.set("q", JsonValue::string(to_string(issue.q)));
    io.set("ell", JsonValue::integer(issue.ell));
    io.set("reason", JsonValue::string(issue.reason));
    off.push(std::move(io));
  }
  o.set("offending_terms", std::move(off));
  o.set("r", b.r ? JsonValue::string(to_string(*b.r)) : JsonValue());
  return o;
}

inline JsonValue report_bclass(const BClassReport& det_class, const Prop51Report* prop,
                               const Grid& grid, const Tolerances& tol) {
  JsonValue rep = JsonValue::object();
  rep.set("command", JsonValue::string("bclass"));
  rep.set("det_class", bclass_json(det_class));
  report_detail::Checks checks;
  checks.add("bclass-membership", true, det_class.member);
  if (prop) {
    JsonValue po = JsonValue::object();
    JsonValue entries = JsonValue::array();
    for (const auto& [idx, ok] : prop->entry_member) {
      JsonValue eo = JsonValue::object();
      eo.set("row", JsonValue::integer(idx.first));
      eo.set("col", JsonValue::integer(idx.second));
      eo.set("member", JsonValue::boolean(ok));
      entries.push(std::move(eo));
    }
    po.set("entry_membership", std::move(entries));
    po.set("r", prop->r ? JsonValue::string(to_string(*prop->r)) : JsonValue());
    po.set("C_bound", JsonValue::number(prop->C_bound));
    po.set("C_bound_witness", report_detail::witness_json(prop->c_bound_witness));
    po.set("scaled_decade_max", report_detail::doubles_json(prop->decade_max));
    po.set("trend_ok", JsonValue::boolean(prop->trend_ok));
    po.set("growth_exponent", JsonValue::number(prop->growth_exponent));
    po.set("min_neg_hess", JsonValue::number(prop->min_neg_hess));
    po.set("C_endo", JsonValue::number(prop->C_endo));
    po.set("endo_scaled_decade_max", report_detail::doubles_json(prop->endo_decade_max));
    po.set("endo_trend_ok", JsonValue::boolean(prop->endo_trend_ok));
    po.set("rejected_samples", JsonValue::integer(prop->rejected));
    rep.set("sharpened_bound", std::move(po));
    checks.add("entries-in-class", true, prop->entries_member);
    // The sharpened bound at r = (min positive weight)/2 can genuinely grow
    // by log factors; constants and trends are recorded, not asserted.
    checks.add("sharpened-hess-bound-trend", false, prop->trend_ok);
    checks.add("sharpened-endo-bound-trend", false, prop->endo_trend_ok);
    checks.add("hess-semi-positivity", false, prop->min_neg_hess >= -1e-12);
  }
  report_detail::finish_report(rep, checks, grid, tol);
  return rep;
}

struct OrbitOutcome {
  SingleValuedness sv;
  Expansion raw;
  Expansion normalized;
  bool has_leading = false;
  LeadingAsymptotics leading;
  std::string leading_error;
  int n = 0;
  bool reality = false;
};

inline JsonValue report_orbit(const OrbitOutcome& o, const Tolerances& tol) {
  JsonValue rep = JsonValue::object();
  rep.set("command", JsonValue::string("orbit"));
  rep.set("single_valued", JsonValue::boolean(o.sv.ok));
  rep.set("max_deviation", JsonValue::number(o.sv.max_deviation));
  if (!o.sv.ok) {
    JsonValue w = JsonValue::object();
    w.set("j", JsonValue::integer(o.sv.witness_j));
    w.set("k", JsonValue::integer(o.sv.witness_k));
    w.set("m", JsonValue::integer(o.sv.witness_m));
    w.set("a", JsonValue::integer(o.sv.witness_a));
    rep.set("witness", std::move(w));
  }
  report_detail::Checks checks;
  checks.add("single-valuedness", true, o.sv.ok);
  if (o.sv.ok) {
    rep.set("expansion_raw", expansion_to_json(o.raw));
    rep.set("expansion_normalized", expansion_to_json(o.normalized));
    rep.set("normalization",
            JsonValue::string("normalized output is i^(n^2) times the raw pairing, n = " +
                              std::to_string(o.n)));
    checks.add("real-valued-after-normalization", true, o.reality);
    if (o.has_leading) {
      JsonValue lo = JsonValue::object();
      lo.set("a", JsonValue::string(to_string(o.leading.a)));
      lo.set("ell", JsonValue::integer(o.leading.ell));
      lo.set("c", JsonValue::number(o.leading.c));
      rep.set("leading", std::move(lo));
    } else {
      rep.set("leading_error", JsonValue::string(o.leading_error));
    }
    checks.add("leading-extraction", true, o.has_leading);
  }
  rep.set("checks", checks.take());
  rep.set("pass", JsonValue::boolean(checks.all_pass()));
  rep.set("tolerances", report_detail::tolerances_json(tol));
  return rep;
}

inline JsonValue report_torsion(const TorsionReport& t, const Tolerances& tol) {
  JsonValue rep = JsonValue::object();
  rep.set("command", JsonValue::string("torsion"));
  rep.set("ell_alt", JsonValue::integer(t.asym.ell_alt));
  rep.set("anomaly_r", JsonValue::string(to_string(t.asym.anomaly_r)));
  rep.set("nu_lcm", JsonValue::integer(t.nu_lcm));
  JsonValue degrees = JsonValue::array();
  for (const auto& d : t.degrees) {
    JsonValue o = JsonValue::object();
    o.set("q", JsonValue::integer(d.q));
    o.set("nu", JsonValue::integer(d.nu));
    o.set("cover_power", JsonValue::integer(d.cover_power));
    o.set("ell", JsonValue::integer(d.ell));
    degrees.push(std::move(o));
  }
  rep.set("per_degree", std::move(degrees));
  rep.set("deviation_max", JsonValue::number(t.deviation_max));
  rep.set("deviation_witness", report_detail::witness_json(t.deviation_witness));
  rep.set("deviation_decade_max", report_detail::doubles_json(t.deviation_decade_max));
  rep.set("combination_decade_max", report_detail::doubles_json(t.combination_decade_max));
  rep.set("anomaly_note", JsonValue::string(t.anomaly_note));
  rep.set("profile_template", JsonValue::string(t.template_note));
  rep.set("disclaimer", JsonValue::string(t.disclaimer));
  report_detail::Checks checks;
  checks.add("combination-approaches-ell-alt-trend", true, t.trend_ok);
  report_detail::finish_report(rep, checks, t.grid, tol);
  return rep;
}

inline JsonValue report_selftest(const SelftestReport& s) {
  JsonValue rep = JsonValue::object();
  rep.set("command", JsonValue::string("selftest"));
  rep.set("seed", JsonValue::integer(static_cast<long long>(s.seed)));
  JsonValue checks = JsonValue::array();
  for (const auto& c : s.checks) {
    JsonValue o = JsonValue::object();
    o.set("name", JsonValue::string(c.name));
    o.set("pass", JsonValue::boolean(c.pass));
    o.set("metric", JsonValue::number(c.metric));
    if (!c.detail.empty()) o.set("detail", JsonValue::string(c.detail));
    checks.push(std::move(o));
  }
  rep.set("checks", std::move(checks));
  rep.set("pass", JsonValue::boolean(s.all_pass));
  rep.set("grid", report_detail::grid_json(make_grid(s.sweep)));
  rep.set("tolerances", report_detail::tolerances_json(s.tol));
  return rep;
}

// ---------------------------------------------------------------------------
// CSV sample dumps.

namespace report_detail {

inline void csv_row(std::string& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(',');
    out += fmt_g17(values[i]);
  }
  out.push_back('\n');
}

}  // namespace report_detail

inline std::string csv_poincare(const Expansion& g, const PoincareProfile& p) {
  std::string out = "rho,theta,g,grad_scaled,hess_remainder_scaled\n";
  const RatioForm grad = grad_log(g);
  const RatioForm hess = hess_log(g);
  for (double theta : p.grid.angles) {
    for (double rho : p.grid.radii) {
      const Cx t = sample_point(rho, theta);
      const double lam = log_scale(rho);
      const double rem = std::abs(eval_ratio(hess, t).real() + p.ell / (rho * rho * lam * lam)) *
                         rho * rho * lam * lam * lam;
      report_detail::csv_row(out, {rho, theta, eval(g, t).real(),
                                   std::abs(eval_ratio(grad, t)) * rho * lam, rem});
    }
  }
  return out;
}

inline std::string csv_chern(const ChernAsymptotics& c) {
  std::string out = "rho,theta,coefficient,remainder_scaled\n";
  const RatioForm hess = hess_log(c.det_H);
  for (double theta : c.grid.angles) {
    for (double rho : c.grid.radii) {
      const Cx t = sample_point(rho, theta);
      const double lam = log_scale(rho);
      const double coef = chern_coefficient(hess, t);
      const double rem = std::abs(coef - c.ell_q) * lam;
      report_detail::csv_row(out, {rho, theta, coef, rem});
    }
  }
  return out;
}

inline std::string csv_curvature(const Theorem1Report& t) {
  std::string out = "rho,theta,accepted,condition,eigenvalues...,trace,trace_expected,scaled_max\n";
  for (const auto& [pt, s] : t.samples) {
    const double rho = std::abs(pt);
    const double lam = log_scale(rho);
    std::vector<double> row{rho, std::arg(pt), s.accepted ? 1.0 : 0.0, s.condition};
    for (double e : s.eigenvalues) row.push_back(e);
    row.push_back(s.trace);
    row.push_back(s.trace_expected);
    row.push_back(s.eigenvalues.empty() ? 0.0 : s.eigenvalues.back() * rho * rho * lam * lam);
    report_detail::csv_row(out, row);
  }
  return out;
}

inline std::string csv_goodness(const GoodnessReport& g) {
  std::string out =
      "rho,theta,det_scaled,det_inv_scaled,grad_scaled,hess_scaled,matrix_ok,m1_strong,m1_weak,"
      "m2_strong,m2_weak\n";
  for (const auto& row : g.rows)
    report_detail::csv_row(out, {row.rho, row.theta, row.det_scaled, row.det_inv_scaled,
                                 row.grad_scaled, row.hess_scaled, row.matrix_ok ? 1.0 : 0.0,
                                 row.m1_strong, row.m1_weak, row.m2_strong, row.m2_weak});
  return out;
}

inline std::string csv_prop51(const Prop51Report& p) {
  std::string out = "rho,theta,neg_hess,hess_scaled,endo_ok,endo_scaled\n";
  for (const auto& row : p.rows)
    report_detail::csv_row(out, {row.rho, row.theta, row.neg_hess, row.hess_scaled,
                                 row.endo_ok ? 1.0 : 0.0, row.endo_scaled});
  return out;
}

inline std::string csv_torsion(const TorsionReport& t) {
  std::string out = "rho,theta,combination,deviation\n";
  std::vector<RatioForm> hess;
  hess.reserve(t.degrees.size());
  for (const auto& d : t.degrees) hess.push_back(hess_log(d.chern.det_H));
  for (double theta : t.grid.angles) {
    for (double rho : t.grid.radii) {
      const Cx u = sample_point(rho, theta);
      double combo = 0.0;
      for (std::size_t i = 0; i < hess.size(); ++i)
        combo += (t.degrees[i].q % 2 == 0 ? 1.0 : -1.0) * chern_coefficient(hess[i], u);
      report_detail::csv_row(
          out, {rho, theta, combo, std::abs(combo - static_cast<double>(t.asym.ell_alt))});
    }
  }
  return out;
}

}  // namespace asymptote
