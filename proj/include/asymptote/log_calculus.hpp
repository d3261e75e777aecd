#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "asymptote/errors.hpp"
#include "asymptote/expansion.hpp"
#include "asymptote/json_writer.hpp"
#include "asymptote/sweep.hpp"

namespace asymptote {

// Exact numerator/denominator pair of expansions. Log terms obstruct
// closed-form inversion inside the algebra, so logarithmic derivatives are
// carried as ratios and divided only at evaluation time.
struct RatioForm {
  Expansion num;
  Expansion den;
};

inline Cx eval_ratio(const RatioForm& r, Cx t) {
  const Cx d = eval(r.den, t);
  if (d == Cx(0.0, 0.0)) throw precondition_error("ratio denominator vanishes at sample point");
  return eval(r.num, t) / d;
}

// d/dt log g as the exact ratio (d/dt g) / g.
inline RatioForm grad_log(const Expansion& g) {
  if (g.empty()) throw precondition_error("grad_log of empty expansion");
  return RatioForm{d_dt(g), g};
}

// dd-bar log g as the exact ratio (g * dd-bar g - (d g)(conj d g)) / g^2.
inline RatioForm hess_log(const Expansion& g) {
  if (g.empty()) throw precondition_error("hess_log of empty expansion");
  const Expansion gt = d_dt(g);
  const Expansion num = sub(mul(g, d_dtbar(gt)), mul(gt, conj_expansion(gt)));
  return RatioForm{num, mul(g, g)};
}

// Pure-log class: g = sum_i (log|t|^2)^i phi_i(t) with smooth jets phi_i,
// i.e. every term has integer exponents p, q >= 0. Returns the maximal log
// power with phi_i(0) != 0.
inline int log_class_profile(const Expansion& g) {
  if (g.empty()) throw precondition_error("log_class_profile of empty expansion");
  int ell = -1;
  for (const auto& [k, c] : g.terms()) {
    if (!is_integer(k.p) || !is_integer(k.q) || k.p < 0 || k.q < 0)
      throw precondition_error("expansion outside the pure-log class: term p=" + to_string(k.p) +
                               " q=" + to_string(k.q));
    if (k.p == 0 && k.q == 0) ell = std::max(ell, k.ell);
  }
  if (ell < 0)
    throw precondition_error(
        "all phi_i(0) vanish: leading log order not determined at this truncation");
  return ell;
}

// All scaled quantities use the log scale Lambda := -log|t|^2 (= -log of the
// squared modulus). The gradient scale is |t| Lambda, the Hessian scale
// |t|^2 Lambda^2, and the Hessian remainder is weighted by |t|^2 Lambda^3.
inline double log_scale(double rho) { return -2.0 * std::log(rho); }

struct PoincareProfile {
  int ell = 0;
  double C_grad = 0.0;
  double C_hess = 0.0;
  Witness grad_witness;
  Witness hess_witness;
  std::vector<double> hess_decade_max;  // remainder maxima, deepest decade first
  bool trend_ok = true;
  std::vector<bool> trend_ok_per_ray;
  double max_imag_residual = 0.0;  // |Im eval(g)| relative to |Re eval(g)|
  Grid grid;
};

// Samples the scaled gradient and Hessian-remainder quantities over the grid.
// Aborts with a positivity error if g is not positive at some sample.
inline PoincareProfile verify_poincare(const Expansion& g, const Grid& grid,
                                       const Tolerances& tol = {}) {
  if (grid.angles.empty() || grid.radii.empty()) throw precondition_error("empty sample grid");
  PoincareProfile profile;
  profile.ell = log_class_profile(g);
  profile.grid = grid;
  const RatioForm grad = grad_log(g);
  const RatioForm hess = hess_log(g);
  TrendTracker overall(grid.decades);
  for (std::size_t a = 0; a < grid.angles.size(); ++a) {
    const double theta = grid.angles[a];
    TrendTracker per_ray(grid.decades);
    for (std::size_t r = 0; r < grid.radii.size(); ++r) {
      const double rho = grid.radii[r];
      const Cx t = sample_point(rho, theta);
      const Cx gval = eval(g, t);
      const double scale = std::abs(gval.real()) + 1e-300;
      profile.max_imag_residual = std::max(profile.max_imag_residual, std::abs(gval.imag()) / scale);
      if (!(gval.real() > 0.0))
        throw precondition_error("positivity failure at rho=" + fmt_g9(rho) +
                                 " theta=" + fmt_g9(theta) + ": g=" + fmt_g9(gval.real()));
      const double lam = log_scale(rho);
      const double grad_scaled = std::abs(eval_ratio(grad, t)) * rho * lam;
      const double hess_val = eval_ratio(hess, t).real();
      const double remainder =
          std::abs(hess_val + profile.ell / (rho * rho * lam * lam)) * rho * rho * lam * lam * lam;
      profile.grad_witness.offer(rho, theta, grad_scaled);
      profile.hess_witness.offer(rho, theta, remainder);
      per_ray.record(grid.decade[r], remainder);
      overall.record(grid.decade[r], remainder);
    }
    profile.trend_ok_per_ray.push_back(per_ray.ok(tol.trend_pct));
  }
  profile.C_grad = profile.grad_witness.value;
  profile.C_hess = profile.hess_witness.value;
  profile.hess_decade_max = overall.max_per_decade();
  profile.trend_ok = overall.ok(tol.trend_pct);
  for (bool ok : profile.trend_ok_per_ray) profile.trend_ok = profile.trend_ok && ok;
  return profile;
}

// Leading behavior g ~ exp(c) |t|^(2a) Lambda^ell near the puncture.
struct LeadingAsymptotics {
  Rational a;
  int ell = 0;
  double c = 0.0;
};

inline LeadingAsymptotics leading_asymptotics(const Expansion& g) {
  const auto [w, ell] = weight_and_logorder(g);
  const Rational half_w = w / 2;
  Cx lead(0.0, 0.0);
  for (const auto& [k, c] : g.terms()) {
    if (k.p + k.q != w) break;
    if (k.ell != ell) continue;
    if (k.p != k.q)
      throw precondition_error("leading term oscillates in arg t (p != q): not a squared norm");
    lead = c;
  }
  // Stored coefficients multiply (log|t|^2)^ell = (-Lambda)^ell; flip to the
  // positive-scale basis before the sign check.
  if (ell % 2 != 0) lead = -lead;
  if (std::abs(lead.imag()) > 1e-12 * std::abs(lead) || !(lead.real() > 0.0))
    throw precondition_error("leading coefficient is not real positive: not a squared norm");
  return LeadingAsymptotics{half_w, ell, std::log(lead.real())};
}

}  // namespace asymptote
