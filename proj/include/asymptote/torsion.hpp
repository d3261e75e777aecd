#pragma once

#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "asymptote/errors.hpp"
#include "asymptote/expansion.hpp"
#include "asymptote/log_calculus.hpp"
#include "asymptote/metric.hpp"
#include "asymptote/rational.hpp"
#include "asymptote/sweep.hpp"

namespace asymptote {

struct TorsionAsymptotics {
  long long ell_alt = 0;  // sum_q (-1)^q ell_q
  Rational anomaly_r;     // declared remainder exponent, > 0
  std::vector<std::pair<int, int>> per_degree;  // (q, ell_q)
};

inline long long alternating_ell(const std::vector<std::pair<int, int>>& ells) {
  std::set<int> seen;
  long long sum = 0;
  for (const auto& [q, ell] : ells) {
    if (q < 0 || ell < 0) throw precondition_error("degrees and log orders must be non-negative");
    if (!seen.insert(q).second)
      throw precondition_error("duplicate degree q=" + std::to_string(q));
    sum += q % 2 == 0 ? ell : -ell;
  }
  return sum;
}

struct TorsionDegreeInfo {
  int q = 0;
  int nu = 1;
  int cover_power = 1;  // nu_lcm / nu
  int ell = 0;
  ChernAsymptotics chern;
};

struct TorsionReport {
  TorsionAsymptotics asym;
  int nu_lcm = 1;
  std::vector<TorsionDegreeInfo> degrees;
  // Alternating scaled combination A(u) = sum_q (-1)^q (-hess_log det H_q) |u|^2 Lambda^2,
  // swept on the common cover; it should tend to ell_alt.
  double deviation_max = 0.0;
  Witness deviation_witness;
  std::vector<double> deviation_decade_max;
  std::vector<double> combination_decade_max;  // max |A| per decade
  bool trend_ok = true;
  std::string anomaly_note;
  std::string template_note;
  std::string disclaimer;
  Grid grid;
};

// Aggregates per-degree Chern asymptotics into the torsion-Hessian profile.
// Models with different nu are pulled to the common cover u with
// s = u^{lcm(nu_q)}; the scaled leading coefficient is invariant under that
// substitution, so the alternating combination is comparable on the cover.
// The declared anomaly remainder exponent is echoed, never computed.
inline TorsionReport torsion_hessian_profile(
    const std::vector<std::pair<int, SemistableModel>>& models, const Rational& anomaly_r,
    const Grid& grid, const Tolerances& tol = {}) {
  if (models.empty()) throw precondition_error("torsion profile needs at least one model");
  if (!(anomaly_r > 0)) throw precondition_error("anomaly exponent r must be positive");
  TorsionReport report;
  report.grid = grid;
  report.asym.anomaly_r = anomaly_r;

  long long lcm = 1;
  int max_n = 0;
  for (const auto& [q, model] : models) {
    model.validate();
    lcm = std::lcm(lcm, static_cast<long long>(model.nu));
    max_n = std::max(max_n, model.n);
  }
  report.nu_lcm = static_cast<int>(lcm);

  std::vector<RatioForm> hess_per_model;
  std::vector<int> sign_per_model;
  for (const auto& [q, model] : models) {
    TorsionDegreeInfo info;
    info.q = q;
    info.nu = model.nu;
    info.cover_power = static_cast<int>(lcm / model.nu);
    SemistableModel cover;
    cover.nu = report.nu_lcm;
    cover.e.reserve(model.e.size());
    for (long long ea : model.e) cover.e.push_back(ea * info.cover_power);
    cover.H = pullback_metric(model.H, info.cover_power);
    cover.n = model.n;
    info.chern = chern_asymptotics(cover, grid, tol);
    info.ell = info.chern.ell_q;
    // Pullback must not change the leading log order.
    if (log_class_profile(det_expansion(model.H)) != info.ell)
      throw precondition_error("cover pullback changed the leading log order");
    hess_per_model.push_back(hess_log(info.chern.det_H));
    sign_per_model.push_back(q % 2 == 0 ? 1 : -1);
    report.asym.per_degree.emplace_back(q, info.ell);
    report.degrees.push_back(std::move(info));
  }
  report.asym.ell_alt = alternating_ell(report.asym.per_degree);

  TrendTracker dev_trend(grid.decades);
  TrendTracker abs_trend(grid.decades);
  for (double theta : grid.angles) {
    for (std::size_t r = 0; r < grid.radii.size(); ++r) {
      const double rho = grid.radii[r];
      const Cx u = sample_point(rho, theta);
      double combo = 0.0;
      for (std::size_t i = 0; i < hess_per_model.size(); ++i)
        combo += sign_per_model[i] * chern_coefficient(hess_per_model[i], u);
      const double dev = std::abs(combo - static_cast<double>(report.asym.ell_alt));
      report.deviation_witness.offer(rho, theta, dev);
      dev_trend.record(grid.decade[r], dev);
      abs_trend.record(grid.decade[r], std::abs(combo));
    }
  }
  report.deviation_max = report.deviation_witness.value;
  report.deviation_decade_max = dev_trend.max_per_decade();
  report.combination_decade_max = abs_trend.max_per_decade();
  report.trend_ok = dev_trend.ok(tol.trend_pct);
  report.anomaly_note =
      "declared remainder class O(|s|^(2r-2) (-log|s|)^n) with r = " + to_string(anomaly_r) +
      ", n = " + std::to_string(max_n) + "; the fiberwise integral behind it is not computed";
  report.template_note =
      "profile template: alpha log|s|^2 - (" + std::to_string(report.asym.ell_alt) +
      ") log(-log|s|^2) + gamma; alpha and gamma are not computed by this tool";
  report.disclaimer =
      "the torsion expansion additionally assumes an algebraicity hypothesis on the family; "
      "recorded, not checked";
  return report;
}

}  // namespace asymptote
