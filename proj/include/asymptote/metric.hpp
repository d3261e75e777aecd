#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "asymptote/errors.hpp"
#include "asymptote/expansion.hpp"
#include "asymptote/json_writer.hpp"
#include "asymptote/log_calculus.hpp"
#include "asymptote/sweep.hpp"

namespace asymptote {

enum class Var { s, t };

inline const char* var_name(Var v) { return v == Var::s ? "s" : "t"; }

// Hermitian matrix of expansions. Entries must satisfy the conjugation
// symmetry exactly, term by term (which also forces real diagonals).
struct MetricExpansion {
  int dim = 0;
  Var var = Var::t;
  std::vector<std::vector<Expansion>> entries;

  void validate() const {
    if (dim <= 0 || static_cast<int>(entries.size()) != dim)
      throw precondition_error("metric matrix has inconsistent dimension");
    for (const auto& row : entries)
      if (static_cast<int>(row.size()) != dim)
        throw precondition_error("metric matrix has ragged rows");
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        if (!(entries[b][a] == conj_expansion(entries[a][b])))
          throw precondition_error("metric matrix is not Hermitian-symmetric at entry (" +
                                   std::to_string(a + 1) + "," + std::to_string(b + 1) + ")");
  }

  int max_log_power() const {
    int m = 0;
    for (const auto& row : entries)
      for (const auto& e : row)
        for (const auto& [k, c] : e.terms()) m = std::max(m, k.ell);
    return m;
  }
};

// Base-change data: G(t^nu) = diag(t^-e) H(t) conj(diag(t^-e)) with H a
// log-polyhomogeneous Hermitian matrix in t whose log powers are bounded by
// the fiber dimension n.
struct SemistableModel {
  int nu = 1;
  std::vector<long long> e;
  MetricExpansion H;
  int n = 0;

  int log_bound() const { return n * H.dim; }

  void validate() const {
    if (nu < 1) throw precondition_error("model requires nu >= 1");
    H.validate();
    if (H.var != Var::t) throw precondition_error("model matrix must be tagged in the t variable");
    if (static_cast<int>(e.size()) != H.dim)
      throw precondition_error("exponent vector length does not match matrix dimension");
    for (long long ea : e)
      if (ea < 0) throw precondition_error("pole exponents must be non-negative");
    if (n < 0) throw precondition_error("log power bound n must be non-negative");
    if (H.max_log_power() > n)
      throw precondition_error("matrix entry exceeds the log power bound n");
  }
};

// G_{ab} = t^{-e_a} conj(t)^{-e_b} H_{ab}; Hermitian symmetry is preserved.
inline MetricExpansion assemble_G(const SemistableModel& model) {
  model.validate();
  MetricExpansion G;
  G.dim = model.H.dim;
  G.var = Var::t;
  G.entries.assign(G.dim, std::vector<Expansion>(G.dim));
  for (int a = 0; a < G.dim; ++a) {
    for (int b = 0; b < G.dim; ++b) {
      Expansion mono;
      mono.add_term(Rational(-model.e[a]), Rational(-model.e[b]), 0, Cx(1.0, 0.0));
      G.entries[a][b] = mul(model.H.entries[a][b], mono);
    }
  }
  return G;
}

// Determinant by signed permutation expansion, exact in the algebra.
// Dimension is capped: beyond 6 the permutation sum is not worth it.
inline Expansion det_expansion(const MetricExpansion& M) {
  if (M.dim > 6) throw precondition_error("det_expansion supports dim <= 6");
  M.validate();
  std::vector<int> perm(M.dim);
  std::iota(perm.begin(), perm.end(), 0);
  Expansion det;
  do {
    int inversions = 0;
    for (int i = 0; i < M.dim; ++i)
      for (int j = i + 1; j < M.dim; ++j)
        if (perm[i] > perm[j]) ++inversions;
    Expansion prod;
    prod.add_term(Rational(0), Rational(0), 0, Cx(1.0, 0.0));
    for (int i = 0; i < M.dim; ++i) prod = mul(prod, M.entries[i][perm[i]]);
    det = add(det, inversions % 2 == 0 ? prod : neg(prod));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

inline MetricExpansion pullback_metric(const MetricExpansion& M, int nu) {
  MetricExpansion out;
  out.dim = M.dim;
  out.var = Var::t;
  out.entries.assign(M.dim, std::vector<Expansion>(M.dim));
  for (int a = 0; a < M.dim; ++a)
    for (int b = 0; b < M.dim; ++b) out.entries[a][b] = pullback_power(M.entries[a][b], nu);
  return out;
}

// ---------------------------------------------------------------------------
// First Chern form asymptotics of det H.

struct ChernAsymptotics {
  int ell_q = 0;
  int nu = 1;
  double coefficient_max = 0.0;  // max over samples of -hess_log(det H) |t|^2 Lambda^2
  double coefficient_min = 0.0;
  double deepest_deviation = 0.0;  // max |coefficient - ell_q| over the deepest decade
  double remainder_constant = 0.0;       // Poincare remainder constant, t variable
  double remainder_constant_s = 0.0;     // transported to s: nu * (t value)
  bool trend_ok = true;
  std::vector<double> remainder_decade_max;
  Witness coefficient_witness;
  Expansion det_H;
  Grid grid;
};

// Scaled Chern coefficient -hess_log(g) |t|^2 Lambda^2 at a point.
inline double chern_coefficient(const RatioForm& hess, Cx t) {
  const double rho = std::abs(t);
  const double lam = log_scale(rho);
  return -eval_ratio(hess, t).real() * rho * rho * lam * lam;
}

inline ChernAsymptotics chern_asymptotics(const SemistableModel& model, const Grid& grid,
                                          const Tolerances& tol = {}) {
  model.validate();
  ChernAsymptotics out;
  out.nu = model.nu;
  out.det_H = det_expansion(model.H);
  if (out.det_H.empty()) throw precondition_error("det H is identically zero");
  {
    int max_ell = 0;
    for (const auto& [k, c] : out.det_H.terms()) max_ell = std::max(max_ell, k.ell);
    if (max_ell > model.log_bound())
      throw precondition_error("det H exceeds the log power bound n*dim");
  }
  out.ell_q = log_class_profile(out.det_H);
  // The Poincare profile also enforces positivity of det H over the grid.
  PoincareProfile profile = verify_poincare(out.det_H, grid, tol);
  out.remainder_constant = profile.C_hess;
  // Transport to the base variable: the leading 1/(|s|^2 Lambda^2) coefficient
  // is invariant under s = t^nu, the next-order remainder scales by nu.
  out.remainder_constant_s = model.nu * profile.C_hess;
  out.trend_ok = profile.trend_ok;
  out.remainder_decade_max = profile.hess_decade_max;
  out.grid = grid;
  const RatioForm hess = hess_log(out.det_H);
  double cmin = 0.0, cmax = 0.0;
  bool first = true;
  for (double theta : grid.angles) {
    for (std::size_t r = 0; r < grid.radii.size(); ++r) {
      const double rho = grid.radii[r];
      const double coef = chern_coefficient(hess, sample_point(rho, theta));
      if (first || coef > cmax) cmax = coef;
      if (first || coef < cmin) cmin = coef;
      first = false;
      out.coefficient_witness.offer(rho, theta, std::abs(coef));
      if (grid.decade[r] == 0)
        out.deepest_deviation = std::max(out.deepest_deviation, std::abs(coef - out.ell_q));
    }
  }
  out.coefficient_max = cmax;
  out.coefficient_min = cmin;
  return out;
}

// ---------------------------------------------------------------------------
// Curvature endomorphism samples.

using CMat = Eigen::MatrixXcd;

struct CurvatureSample {
  Cx t;
  bool accepted = false;
  std::string reject_reason;
  std::vector<double> eigenvalues;  // ascending
  double trace = 0.0;               // Re tr of the curvature endomorphism
  double trace_expected = 0.0;      // -hess_log(det G) at the point
  double herm_residual = 0.0;       // relative asymmetry after congruence
  double condition = 0.0;
};

// Precomputed entrywise derivatives of G; evaluation is then pointwise.
// G^{-1} is never formed in the expansion algebra.
struct CurvatureOperator {
  int dim = 0;
  std::vector<std::vector<Expansion>> G, Gt, Gtb, Gttb;
  Expansion det_G;
  Expansion det_H;
  RatioForm hess_det_G;
  RatioForm hess_det_H;

  static CurvatureOperator build(const SemistableModel& model) {
    CurvatureOperator op;
    MetricExpansion G = assemble_G(model);
    op.dim = G.dim;
    op.G = G.entries;
    op.Gt.assign(op.dim, std::vector<Expansion>(op.dim));
    op.Gtb.assign(op.dim, std::vector<Expansion>(op.dim));
    op.Gttb.assign(op.dim, std::vector<Expansion>(op.dim));
    for (int a = 0; a < op.dim; ++a) {
      for (int b = 0; b < op.dim; ++b) {
        op.Gt[a][b] = d_dt(G.entries[a][b]);
        op.Gtb[a][b] = d_dtbar(G.entries[a][b]);
        op.Gttb[a][b] = d_dtbar(op.Gt[a][b]);
      }
    }
    op.det_G = det_expansion(G);
    op.det_H = det_expansion(model.H);
    op.hess_det_G = hess_log(op.det_G);
    op.hess_det_H = hess_log(op.det_H);
    return op;
  }

  CMat eval_matrix(const std::vector<std::vector<Expansion>>& m, Cx t) const {
    CMat out(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) out(a, b) = eval(m[a][b], t);
    return out;
  }
};

inline constexpr double kConditionCap = 1e12;

// Evaluates the curvature endomorphism i*R = -(ddbar G G^-1 - dG G^-1 dbarG G^-1)
// at t, with eigenvalues taken after congruence by the positive square root of
// G. Samples where G is numerically indefinite or too ill-conditioned are
// rejected with a diagnostic instead of silently symmetrized.
inline CurvatureSample curvature_sample(const CurvatureOperator& op, Cx t,
                                        double cond_cap = kConditionCap) {
  CurvatureSample s;
  s.t = t;
  const CMat Gm = op.eval_matrix(op.G, t);
  Eigen::SelfAdjointEigenSolver<CMat> es(Gm);
  const Eigen::VectorXd lam = es.eigenvalues();
  const double lam_min = lam(0), lam_max = lam(lam.size() - 1);
  if (!(lam_min > 0.0)) {
    s.reject_reason = "metric not positive definite (min eigenvalue " + fmt_g9(lam_min) + ")";
    return s;
  }
  s.condition = lam_max / lam_min;
  if (s.condition > cond_cap) {
    s.reject_reason = "metric condition number " + fmt_g9(s.condition) + " exceeds cap";
    return s;
  }
  const CMat U = es.eigenvectors();
  const CMat Ginv = U * lam.cwiseInverse().asDiagonal() * U.adjoint();
  const CMat S = U * lam.cwiseSqrt().asDiagonal() * U.adjoint();
  const CMat Sinv = U * lam.cwiseSqrt().cwiseInverse().asDiagonal() * U.adjoint();
  const CMat Gt = op.eval_matrix(op.Gt, t);
  const CMat Gtb = op.eval_matrix(op.Gtb, t);
  const CMat Gttb = op.eval_matrix(op.Gttb, t);
  const CMat A = -(Gttb * Ginv - Gt * Ginv * Gtb * Ginv);
  const CMat M = S * A * Sinv;
  s.herm_residual = (M - M.adjoint()).norm() / std::max(M.norm(), 1e-300);
  const CMat Msym = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> em(Msym);
  s.eigenvalues.assign(em.eigenvalues().data(), em.eigenvalues().data() + op.dim);
  s.trace = A.trace().real();
  s.trace_expected = -eval_ratio(op.hess_det_G, t).real();
  s.accepted = true;
  return s;
}

inline CurvatureSample curvature_at(const SemistableModel& model, Cx t,
                                    double cond_cap = kConditionCap) {
  return curvature_sample(CurvatureOperator::build(model), t, cond_cap);
}

// ---------------------------------------------------------------------------
// Curvature bound sweep.

struct RejectedSample {
  double rho = 0.0;
  double theta = 0.0;
  std::string reason;
};

struct Theorem1Report {
  int nu = 1;
  int accepted = 0;
  double min_eigenvalue = 0.0;
  bool negativity_flagged = false;
  Witness min_eig_witness;  // witnesses the most negative eigenvalue
  double C_upper = 0.0;     // max over samples of lambda_max |t|^2 Lambda^2
  Witness c_upper_witness;
  std::vector<double> decade_max;
  bool trend_ok = true;
  double max_trace_rel_dev = 0.0;
  bool trace_ok = true;
  double max_cancellation_rel_dev = 0.0;
  bool cancellation_ok = true;
  double max_herm_residual = 0.0;
  std::vector<RejectedSample> rejections;
  std::vector<std::pair<Cx, CurvatureSample>> samples;
  Grid grid;
};

inline constexpr double kTraceIdentityTol = 1e-8;
inline constexpr double kCancellationTol = 1e-10;

// Sweeps curvature eigenvalues over the grid. The upper bound constant is
// reported in the scale lambda_max |t|^2 Lambda^2, which transports to the
// base variable unchanged under s = t^nu. Negative eigenvalues are flagged,
// not asserted: positivity is an imported hypothesis and synthetic inputs may
// violate it. Two identities are checked at every accepted sample:
//   trace(iR) = -hess_log(det G), and
//   hess_log(det G) = hess_log(det H)  (the t^{-e} factors cancel exactly).
inline Theorem1Report verify_theorem1(const SemistableModel& model, const Grid& grid,
                                      const Tolerances& tol = {},
                                      double cond_cap = kConditionCap) {
  model.validate();
  Theorem1Report report;
  report.nu = model.nu;
  report.grid = grid;
  const CurvatureOperator op = CurvatureOperator::build(model);
  TrendTracker trend(grid.decades);
  bool first_eig = true;
  for (double theta : grid.angles) {
    for (std::size_t r = 0; r < grid.radii.size(); ++r) {
      const double rho = grid.radii[r];
      const Cx t = sample_point(rho, theta);
      // The cancellation identity involves no matrix inversion; check it at
      // every sample, accepted or not.
      {
        const double hg = eval_ratio(op.hess_det_G, t).real();
        const double hh = eval_ratio(op.hess_det_H, t).real();
        const double rel = std::abs(hg - hh) / std::max(std::abs(hh), 1e-300);
        if (std::abs(hh) > 1e-300 || std::abs(hg) > 1e-300)
          report.max_cancellation_rel_dev = std::max(report.max_cancellation_rel_dev, rel);
      }
      CurvatureSample s = curvature_sample(op, t, cond_cap);
      if (!s.accepted) {
        report.rejections.push_back({rho, theta, s.reject_reason});
        continue;
      }
      ++report.accepted;
      const double lam = log_scale(rho);
      const double lam_min_eig = s.eigenvalues.front();
      const double lam_max_eig = s.eigenvalues.back();
      if (first_eig || lam_min_eig < report.min_eigenvalue) report.min_eigenvalue = lam_min_eig;
      first_eig = false;
      report.min_eig_witness.offer(rho, theta, -lam_min_eig);
      const double scaled = lam_max_eig * rho * rho * lam * lam;
      report.c_upper_witness.offer(rho, theta, scaled);
      trend.record(grid.decade[r], std::abs(scaled));
      const double trace_rel =
          std::abs(s.trace - s.trace_expected) / std::max(std::abs(s.trace_expected), 1e-300);
      if (std::abs(s.trace) > 1e-300 || std::abs(s.trace_expected) > 1e-300)
        report.max_trace_rel_dev = std::max(report.max_trace_rel_dev, trace_rel);
      report.max_herm_residual = std::max(report.max_herm_residual, s.herm_residual);
      report.samples.emplace_back(t, std::move(s));
    }
  }
  if (report.accepted == 0) throw precondition_error("no sample accepted in curvature sweep");
  report.C_upper = report.c_upper_witness.value;
  report.negativity_flagged = report.min_eigenvalue < -1e-12;
  report.decade_max = trend.max_per_decade();
  report.trend_ok = trend.ok(tol.trend_pct);
  report.trace_ok = report.max_trace_rel_dev <= kTraceIdentityTol;
  report.cancellation_ok = report.max_cancellation_rel_dev <= kCancellationTol;
  return report;
}

// ---------------------------------------------------------------------------
// Mumford goodness of det H and the open matrix-level bounds.

struct ScaledBound {
  double constant = 0.0;
  Witness witness;
  std::vector<double> decade_max;
  bool trend_ok = true;
};

struct GoodnessRow {
  double rho = 0, theta = 0;
  double det_scaled = 0, det_inv_scaled = 0, grad_scaled = 0, hess_scaled = 0;
  bool matrix_ok = false;
  double m1_strong = 0, m1_weak = 0, m2_strong = 0, m2_weak = 0;
};

struct GoodnessReport {
  int ell = 0;
  ScaledBound det_upper;    // det H / Lambda^ell
  ScaledBound det_inverse;  // 1 / (det H Lambda^ell)
  ScaledBound grad;         // |d log det H| |t| Lambda
  ScaledBound hess;         // |ddbar log det H| |t|^2 Lambda^2
  // Matrix quantities m1 = |dH H^-1|, m2 = |dbar(dH H^-1)| in the entrywise
  // 1-norm. The strong scales test Poincare-type bounds; the weak scales test
  // the log-power bounds. Which ones hold is recorded, not asserted.
  ScaledBound matrix1_strong;  // m1 |t| Lambda
  ScaledBound matrix1_weak;    // m1 |t| / Lambda^ell
  ScaledBound matrix2_strong;  // m2 |t|^2 Lambda^2
  ScaledBound matrix2_weak;    // m2 |t|^2 / Lambda^ell
  double growth_exponent_m1 = 0.0;  // fitted alpha in m1 |t| ~ Lambda^alpha
  double growth_exponent_m2 = 0.0;
  int rejected = 0;
  std::vector<GoodnessRow> rows;
  Grid grid;
};

namespace detail {

inline double entry_abs_sum(const CMat& m) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
  return s;
}

// Least-squares slope of log(y) against log(Lambda) over the deepest decades.
inline double fit_log_slope(const std::vector<std::pair<double, double>>& lam_y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [lam, y] : lam_y) {
    if (!(y > 0.0)) continue;
    const double x = std::log(lam), v = std::log(y);
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) return 0.0;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace detail

inline GoodnessReport mumford_goodness(const MetricExpansion& H, const Grid& grid,
                                       const Tolerances& tol = {},
                                       double cond_cap = kConditionCap) {
  H.validate();
  GoodnessReport report;
  report.grid = grid;
  const Expansion det = det_expansion(H);
  report.ell = log_class_profile(det);
  const RatioForm grad = grad_log(det);
  const RatioForm hess = hess_log(det);
  std::vector<std::vector<Expansion>> Ht(H.dim, std::vector<Expansion>(H.dim));
  std::vector<std::vector<Expansion>> Htb(H.dim, std::vector<Expansion>(H.dim));
  std::vector<std::vector<Expansion>> Httb(H.dim, std::vector<Expansion>(H.dim));
  for (int a = 0; a < H.dim; ++a)
    for (int b = 0; b < H.dim; ++b) {
      Ht[a][b] = d_dt(H.entries[a][b]);
      Htb[a][b] = d_dtbar(H.entries[a][b]);
      Httb[a][b] = d_dtbar(Ht[a][b]);
    }
  CurvatureOperator op;  // reuse the evaluator plumbing
  op.dim = H.dim;

  TrendTracker t_du(grid.decades), t_di(grid.decades), t_g(grid.decades), t_h(grid.decades);
  TrendTracker t_m1s(grid.decades), t_m1w(grid.decades), t_m2s(grid.decades), t_m2w(grid.decades);
  std::vector<std::pair<double, double>> m1_fit, m2_fit;
  for (double theta : grid.angles) {
    for (std::size_t r = 0; r < grid.radii.size(); ++r) {
      const double rho = grid.radii[r];
      const Cx t = sample_point(rho, theta);
      const double lam = log_scale(rho);
      const double ell_pow = std::pow(lam, report.ell);
      const double det_val = eval(det, t).real();
      if (!(det_val > 0.0))
        throw precondition_error("det H not positive at rho=" + fmt_g9(rho) +
                                 " theta=" + fmt_g9(theta));
      const int dec = grid.decade[r];
      auto record = [&](ScaledBound& b, TrendTracker& tr, double value) {
        b.witness.offer(rho, theta, value);
        tr.record(dec, value);
      };
      GoodnessRow row;
      row.rho = rho;
      row.theta = theta;
      row.det_scaled = det_val / ell_pow;
      row.det_inv_scaled = 1.0 / (det_val * ell_pow);
      row.grad_scaled = std::abs(eval_ratio(grad, t)) * rho * lam;
      row.hess_scaled = std::abs(eval_ratio(hess, t).real()) * rho * rho * lam * lam;
      record(report.det_upper, t_du, row.det_scaled);
      record(report.det_inverse, t_di, row.det_inv_scaled);
      record(report.grad, t_g, row.grad_scaled);
      record(report.hess, t_h, row.hess_scaled);

      const CMat Hm = op.eval_matrix(H.entries, t);
      Eigen::SelfAdjointEigenSolver<CMat> es(Hm);
      const double lam_min = es.eigenvalues()(0);
      const double lam_max = es.eigenvalues()(H.dim - 1);
      if (!(lam_min > 0.0) || lam_max / lam_min > cond_cap) {
        ++report.rejected;
        report.rows.push_back(row);
        continue;
      }
      const CMat Hinv = Hm.inverse();
      const CMat P = op.eval_matrix(Ht, t) * Hinv;
      const CMat P2 = op.eval_matrix(Httb, t) * Hinv - P * op.eval_matrix(Htb, t) * Hinv;
      const double m1 = detail::entry_abs_sum(P);
      const double m2 = detail::entry_abs_sum(P2);
      row.matrix_ok = true;
      row.m1_strong = m1 * rho * lam;
      row.m1_weak = m1 * rho / ell_pow;
      row.m2_strong = m2 * rho * rho * lam * lam;
      row.m2_weak = m2 * rho * rho / ell_pow;
      record(report.matrix1_strong, t_m1s, row.m1_strong);
      record(report.matrix1_weak, t_m1w, row.m1_weak);
      record(report.matrix2_strong, t_m2s, row.m2_strong);
      record(report.matrix2_weak, t_m2w, row.m2_weak);
      if (dec < 3) {
        m1_fit.emplace_back(lam, m1 * rho);
        m2_fit.emplace_back(lam, m2 * rho * rho);
      }
      report.rows.push_back(row);
    }
  }
  auto finish = [&](ScaledBound& b, const TrendTracker& tr) {
    b.constant = b.witness.value;
    b.decade_max = tr.max_per_decade();
    b.trend_ok = tr.ok(tol.trend_pct);
  };
  finish(report.det_upper, t_du);
  finish(report.det_inverse, t_di);
  finish(report.grad, t_g);
  finish(report.hess, t_h);
  finish(report.matrix1_strong, t_m1s);
  finish(report.matrix1_weak, t_m1w);
  finish(report.matrix2_strong, t_m2s);
  finish(report.matrix2_weak, t_m2w);
  report.growth_exponent_m1 = detail::fit_log_slope(m1_fit);
  report.growth_exponent_m2 = detail::fit_log_slope(m2_fit);
  return report;
}

// ---------------------------------------------------------------------------
// Continuous-singularity class membership and the sharpened curvature bound.

struct BClassTermIssue {
  Rational p, q;
  int ell = 0;
  std::string reason;
};

struct BClassReport {
  bool member = true;
  std::vector<BClassTermIssue> offending;
  std::optional<Rational> r;  // min positive weight / 2 over the terms
};

// Membership of a single expansion in the class
//   C^inf + sum_{r in (0,1]} sum_{k<=n} |s|^{2r} (log|s|^2)^k C^inf.
// A term belongs iff p, q >= 0 and, when it carries a log power, some
// r in (0,1] with r = frac(p) mod 1 fits under both exponents.
inline BClassReport bclass_check(const Expansion& g, int n) {
  BClassReport report;
  for (const auto& [k, c] : g.terms()) {
    std::string reason;
    if (k.p < 0 || k.q < 0) {
      reason = "negative exponent";
    } else if (k.ell > 0) {
      if (k.ell > n) {
        reason = "log power exceeds n";
      } else {
        const Rational f = frac_part(k.p);
        const Rational r_min = f > 0 ? f : Rational(1);
        if (std::min(k.p, k.q) < r_min)
          reason = "log power with no |s|^{2r} factor, r in (0,1]";
      }
    }
    if (!reason.empty()) {
      report.member = false;
      report.offending.push_back({k.p, k.q, k.ell, reason});
    }
    const Rational w = k.p + k.q;
    if (w > 0 && (!report.r || w / 2 < *report.r)) report.r = w / 2;
  }
  return report;
}

struct Prop51Row {
  double rho = 0, theta = 0;
  double neg_hess = 0;
  double hess_scaled = 0;
  bool endo_ok = false;
  double endo_scaled = 0;
};

struct Prop51Report {
  BClassReport det_class;
  std::vector<std::pair<std::pair<int, int>, bool>> entry_member;  // 1-based indices
  bool entries_member = true;
  std::optional<Rational> r;
  double C_bound = 0.0;  // sup (-hess_log det G) |s|^{2-2r} Lambda^2
  Witness c_bound_witness;
  std::vector<double> decade_max;
  bool trend_ok = true;
  double growth_exponent = 0.0;  // fitted Lambda-exponent of the decade maxima
  double min_neg_hess = 0.0;     // min of -hess_log det G (negativity recorded)
  double C_endo = 0.0;           // sup lambda_max(iR) |s|^{2-2r} Lambda^2
  bool endo_trend_ok = true;
  std::vector<double> endo_decade_max;
  int rejected = 0;
  std::vector<Prop51Row> rows;
  Grid grid;
};

// Verifies the sharpened bound class for a normalized continuous metric:
// entries and det G are tested for class membership, then the scaled
// quantities (-hess_log det G) |s|^{2-2r} Lambda^2 and
// lambda_max(iR) |s|^{2-2r} Lambda^2 are swept. Bound constants and trends
// are recorded.
inline Prop51Report prop51_verify(const MetricExpansion& G, int n, const Grid& grid,
                                  const Tolerances& tol = {},
                                  double cond_cap = kConditionCap) {
  G.validate();
  Prop51Report report;
  report.grid = grid;
  // Normalization G(0) = Id is a basis-choice precondition.
  for (int a = 0; a < G.dim; ++a) {
    for (int b = 0; b < G.dim; ++b) {
      Cx c0(0.0, 0.0);
      for (const auto& [k, c] : G.entries[a][b].terms()) {
        if (k.p == 0 && k.q == 0 && k.ell == 0) c0 = c;
        if (k.p + k.q > 0) break;
      }
      const Cx want = a == b ? Cx(1.0, 0.0) : Cx(0.0, 0.0);
      if (std::abs(c0 - want) > 1e-12)
        throw precondition_error("metric not normalized to G(0) = Id at entry (" +
                                 std::to_string(a + 1) + "," + std::to_string(b + 1) + ")");
    }
  }
  for (int a = 0; a < G.dim; ++a) {
    for (int b = 0; b < G.dim; ++b) {
      const bool ok = bclass_check(G.entries[a][b], n).member;
      report.entry_member.push_back({{a + 1, b + 1}, ok});
      report.entries_member = report.entries_member && ok;
    }
  }
  const Expansion det = det_expansion(G);
  report.det_class = bclass_check(det, n);
  report.r = report.det_class.r;
  if (!report.det_class.member || !report.entries_member) return report;

  const double r_exp = report.r ? to_double(*report.r) : 1.0;
  const RatioForm hess = hess_log(det);
  SemistableModel model;
  model.nu = 1;
  model.e.assign(G.dim, 0);
  model.H = G;
  model.H.var = Var::t;
  model.n = std::max(n, G.max_log_power());
  const CurvatureOperator op = CurvatureOperator::build(model);
  TrendTracker trend(grid.decades), endo_trend(grid.decades);
  bool first = true;
  for (double theta : grid.angles) {
    for (std::size_t ri = 0; ri < grid.radii.size(); ++ri) {
      const double rho = grid.radii[ri];
      const Cx t = sample_point(rho, theta);
      const double lam = log_scale(rho);
      const double scale = std::pow(rho, 2.0 - 2.0 * r_exp) * lam * lam;
      const double neg_hess = -eval_ratio(hess, t).real();
      if (first || neg_hess < report.min_neg_hess) report.min_neg_hess = neg_hess;
      first = false;
      const double scaled = std::abs(neg_hess) * scale;
      report.c_bound_witness.offer(rho, theta, scaled);
      trend.record(grid.decade[ri], scaled);
      Prop51Row row;
      row.rho = rho;
      row.theta = theta;
      row.neg_hess = neg_hess;
      row.hess_scaled = scaled;
      CurvatureSample s = curvature_sample(op, t, cond_cap);
      if (!s.accepted) {
        ++report.rejected;
        report.rows.push_back(row);
        continue;
      }
      row.endo_ok = true;
      row.endo_scaled = std::abs(s.eigenvalues.back()) * scale;
      endo_trend.record(grid.decade[ri], row.endo_scaled);
      report.C_endo = std::max(report.C_endo, row.endo_scaled);
      report.rows.push_back(row);
    }
  }
  report.C_bound = report.c_bound_witness.value;
  report.decade_max = trend.max_per_decade();
  report.trend_ok = trend.ok(tol.trend_pct);
  report.endo_decade_max = endo_trend.max_per_decade();
  report.endo_trend_ok = endo_trend.ok(tol.trend_pct);
  {
    // Fit the asymptotic log-log slope over the deepest four decades only;
    // shallow decades still carry transient curvature.
    std::vector<std::pair<double, double>> fit;
    for (std::size_t d = 0; d < report.decade_max.size() && d < 4; ++d) {
      const double rho_edge = grid.radii.back() * std::pow(10.0, static_cast<double>(d));
      fit.emplace_back(log_scale(rho_edge), report.decade_max[d]);
    }
    report.growth_exponent = detail::fit_log_slope(fit);
  }
  return report;
}

}  // namespace asymptote
