#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "asymptote/errors.hpp"

namespace asymptote {

// Ray/radius sampling request. Radii are log-spaced with points_per_decade
// samples per decade, anchored at rho_min so the deepest radius is hit
// exactly; angles are equally spaced unless given explicitly.
struct Sweep {
  int rays = 16;
  std::vector<double> angles;  // explicit angles override `rays`
  double rho_min = 1e-8;
  double rho_max = 0.5;
  int points_per_decade = 8;

  void validate() const {
    if (!(0.0 < rho_min) || !(rho_min < rho_max) || !(rho_max < 1.0))
      throw precondition_error("sweep requires 0 < rho_min < rho_max < 1");
    if (points_per_decade < 4) throw precondition_error("sweep requires points_per_decade >= 4");
    if (angles.empty() && rays < 1) throw precondition_error("sweep requires at least one ray");
  }
};

struct Tolerances {
  double fd_rel = 1e-5;      // symbolic vs finite-difference comparisons
  double exact_rel = 1e-10;  // exact-identity checks evaluated in floats
  double trend_pct = 5.0;    // allowed growth of running maxima, in percent
  double fd_step_scale = 1e-6;

  void validate() const {
    if (!(fd_rel > 0.0) || !(exact_rel > 0.0) || !(trend_pct > 0.0) || !(fd_step_scale > 0.0))
      throw precondition_error("tolerances must be positive");
  }
};

// Materialized sample grid. radii are descending (outer first); decade[i] is
// the decade index of radii[i] counted from rho_min (0 = deepest decade).
struct Grid {
  std::vector<double> angles;
  std::vector<double> radii;
  std::vector<int> decade;
  int decades = 0;

  std::size_t sample_count() const { return angles.size() * radii.size(); }
};

inline Grid make_grid(const Sweep& sweep) {
  sweep.validate();
  Grid g;
  if (!sweep.angles.empty()) {
    g.angles = sweep.angles;
  } else {
    g.angles.reserve(sweep.rays);
    for (int i = 0; i < sweep.rays; ++i)
      g.angles.push_back(2.0 * M_PI * static_cast<double>(i) / sweep.rays);
  }
  // Ascending generation from rho_min, then reversed to descending order.
  std::vector<double> up;
  std::vector<int> up_decade;
  const int ppd = sweep.points_per_decade;
  for (int j = 0;; ++j) {
    const double rho = sweep.rho_min * std::pow(10.0, static_cast<double>(j) / ppd);
    if (rho > sweep.rho_max * (1.0 + 1e-12)) break;
    up.push_back(rho);
    up_decade.push_back(j / ppd);
  }
  if (up.empty()) throw precondition_error("empty radius grid");
  g.radii.assign(up.rbegin(), up.rend());
  g.decade.assign(up_decade.rbegin(), up_decade.rend());
  g.decades = up_decade.back() + 1;
  return g;
}

inline std::complex<double> sample_point(double rho, double theta) {
  return std::polar(rho, theta);
}

// Running-max trend over the deepest decades: the maximum over the last two
// decades must not exceed the maximum over the rest by more than trend_pct.
// Tracks per-decade maxima of a nonnegative scalar.
class TrendTracker {
 public:
  explicit TrendTracker(int decades) : max_per_decade_(std::max(decades, 1), 0.0) {}

  void record(int decade, double value) {
    if (decade >= 0 && decade < static_cast<int>(max_per_decade_.size()))
      max_per_decade_[decade] = std::max(max_per_decade_[decade], value);
  }

  const std::vector<double>& max_per_decade() const { return max_per_decade_; }

  double global_max() const {
    double m = 0.0;
    for (double v : max_per_decade_) m = std::max(m, v);
    return m;
  }

  double inner_max() const {  // deepest two decades
    double m = 0.0;
    for (std::size_t d = 0; d < max_per_decade_.size() && d < 2; ++d)
      m = std::max(m, max_per_decade_[d]);
    return m;
  }

  double outer_max() const {
    double m = 0.0;
    for (std::size_t d = 2; d < max_per_decade_.size(); ++d) m = std::max(m, max_per_decade_[d]);
    return m;
  }

  bool ok(double trend_pct) const {
    const double outer = outer_max();
    const double inner = inner_max();
    if (max_per_decade_.size() <= 2) return true;  // grid too shallow to measure a trend
    const double slack = 1e-12 * std::max(1.0, global_max());
    return inner <= outer * (1.0 + trend_pct / 100.0) + slack;
  }

 private:
  std::vector<double> max_per_decade_;
};

// Location of an extremal sample, kept for report witnesses.
struct Witness {
  double rho = 0.0;
  double theta = 0.0;
  double value = 0.0;

  void offer(double r, double th, double v) {
    if (v > value) {
      value = v;
      rho = r;
      theta = th;
    }
  }
};

}  // namespace asymptote
