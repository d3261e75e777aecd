#pragma once

// Test-side oracles, independent of the library implementation paths they
// cross-check. The mini term algebra below uses its own small-rational type
// and its own derivative/evaluation code.

#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <tuple>
#include <vector>

#include "asymptote/expansion.hpp"

namespace oracle {

using Cx = std::complex<double>;

struct Frac {
  long long num = 0;
  long long den = 1;

  Frac() = default;
  Frac(long long n, long long d = 1) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    if (num == 0) den = 1;
  }

  friend Frac operator+(Frac a, Frac b) { return Frac(a.num * b.den + b.num * a.den, a.den * b.den); }
  friend Frac operator-(Frac a, Frac b) { return Frac(a.num * b.den - b.num * a.den, a.den * b.den); }
  friend bool operator==(Frac a, Frac b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(Frac a, Frac b) { return a.num * b.den < b.num * a.den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool integral() const { return den == 1; }
};

struct NaiveTerm {
  Frac p, q;
  int ell = 0;
  Cx coeff;
};

using NaiveSum = std::vector<NaiveTerm>;

inline NaiveSum naive_from(const asymptote::Expansion& e) {
  NaiveSum out;
  for (const auto& [k, c] : e.terms()) {
    NaiveTerm t;
    t.p = Frac(numerator(k.p).convert_to<long long>(),
               denominator(k.p).convert_to<long long>());
    t.q = Frac(numerator(k.q).convert_to<long long>(),
               denominator(k.q).convert_to<long long>());
    t.ell = k.ell;
    t.coeff = c;
    out.push_back(t);
  }
  return out;
}

// d/dt termwise: p t^(p-1) tbar^q L^ell + ell t^(p-1) tbar^q L^(ell-1).
inline NaiveSum naive_diff_t(const NaiveSum& a) {
  NaiveSum out;
  for (const auto& t : a) {
    if (t.p.num != 0) out.push_back({t.p - Frac(1), t.q, t.ell, t.coeff * t.p.value()});
    if (t.ell > 0) out.push_back({t.p - Frac(1), t.q, t.ell - 1, t.coeff * double(t.ell)});
  }
  return out;
}

inline NaiveSum naive_diff_tbar(const NaiveSum& a) {
  NaiveSum out;
  for (const auto& t : a) {
    if (t.q.num != 0) out.push_back({t.p, t.q - Frac(1), t.ell, t.coeff * t.q.value()});
    if (t.ell > 0) out.push_back({t.p, t.q - Frac(1), t.ell - 1, t.coeff * double(t.ell)});
  }
  return out;
}

inline Cx naive_eval(const NaiveSum& a, Cx t) {
  const double rho = std::abs(t);
  const double theta = std::arg(t);
  const double L = 2.0 * std::log(rho);
  Cx sum = 0.0;
  for (const auto& term : a) {
    const double w = term.p.value() + term.q.value();
    const double winding = term.p.value() - term.q.value();
    sum += term.coeff * std::pow(rho, w) * std::pow(L, term.ell) *
           std::exp(Cx(0.0, winding * theta));
  }
  return sum;
}

// Wirtinger central differences of a complex-valued function.
template <typename F>
Cx fd_dt(F f, Cx t, double h) {
  const Cx fx = (f(t + Cx(h, 0)) - f(t - Cx(h, 0))) / (2.0 * h);
  const Cx fy = (f(t + Cx(0, h)) - f(t - Cx(0, h))) / (2.0 * h);
  return 0.5 * (fx - Cx(0, 1) * fy);
}

template <typename F>
Cx fd_dtbar(F f, Cx t, double h) {
  const Cx fx = (f(t + Cx(h, 0)) - f(t - Cx(h, 0))) / (2.0 * h);
  const Cx fy = (f(t + Cx(0, h)) - f(t - Cx(0, h))) / (2.0 * h);
  return 0.5 * (fx + Cx(0, 1) * fy);
}

// Quarter-Laplacian of log f (five-point stencil).
template <typename F>
double fd_log_hessian(F f, Cx t, double h) {
  auto lg = [&](Cx z) { return std::log(f(z)); };
  return 0.25 *
         (lg(t + Cx(h, 0)) + lg(t - Cx(h, 0)) + lg(t + Cx(0, h)) + lg(t - Cx(0, h)) -
          4.0 * lg(t)) /
         (h * h);
}

// ---------------------------------------------------------------------------
// Real polynomial jets in (t, tbar) with independent differentiation, used to
// evaluate componentwise log-derivative formulas without the library's
// Wirtinger code.

struct Jet {
  // coefficient of t^a tbar^b at [a][b]
  std::vector<std::vector<Cx>> c;

  Cx eval(Cx t) const {
    Cx sum = 0.0;
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = 0; b < c[a].size(); ++b)
        sum += c[a][b] * std::pow(t, static_cast<int>(a)) *
               std::pow(std::conj(t), static_cast<int>(b));
    return sum;
  }

  Cx eval_dt(Cx t) const {
    Cx sum = 0.0;
    for (std::size_t a = 1; a < c.size(); ++a)
      for (std::size_t b = 0; b < c[a].size(); ++b)
        sum += static_cast<double>(a) * c[a][b] * std::pow(t, static_cast<int>(a - 1)) *
               std::pow(std::conj(t), static_cast<int>(b));
    return sum;
  }

  Cx eval_dtbar_dt(Cx t) const {
    Cx sum = 0.0;
    for (std::size_t a = 1; a < c.size(); ++a)
      for (std::size_t b = 1; b < c[a].size(); ++b)
        sum += static_cast<double>(a) * static_cast<double>(b) * c[a][b] *
               std::pow(t, static_cast<int>(a - 1)) * std::pow(std::conj(t), static_cast<int>(b - 1));
    return sum;
  }
};

struct Component {
  double r = 0.0;  // |t|^{2r}
  int ell = 0;     // (log|t|^2)^ell
  Jet phi;
};

// Direct evaluation of the componentwise log-Hessian formula
//   1/2 sum_{i,j} (k_i + k_j + |u_i - u_j|^2) g_i g_j / g^2.
inline Cx component_hess_log(const std::vector<Component>& parts, Cx t) {
  const double rho = std::abs(t);
  const double L = 2.0 * std::log(rho);
  std::vector<Cx> g(parts.size()), u(parts.size()), k(parts.size());
  Cx total = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Cx phi = parts[i].phi.eval(t);
    const Cx dphi = parts[i].phi.eval_dt(t);
    const Cx ddphi = parts[i].phi.eval_dtbar_dt(t);
    g[i] = std::pow(rho, 2.0 * parts[i].r) * std::pow(L, parts[i].ell) * phi;
    u[i] = parts[i].r / t + static_cast<double>(parts[i].ell) / (t * L) + dphi / phi;
    k[i] = -static_cast<double>(parts[i].ell) / (rho * rho * L * L) + ddphi / phi -
           std::norm(dphi / phi);
    total += g[i];
  }
  Cx acc = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = 0; j < parts.size(); ++j)
      acc += 0.5 * (k[i] + k[j] + std::norm(u[i] - u[j])) * g[i] * g[j];
  return acc / (total * total);
}

// Componentwise gradient formula sum_i (r_i/t + ell_i/(t L) + dphi_i/phi_i) g_i / g.
inline Cx component_grad_log(const std::vector<Component>& parts, Cx t) {
  const double rho = std::abs(t);
  const double L = 2.0 * std::log(rho);
  Cx total = 0.0, acc = 0.0;
  for (const auto& part : parts) {
    const Cx phi = part.phi.eval(t);
    const Cx gi = std::pow(rho, 2.0 * part.r) * std::pow(L, part.ell) * phi;
    const Cx ui = part.r / t + static_cast<double>(part.ell) / (t * L) + part.phi.eval_dt(t) / phi;
    acc += ui * gi;
    total += gi;
  }
  return acc / total;
}

// ---------------------------------------------------------------------------
// Bigraded polynomial in (z, zbar, s, sbar), the symbolic route for the
// monodromy pipeline: coefficients keyed by (z power, zbar power, s power,
// sbar power).

using ZPoly = std::map<std::tuple<int, int, int, int>, Cx>;

inline void zpoly_add(ZPoly& poly, int a, int b, int ps, int qs, Cx c) {
  if (c == Cx(0.0, 0.0)) return;
  auto key = std::make_tuple(a, b, ps, qs);
  auto [it, inserted] = poly.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (std::abs(it->second) == 0.0) poly.erase(it);
  }
}

inline double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

inline double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

inline Cx ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

}  // namespace oracle
