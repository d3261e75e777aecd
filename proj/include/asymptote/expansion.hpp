#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "asymptote/errors.hpp"
#include "asymptote/rational.hpp"

namespace asymptote {

using Cx = std::complex<double>;

// One term c * t^p * conj(t)^q * (log|t|^2)^ell on the punctured disc.
// Single-valuedness requires p - q to be an integer.
struct LogMonomial {
  Rational p;
  Rational q;
  int ell = 0;
  Cx coeff{0.0, 0.0};
};

struct TermKey {
  Rational p;
  Rational q;
  int ell = 0;

  bool operator==(const TermKey& other) const {
    return p == other.p && q == other.q && ell == other.ell;
  }
};

// Canonical term order: by total weight p+q, then p, then ell. (p+q, p)
// determines q, so this is a strict total order on keys and fixes the
// serialization order of every expansion.
struct TermKeyLess {
  bool operator()(const TermKey& a, const TermKey& b) const {
    const Rational wa = a.p + a.q;
    const Rational wb = b.p + b.q;
    if (wa != wb) return wa < wb;
    if (a.p != b.p) return a.p < b.p;
    return a.ell < b.ell;
  }
};

// Finite sum of LogMonomials plus a validity order: the expansion is asserted
// valid modulo terms of weight p+q >= order() (any log power). An unset order
// means the expansion is exact.
class Expansion {
 public:
  using TermMap = std::map<TermKey, Cx, TermKeyLess>;

  Expansion() = default;
  explicit Expansion(std::optional<Rational> order) : order_(std::move(order)) {}

  static Expansion from_terms(const std::vector<LogMonomial>& terms,
                              std::optional<Rational> order = std::nullopt) {
    Expansion e(std::move(order));
    for (const auto& m : terms) e.add_term(m.p, m.q, m.ell, m.coeff);
    return e;
  }

  // Accumulates a term; enforces key invariants; exact zeros never survive.
  void add_term(const Rational& p, const Rational& q, int ell, Cx coeff) {
    if (!is_integer(p - q))
      throw precondition_error("log-monomial violates p - q in Z: p=" + to_string(p) +
                               " q=" + to_string(q));
    if (ell < 0) throw precondition_error("log-monomial has negative log power");
    if (!std::isfinite(coeff.real()) || !std::isfinite(coeff.imag()))
      throw precondition_error("log-monomial coefficient is not finite");
    if (coeff == Cx(0.0, 0.0)) return;
    TermKey key{p, q, ell};
    auto [it, inserted] = terms_.try_emplace(key, coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second == Cx(0.0, 0.0)) terms_.erase(it);
    }
  }

  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  bool has_finite_order() const { return order_.has_value(); }
  const std::optional<Rational>& order() const { return order_; }
  void set_order(std::optional<Rational> order) { order_ = std::move(order); }

  // Minimal total weight p+q over the stored terms.
  Rational weight() const {
    if (terms_.empty()) throw precondition_error("weight of empty expansion");
    const TermKey& k = terms_.begin()->first;
    return k.p + k.q;
  }

  bool operator==(const Expansion& other) const {
    return order_ == other.order_ && terms_ == other.terms_;
  }

 private:
  TermMap terms_;
  std::optional<Rational> order_;  // nullopt = exact
};

namespace detail {

inline std::optional<Rational> min_order(const std::optional<Rational>& a,
                                         const std::optional<Rational>& b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

inline std::optional<Rational> plus_weight(const std::optional<Rational>& order,
                                           const Rational& w) {
  if (!order) return std::nullopt;
  return *order + w;
}

}  // namespace detail

inline Expansion add(const Expansion& a, const Expansion& b) {
  Expansion out(detail::min_order(a.order(), b.order()));
  for (const auto& [k, c] : a.terms()) out.add_term(k.p, k.q, k.ell, c);
  for (const auto& [k, c] : b.terms()) out.add_term(k.p, k.q, k.ell, c);
  return out;
}

inline Expansion scale(const Expansion& a, Cx factor) {
  Expansion out(a.order());
  for (const auto& [k, c] : a.terms()) out.add_term(k.p, k.q, k.ell, c * factor);
  return out;
}

inline Expansion neg(const Expansion& a) { return scale(a, Cx(-1.0, 0.0)); }

inline Expansion sub(const Expansion& a, const Expansion& b) { return add(a, neg(b)); }

// Termwise product. The result order is the conservative
// min(order(a) + weight(b), order(b) + weight(a)); products at or above it
// are dropped. An empty factor yields an empty result of order
// min(order(a), order(b)).
inline Expansion mul(const Expansion& a, const Expansion& b) {
  if (a.empty() || b.empty()) return Expansion(detail::min_order(a.order(), b.order()));
  std::optional<Rational> order = detail::min_order(detail::plus_weight(a.order(), b.weight()),
                                                    detail::plus_weight(b.order(), a.weight()));
  Expansion out(order);
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      const Rational p = ka.p + kb.p;
      const Rational q = ka.q + kb.q;
      if (order && p + q >= *order) continue;
      out.add_term(p, q, ka.ell + kb.ell, ca * cb);
    }
  }
  return out;
}

// Wirtinger derivative in t, applied termwise:
//   d/dt [t^p conj(t)^q L^ell] = p t^(p-1) conj(t)^q L^ell
//                              + ell t^(p-1) conj(t)^q L^(ell-1),  L = log|t|^2.
// The validity order decreases by exactly 1.
inline Expansion d_dt(const Expansion& a) {
  Expansion out(detail::plus_weight(a.order(), Rational(-1)));
  for (const auto& [k, c] : a.terms()) {
    if (k.p != 0) out.add_term(k.p - 1, k.q, k.ell, c * to_double(k.p));
    if (k.ell > 0) out.add_term(k.p - 1, k.q, k.ell - 1, c * static_cast<double>(k.ell));
  }
  return out;
}

inline Expansion d_dtbar(const Expansion& a) {
  Expansion out(detail::plus_weight(a.order(), Rational(-1)));
  for (const auto& [k, c] : a.terms()) {
    if (k.q != 0) out.add_term(k.p, k.q - 1, k.ell, c * to_double(k.q));
    if (k.ell > 0) out.add_term(k.p, k.q - 1, k.ell - 1, c * static_cast<double>(k.ell));
  }
  return out;
}

// Swaps (p, q) and conjugates coefficients; an involution.
inline Expansion conj_expansion(const Expansion& a) {
  Expansion out(a.order());
  for (const auto& [k, c] : a.terms()) out.add_term(k.q, k.p, k.ell, std::conj(c));
  return out;
}

// True when every term (p, q, ell, c) has its mirror (q, p, ell, conj(c))
// present, i.e. the expansion represents a real-valued function.
inline bool is_real_symmetric(const Expansion& a) {
  for (const auto& [k, c] : a.terms()) {
    auto it = a.terms().find(TermKey{k.q, k.p, k.ell});
    if (it == a.terms().end() || it->second != std::conj(c)) return false;
  }
  return true;
}

// Evaluates at t = rho * exp(i theta), 0 < rho < 1. Fractional powers are
// read as |t|^(p+q) exp(i (p-q) arg t), well defined because p - q in Z.
inline Cx eval(const Expansion& a, Cx t) {
  const double rho = std::abs(t);
  if (!(rho > 0.0) || rho >= 1.0)
    throw precondition_error("eval requires 0 < |t| < 1");
  const double theta = std::arg(t);
  const double logsq = 2.0 * std::log(rho);
  Cx sum(0.0, 0.0);
  for (const auto& [k, c] : a.terms()) {
    const double radial = std::pow(rho, to_double(k.p + k.q));
    const long long winding = to_longlong(k.p - k.q);
    Cx value = c * radial * std::pow(logsq, k.ell);
    if (winding != 0) {
      // polar() is called on |winding| and conjugated for negative windings,
      // so mirror terms pick up exactly conjugate phases.
      Cx phase = std::polar(1.0, static_cast<double>(winding < 0 ? -winding : winding) * theta);
      if (winding < 0) phase = std::conj(phase);
      value *= phase;
    }
    sum += value;
  }
  return sum;
}

// Substitutes t -> t^nu: (p, q, ell, c) -> (nu p, nu q, ell, c nu^ell);
// the order scales by nu.
inline Expansion pullback_power(const Expansion& a, int nu) {
  if (nu <= 0) throw precondition_error("pullback_power requires nu >= 1");
  std::optional<Rational> order;
  if (a.order()) order = *a.order() * nu;
  Expansion out(order);
  const Rational nu_r(nu);
  for (const auto& [k, c] : a.terms())
    out.add_term(k.p * nu_r, k.q * nu_r, k.ell, c * std::pow(static_cast<double>(nu), k.ell));
  return out;
}

// Leading data: minimal weight p+q, then the maximal log power among the
// minimal-weight terms.
inline std::pair<Rational, int> weight_and_logorder(const Expansion& a) {
  if (a.empty()) throw precondition_error("weight_and_logorder of empty expansion");
  const Rational w = a.weight();
  int ell = 0;
  for (const auto& [k, c] : a.terms()) {
    if (k.p + k.q != w) break;  // keys are weight-sorted
    ell = std::max(ell, k.ell);
  }
  return {w, ell};
}

// Drops terms of weight >= w and tightens the order. Dropping is always an
// explicit step; add/construction never truncate on their own.
inline Expansion truncate(const Expansion& a, const Rational& w) {
  Expansion out(detail::min_order(a.order(), w));
  for (const auto& [k, c] : a.terms()) {
    if (k.p + k.q >= w) continue;
    out.add_term(k.p, k.q, k.ell, c);
  }
  return out;
}

// Magnitude scale sum |c| rho^(p+q) |log rho^2|^ell of an expansion's value
// at radius rho; a denominator for relative-error comparisons.
inline double term_scale(const Expansion& a, double rho) {
  const double logsq = std::abs(2.0 * std::log(rho));
  double s = 0.0;
  for (const auto& [k, c] : a.terms())
    s += std::abs(c) * std::pow(rho, to_double(k.p + k.q)) * std::pow(logsq, k.ell);
  return s;
}

// Prunes terms whose coefficient magnitude is below rel_tol times the largest
// coefficient magnitude. Never applied implicitly.
inline Expansion clean(const Expansion& a, double rel_tol = 1e-15) {
  double max_mag = 0.0;
  for (const auto& [k, c] : a.terms()) max_mag = std::max(max_mag, std::abs(c));
  Expansion out(a.order());
  for (const auto& [k, c] : a.terms()) {
    if (std::abs(c) < rel_tol * max_mag) continue;
    out.add_term(k.p, k.q, k.ell, c);
  }
  return out;
}

}  // namespace asymptote
