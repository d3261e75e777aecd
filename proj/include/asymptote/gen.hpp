#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "asymptote/errors.hpp"
#include "asymptote/expansion.hpp"
#include "asymptote/metric.hpp"
#include "asymptote/sweep.hpp"

namespace asymptote {

inline constexpr std::uint64_t kDefaultSeed = 20250809ull;

// splitmix64. Hand-rolled so seeded sweeps are reproducible across standard
// libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  double uniform() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive bounds.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t seed_from_env() {
  if (const char* s = std::getenv("ASYMPTOTE_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0') return v;
    throw parse_error("ASYMPTOTE_SEED must be an unsigned integer");
  }
  return kDefaultSeed;
}

struct ExpansionGenSpec {
  int max_terms = 12;
  int exp_num_max = 6;  // exponent numerators drawn from 0..exp_num_max
  int exp_den = 2;
  int ell_max = 3;
  bool dyadic_coeffs = true;  // coefficients k/8: products and sums stay exact
  bool allow_negative_exponents = false;
};

// Random expansion with exponents in {0..exp_num_max}/exp_den and matched
// fractional parts (p - q stays integral).
inline Expansion random_expansion(Rng& rng, const ExpansionGenSpec& spec = {}) {
  Expansion e;
  const int terms = rng.uniform_int(1, spec.max_terms);
  for (int i = 0; i < terms; ++i) {
    const int pn = rng.uniform_int(0, spec.exp_num_max);
    int qn = rng.uniform_int(0, spec.exp_num_max);
    // align fractional parts mod exp_den
    qn -= (qn - pn) % spec.exp_den;
    if (qn < 0) qn += spec.exp_den;
    Rational p(pn, spec.exp_den), q(qn, spec.exp_den);
    if (spec.allow_negative_exponents && rng.uniform_int(0, 3) == 0) {
      p -= 1;
      q -= 1;
    }
    const int ell = rng.uniform_int(0, spec.ell_max);
    Cx coeff;
    if (spec.dyadic_coeffs) {
      int re = rng.uniform_int(-16, 16);
      int im = rng.uniform_int(-16, 16);
      if (re == 0 && im == 0) re = 1;
      coeff = Cx(re / 8.0, im / 8.0);
    } else {
      coeff = Cx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    }
    e.add_term(p, q, ell, coeff);
  }
  if (e.empty()) e.add_term(Rational(1), Rational(1), 0, Cx(1.0, 0.0));
  return e;
}

// Real-valued jet: mirror-symmetric polynomial in (t, conj t) with integer
// exponents <= deg and a constant term of the requested value.
inline Expansion random_real_jet(Rng& rng, int deg, double constant, double amp) {
  Expansion e;
  e.add_term(Rational(0), Rational(0), 0, Cx(constant, 0.0));
  for (int a = 0; a <= deg; ++a) {
    for (int b = a; b <= deg; ++b) {
      if (a == 0 && b == 0) continue;
      if (rng.uniform() < 0.5) continue;
      const Cx c(rng.uniform(-amp, amp), a == b ? 0.0 : rng.uniform(-amp, amp));
      e.add_term(Rational(a), Rational(b), 0, c);
      if (a != b) e.add_term(Rational(b), Rational(a), 0, std::conj(c));
    }
  }
  return e;
}

// Random member of the pure-log class sum_i (log|t|^2)^i phi_i with
// phi_ell(0) != 0 of positive leading sign and no constant term above ell.
// Positivity over the grid is enforced by deterministically shrinking the
// subleading coefficients.
inline Expansion random_pure_log(Rng& rng, const Grid& grid, int ell_max = 3) {
  const int ell = rng.uniform_int(0, ell_max);
  Expansion lead;
  const double lead_c = rng.uniform(0.5, 2.0);
  lead.add_term(Rational(0), Rational(0), ell, Cx(ell % 2 == 0 ? lead_c : -lead_c, 0.0));
  Expansion rest;
  for (int i = 0; i <= ell_max; ++i) {
    const bool constant_allowed = i < ell;
    Expansion phi = random_real_jet(rng, 2, constant_allowed ? rng.uniform(-0.5, 0.5) : 0.0, 0.4);
    if (!constant_allowed) {
      // strip the constant so ell stays the leading log order
      Expansion stripped;
      for (const auto& [k, c] : phi.terms())
        if (!(k.p == 0 && k.q == 0)) stripped.add_term(k.p, k.q, k.ell, c);
      phi = stripped;
    }
    if (phi.empty()) continue;
    Expansion logpow;
    logpow.add_term(Rational(0), Rational(0), i, Cx(1.0, 0.0));
    rest = add(rest, mul(logpow, phi));
  }
  for (int shrink = 0; shrink < 64; ++shrink) {
    const Expansion g = add(lead, rest);
    bool positive = true;
    for (double theta : grid.angles) {
      for (double rho : grid.radii) {
        if (!(eval(g, sample_point(rho, theta)).real() > 1e-3 * lead_c)) {
          positive = false;
          break;
        }
      }
      if (!positive) break;
    }
    if (positive) return g;
    rest = scale(rest, Cx(0.5, 0.0));
  }
  throw precondition_error("failed to generate a positive pure-log sample");
}

// Rounds coefficients to multiples of 1/grain so that small products are
// exactly representable (bit-exact algebraic identities need this).
inline Expansion quantize_expansion(const Expansion& e, double grain = 64.0) {
  Expansion out(e.order());
  for (const auto& [k, c] : e.terms())
    out.add_term(k.p, k.q, k.ell,
                 Cx(std::round(c.real() * grain) / grain, std::round(c.imag() * grain) / grain));
  return out;
}

// Random Hermitian positive-definite model: diagonally dominant entries with
// small conjugate-symmetric off-diagonal jets; the first diagonal entry may
// carry a log factor.
inline SemistableModel random_model(Rng& rng, int dim, bool with_log, int nu = 1) {
  SemistableModel m;
  m.nu = nu;
  m.n = 1;
  m.e.assign(dim, 0);
  m.H.dim = dim;
  m.H.var = Var::t;
  m.H.entries.assign(dim, std::vector<Expansion>(dim));
  for (int a = 0; a < dim; ++a) {
    Expansion diag = random_real_jet(rng, 2, rng.uniform(1.0, 2.0), 0.05);
    if (with_log && a == 0) diag.add_term(Rational(0), Rational(0), 1, Cx(-1.0, 0.0));
    m.H.entries[a][a] = diag;
  }
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      Expansion off;
      const Cx c(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05));
      off.add_term(Rational(1), Rational(0), 0, c);
      m.H.entries[a][b] = off;
      m.H.entries[b][a] = conj_expansion(off);
    }
  }
  return m;
}

}  // namespace asymptote
