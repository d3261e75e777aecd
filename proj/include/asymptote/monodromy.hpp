#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "asymptote/errors.hpp"
#include "asymptote/expansion.hpp"
#include "asymptote/rational.hpp"

namespace asymptote {

using RationalMatrix = std::vector<std::vector<Rational>>;
using ComplexMatrix = std::vector<std::vector<Cx>>;

namespace detail {

inline RationalMatrix rat_identity(int m) {
  RationalMatrix out(m, std::vector<Rational>(m, Rational(0)));
  for (int i = 0; i < m; ++i) out[i][i] = Rational(1);
  return out;
}

inline RationalMatrix rat_mul(const RationalMatrix& a, const RationalMatrix& b) {
  const int m = static_cast<int>(a.size());
  RationalMatrix out(m, std::vector<Rational>(m, Rational(0)));
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      if (a[i][k] == 0) continue;
      for (int j = 0; j < m; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

inline bool rat_is_zero(const RationalMatrix& a) {
  for (const auto& row : a)
    for (const auto& v : row)
      if (v != 0) return false;
  return true;
}

inline Cx i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace detail

// Unipotent monodromy data: exact rational nilpotent N (the log of the
// monodromy), the reference-fiber pairing Q, and the weight bound n with
// N^{n+1} = 0.
struct MonodromyData {
  int dim = 0;
  RationalMatrix N;
  ComplexMatrix Q;
  int n = 0;

  void validate() const {
    if (dim <= 0) throw precondition_error("monodromy data needs positive dimension");
    if (static_cast<int>(N.size()) != dim || static_cast<int>(Q.size()) != dim)
      throw precondition_error("monodromy matrices must be dim x dim");
    for (const auto& row : N)
      if (static_cast<int>(row.size()) != dim)
        throw precondition_error("monodromy matrices must be dim x dim");
    for (const auto& row : Q) {
      if (static_cast<int>(row.size()) != dim)
        throw precondition_error("monodromy matrices must be dim x dim");
      for (Cx v : row)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw precondition_error("pairing matrix has non-finite entries");
    }
    if (n < 0) throw precondition_error("weight bound n must be non-negative");
    RationalMatrix p = detail::rat_identity(dim);
    for (int a = 0; a <= n + 1; ++a) {
      if (a == n + 1 && !detail::rat_is_zero(p))
        throw precondition_error("N is not nilpotent to order n+1");
      if (a <= n) p = detail::rat_mul(p, N);
    }
  }
};

// Holomorphic coefficient jets of the two sections in the flat frame:
// expansions with q = 0, ell = 0 and integer p >= 0.
struct SectionCoeffs {
  std::vector<Expansion> b;
  std::vector<Expansion> c;

  void validate(int dim) const {
    if (static_cast<int>(b.size()) != dim || static_cast<int>(c.size()) != dim)
      throw precondition_error("section coefficient vectors must have length dim");
    auto check = [](const Expansion& e, const char* which) {
      for (const auto& [k, coeff] : e.terms())
        if (k.ell != 0 || k.q != 0 || !is_integer(k.p) || k.p < 0)
          throw precondition_error(std::string(which) +
                                   " coefficients must be holomorphic jets (q=0, ell=0, p in Z>=0)");
    };
    for (const auto& e : b) check(e, "b");
    for (const auto& e : c) check(e, "c");
  }
};

// Pairings of N-shifted frame vectors: C_{a,b}[j][k] = sum_{p,q}
// (N^a)_{pj} (N^b)_{qk} Q_{pq}. N is rational, so conjugation touches only Q;
// the rational factor of every entry is exact and converted to double once.
struct PairConstants {
  int dim = 0;
  int n = 0;
  std::vector<std::vector<ComplexMatrix>> C;  // C[a][b], 0 <= a,b <= n
};

inline PairConstants pair_constants(const MonodromyData& data) {
  data.validate();
  PairConstants pc;
  pc.dim = data.dim;
  pc.n = data.n;
  std::vector<RationalMatrix> npow(data.n + 1);
  npow[0] = detail::rat_identity(data.dim);
  for (int a = 1; a <= data.n; ++a) npow[a] = detail::rat_mul(npow[a - 1], data.N);
  pc.C.assign(data.n + 1, std::vector<ComplexMatrix>(
                              data.n + 1, ComplexMatrix(data.dim, std::vector<Cx>(data.dim))));
  for (int a = 0; a <= data.n; ++a)
    for (int b = 0; b <= data.n; ++b)
      for (int j = 0; j < data.dim; ++j)
        for (int k = 0; k < data.dim; ++k) {
          Cx sum(0.0, 0.0);
          for (int p = 0; p < data.dim; ++p) {
            if (npow[a][p][j] == 0) continue;
            for (int q = 0; q < data.dim; ++q) {
              const Rational factor = npow[a][p][j] * npow[b][q][k];
              if (factor == 0) continue;
              sum += to_double(factor) * data.Q[p][q];
            }
          }
          pc.C[a][b][j][k] = sum;
        }
  return pc;
}

// Single-valuedness of sum_{a+b=m} (-1)^{a+b}/(a! b!) z^a zbar^b C_{a,b}:
// matching against powers of log|s|^2 = 2 pi i (z - zbar) forces
// (-1)^a C_{a,m-a} to be independent of a. On success the reduced constants
// are C_m = (-1)^a C_{a,m-a} / (m! (2 pi i)^m). The consistency test runs
// before any division by powers of 2 pi i.
struct SingleValuedness {
  bool ok = true;
  int witness_j = 0, witness_k = 0, witness_m = 0, witness_a = 0;  // 1-based j,k
  double max_deviation = 0.0;
  std::vector<ComplexMatrix> Cm;  // m = 0 .. 2n
};

inline constexpr double kSingleValuedTol = 1e-12;

inline SingleValuedness single_valuedness(const PairConstants& pc,
                                          double tol = kSingleValuedTol) {
  SingleValuedness sv;
  const int n = pc.n;
  sv.Cm.assign(2 * n + 1, ComplexMatrix(pc.dim, std::vector<Cx>(pc.dim, Cx(0.0, 0.0))));
  for (int j = 0; j < pc.dim; ++j) {
    for (int k = 0; k < pc.dim; ++k) {
      for (int m = 0; m <= 2 * n; ++m) {
        const int a_lo = std::max(0, m - n);
        const int a_hi = std::min(n, m);
        const Cx ref = detail::i_power(2 * a_lo) * pc.C[a_lo][m - a_lo][j][k];
        double scale = 1.0;
        for (int a = a_lo; a <= a_hi; ++a)
          scale = std::max(scale, std::abs(pc.C[a][m - a][j][k]));
        for (int a = a_lo + 1; a <= a_hi; ++a) {
          const Cx da = detail::i_power(2 * a) * pc.C[a][m - a][j][k];
          const double dev = std::abs(da - ref) / scale;
          if (dev > tol && sv.ok) {
            sv.ok = false;
            sv.witness_j = j + 1;
            sv.witness_k = k + 1;
            sv.witness_m = m;
            sv.witness_a = a;
          }
          sv.max_deviation = std::max(sv.max_deviation, dev);
        }
        const Cx two_pi_i_m = std::pow(2.0 * M_PI, m) * detail::i_power(m);
        sv.Cm[m][j][k] = ref / (detail::factorial(m) * two_pi_i_m);
      }
    }
  }
  return sv;
}

// Assembles sum_m (log|s|^2)^m a_m(s), a_m = sum_{j,k} C_m^{j,k} b_j conj(c_k),
// in the expansion algebra. Log powers above n must have vanished (enforced).
inline Expansion fiber_integral_expansion(const MonodromyData& data, const SectionCoeffs& coeffs,
                                          const SingleValuedness& sv) {
  data.validate();
  coeffs.validate(data.dim);
  if (!sv.ok) throw precondition_error("pairing data not single-valued");
  double head_scale = 1.0;
  for (int m = 0; m <= data.n; ++m)
    for (const auto& row : sv.Cm[m])
      for (Cx v : row) head_scale = std::max(head_scale, std::abs(v));
  for (int m = data.n + 1; m <= 2 * data.n; ++m)
    for (const auto& row : sv.Cm[m])
      for (Cx v : row)
        if (std::abs(v) > kSingleValuedTol * head_scale)
          throw precondition_error("log power beyond the weight bound survives: m=" +
                                   std::to_string(m));
  Expansion out;
  for (int m = 0; m <= data.n; ++m) {
    Expansion am;
    for (int j = 0; j < data.dim; ++j) {
      for (int k = 0; k < data.dim; ++k) {
        const Cx c = sv.Cm[m][j][k];
        if (c == Cx(0.0, 0.0)) continue;
        am = add(am, scale(mul(coeffs.b[j], conj_expansion(coeffs.c[k])), c));
      }
    }
    if (am.empty()) {
      out = add(out, am);  // propagate truncation-order bookkeeping
      continue;
    }
    Expansion logpow;
    logpow.add_term(Rational(0), Rational(0), m, Cx(1.0, 0.0));
    out = add(out, mul(am, logpow));
  }
  return out;
}

// Reference-pairing reality: conj(Q_{jk}) = (-1)^n Q_{kj}. When it holds and
// c = b, the normalized output below is real-valued.
inline bool pairing_reality(const ComplexMatrix& Q, int n, double tol = kSingleValuedTol) {
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  double scale = 1.0;
  for (const auto& row : Q)
    for (Cx v : row) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < Q.size(); ++j)
    for (std::size_t k = 0; k < Q.size(); ++k)
      if (std::abs(std::conj(Q[j][k]) - sign * Q[k][j]) > tol * scale) return false;
  return true;
}

// Orientation normalization i^{n^2} identifying the raw fiber pairing with a
// squared norm. Kept out of fiber_integral_expansion and applied explicitly.
inline Expansion l2_normalized(const Expansion& raw, int n) {
  return scale(raw, detail::i_power(n * n));
}

}  // namespace asymptote
