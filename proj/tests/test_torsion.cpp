#include <catch2/catch_amalgamated.hpp>

#include "asymptote/gen.hpp"
#include "asymptote/torsion.hpp"

using namespace asymptote;

namespace {

Expansion single(const Rational& p, const Rational& q, int ell, Cx c) {
  Expansion e;
  e.add_term(p, q, ell, c);
  return e;
}

const Cx one(1.0, 0.0);
const Expansion minus_log = single(Rational(0), Rational(0), 1, Cx(-1.0, 0.0));

SemistableModel scalar_model(const Expansion& h, int nu = 1) {
  SemistableModel m;
  m.nu = nu;
  m.e = {0};
  m.n = 1;
  m.H.dim = 1;
  m.H.var = Var::t;
  m.H.entries = {{h}};
  return m;
}

}  // namespace

TEST_CASE("alternating_ell") {
  CHECK(alternating_ell({{0, 1}}) == 1);
  CHECK(alternating_ell({{0, 2}, {1, 1}, {2, 0}}) == 1);
  CHECK(alternating_ell({{0, 0}, {1, 3}}) == -3);
  CHECK(alternating_ell({{1, 2}, {0, 2}}) == 0);  // order does not matter
  CHECK_THROWS_AS(alternating_ell({{0, 1}, {0, 2}}), precondition_error);
  CHECK_THROWS_AS(alternating_ell({{-1, 1}}), precondition_error);
}

TEST_CASE("single Poincare degree recovers its own profile") {
  const Grid grid = make_grid(Sweep{});
  const TorsionReport rep =
      torsion_hessian_profile({{0, scalar_model(minus_log)}}, Rational(1, 2), grid);
  CHECK(rep.asym.ell_alt == 1);
  CHECK(rep.deviation_max <= 1e-9);
  CHECK(rep.trend_ok);
  CHECK(rep.nu_lcm == 1);
  CHECK(rep.anomaly_note.find("r = 1/2") != std::string::npos);
  CHECK(rep.template_note.find("alpha") != std::string::npos);
}

TEST_CASE("identical degrees cancel exactly") {
  const Grid grid = make_grid(Sweep{});
  const SemistableModel m = scalar_model(minus_log);
  const TorsionReport rep = torsion_hessian_profile({{0, m}, {1, m}}, Rational(1), grid);
  CHECK(rep.asym.ell_alt == 0);
  CHECK(rep.deviation_max <= 1e-12);
  for (double v : rep.combination_decade_max) CHECK(v <= 1e-12);
}

TEST_CASE("mixed nu models are pulled to the least common cover") {
  const Grid grid = make_grid(Sweep{});
  Expansion h2 = minus_log;
  h2.add_term(Rational(1), Rational(1), 0, Cx(0.5, 0.0));
  const TorsionReport rep = torsion_hessian_profile(
      {{0, scalar_model(minus_log, 2)}, {1, scalar_model(h2, 3)}}, Rational(2, 3), grid);
  CHECK(rep.nu_lcm == 6);
  REQUIRE(rep.degrees.size() == 2);
  CHECK(rep.degrees[0].cover_power == 3);
  CHECK(rep.degrees[1].cover_power == 2);
  CHECK(rep.degrees[0].ell == 1);
  CHECK(rep.degrees[1].ell == 1);
  CHECK(rep.asym.ell_alt == 0);
  CHECK(rep.trend_ok);
}

TEST_CASE("profile is insensitive to positive rescaling of any degree") {
  const Grid grid = make_grid(Sweep{});
  Expansion h = minus_log;
  h.add_term(Rational(1), Rational(1), 0, Cx(0.25, 0.0));
  SemistableModel a = scalar_model(h);
  SemistableModel b = a;
  b.H.entries[0][0] = scale(b.H.entries[0][0], Cx(7.0, 0.0));
  const TorsionReport ra = torsion_hessian_profile({{0, a}}, Rational(1), grid);
  const TorsionReport rb = torsion_hessian_profile({{0, b}}, Rational(1), grid);
  CHECK(ra.deviation_max == Catch::Approx(rb.deviation_max).epsilon(1e-10));
}

TEST_CASE("declared anomaly exponent must be positive") {
  const Grid grid = make_grid(Sweep{});
  CHECK_THROWS_AS(
      torsion_hessian_profile({{0, scalar_model(minus_log)}}, Rational(0), grid),
      precondition_error);
  CHECK_THROWS_AS(torsion_hessian_profile({}, Rational(1), grid), precondition_error);
}
