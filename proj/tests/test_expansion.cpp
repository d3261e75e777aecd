#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "asymptote/expansion.hpp"
#include "asymptote/expansion_io.hpp"
#include "asymptote/gen.hpp"
#include "support/oracles.hpp"

using namespace asymptote;

namespace {

Expansion single(const Rational& p, const Rational& q, int ell, Cx c) {
  Expansion e;
  e.add_term(p, q, ell, c);
  return e;
}

const Cx one(1.0, 0.0);

}  // namespace

TEST_CASE("construction enforces the key invariants") {
  Expansion e;
  CHECK_THROWS_AS(e.add_term(Rational(1, 2), Rational(0), 0, one), precondition_error);
  CHECK_THROWS_AS(e.add_term(Rational(1), Rational(1), -1, one), precondition_error);
  CHECK_THROWS_AS(e.add_term(Rational(1), Rational(1), 0, Cx(std::nan(""), 0.0)),
                  precondition_error);
  e.add_term(Rational(1, 3), Rational(4, 3), 2, one);  // p - q = -1 is fine
  CHECK(e.size() == 1);
}

TEST_CASE("add merges by key and cancels exactly") {
  const Expansion tt = single(Rational(1), Rational(1), 0, one);
  SECTION("exact cancellation leaves an empty expansion") {
    const Expansion sum = add(tt, scale(tt, Cx(-1.0, 0.0)));
    CHECK(sum.empty());
    CHECK(!sum.has_finite_order());
  }
  SECTION("like terms merge") {
    const Expansion l = single(Rational(0), Rational(0), 1, one);
    const Expansion sum = add(l, scale(l, Cx(3.0, 0.0)));
    REQUIRE(sum.size() == 1);
    CHECK(sum.terms().begin()->second == Cx(4.0, 0.0));
  }
  SECTION("order bookkeeping takes the minimum") {
    Expansion a = single(Rational(1, 2), Rational(1, 2), 0, one);
    a.set_order(Rational(3));
    Expansion b = tt;
    b.set_order(Rational(2));
    const Expansion sum = add(a, b);
    CHECK(sum.size() == 2);
    REQUIRE(sum.has_finite_order());
    CHECK(*sum.order() == 2);
  }
}

TEST_CASE("mul multiplies termwise with conservative order propagation") {
  CHECK(mul(single(Rational(1), Rational(0), 0, one), single(Rational(0), Rational(1), 0, one)) ==
        single(Rational(1), Rational(1), 0, one));
  const Expansion l = single(Rational(0), Rational(0), 1, one);
  CHECK(mul(l, l) == single(Rational(0), Rational(0), 2, one));
  CHECK(mul(single(Rational(1, 3), Rational(1, 3), 0, one),
            single(Rational(2, 3), Rational(2, 3), 0, one)) ==
        single(Rational(1), Rational(1), 0, one));

  SECTION("order rule min(o_a + w_b, o_b + w_a) with truncation") {
    Expansion a = single(Rational(1), Rational(1), 0, one);  // weight 2
    a.set_order(Rational(4));
    Expansion b = add(single(Rational(0), Rational(0), 0, one),
                      single(Rational(2), Rational(2), 0, one));  // weights 0, 4
    b.set_order(Rational(5));
    const Expansion prod = mul(a, b);
    REQUIRE(prod.has_finite_order());
    CHECK(*prod.order() == 4);  // min(4 + 0, 5 + 2)
    // the weight-6 product lies above the order and is dropped
    CHECK(prod.size() == 1);
    CHECK(prod.weight() == 2);
  }
  SECTION("empty factor keeps the min order") {
    Expansion empty_e(Rational(2));
    Expansion b = single(Rational(1), Rational(1), 0, one);
    b.set_order(Rational(7));
    const Expansion prod = mul(empty_e, b);
    CHECK(prod.empty());
    REQUIRE(prod.has_finite_order());
    CHECK(*prod.order() == 2);
  }
}

TEST_CASE("Wirtinger derivatives, frozen cases") {
  SECTION("d/dt |t|^2 = tbar") {
    CHECK(d_dt(single(Rational(1), Rational(1), 0, one)) ==
          single(Rational(0), Rational(1), 0, one));
  }
  SECTION("d/dt grabs both the power and the log branch") {
    // |t| L: p = q = 1/2, ell = 1
    const Expansion h = single(Rational(1, 2), Rational(1, 2), 1, one);
    Expansion want;
    want.add_term(Rational(-1, 2), Rational(1, 2), 1, Cx(0.5, 0.0));
    want.add_term(Rational(-1, 2), Rational(1, 2), 0, one);
    CHECK(d_dt(h) == want);
  }
  SECTION("log|t|^2 is harmonic away from the origin") {
    const Expansion l = single(Rational(0), Rational(0), 1, one);
    CHECK(d_dt(l) == single(Rational(-1), Rational(0), 0, one));
    CHECK(d_dtbar(d_dt(l)).empty());
  }
  SECTION("order decreases by exactly one") {
    Expansion a = single(Rational(1), Rational(1), 1, one);
    a.set_order(Rational(5, 2));
    const Expansion da = d_dt(a);
    REQUIRE(da.has_finite_order());
    CHECK(*da.order() == Rational(3, 2));
  }
}

TEST_CASE("derivatives against the independent term oracle") {
  Rng rng(101);
  for (int i = 0; i < 25; ++i) {
    const Expansion a = random_expansion(rng);
    const oracle::NaiveSum na = oracle::naive_from(a);
    const Cx t = std::polar(rng.uniform(0.1, 0.5), rng.uniform(0.0, 2 * M_PI));
    const Cx got_t = eval(d_dt(a), t);
    const Cx want_t = oracle::naive_eval(oracle::naive_diff_t(na), t);
    const Cx got_tb = eval(d_dtbar(a), t);
    const Cx want_tb = oracle::naive_eval(oracle::naive_diff_tbar(na), t);
    const double scale = std::abs(want_t) + std::abs(want_tb) + 1e-12;
    CHECK(std::abs(got_t - want_t) / scale < 1e-12);
    CHECK(std::abs(got_tb - want_tb) / scale < 1e-12);
  }
}

TEST_CASE("conjugation is an involution and mirrors keys") {
  CHECK(conj_expansion(single(Rational(1), Rational(0), 0, Cx(0.0, 1.0))) ==
        single(Rational(0), Rational(1), 0, Cx(0.0, -1.0)));
  Rng rng(7);
  for (int i = 0; i < 10; ++i) {
    const Expansion a = random_expansion(rng);
    CHECK(conj_expansion(conj_expansion(a)) == a);
  }
  // a mirror-symmetric expansion is fixed by conjugation
  Expansion sym;
  sym.add_term(Rational(2), Rational(1), 1, Cx(0.25, -0.5));
  sym.add_term(Rational(1), Rational(2), 1, Cx(0.25, 0.5));
  CHECK(is_real_symmetric(sym));
  CHECK(conj_expansion(sym) == sym);
}

TEST_CASE("eval frozen cases and domain errors") {
  const Expansion l = single(Rational(0), Rational(0), 1, one);
  CHECK(eval(l, Cx(std::exp(-1.0), 0.0)).real() == Catch::Approx(-2.0).margin(1e-14));
  const Expansion frac = single(Rational(3, 2), Rational(1, 2), 0, one);
  const Cx t = std::polar(0.3, 0.8);
  const Cx want = 0.09 * std::exp(Cx(0.0, 0.8));
  CHECK(std::abs(eval(frac, t) - want) < 1e-15);
  CHECK(eval(Expansion{}, t) == Cx(0.0, 0.0));
  CHECK_THROWS_AS(eval(l, Cx(0.0, 0.0)), precondition_error);
  CHECK_THROWS_AS(eval(l, Cx(1.0, 0.0)), precondition_error);
}

TEST_CASE("pullback by a power substitution") {
  CHECK(pullback_power(single(Rational(1), Rational(1), 0, one), 2) ==
        single(Rational(2), Rational(2), 0, one));
  CHECK(pullback_power(single(Rational(0), Rational(0), 1, one), 3) ==
        single(Rational(0), Rational(0), 1, Cx(3.0, 0.0)));
  CHECK_THROWS_AS(pullback_power(Expansion{}, 0), precondition_error);

  SECTION("eval consistency on a random 10-term expansion") {
    Rng rng(2024);
    ExpansionGenSpec spec;
    spec.max_terms = 10;
    const Expansion a = random_expansion(rng, spec);
    const Cx t = std::polar(0.3, 0.7);
    const Cx direct = eval(a, std::pow(t, 2));
    const Cx pulled = eval(pullback_power(a, 2), t);
    CHECK(std::abs(pulled - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
  }
  SECTION("functoriality, exactly") {
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      const Expansion a = random_expansion(rng);
      CHECK(pullback_power(pullback_power(a, 2), 3) == pullback_power(a, 6));
    }
  }
}

TEST_CASE("weight and leading log order") {
  Expansion g;
  g.add_term(Rational(0), Rational(0), 2, Cx(2.0, 0.0));
  g.add_term(Rational(0), Rational(0), 1, Cx(3.0, 0.0));
  g.add_term(Rational(0), Rational(0), 0, Cx(5.0, 0.0));
  CHECK(weight_and_logorder(g) == std::pair<Rational, int>{Rational(0), 2});

  Expansion h;
  h.add_term(Rational(1), Rational(1), 5, one);
  h.add_term(Rational(0), Rational(0), 0, Cx(7.0, 0.0));
  CHECK(weight_and_logorder(h) == std::pair<Rational, int>{Rational(0), 0});

  Expansion k;
  k.add_term(Rational(1), Rational(1), 1, one);
  k.add_term(Rational(2), Rational(2), 0, one);
  CHECK(weight_and_logorder(k) == std::pair<Rational, int>{Rational(2), 1});

  CHECK_THROWS_AS(weight_and_logorder(Expansion{}), precondition_error);
}

TEST_CASE("Leibniz and mixed partials, exact on dyadic inputs") {
  Rng rng(kDefaultSeed);
  for (int i = 0; i < 60; ++i) {
    Expansion a = random_expansion(rng);
    Expansion b = random_expansion(rng);
    if (i % 3 == 0) a.set_order(Rational(rng.uniform_int(2, 5)));
    if (i % 4 == 0) b.set_order(Rational(rng.uniform_int(2, 5)));
    const Expansion lhs = d_dt(mul(a, b));
    const Expansion rhs = add(mul(d_dt(a), b), mul(a, d_dt(b)));
    if (lhs.order()) {
      CHECK(truncate(lhs, *lhs.order()) == truncate(rhs, *lhs.order()));
    } else {
      CHECK(lhs == rhs);
    }
    CHECK(d_dtbar(d_dt(a)) == d_dt(d_dtbar(a)));
  }
}

TEST_CASE("Leibniz holds to rounding for generic coefficients") {
  Rng rng(33);
  ExpansionGenSpec spec;
  spec.dyadic_coeffs = false;
  for (int i = 0; i < 20; ++i) {
    const Expansion a = random_expansion(rng, spec);
    const Expansion b = random_expansion(rng, spec);
    const Expansion prod = mul(a, b);
    const Expansion diff = sub(d_dt(prod), add(mul(d_dt(a), b), mul(a, d_dt(b))));
    double max_c = 0.0, scale = 0.0;
    for (const auto& [k, c] : diff.terms()) max_c = std::max(max_c, std::abs(c));
    for (const auto& [k, c] : prod.terms()) scale = std::max(scale, std::abs(c));
    CHECK(max_c <= 1e-13 * std::max(1.0, scale) * 10);
  }
}

TEST_CASE("finite differences confirm the derivative rules") {
  Rng rng(404);
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const Expansion a = random_expansion(rng);
    const Expansion at = d_dt(a);
    auto f = [&](Cx z) { return eval(a, z); };
    for (int p = 0; p < 5; ++p) {
      const double rho = rng.uniform(0.05, 0.5);
      const Cx t = std::polar(rho, rng.uniform(0.0, 2 * M_PI));
      const double h = 1e-6 * rho;
      const Cx fd = oracle::fd_dt(f, t, h);
      const Cx sym = eval(at, t);
      const double denom = std::max(std::abs(sym), 1e-8 * term_scale(at, rho) + 1e-300);
      worst = std::max(worst, std::abs(fd - sym) / denom);
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("clean prunes only below the relative threshold, explicitly") {
  Expansion e;
  e.add_term(Rational(0), Rational(0), 0, Cx(1.0, 0.0));
  e.add_term(Rational(1), Rational(1), 0, Cx(1e-16, 0.0));
  CHECK(e.size() == 2);  // nothing implicit
  CHECK(clean(e).size() == 1);
  CHECK(clean(e, 1e-17).size() == 2);
}

TEST_CASE("serialization round-trips and is canonical") {
  Expansion e(Rational(7, 2));
  e.add_term(Rational(1, 2), Rational(1, 2), 1, Cx(1.0, 0.0));
  e.add_term(Rational(0), Rational(0), 0, Cx(-2.5, 0.25));
  const std::string text = expansion_to_json(e).dump();
  const Expansion back = expansion_from_json(nlohmann::json::parse(text));
  CHECK(back == e);
  // canonical order: weight ascending
  const auto j = nlohmann::json::parse(text);
  CHECK(j.at("order") == "7/2");
  CHECK(j.at("terms").at(0).at("p") == "0");
  CHECK(j.at("terms").at(1).at("p") == "1/2");

  SECTION("round-trip property on random expansions") {
    Rng rng(9);
    ExpansionGenSpec spec;
    spec.dyadic_coeffs = false;
    for (int i = 0; i < 20; ++i) {
      Expansion a = random_expansion(rng, spec);
      if (i % 2 == 0) a.set_order(Rational(rng.uniform_int(1, 9), 2));
      const Expansion back2 =
          expansion_from_json(nlohmann::json::parse(expansion_to_json(a).dump()));
      CHECK(back2 == a);
    }
  }
  SECTION("malformed inputs raise parse errors") {
    CHECK_THROWS_AS(expansion_from_json(nlohmann::json::parse("{}")), parse_error);
    CHECK_THROWS_AS(
        expansion_from_json(nlohmann::json::parse(R"({"order":"x","terms":[]})")),
        parse_error);
    CHECK_THROWS_AS(expansion_from_json(nlohmann::json::parse(
                        R"({"order":"inf","terms":[{"p":"1/2","q":"0","ell":0,"re":1}]})")),
                    parse_error);
  }
}
