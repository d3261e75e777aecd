#pragma once

#include <string>

#include <json.hpp>

#include "asymptote/errors.hpp"
#include "asymptote/expansion.hpp"
#include "asymptote/json_writer.hpp"

namespace asymptote {

// Wire format:
//   {"order": "7/2" | "inf", "terms": [{"p": "1/2", "q": "1/2", "ell": 1,
//                                       "re": 1.0, "im": 0.0}, ...]}
// Exponents are decimal strings of exact rationals; terms are emitted in the
// canonical (p+q, p, ell) order.

inline JsonValue expansion_to_json(const Expansion& e) {
  JsonValue out = JsonValue::object();
  out.set("order", JsonValue::string(e.order() ? to_string(*e.order()) : "inf"));
  JsonValue& terms = out.set("terms", JsonValue::array());
  for (const auto& [k, c] : e.terms()) {
    JsonValue term = JsonValue::object();
    term.set("p", JsonValue::string(to_string(k.p)));
    term.set("q", JsonValue::string(to_string(k.q)));
    term.set("ell", JsonValue::integer(k.ell));
    term.set("re", JsonValue::number(c.real()));
    term.set("im", JsonValue::number(c.imag()));
    terms.push(std::move(term));
  }
  return out;
}

inline Expansion expansion_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw parse_error("expansion must be a JSON object");
  if (!j.contains("terms") || !j.at("terms").is_array())
    throw parse_error("expansion needs a 'terms' array");
  std::optional<Rational> order;
  if (j.contains("order")) {
    const auto& jo = j.at("order");
    if (jo.is_string()) {
      const std::string s = jo.get<std::string>();
      if (s != "inf") {
        try {
          order = rational_from_string(s);
        } catch (const std::invalid_argument& e) {
          throw parse_error(std::string("expansion order: ") + e.what());
        }
      }
    } else if (jo.is_number()) {
      order = Rational(jo.get<long long>());
    } else {
      throw parse_error("expansion 'order' must be a rational string or \"inf\"");
    }
  }
  Expansion e(order);
  for (const auto& jt : j.at("terms")) {
    if (!jt.is_object()) throw parse_error("expansion term must be an object");
    try {
      const Rational p = jt.at("p").is_string()
                             ? rational_from_string(jt.at("p").get<std::string>())
                             : Rational(jt.at("p").get<long long>());
      const Rational q = jt.at("q").is_string()
                             ? rational_from_string(jt.at("q").get<std::string>())
                             : Rational(jt.at("q").get<long long>());
      const int ell = jt.value("ell", 0);
      const double re = jt.value("re", 0.0);
      const double im = jt.value("im", 0.0);
      e.add_term(p, q, ell, Cx(re, im));
    } catch (const nlohmann::json::exception& ex) {
      throw parse_error(std::string("malformed expansion term: ") + ex.what());
    } catch (const std::invalid_argument& ex) {
      throw parse_error(std::string("malformed expansion term: ") + ex.what());
    } catch (const precondition_error& ex) {
      throw parse_error(std::string("invalid expansion term: ") + ex.what());
    }
  }
  return e;
}

}  // namespace asymptote
