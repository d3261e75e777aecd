#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "asymptote/errors.hpp"
#include "asymptote/expansion_io.hpp"
#include "asymptote/metric.hpp"
#include "asymptote/monodromy.hpp"
#include "asymptote/rational.hpp"
#include "asymptote/sweep.hpp"

namespace asymptote {

// Scenario file:
// {
//   "kind": "expansion" | "metric" | "monodromy" | "torsion",
//   "payload": {...},
//   "sweep": {"rays": 16 | [angles...], "rho_min": 1e-8, "rho_max": 0.5,
//             "points_per_decade": 8},
//   "tolerances": {"fd_rel": 1e-5, "exact_rel": 1e-10, "trend_pct": 5.0,
//                  "fd_step_scale": 1e-6}
// }
// sweep and tolerances are optional and default as above.
struct Scenario {
  std::string kind;
  nlohmann::json payload;
  Sweep sweep;
  Tolerances tol;
};

namespace detail {

inline double json_number(const nlohmann::json& j, const char* what) {
  if (!j.is_number()) throw parse_error(std::string(what) + " must be a number");
  return j.get<double>();
}

}  // namespace detail

inline Sweep sweep_from_json(const nlohmann::json& j) {
  Sweep s;
  if (j.contains("rays")) {
    const auto& r = j.at("rays");
    if (r.is_number_integer()) {
      s.rays = r.get<int>();
    } else if (r.is_array()) {
      for (const auto& a : r) s.angles.push_back(detail::json_number(a, "ray angle"));
    } else {
      throw parse_error("sweep 'rays' must be an integer count or an array of angles");
    }
  }
  if (j.contains("rho_min")) s.rho_min = detail::json_number(j.at("rho_min"), "rho_min");
  if (j.contains("rho_max")) s.rho_max = detail::json_number(j.at("rho_max"), "rho_max");
  if (j.contains("points_per_decade")) {
    if (!j.at("points_per_decade").is_number_integer())
      throw parse_error("points_per_decade must be an integer");
    s.points_per_decade = j.at("points_per_decade").get<int>();
  }
  return s;
}

inline Tolerances tolerances_from_json(const nlohmann::json& j) {
  Tolerances t;
  if (j.contains("fd_rel")) t.fd_rel = detail::json_number(j.at("fd_rel"), "fd_rel");
  if (j.contains("exact_rel")) t.exact_rel = detail::json_number(j.at("exact_rel"), "exact_rel");
  if (j.contains("trend_pct")) t.trend_pct = detail::json_number(j.at("trend_pct"), "trend_pct");
  if (j.contains("fd_step_scale"))
    t.fd_step_scale = detail::json_number(j.at("fd_step_scale"), "fd_step_scale");
  return t;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("scenario JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw parse_error("scenario must be a JSON object");
  Scenario sc;
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw parse_error("scenario needs a string 'kind'");
  sc.kind = j.at("kind").get<std::string>();
  if (sc.kind != "expansion" && sc.kind != "metric" && sc.kind != "monodromy" &&
      sc.kind != "torsion")
    throw parse_error("unknown scenario kind: " + sc.kind);
  if (!j.contains("payload")) throw parse_error("scenario needs a 'payload'");
  sc.payload = j.at("payload");
  if (j.contains("sweep")) sc.sweep = sweep_from_json(j.at("sweep"));
  if (j.contains("tolerances")) sc.tol = tolerances_from_json(j.at("tolerances"));
  sc.sweep.validate();
  sc.tol.validate();
  return sc;
}

inline Expansion payload_expansion(const nlohmann::json& payload) {
  return expansion_from_json(payload);
}

// Metric payload: {"nu": 2, "e": [0, 1], "H": [[expansion, ...], ...], "n": 3}.
// nu defaults to 1 and e to zeros.
inline SemistableModel payload_model(const nlohmann::json& payload) {
  if (!payload.is_object()) throw parse_error("metric payload must be an object");
  if (!payload.contains("H") || !payload.at("H").is_array())
    throw parse_error("metric payload needs an 'H' matrix");
  SemistableModel m;
  const auto& H = payload.at("H");
  const int dim = static_cast<int>(H.size());
  if (dim == 0) throw parse_error("'H' must be non-empty");
  m.H.dim = dim;
  m.H.var = Var::t;
  m.H.entries.assign(dim, std::vector<Expansion>(dim));
  for (int a = 0; a < dim; ++a) {
    if (!H.at(a).is_array() || static_cast<int>(H.at(a).size()) != dim)
      throw parse_error("'H' must be a square matrix of expansions");
    for (int b = 0; b < dim; ++b) m.H.entries[a][b] = expansion_from_json(H.at(a).at(b));
  }
  if (payload.contains("nu")) {
    if (!payload.at("nu").is_number_integer()) throw parse_error("'nu' must be an integer");
    m.nu = payload.at("nu").get<int>();
  }
  if (payload.contains("e")) {
    if (!payload.at("e").is_array()) throw parse_error("'e' must be an array of integers");
    for (const auto& v : payload.at("e")) {
      if (!v.is_number_integer()) throw parse_error("'e' must be an array of integers");
      m.e.push_back(v.get<long long>());
    }
  } else {
    m.e.assign(dim, 0);
  }
  if (!payload.contains("n") || !payload.at("n").is_number_integer())
    throw parse_error("metric payload needs an integer 'n'");
  m.n = payload.at("n").get<int>();
  m.validate();
  return m;
}

// Monodromy payload:
// {"n": 1, "N": [["0","1"],["0","0"]], "Q": [[{"re":..,"im":..}, ...], ...],
//  "b": [expansion, ...], "c": [expansion, ...]}   (c defaults to b)
inline std::pair<MonodromyData, SectionCoeffs> payload_monodromy(const nlohmann::json& payload) {
  if (!payload.is_object()) throw parse_error("monodromy payload must be an object");
  MonodromyData data;
  if (!payload.contains("n") || !payload.at("n").is_number_integer())
    throw parse_error("monodromy payload needs an integer 'n'");
  data.n = payload.at("n").get<int>();
  if (!payload.contains("N") || !payload.at("N").is_array())
    throw parse_error("monodromy payload needs a matrix 'N'");
  const auto& N = payload.at("N");
  data.dim = static_cast<int>(N.size());
  for (const auto& row : N) {
    if (!row.is_array() || static_cast<int>(row.size()) != data.dim)
      throw parse_error("'N' must be a square matrix");
    std::vector<Rational> r;
    for (const auto& v : row) {
      try {
        r.push_back(v.is_string() ? rational_from_string(v.get<std::string>())
                                  : Rational(v.get<long long>()));
      } catch (const std::invalid_argument& e) {
        throw parse_error(std::string("matrix 'N': ") + e.what());
      }
    }
    data.N.push_back(std::move(r));
  }
  if (!payload.contains("Q") || !payload.at("Q").is_array())
    throw parse_error("monodromy payload needs a matrix 'Q'");
  for (const auto& row : payload.at("Q")) {
    if (!row.is_array() || static_cast<int>(row.size()) != data.dim)
      throw parse_error("'Q' must be a square matrix");
    std::vector<Cx> r;
    for (const auto& v : row) {
      if (v.is_object())
        r.emplace_back(v.value("re", 0.0), v.value("im", 0.0));
      else if (v.is_number())
        r.emplace_back(v.get<double>(), 0.0);
      else
        throw parse_error("'Q' entries must be {re, im} objects or numbers");
    }
    data.Q.push_back(std::move(r));
  }
  SectionCoeffs coeffs;
  if (!payload.contains("b") || !payload.at("b").is_array())
    throw parse_error("monodromy payload needs section coefficients 'b'");
  for (const auto& v : payload.at("b")) coeffs.b.push_back(expansion_from_json(v));
  if (payload.contains("c")) {
    if (!payload.at("c").is_array()) throw parse_error("'c' must be an array of expansions");
    for (const auto& v : payload.at("c")) coeffs.c.push_back(expansion_from_json(v));
  } else {
    coeffs.c = coeffs.b;
  }
  data.validate();
  coeffs.validate(data.dim);
  return {std::move(data), std::move(coeffs)};
}

struct TorsionInput {
  std::vector<std::pair<int, SemistableModel>> models;
  Rational anomaly_r;
};

// Torsion payload: {"models": [{"q": 0, ...metric payload...}, ...],
//                   "anomaly_r": "1/2"}
inline TorsionInput payload_torsion(const nlohmann::json& payload) {
  if (!payload.is_object()) throw parse_error("torsion payload must be an object");
  if (!payload.contains("models") || !payload.at("models").is_array() ||
      payload.at("models").empty())
    throw parse_error("torsion payload needs a non-empty 'models' array");
  TorsionInput input;
  for (const auto& jm : payload.at("models")) {
    if (!jm.is_object() || !jm.contains("q") || !jm.at("q").is_number_integer())
      throw parse_error("each torsion model needs an integer degree 'q'");
    input.models.emplace_back(jm.at("q").get<int>(), payload_model(jm));
  }
  if (!payload.contains("anomaly_r"))
    throw parse_error("torsion payload needs a declared 'anomaly_r'");
  const auto& r = payload.at("anomaly_r");
  try {
    input.anomaly_r = r.is_string() ? rational_from_string(r.get<std::string>())
                                    : Rational(r.get<long long>());
  } catch (const std::invalid_argument& e) {
    throw parse_error(std::string("anomaly_r: ") + e.what());
  }
  return input;
}

}  // namespace asymptote
