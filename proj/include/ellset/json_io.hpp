#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ellset/acdo.hpp"
#include "ellset/counterexample.hpp"
#include "ellset/errors.hpp"
#include "ellset/levelsets.hpp"
#include "ellset/operators.hpp"
#include "ellset/symmat.hpp"

namespace ellset {

using Json = nlohmann::json;

inline Json symmat_to_json(const SymMat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.dim(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.dim(); ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline SymMat symmat_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw ParseError(field + ": expected a non-empty array of rows");
  const int n = static_cast<int>(j.size());
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(n) * n);
  for (const Json& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ParseError(field + ": expected a square array");
    for (const Json& v : row) {
      if (!v.is_number()) throw ParseError(field + ": entries must be numbers");
      flat.push_back(v.get<double>());
    }
  }
  return SymMat::from_rows(n, flat);
}

namespace detail {

inline double json_num(const Json& params, const std::string& key, double fallback,
                       const std::string& prefix) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number()) throw ParseError(prefix + key + ": expected a number");
  return params[key].get<double>();
}

inline void reject_unknown_keys(const Json& params, const std::vector<std::string>& allowed) {
  for (auto it = params.begin(); it != params.end(); ++it) {
    bool known = false;
    for (const std::string& k : allowed)
      if (it.key() == k) known = true;
    if (!known) throw ParseError("params." + it.key() + ": unknown parameter");
  }
}

}  // namespace detail

/// {"kind": ..., "n": ..., "params": {...}} -> OperatorSpec. Structural
/// problems raise ParseError naming the offending field; semantic ones
/// (e.g. a vanishing coefficient) are left to make_operator.
inline OperatorSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("operator spec: expected a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw ParseError("kind: required string field");
  OperatorSpec spec;
  spec.kind = j["kind"].get<std::string>();
  const std::vector<std::string> kinds = {"laplacian",    "max_eigenvalue", "linear_constant",
                                          "linear_field", "monge_ampere",   "plateau",
                                          "counterexample_linear"};
  bool known = false;
  for (const std::string& k : kinds)
    if (spec.kind == k) known = true;
  if (!known) throw ParseError("kind: unknown operator kind '" + spec.kind + "'");

  if (j.contains("n")) {
    if (!j["n"].is_number_integer() || j["n"].get<int>() < 1)
      throw ParseError("n: expected a positive integer");
    spec.n = j["n"].get<int>();
  }
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "kind" && it.key() != "n" && it.key() != "params")
      throw ParseError(it.key() + ": unknown field");

  Json params = j.contains("params") ? j["params"] : Json::object();
  if (!params.is_object()) throw ParseError("params: expected an object");
  if (params.contains("space_dim")) {
    if (!params["space_dim"].is_number_integer() || params["space_dim"].get<int>() < 1)
      throw ParseError("params.space_dim: expected a positive integer");
    spec.space_dim = params["space_dim"].get<int>();
  }

  if (spec.kind == "laplacian" || spec.kind == "max_eigenvalue" ||
      spec.kind == "counterexample_linear") {
    detail::reject_unknown_keys(params, {"space_dim"});
  } else if (spec.kind == "plateau") {
    detail::reject_unknown_keys(params, {"space_dim", "width"});
    spec.width = detail::json_num(params, "width", 1.0, "params.");
  } else if (spec.kind == "monge_ampere") {
    detail::reject_unknown_keys(params, {"space_dim", "f0", "f_quad"});
    spec.f0 = detail::json_num(params, "f0", 1.0, "params.");
    spec.f_quad = detail::json_num(params, "f_quad", 0.0, "params.");
  } else if (spec.kind == "linear_constant") {
    detail::reject_unknown_keys(params, {"space_dim", "A", "f"});
    if (!params.contains("A")) throw ParseError("params.A: required for linear_constant");
    spec.A = symmat_from_json(params["A"], "params.A");
    spec.f = detail::json_num(params, "f", 0.0, "params.");
  } else if (spec.kind == "linear_field") {
    detail::reject_unknown_keys(params, {"space_dim", "A0", "A_coeffs", "f0", "f_coeffs"});
    if (!params.contains("A0")) throw ParseError("params.A0: required for linear_field");
    spec.A0 = symmat_from_json(params["A0"], "params.A0");
    if (!params.contains("A_coeffs") || !params["A_coeffs"].is_array())
      throw ParseError("params.A_coeffs: required array for linear_field");
    for (const Json& m : params["A_coeffs"])
      spec.A_coeffs.push_back(symmat_from_json(m, "params.A_coeffs"));
    spec.f0 = detail::json_num(params, "f0", 0.0, "params.");
    if (params.contains("f_coeffs")) {
      if (!params["f_coeffs"].is_array())
        throw ParseError("params.f_coeffs: expected an array of numbers");
      for (const Json& v : params["f_coeffs"]) {
        if (!v.is_number()) throw ParseError("params.f_coeffs: entries must be numbers");
        spec.f_coeffs.push_back(v.get<double>());
      }
    }
    if (!params.contains("space_dim"))
      spec.space_dim = static_cast<int>(spec.A_coeffs.size());
  }
  return spec;
}

inline Json spec_to_json(const OperatorSpec& spec) {
  Json j;
  j["kind"] = spec.kind;
  j["n"] = spec.n;
  Json params = Json::object();
  params["space_dim"] = spec.space_dim;
  if (spec.kind == "plateau") params["width"] = spec.width;
  if (spec.kind == "monge_ampere") {
    params["f0"] = spec.f0;
    params["f_quad"] = spec.f_quad;
  }
  if (spec.kind == "linear_constant") {
    params["A"] = symmat_to_json(spec.A);
    params["f"] = spec.f;
  }
  if (spec.kind == "linear_field") {
    params["A0"] = symmat_to_json(spec.A0);
    Json coeffs = Json::array();
    for (const SymMat& m : spec.A_coeffs) coeffs.push_back(symmat_to_json(m));
    params["A_coeffs"] = std::move(coeffs);
    params["f0"] = spec.f0;
    params["f_coeffs"] = spec.f_coeffs;
  }
  j["params"] = std::move(params);
  return j;
}

/// Reads and parses an operator spec file.
inline OperatorSpec parse_operator_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open operator spec file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return spec_from_json(j);
}

inline Json acdo_result_to_json(const AcdoResult& r) {
  Json j;
  j["value"] = r.value;
  j["bracket"] = Json::array({r.t_lo, r.t_hi});
  j["evals"] = r.evals;
  return j;
}

inline Json condition_report_to_json(const ConditionReport& report, const ConditionVerdict& v) {
  Json j;
  j["base_point"] = report.base_point;
  Json rows = Json::array();
  for (const ConditionRow& row : report.rows) {
    Json r;
    r["t"] = row.t;
    r["sup_excess_plus"] = row.sup_excess_plus;
    r["sup_excess_minus"] = row.sup_excess_minus;
    r["pairs_sampled"] = row.pairs_sampled;
    r["witness_plus"] = symmat_to_json(row.witness_plus);
    r["witness_minus"] = symmat_to_json(row.witness_minus);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["verdict"] = Json{{"pass", v.pass},
                      {"flat_zero", v.flat_zero},
                      {"slope", v.slope},
                      {"final_value", v.final_value}};
  return j;
}

inline Json axis_result_to_json(const AxisCheckResult& r) {
  return Json{{"pass", r.pass},
              {"extreme_residual", r.extreme_residual},
              {"accepted", r.accepted},
              {"trials", r.trials}};
}

inline Json certificate_to_json(const CounterexampleCertificate& c) {
  Json j;
  j["boundary_min_gap"] = c.boundary.min_gap;
  j["worst_boundary_point"] = Json::array({c.boundary.worst_point.x, c.boundary.worst_point.y});
  j["interior_max_gap"] = c.interior.max_gap;
  j["argmax_x"] = c.interior.argmax_x;
  j["residual_stats"] = Json{{"max_abs", c.residual.max_abs}, {"samples", c.residual.samples}};
  j["rank_one_max_error"] = c.rank_one_max_error;
  j["axis_check_results"] =
      Json{{"above", axis_result_to_json(c.axis_above)}, {"below", axis_result_to_json(c.axis_below)}};
  j["touching"] = Json{{"a", c.touching.a},
                       {"b", Json::array({c.touching.bx, c.touching.by})},
                       {"m", c.touching.m},
                       {"touch_point", Json::array({c.touch_point.x, c.touch_point.y})}};
  return j;
}

/// Writes content to path via a sibling temp file and an atomic rename.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.good()) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ellset
