#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ellset/acdo.hpp"
#include "ellset/errors.hpp"
#include "ellset/json_io.hpp"
#include "ellset/levelsets.hpp"
#include "ellset/matrixineq.hpp"
#include "ellset/operators.hpp"
#include "ellset/propsuite.hpp"

namespace ellset {

/// Parsed run request. `command` selects the suite; the remaining fields
/// are command-specific knobs with usable defaults.
struct RunConfig {
  std::string command;            // acdo | condition | matrixineq | counterexample | properties
  std::string operator_path;      // --operator: JSON operator spec
  std::string matrix_literal;     // --X: "r1c1,r1c2;r2c1,r2c2"
  std::string point_literal;      // --x0: comma-separated coordinates
  std::string schedule_literal;   // --t: comma-separated decreasing radii
  int grid = 256;                 // --grid: diamond-grid resolution
  int pairs = 8;                  // condition: point pairs per radius
  int samples = 40;               // condition: level-set samples per pair
  int trials = 1000;              // matrixineq: random instances
  int edge_samples = 10000;       // counterexample: boundary samples per edge
  int residual_samples = 10000;   // counterexample: off-axis residual points
  int axis_trials = 500;          // counterexample: touching quadratics per side
  std::uint64_t seed = 2026;
  double tol = 1e-10;
  std::string output_path;        // --out: empty writes to the stream
  std::string format = "json";    // --format: json | csv
};

namespace cli_detail {

inline std::vector<double> parse_csv_doubles(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string piece =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(piece, &used);
    } catch (const std::exception&) {
      throw ParseError(what + ": cannot parse '" + piece + "' as a number");
    }
    while (used < piece.size() && (piece[used] == ' ' || piece[used] == '\t')) ++used;
    if (used != piece.size())
      throw ParseError(what + ": trailing characters in '" + piece + "'");
    values.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.empty()) throw ParseError(what + ": empty list");
  return values;
}

/// Rows separated by ';', entries by ','. The result is symmetrized.
inline SymMat parse_matrix_literal(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t semi = text.find(';', start);
    std::string row =
        text.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
    rows.push_back(parse_csv_doubles(row, "--X row " + std::to_string(rows.size() + 1)));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  const std::size_t n = rows.size();
  std::vector<double> entries;
  entries.reserve(n * n);
  for (const auto& row : rows) {
    if (row.size() != n)
      throw ParseError("--X: matrix literal is not square (" + std::to_string(n) + " rows, row with " +
                       std::to_string(row.size()) + " entries)");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return SymMat::from_rows(static_cast<int>(n), entries);
}

inline void emit(const RunConfig& config, const std::string& payload, std::ostream& out,
                 std::ostream& diag) {
  if (config.output_path.empty()) {
    out << payload;
    if (!payload.empty() && payload.back() != '\n') out << '\n';
  } else {
    atomic_write_file(config.output_path, payload);
    diag << "wrote " << config.output_path << "\n";
  }
}

inline Json failure_report(const std::string& command, const std::string& reason, Json witness) {
  Json j;
  j["status"] = "fail";
  j["command"] = command;
  j["reason"] = reason;
  if (!witness.is_null()) j["witness"] = std::move(witness);
  return j;
}

inline EllipticOperator load_operator(const RunConfig& config) {
  if (config.operator_path.empty())
    throw ConfigError(config.command + ": --operator is required");
  return make_operator(parse_operator_spec(config.operator_path));
}

inline Point parse_point_or_origin(const RunConfig& config, int space_dim) {
  if (config.point_literal.empty()) return Point(static_cast<std::size_t>(space_dim), 0.0);
  Point x0 = parse_csv_doubles(config.point_literal, "--x0");
  if (static_cast<int>(x0.size()) != space_dim)
    throw ConfigError("--x0 has " + std::to_string(x0.size()) + " coordinates, operator expects " +
                      std::to_string(space_dim));
  return x0;
}

inline int run_acdo(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  EllipticOperator F = load_operator(config);
  if (config.matrix_literal.empty()) throw ConfigError("acdo: --X is required");
  SymMat X = parse_matrix_literal(config.matrix_literal);
  Point x0 = parse_point_or_origin(config, F.space_dim());
  try {
    AcdoResult result = compute_acdo(F, X, x0, config.tol);
    emit(config, acdo_result_to_json(result).dump(2), out, diag);
    return 0;
  } catch (const NoBracket& e) {
    Json report = failure_report("acdo", e.what(), symmat_to_json(X));
    emit(config, report.dump(2), out, diag);
    diag << "acdo failed: " << e.what() << "\n";
    return 1;
  }
}

inline int run_condition(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  EllipticOperator F = load_operator(config);
  Point x0 = parse_point_or_origin(config, F.space_dim());
  std::vector<double> schedule{0.1, 0.05, 0.02, 0.01};
  if (!config.schedule_literal.empty())
    schedule = parse_csv_doubles(config.schedule_literal, "--t");
  if (config.pairs < 1 || config.samples < 1)
    throw ConfigError("condition: --pairs and --samples must be positive");

  ConditionReport report =
      check_condition(F, x0, schedule, config.pairs, config.samples, config.seed, config.tol);
  ConditionVerdict verdict = condition_verdict(report, config.tol);
  if (config.format == "csv")
    emit(config, condition_report_csv(report), out, diag);
  else
    emit(config, condition_report_to_json(report, verdict).dump(2), out, diag);
  if (!verdict.pass) {
    diag << "condition check failed: sup excess does not vanish (slope "
         << verdict.slope << ", final " << verdict.final_value << ")\n";
    return 1;
  }
  return 0;
}

inline int run_matrixineq(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  if (config.trials < 1) throw ConfigError("matrixineq: --trials must be positive");
  const int n = 3;
  int block_fail = 0, cong_fail = 0, bound_fail = 0, fwd_fail = 0, rev_fail = 0;
  for (int i = 0; i < config.trials; ++i) {
    Rng rng = substream(mix_seed(config.seed, 31), static_cast<std::uint64_t>(i));
    SymMat X = random_sym_from(n, rng.uniform(0.5, 2.5), rng);
    double opn = std::max(op_norm(X), 1e-9);
    double delta = rng.uniform(0.02, 0.98) / opn;
    BlockPair p{X, resolvent_transform(X, delta), 1.0 / delta};
    if (!block_inequality_holds(p, 1e-9)) ++block_fail;

    int m = 1 + static_cast<int>(rng.below(3));
    RectMat q1 = RectMat::random(n, m, 2.0, rng);
    RectMat q2 = RectMat::random(n, m, 2.0, rng);
    if (!congruence_resolvent_check(X, delta, q1, q2, 1e-9)) ++cong_fail;

    if (resolvent_lower_bound_defect(X, rng.uniform(0.0, 0.98) / opn) < -1e-10) ++bound_fail;

    if (i % 5 == 0) {
      if (!forward_direction_check(p, eps_grid_toward(p.alpha, 100), 1e-9)) ++fwd_fail;
      if (!reverse_direction_check(X, p.Y, p.alpha, eps_grid_toward(p.alpha, 100), 1e-9).passed)
        ++rev_fail;
    }
  }
  Json j;
  j["trials"] = config.trials;
  j["block_inequality_failures"] = block_fail;
  j["congruence_failures"] = cong_fail;
  j["resolvent_lower_bound_failures"] = bound_fail;
  j["forward_direction_failures"] = fwd_fail;
  j["reverse_direction_failures"] = rev_fail;
  bool ok = block_fail == 0 && cong_fail == 0 && bound_fail == 0 && fwd_fail == 0 && rev_fail == 0;
  j["status"] = ok ? "pass" : "fail";
  emit(config, j.dump(2), out, diag);
  if (!ok) diag << "matrixineq: random instances violated a pinned inequality\n";
  return ok ? 0 : 1;
}

inline int run_counterexample(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  if (config.grid < 8) throw ConfigError("counterexample: --grid must be at least 8");
  CounterexampleCertificate cert =
      build_certificate(config.edge_samples, config.residual_samples, config.axis_trials,
                        config.grid, config.seed);
  if (config.format == "csv") {
    emit(config, profile_csv(512), out, diag);
  } else {
    Json j = certificate_to_json(cert);
    std::vector<std::string> fails = certificate_failures(cert);
    j["status"] = fails.empty() ? "pass" : "fail";
    if (!fails.empty()) j["failures"] = fails;
    emit(config, j.dump(2), out, diag);
    if (!fails.empty()) {
      for (const std::string& f : fails) diag << "counterexample: " << f << "\n";
      return 1;
    }
  }
  return 0;
}

inline int run_properties(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  std::vector<CriterionResult> results = run_acceptance_suite(config.seed);
  Json arr = Json::array();
  bool all_pass = true;
  for (const CriterionResult& r : results) {
    diag << "criterion " << r.index << " (" << r.name << "): " << (r.pass ? "PASS" : "FAIL")
         << " [" << r.detail << "]\n";
    Json j;
    j["index"] = r.index;
    j["name"] = r.name;
    j["pass"] = r.pass;
    j["detail"] = r.detail;
    arr.push_back(std::move(j));
    all_pass = all_pass && r.pass;
  }
  Json top;
  top["criteria"] = std::move(arr);
  top["status"] = all_pass ? "pass" : "fail";
  emit(config, top.dump(2), out, diag);
  return all_pass ? 0 : 1;
}

}  // namespace cli_detail

/// Executes one run. Exit code 0: every assertion in the selected suite
/// passed. Exit code 1: a computation or assertion failed (a JSON failure
/// report goes to the output target). Exit code 2: configuration error.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& diag) {
  try {
    if (config.tol <= 0.0) throw ConfigError("--tol must be positive");
    if (config.format != "json" && config.format != "csv")
      throw ConfigError("--format must be json or csv");
    if (config.command == "acdo") return cli_detail::run_acdo(config, out, diag);
    if (config.command == "condition") return cli_detail::run_condition(config, out, diag);
    if (config.command == "matrixineq") return cli_detail::run_matrixineq(config, out, diag);
    if (config.command == "counterexample")
      return cli_detail::run_counterexample(config, out, diag);
    if (config.command == "properties") return cli_detail::run_properties(config, out, diag);
    throw ConfigError("unknown command '" + config.command + "'");
  } catch (const ConfigError& e) {
    diag << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    diag << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidSpec& e) {
    diag << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    Json report = cli_detail::failure_report(config.command, e.what(), Json());
    try {
      cli_detail::emit(config, report.dump(2), out, diag);
    } catch (const std::exception&) {
    }
    diag << "run failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ellset
