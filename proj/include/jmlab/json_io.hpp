// Copyright 2026 The jmlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON encodings. A complex number is [re, im]; a matrix is a row-major array
// of rows; a vector is an array of complex numbers.
//
//   POVM:     {"dim", "x_values", "y_values", "elements": [{"x", "y", "matrix"}]}
//             (grid points without an entry are the zero operator)
//   process:  {"dimH", "dimK", "xi", "U", "M1", "M2"}
//   ancilla:  {"dimH", "dimK", "xi", "C", "D"}
//   scenario: {"dim", "A", "B", "psi", "hbar"?, and at most one of
//              "povm" | "ancilla" | "process"}
//   search:   {"scenario", "objective"?, "optimizer"?, "max_evals"?, "restarts"?,
//              "seed"?, "manifold"?, "x_values"?, "y_values"?, "initial_step"?,
//              "restart_scale"?}
//   sweep:    {"kind": "relations", "instances"?, "min_dim"?, "max_dim"?,
//              "max_outcomes"?, "seed"?} or
//             {"kind": "search", "family", plus the search fields}

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "json.hpp"

#include "jmlab/gallery.hpp"
#include "jmlab/metrics.hpp"
#include "jmlab/povm.hpp"
#include "jmlab/process.hpp"
#include "jmlab/relations.hpp"
#include "jmlab/search.hpp"
#include "jmlab/sweep.hpp"

namespace jmlab {

using Json = nlohmann::json;

/// Malformed or structurally invalid JSON input.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("parse: " + what) {}
};

namespace io {

inline Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError("complex entry must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json matrix_to_json(const Operator& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Operator matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": matrix must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array()) throw ParseError(std::string(what) + ": matrix rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Operator m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(std::string(what) + ": ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

inline Json vector_to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline ComplexVector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": vector must be a nonempty array");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline Eigen::Index dim_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    throw ParseError(std::string("field '") + key + "' must be a positive integer");
  return static_cast<Eigen::Index>(v.get<long long>());
}

inline StateVector state_from_json(const Json& j, const char* what) {
  try {
    return StateVector(vector_from_json(j, what));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

inline std::vector<double> reals_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(std::string(what) + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Models

inline Json to_json(const JointPovm& p) {
  Json elems = Json::array();
  for (std::size_t ix = 0; ix < p.nx(); ++ix)
    for (std::size_t iy = 0; iy < p.ny(); ++iy)
      elems.push_back({{"x", p.x_values()[ix]}, {"y", p.y_values()[iy]}, {"matrix", matrix_to_json(p.element(ix, iy))}});
  return {{"dim", p.dim()}, {"x_values", p.x_values()}, {"y_values", p.y_values()}, {"elements", std::move(elems)}};
}

inline JointPovm povm_from_json(const Json& j, const Tolerances& tol = {}) {
  const Eigen::Index dim = dim_field(j, "dim");
  std::vector<double> xs = reals_from_json(field(j, "x_values"), "x_values");
  std::vector<double> ys = reals_from_json(field(j, "y_values"), "y_values");
  std::vector<Operator> elems(xs.size() * ys.size(), Operator::Zero(dim, dim));
  try {
    JointPovm(dim, xs, ys, elems);
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
  const Json& list = field(j, "elements");
  if (!list.is_array()) throw ParseError("elements must be an array");
  for (const auto& e : list) {
    const Json& xj = field(e, "x");
    const Json& yj = field(e, "y");
    if (!xj.is_number() || !yj.is_number()) throw ParseError("element labels must be numbers");
    const auto ix = detail::find_value(xs, xj.get<double>(), tol.value_match);
    const auto iy = detail::find_value(ys, yj.get<double>(), tol.value_match);
    if (!ix || !iy) throw ParseError("element label is not on the outcome grid");
    const Operator m = matrix_from_json(field(e, "matrix"), "POVM element");
    if (m.rows() != dim || m.cols() != dim) throw ParseError("POVM element has wrong shape");
    elems[*ix * ys.size() + *iy] += m;
  }
  return JointPovm(dim, std::move(xs), std::move(ys), std::move(elems));
}

inline Json to_json(const MeasuringProcess& mp) {
  return {{"dimH", mp.dim_h}, {"dimK", mp.dim_k},        {"xi", vector_to_json(mp.xi.vec())},
          {"U", matrix_to_json(mp.unitary)}, {"M1", matrix_to_json(mp.m1)}, {"M2", matrix_to_json(mp.m2)}};
}

inline MeasuringProcess process_from_json(const Json& j) {
  MeasuringProcess mp{dim_field(j, "dimH"), dim_field(j, "dimK"), state_from_json(field(j, "xi"), "xi"),
                      matrix_from_json(field(j, "U"), "U"), matrix_from_json(field(j, "M1"), "M1"),
                      matrix_from_json(field(j, "M2"), "M2")};
  if (!validate(mp).dims_ok) throw ParseError("process dimensions are inconsistent");
  return mp;
}

inline Json to_json(const Ancilla& a) {
  return {{"dimH", a.dim_h}, {"dimK", a.dim_k}, {"xi", vector_to_json(a.xi.vec())},
          {"C", matrix_to_json(a.c)}, {"D", matrix_to_json(a.d)}};
}

inline Ancilla ancilla_from_json(const Json& j) {
  Ancilla a{dim_field(j, "dimH"), dim_field(j, "dimK"), state_from_json(field(j, "xi"), "xi"),
            matrix_from_json(field(j, "C"), "C"), matrix_from_json(field(j, "D"), "D")};
  if (!validate(a).dims_ok) throw ParseError("ancilla dimensions are inconsistent");
  return a;
}

// ---------------------------------------------------------------------------
// Scenario files

struct ScenarioFile {
  Eigen::Index dim = 0;
  Operator a;
  Operator b;
  StateVector psi{ComplexVector::Unit(1, 0)};
  std::optional<Model> model;
  std::optional<double> hbar;
};

inline Json to_json(const ScenarioFile& s) {
  Json j = {{"dim", s.dim}, {"A", matrix_to_json(s.a)}, {"B", matrix_to_json(s.b)}, {"psi", vector_to_json(s.psi.vec())}};
  if (s.hbar) j["hbar"] = *s.hbar;
  if (s.model) std::visit([&](const auto& m) { j[model_kind(*s.model)] = to_json(m); }, *s.model);
  return j;
}

inline ScenarioFile scenario_from_json(const Json& j, const Tolerances& tol = {}) {
  ScenarioFile s;
  s.dim = dim_field(j, "dim");
  s.a = matrix_from_json(field(j, "A"), "A");
  s.b = matrix_from_json(field(j, "B"), "B");
  s.psi = state_from_json(field(j, "psi"), "psi");
  if (s.a.rows() != s.dim || s.a.cols() != s.dim || s.b.rows() != s.dim || s.b.cols() != s.dim ||
      s.psi.dim() != s.dim)
    throw ParseError("scenario: A, B and psi must match dim");
  if (j.contains("hbar")) {
    if (!j["hbar"].is_number()) throw ParseError("hbar must be a number");
    s.hbar = j["hbar"].get<double>();
  }
  int models = 0;
  if (j.contains("povm")) { s.model = povm_from_json(j["povm"], tol); ++models; }
  if (j.contains("ancilla")) { s.model = ancilla_from_json(j["ancilla"]); ++models; }
  if (j.contains("process")) { s.model = process_from_json(j["process"]); ++models; }
  if (models > 1) throw ParseError("scenario: at most one of povm, ancilla, process");
  return s;
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const NoiseReport& r) {
  return {{"target", axis_name(r.target)},
          {"mean_noise_op", matrix_to_json(r.mean_noise_op)},
          {"rms_noise", r.rms_noise},
          {"noise_std", r.noise_std},
          {"output_std", r.output_std},
          {"mean_noise_value", r.mean_noise_value},
          {"unbiased", r.unbiased},
          {"unbiased_defect", r.unbiased_defect},
          {"stat_independent", r.stat_independent},
          {"independence_r", r.independence_r},
          {"independence_residual", r.independence_residual}};
}

inline Json to_json(const RelationRecord& r) {
  Json terms = Json::object();
  for (const auto& [k, v] : r.terms) terms[k] = v;
  return {{"name", r.name()}, {"kind", kind_name(r.kind)}, {"lhs", r.lhs},       {"rhs", r.rhs},
          {"slack", r.slack}, {"holds", r.holds},          {"applicable", r.applicable},
          {"status", r.status()}, {"terms", std::move(terms)}};
}

inline Json to_json(const RelationReport& rep) {
  Json rels = Json::array();
  for (const auto& r : rep.relations) rels.push_back(to_json(r));
  return {{"scenario",
           {{"model_kind", rep.model_kind},
            {"dim", rep.dim},
            {"dim_k", rep.dim_k},
            {"commutator_expectation", complex_to_json(rep.commutator_expectation)},
            {"delta_a", rep.delta_a},
            {"delta_b", rep.delta_b}}},
          {"noise", {{"A", to_json(rep.noise_a)}, {"B", to_json(rep.noise_b)}}},
          {"relations", std::move(rels)},
          {"violations", rep.violation_count()}};
}

inline std::string csv_header() { return "instance,relation,kind,lhs,rhs,slack,holds,applicable\n"; }

/// One row per relation, prefixed by an instance label.
inline std::string to_csv_rows(const RelationReport& rep, const std::string& instance) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& r : rep.relations)
    os << instance << ',' << r.name() << ',' << kind_name(r.kind) << ',' << r.lhs << ',' << r.rhs << ',' << r.slack
       << ',' << (r.holds ? 1 : 0) << ',' << (r.applicable ? 1 : 0) << '\n';
  return os.str();
}

inline Json to_json(const CcrDemoReport& r) {
  return {{"cutoff", r.cutoff},
          {"hbar", r.hbar},
          {"eps_a", r.eps_a},
          {"eps_b", r.eps_b},
          {"delta_a", r.delta_a},
          {"delta_b", r.delta_b},
          {"delta_p1", r.delta_p1},
          {"delta_p2", r.delta_p2},
          {"delta_q2", r.delta_q2},
          {"generalized", to_json(r.generalized)},
          {"closing_bound", to_json(r.closing)},
          {"truncation_estimate", r.truncation_estimate},
          {"closing_tolerance", r.closing_tolerance},
          {"low_block_ccr_defect", r.low_block_ccr_defect},
          {"upper_weight_1", r.upper_weight_1},
          {"upper_weight_2", r.upper_weight_2}};
}

// ---------------------------------------------------------------------------
// Search and sweep configs

namespace detail {

inline std::size_t count_field(const Json& j, const char* key, std::size_t fallback, std::size_t min_value) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value))
    throw ParseError(std::string("field '") + key + "' must be an integer >= " + std::to_string(min_value));
  return static_cast<std::size_t>(v.get<long long>());
}

inline double real_field(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

inline std::string string_field(const Json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

template <typename F>
auto parse_name(F&& f, const std::string& what) {
  try {
    return f();
  } catch (const Error&) {
    throw ParseError("unknown " + what);
  }
}

}  // namespace detail

inline std::optional<std::uint64_t> seed_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("seed")) return std::nullopt;
  const Json& v = j.at("seed");
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ParseError("field 'seed' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

/// Optimizer settings; the scenario and seed are read separately.
inline SearchConfig search_config_from_json(const Json& j, const Tolerances& tol = {}) {
  if (!j.is_object()) throw ParseError("search config must be an object");
  SearchConfig cfg;
  cfg.tol = tol;
  const std::string obj = detail::string_field(j, "objective", objective_name(cfg.objective));
  cfg.objective = detail::parse_name([&] { return parse_objective(obj); }, "objective '" + obj + "'");
  const std::string opt = detail::string_field(j, "optimizer", optimizer_name(cfg.optimizer));
  cfg.optimizer = detail::parse_name([&] { return parse_optimizer(opt); }, "optimizer '" + opt + "'");
  cfg.max_evals = detail::count_field(j, "max_evals", cfg.max_evals, 1);
  cfg.restarts = detail::count_field(j, "restarts", cfg.restarts, 1);
  cfg.initial_step = detail::real_field(j, "initial_step", cfg.initial_step);
  cfg.restart_scale = detail::real_field(j, "restart_scale", cfg.restart_scale);
  if (j.contains("manifold")) {
    const std::string m = detail::string_field(j, "manifold", "");
    if (m == "free") cfg.manifold = Manifold::Free;
    else if (m == "precise_a") cfg.manifold = Manifold::PreciseA;
    else throw ParseError("unknown manifold '" + m + "'");
  }
  if (j.contains("x_values")) cfg.x_values = reals_from_json(j.at("x_values"), "x_values");
  if (j.contains("y_values")) cfg.y_values = reals_from_json(j.at("y_values"), "y_values");
  if (auto s = seed_from_json(j)) cfg.seed = *s;
  return cfg;
}

inline Scenario scenario_triple_from_json(const Json& j, const Tolerances& tol = {}) {
  const ScenarioFile f = scenario_from_json(j, tol);
  return {f.a, f.b, f.psi};
}

inline Json to_json(const SearchResult& r) {
  Json j = {{"objective", objective_name(r.objective)},
            {"best_value", r.best_value},
            {"floor", r.floor},
            {"floor_slack", r.best_value - r.floor},
            {"evaluations", r.evaluations},
            {"best_params", r.best_params}};
  if (r.best_povm) j["best_povm"] = to_json(*r.best_povm);
  double min_u = std::numeric_limits<double>::infinity(), min_g = min_u;
  for (const auto& t : r.trace) {
    min_u = std::min(min_u, t.slack_universal);
    min_g = std::min(min_g, t.slack_generalized);
  }
  if (!r.trace.empty()) {
    j["min_slack_universal"] = min_u;
    j["min_slack_generalized"] = min_g;
  }
  return j;
}

inline RelationSweepConfig relation_sweep_config_from_json(const Json& j, const Tolerances& tol = {}) {
  RelationSweepConfig cfg;
  cfg.tol = tol;
  cfg.instances = detail::count_field(j, "instances", cfg.instances, 0);
  cfg.min_dim = static_cast<Eigen::Index>(detail::count_field(j, "min_dim", static_cast<std::size_t>(cfg.min_dim), 1));
  cfg.max_dim = static_cast<Eigen::Index>(detail::count_field(j, "max_dim", static_cast<std::size_t>(cfg.max_dim), 1));
  if (cfg.max_dim < cfg.min_dim) throw ParseError("max_dim is below min_dim");
  cfg.max_outcomes = detail::count_field(j, "max_outcomes", cfg.max_outcomes, 1);
  if (auto s = seed_from_json(j)) cfg.seed = *s;
  return cfg;
}

inline Json to_json(const RelationSweepResult& r) {
  Json rels = Json::array();
  for (const auto& s : r.summary) {
    Json e = {{"name", s.name}, {"kind", s.kind}, {"applicable", s.applicable}, {"violations", s.violations}};
    if (s.applicable) e["min_slack"] = s.min_slack;
    rels.push_back(std::move(e));
  }
  return {{"instances", r.instances.size()}, {"violations", r.violations}, {"relations", std::move(rels)}};
}

/// Scenario family of a search sweep: {"type": "qubit_xy" | "clock_shift" |
/// "list", "count", "dim", "scenarios"}.
inline std::vector<Scenario> family_from_json(const Json& j, std::uint64_t seed, const Tolerances& tol = {}) {
  if (!j.is_object()) throw ParseError("family must be an object");
  const std::string type = detail::string_field(j, "type", "");
  if (type == "qubit_xy") return qubit_xy_family(detail::count_field(j, "count", 20, 0), seed);
  if (type == "clock_shift")
    return clock_shift_family(static_cast<Eigen::Index>(detail::count_field(j, "dim", 3, 2)),
                              detail::count_field(j, "count", 20, 0), seed);
  if (type == "list") {
    const Json& list = field(j, "scenarios");
    if (!list.is_array()) throw ParseError("scenarios must be an array");
    std::vector<Scenario> out;
    for (const auto& e : list) out.push_back(scenario_triple_from_json(e, tol));
    return out;
  }
  throw ParseError("unknown family type '" + type + "'");
}

}  // namespace io
}  // namespace jmlab
