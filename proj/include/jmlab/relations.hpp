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

// Uncertainty relations for joint measurements, each evaluated as an
// lhs >= rhs record with its slack and the sub-terms that produced it.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jmlab/metrics.hpp"
#include "jmlab/operator.hpp"
#include "jmlab/povm.hpp"
#include "jmlab/process.hpp"

namespace jmlab {

enum class RelationId {
  Robertson,                  // dA dB >= |<[A,B]>| / 2
  JointUniversal,             // e(A)e(B) + |<[n_A,B]>|/2 + |<[A,n_B]>|/2 >= |<[A,B]>| / 2
  JointUniversalNoiseStd,     // same with dN_A dN_B in place of e(A)e(B)
  JointGeneralized,           // e(A)e(B) + e(A) dB + dA e(B) >= |<[A,B]>| / 2
  ChainGeneralizedOverUniversal,  // lhs(generalized) >= lhs(universal)
  ChainUniversalOverNoiseStd,     // lhs(universal) >= lhs(universal, noise std)
  PreciseABound,              // dA e(B) >= |<[A,B]>| / 2 when A is measured precisely
  IndependentNoiseHeisenberg, // dN_A dN_B >= |<[A,B]>| / 2 under independent noise
  OutputSpread,               // dx dy >= |<[A,B]>| under independent noise
  HeisenbergProduct,          // e(A)e(B) >= |<[A,B]>| / 2, not valid in general
};

enum class RelationKind { Universal, Conditional, Informational };

inline const char* relation_name(RelationId id) {
  switch (id) {
    case RelationId::Robertson: return "robertson";
    case RelationId::JointUniversal: return "joint_universal";
    case RelationId::JointUniversalNoiseStd: return "joint_universal_noise_std";
    case RelationId::JointGeneralized: return "joint_generalized";
    case RelationId::ChainGeneralizedOverUniversal: return "chain_generalized_over_universal";
    case RelationId::ChainUniversalOverNoiseStd: return "chain_universal_over_noise_std";
    case RelationId::PreciseABound: return "precise_a_bound";
    case RelationId::IndependentNoiseHeisenberg: return "independent_noise_heisenberg";
    case RelationId::OutputSpread: return "output_spread";
    case RelationId::HeisenbergProduct: return "heisenberg_product";
  }
  return "unknown";
}

inline const char* kind_name(RelationKind k) {
  switch (k) {
    case RelationKind::Universal: return "universal";
    case RelationKind::Conditional: return "conditional";
    case RelationKind::Informational: return "informational";
  }
  return "unknown";
}

struct RelationRecord {
  RelationId id = RelationId::Robertson;
  RelationKind kind = RelationKind::Universal;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
  // Conditional relations whose precondition fails keep their numbers but
  // are excluded from pass/fail accounting.
  bool applicable = true;
  std::vector<std::pair<std::string, double>> terms;

  std::string name() const { return relation_name(id); }

  std::string status() const {
    if (!applicable) return "not_applicable";
    if (kind == RelationKind::Informational) return holds ? "satisfied" : "violated";
    return holds ? "holds" : "fails";
  }

  /// A record that must hold and does not.
  bool is_violation() const { return applicable && kind != RelationKind::Informational && !holds; }

  double term(const std::string& key) const {
    for (const auto& [k, v] : terms)
      if (k == key) return v;
    throw Error("RelationRecord: no term '" + key + "'");
  }
};

inline RelationRecord make_record(RelationId id, RelationKind kind, double lhs, double rhs, double holds_tol,
                                  std::vector<std::pair<std::string, double>> terms = {}) {
  RelationRecord r;
  r.id = id;
  r.kind = kind;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = lhs - rhs;
  r.holds = r.slack >= -holds_tol;
  r.terms = std::move(terms);
  return r;
}

/// Quantities shared by all relations for one (POVM, A, B, psi).
struct RelationContext {
  double half_commutator = 0.0;  // |<psi|[A,B]|psi>| / 2
  double delta_a = 0.0;
  double delta_b = 0.0;
  NoiseReport noise_a;
  NoiseReport noise_b;
  double na_b_term = 0.0;  // |<psi|[n_A,B]|psi>| / 2
  double a_nb_term = 0.0;  // |<psi|[A,n_B]|psi>| / 2
  PrecisionReport precision_a;
  double holds_tol = Tolerances{}.holds;
};

inline RelationContext make_context(const JointPovm& p, const Operator& a, const Operator& b,
                                    const StateVector& psi, const Ancilla* ancilla = nullptr,
                                    const Tolerances& tol = {}) {
  if (a.rows() != p.dim() || b.rows() != p.dim() || psi.dim() != p.dim())
    throw Error("relations: dimension mismatch between POVM, observables and state");
  RelationContext ctx;
  ctx.holds_tol = tol.holds;
  ctx.half_commutator = 0.5 * std::abs(expectation(commutator(a, b), psi));
  ctx.delta_a = std_dev(a, psi, tol);
  ctx.delta_b = std_dev(b, psi, tol);
  ctx.noise_a = noise_report(p, a, psi, Axis::A, ancilla, tol);
  ctx.noise_b = noise_report(p, b, psi, Axis::B, ancilla, tol);
  ctx.na_b_term = 0.5 * std::abs(expectation(commutator(ctx.noise_a.mean_noise_op, b), psi));
  ctx.a_nb_term = 0.5 * std::abs(expectation(commutator(a, ctx.noise_b.mean_noise_op), psi));
  ctx.precision_a = is_precise_for(marginal(p, Axis::A), a, tol);
  return ctx;
}

inline RelationRecord eval_robertson(const Operator& a, const Operator& b, const StateVector& psi,
                                     const Tolerances& tol = {}) {
  const double da = std_dev(a, psi, tol);
  const double db = std_dev(b, psi, tol);
  const double rhs = 0.5 * std::abs(expectation(commutator(a, b), psi));
  return make_record(RelationId::Robertson, RelationKind::Universal, da * db, rhs, tol.holds,
                     {{"delta_a", da}, {"delta_b", db}});
}

inline std::pair<RelationRecord, RelationRecord> eval_uvur(const RelationContext& c) {
  const double eps_prod = c.noise_a.rms_noise * c.noise_b.rms_noise;
  const double std_prod = c.noise_a.noise_std * c.noise_b.noise_std;
  const double corr = c.na_b_term + c.a_nb_term;
  auto first = make_record(RelationId::JointUniversal, RelationKind::Universal, eps_prod + corr, c.half_commutator,
                           c.holds_tol,
                           {{"eps_product", eps_prod}, {"na_b_term", c.na_b_term}, {"a_nb_term", c.a_nb_term}});
  auto second = make_record(RelationId::JointUniversalNoiseStd, RelationKind::Universal, std_prod + corr,
                            c.half_commutator, c.holds_tol,
                            {{"noise_std_product", std_prod}, {"na_b_term", c.na_b_term}, {"a_nb_term", c.a_nb_term}});
  return {std::move(first), std::move(second)};
}

inline RelationRecord eval_gur(const RelationContext& c) {
  const double ea = c.noise_a.rms_noise, eb = c.noise_b.rms_noise;
  const double lhs = ea * eb + ea * c.delta_b + c.delta_a * eb;
  const double uvur_lhs = ea * eb + c.na_b_term + c.a_nb_term;
  return make_record(RelationId::JointGeneralized, RelationKind::Universal, lhs, c.half_commutator, c.holds_tol,
                     {{"eps_product", ea * eb},
                      {"eps_a_delta_b", ea * c.delta_b},
                      {"delta_a_eps_b", c.delta_a * eb},
                      {"universal_lhs", uvur_lhs}});
}

/// Ordering of the left-hand sides: generalized >= universal >= universal with noise std.
inline std::pair<RelationRecord, RelationRecord> eval_chain(const RelationContext& c) {
  const auto [uvur, uvur_std] = eval_uvur(c);
  const auto gur = eval_gur(c);
  return {make_record(RelationId::ChainGeneralizedOverUniversal, RelationKind::Universal, gur.lhs, uvur.lhs,
                      c.holds_tol),
          make_record(RelationId::ChainUniversalOverNoiseStd, RelationKind::Universal, uvur.lhs, uvur_std.lhs,
                      c.holds_tol)};
}

inline RelationRecord eval_noiseless_bound(const RelationContext& c) {
  auto r = make_record(RelationId::PreciseABound, RelationKind::Conditional, c.delta_a * c.noise_b.rms_noise,
                       c.half_commutator, c.holds_tol,
                       {{"delta_a", c.delta_a}, {"eps_b", c.noise_b.rms_noise}, {"precision_defect", c.precision_a.defect}});
  r.applicable = c.precision_a.precise;
  return r;
}

/// Both links of eps(A)eps(B) >= dN_A dN_B >= |<[A,B]>|/2; the record's lhs is
/// the middle term and holds requires both links.
inline RelationRecord eval_independent_heisenberg(const RelationContext& c) {
  const double eps_prod = c.noise_a.rms_noise * c.noise_b.rms_noise;
  const double std_prod = c.noise_a.noise_std * c.noise_b.noise_std;
  auto r = make_record(RelationId::IndependentNoiseHeisenberg, RelationKind::Conditional, std_prod,
                       c.half_commutator, c.holds_tol,
                       {{"eps_product", eps_prod},
                        {"noise_std_product", std_prod},
                        {"independence_residual_a", c.noise_a.independence_residual},
                        {"independence_residual_b", c.noise_b.independence_residual}});
  r.holds = r.holds && eps_prod - std_prod >= -c.holds_tol;
  r.applicable = c.noise_a.stat_independent && c.noise_b.stat_independent;
  return r;
}

inline RelationRecord eval_output_spread(const RelationContext& c) {
  const double dx = c.noise_a.output_std, dy = c.noise_b.output_std;
  // Variance additivity (dx)^2 = (dA)^2 + (dN_A)^2 under independent noise.
  const double add_a = dx * dx - c.delta_a * c.delta_a - c.noise_a.noise_std * c.noise_a.noise_std;
  const double add_b = dy * dy - c.delta_b * c.delta_b - c.noise_b.noise_std * c.noise_b.noise_std;
  auto r = make_record(RelationId::OutputSpread, RelationKind::Conditional, dx * dy, 2.0 * c.half_commutator,
                       c.holds_tol,
                       {{"output_std_a", dx}, {"output_std_b", dy}, {"additivity_defect_a", add_a},
                        {"additivity_defect_b", add_b}});
  r.applicable = c.noise_a.stat_independent && c.noise_b.stat_independent;
  return r;
}

/// The naive product form. Recorded for comparison; it fails for many valid
/// joint measurements.
inline RelationRecord eval_heisenberg_product(const RelationContext& c) {
  return make_record(RelationId::HeisenbergProduct, RelationKind::Informational,
                     c.noise_a.rms_noise * c.noise_b.rms_noise, c.half_commutator, c.holds_tol);
}

// Convenience overloads taking the raw inputs.
inline std::pair<RelationRecord, RelationRecord> eval_uvur(const JointPovm& p, const Operator& a, const Operator& b,
                                                           const StateVector& psi, const Tolerances& tol = {}) {
  return eval_uvur(make_context(p, a, b, psi, nullptr, tol));
}
inline RelationRecord eval_gur(const JointPovm& p, const Operator& a, const Operator& b, const StateVector& psi,
                               const Tolerances& tol = {}) {
  return eval_gur(make_context(p, a, b, psi, nullptr, tol));
}
inline RelationRecord eval_noiseless_bound(const JointPovm& p, const Operator& a, const Operator& b,
                                           const StateVector& psi, const Tolerances& tol = {}) {
  return eval_noiseless_bound(make_context(p, a, b, psi, nullptr, tol));
}
inline RelationRecord eval_independent_heisenberg(const JointPovm& p, const Operator& a, const Operator& b,
                                                  const StateVector& psi, const Tolerances& tol = {}) {
  return eval_independent_heisenberg(make_context(p, a, b, psi, nullptr, tol));
}
inline RelationRecord eval_output_spread(const JointPovm& p, const Operator& a, const Operator& b,
                                         const StateVector& psi, const Tolerances& tol = {}) {
  return eval_output_spread(make_context(p, a, b, psi, nullptr, tol));
}

using Model = std::variant<JointPovm, Ancilla, MeasuringProcess>;

inline const char* model_kind(const Model& m) {
  switch (m.index()) {
    case 0: return "povm";
    case 1: return "ancilla";
    default: return "process";
  }
}

struct RelationReport {
  std::string model_kind;
  Eigen::Index dim = 0;
  Eigen::Index dim_k = 0;  // 0 when no ancilla is attached
  Complex commutator_expectation;
  double delta_a = 0.0;
  double delta_b = 0.0;
  NoiseReport noise_a;
  NoiseReport noise_b;
  std::vector<RelationRecord> relations;

  const RelationRecord& find(RelationId id) const {
    for (const auto& r : relations)
      if (r.id == id) return r;
    throw Error(std::string("RelationReport: missing relation ") + relation_name(id));
  }

  std::size_t violation_count() const {
    std::size_t n = 0;
    for (const auto& r : relations) n += r.is_violation() ? 1 : 0;
    return n;
  }
};

/// Normalized view of a model: its POVM plus the ancilla when one exists.
struct ResolvedModel {
  JointPovm povm;
  std::optional<Ancilla> ancilla;
};

inline ResolvedModel resolve_model(const Model& model, const Tolerances& tol = {}) {
  if (const auto* p = std::get_if<JointPovm>(&model)) return {*p, std::nullopt};
  if (const auto* a = std::get_if<Ancilla>(&model)) return {povm_from_ancilla(*a, tol), *a};
  const auto& mp = std::get<MeasuringProcess>(model);
  return {povm_from_process(mp, tol), ancilla_from_process(mp, tol)};
}

inline RelationReport full_report(const Model& model, const Operator& a, const Operator& b, const StateVector& psi,
                                  const Tolerances& tol = {}) {
  const ResolvedModel rm = resolve_model(model, tol);
  const Ancilla* anc = rm.ancilla ? &*rm.ancilla : nullptr;
  const RelationContext ctx = make_context(rm.povm, a, b, psi, anc, tol);

  RelationReport rep;
  rep.model_kind = model_kind(model);
  rep.dim = rm.povm.dim();
  rep.dim_k = anc ? anc->dim_k : 0;
  rep.commutator_expectation = expectation(commutator(a, b), psi);
  rep.delta_a = ctx.delta_a;
  rep.delta_b = ctx.delta_b;
  rep.noise_a = ctx.noise_a;
  rep.noise_b = ctx.noise_b;

  rep.relations.push_back(eval_robertson(a, b, psi, tol));
  auto [uvur, uvur_std] = eval_uvur(ctx);
  rep.relations.push_back(std::move(uvur));
  rep.relations.push_back(std::move(uvur_std));
  rep.relations.push_back(eval_gur(ctx));
  auto [chain_hi, chain_lo] = eval_chain(ctx);
  rep.relations.push_back(std::move(chain_hi));
  rep.relations.push_back(std::move(chain_lo));
  rep.relations.push_back(eval_noiseless_bound(ctx));
  rep.relations.push_back(eval_independent_heisenberg(ctx));
  rep.relations.push_back(eval_output_spread(ctx));
  rep.relations.push_back(eval_heisenberg_product(ctx));
  return rep;
}

}  // namespace jmlab
