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

// Noise statistics of a joint POVM: mean noise operator, rms noise, noise
// standard deviation, output spread, unbiasedness and statistical
// independence. Every quantity is computed from the POVM alone; an optional
// ancilla supplies a second route that is cross-checked.

#include <cmath>
#include <string>

#include "jmlab/operator.hpp"
#include "jmlab/povm.hpp"
#include "jmlab/process.hpp"

namespace jmlab {

namespace detail {

inline void check_observable(const JointPovm& p, const Operator& obs, const Tolerances& tol, const char* what) {
  require_square(obs, what);
  if (obs.rows() != p.dim()) throw Error(std::string(what) + ": observable dimension mismatch");
  if (!is_hermitian(obs, tol.hermitian)) throw Error(std::string(what) + ": observable is not Hermitian");
}

inline void check_ancilla(const JointPovm& p, const Ancilla& a, const char* what) {
  if (a.dim_h != p.dim()) throw Error(std::string(what) + ": ancilla object dimension mismatch");
}

}  // namespace detail

/// n = O(Pi^axis) - obs. Checked against sum_x Pi(x)(x - obs) and, with an
/// ancilla, against <xi|N|xi>.
inline Operator mean_noise_operator(const JointPovm& p, const Operator& obs, Axis axis,
                                    const Ancilla* ancilla = nullptr, const Tolerances& tol = {}) {
  detail::check_observable(p, obs, tol, "mean_noise_operator");
  const MarginalPovm m = marginal(p, axis);
  const Operator n = moment_operator(m, 1) - obs;

  Operator sum_form = Operator::Zero(p.dim(), p.dim());
  const Operator id = identity(p.dim());
  for (std::size_t k = 0; k < m.values.size(); ++k) sum_form += m.elements[k] * (m.values[k] * id - obs);
  const double scale = std::max(1.0, op_norm(obs));
  if (max_entry_distance(n, sum_form) > tol.route * scale)
    throw InconsistencyError("mean_noise_operator: moment and sum forms disagree");

  if (ancilla) {
    detail::check_ancilla(p, *ancilla, "mean_noise_operator");
    const Operator via_ancilla = partial_mean(noise_operator(*ancilla, obs, axis).matrix, ancilla->xi);
    if (max_entry_distance(n, via_ancilla) > tol.route * scale)
      throw InconsistencyError("mean_noise_operator: ancilla route disagrees with the POVM");
  }
  return n;
}

namespace detail {

/// Element factors L_k with Pi_k = L_k^dag L_k, built from the eigenvectors
/// whose eigenvalues exceed rank_floor. Round-off eigenvalues of exact
/// projectors are dropped, so precise measurements give exact zeros.
inline std::vector<Operator> element_factors(const MarginalPovm& m, const Tolerances& tol) {
  std::vector<Operator> out;
  out.reserve(m.elements.size());
  for (const auto& e : m.elements) {
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(e));
    if (es.info() != Eigen::Success) throw Error("noise: eigensolver failed");
    const RealVector& ev = es.eigenvalues();
    Eigen::Index keep = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) keep += ev(i) > tol.rank_floor;
    Operator f(keep, m.dim);
    for (Eigen::Index i = ev.size() - keep, r = 0; i < ev.size(); ++i, ++r)
      f.row(r) = std::sqrt(ev(i)) * es.eigenvectors().col(i).adjoint();
    out.push_back(std::move(f));
  }
  return out;
}

/// sum_x || Pi(x)^(1/2) ((x - shift) - obs) psi ||^2.
inline double deviation_sum(const MarginalPovm& m, const std::vector<Operator>& factors, const Operator& obs,
                            const StateVector& psi, double shift) {
  const ComplexVector obs_psi = obs * psi.vec();
  double s = 0.0;
  for (std::size_t k = 0; k < m.values.size(); ++k)
    if (factors[k].rows() > 0) s += (factors[k] * ((m.values[k] - shift) * psi.vec() - obs_psi)).squaredNorm();
  return s;
}

}  // namespace detail

/// epsilon^2 = sum_x || Pi(x)^(1/2) (x - obs) psi ||^2.
inline double rms_noise_squared(const JointPovm& p, const Operator& obs, const StateVector& psi, Axis axis,
                                const Tolerances& tol = {}) {
  detail::check_observable(p, obs, tol, "rms_noise");
  if (psi.dim() != p.dim()) throw Error("rms_noise: state dimension mismatch");
  const MarginalPovm m = marginal(p, axis);
  return detail::deviation_sum(m, detail::element_factors(m, tol), obs, psi, 0.0);
}

inline double rms_noise(const JointPovm& p, const Operator& obs, const StateVector& psi, Axis axis,
                        const Ancilla* ancilla = nullptr, const Tolerances& tol = {}) {
  const double eps = std::sqrt(rms_noise_squared(p, obs, psi, axis, tol));
  if (ancilla) {
    detail::check_ancilla(p, *ancilla, "rms_noise");
    const NoiseOperator nz = noise_operator(*ancilla, obs, axis);
    const StateVector joint = tensor(psi, ancilla->xi);
    const double via_ancilla = (nz.matrix * joint.vec()).norm();
    if (std::abs(eps - via_ancilla) > tol.route * std::max(1.0, eps))
      throw InconsistencyError("rms_noise: ancilla route " + std::to_string(via_ancilla) +
                               " disagrees with POVM route " + std::to_string(eps));
  }
  return eps;
}

namespace detail {

/// (Delta N)^2 = epsilon^2 - mu^2 with mu = <psi|n|psi>. Evaluated as the
/// same sum with outcomes shifted by mu, which equals <(N - mu)^2> and does
/// not cancel; the difference form is checked against it.
inline double noise_variance(const MarginalPovm& m, const std::vector<Operator>& factors, const Operator& obs,
                             const StateVector& psi, double eps2, double mu, const Tolerances& tol) {
  const double var = eps2 - mu * mu;
  if (var < -tol.variance_floor * std::max(1.0, eps2))
    throw Error("noise_std: negative variance " + std::to_string(var));
  const double central = deviation_sum(m, factors, obs, psi, mu);
  if (std::abs(central - var) > tol.route * std::max(1.0, eps2))
    throw InconsistencyError("noise_std: central and difference forms disagree");
  return central;
}

}  // namespace detail

inline double noise_std(const JointPovm& p, const Operator& obs, const StateVector& psi, Axis axis,
                        const Ancilla* ancilla = nullptr, const Tolerances& tol = {}) {
  const double eps = rms_noise(p, obs, psi, axis, ancilla, tol);
  const double mu = real_expectation(mean_noise_operator(p, obs, axis, ancilla, tol), psi);
  const MarginalPovm m = marginal(p, axis);
  return std::sqrt(detail::noise_variance(m, detail::element_factors(m, tol), obs, psi, eps * eps, mu, tol));
}

/// Standard deviation of the output variable, (<O2> - <O1>^2)^(1/2), evaluated
/// as the central moment of the outcome distribution.
inline double output_std(const JointPovm& p, const StateVector& psi, Axis axis, const Tolerances& tol = {}) {
  if (psi.dim() != p.dim()) throw Error("output_std: state dimension mismatch");
  const MarginalPovm m = marginal(p, axis);
  std::vector<double> prob(m.values.size());
  double mean = 0.0;
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    prob[k] = real_expectation(m.elements[k], psi, tol.hermitian);
    mean += prob[k] * m.values[k];
  }
  double var = 0.0;
  for (std::size_t k = 0; k < m.values.size(); ++k) var += prob[k] * (m.values[k] - mean) * (m.values[k] - mean);
  if (var < -tol.variance_floor) throw Error("output_std: negative variance " + std::to_string(var));
  return std::sqrt(std::max(var, 0.0));
}

struct UnbiasedReport {
  bool unbiased = false;
  double defect = 0.0;           // || O(Pi^axis) - obs ||
  double mean_noise_norm = 0.0;  // || n ||, equal to defect
};

inline UnbiasedReport is_unbiased(const JointPovm& p, const Operator& obs, Axis axis, const Tolerances& tol = {}) {
  UnbiasedReport r;
  r.defect = op_norm(moment_operator(marginal(p, axis), 1) - obs);
  r.mean_noise_norm = op_norm(mean_noise_operator(p, obs, axis, nullptr, tol));
  r.unbiased = r.defect <= tol.unbiased && r.mean_noise_norm <= tol.unbiased;
  return r;
}

struct IndependenceReport {
  bool independent = false;
  double r = 0.0;         // tr(n) / dim
  double residual = 0.0;  // || n - r I ||
};

/// Statistically independent noise: n = r I for a real r.
inline IndependenceReport is_stat_independent(const JointPovm& p, const Operator& obs, Axis axis,
                                               const Tolerances& tol = {}) {
  const Operator n = mean_noise_operator(p, obs, axis, nullptr, tol);
  IndependenceReport rep;
  rep.r = n.trace().real() / static_cast<double>(p.dim());
  rep.residual = op_norm(n - rep.r * identity(p.dim()));
  rep.independent = rep.residual <= tol.independence;
  return rep;
}

/// | <X~ N> - <psi|X|psi> <N> | in the state psi (x) xi.
inline double verify_independence_factorization(const Ancilla& a, const Operator& obs, const Operator& x,
                                                const StateVector& psi, Axis axis = Axis::A) {
  if (x.rows() != a.dim_h || psi.dim() != a.dim_h)
    throw Error("verify_independence_factorization: dimension mismatch");
  const NoiseOperator nz = noise_operator(a, obs, axis);
  const StateVector joint = tensor(psi, a.xi);
  const Complex xn = expectation(tensor(x, identity(a.dim_k)) * nz.matrix, joint);
  const Complex mean_n = expectation(nz.matrix, joint);
  return std::abs(xn - expectation(x, psi) * mean_n);
}

struct NoiseReport {
  Axis target = Axis::A;
  Operator mean_noise_op;
  double rms_noise = 0.0;
  double noise_std = 0.0;
  double output_std = 0.0;
  double mean_noise_value = 0.0;  // <psi|n|psi>
  bool unbiased = false;
  double unbiased_defect = 0.0;
  bool stat_independent = false;
  double independence_r = 0.0;
  double independence_residual = 0.0;
};

inline NoiseReport noise_report(const JointPovm& p, const Operator& obs, const StateVector& psi, Axis axis,
                                const Ancilla* ancilla = nullptr, const Tolerances& tol = {}) {
  NoiseReport r;
  r.target = axis;
  r.mean_noise_op = mean_noise_operator(p, obs, axis, ancilla, tol);
  r.rms_noise = rms_noise(p, obs, psi, axis, ancilla, tol);
  r.mean_noise_value = real_expectation(r.mean_noise_op, psi);
  const MarginalPovm m = marginal(p, axis);
  r.noise_std = std::sqrt(detail::noise_variance(m, detail::element_factors(m, tol), obs, psi,
                                                 r.rms_noise * r.rms_noise, r.mean_noise_value, tol));
  r.output_std = output_std(p, psi, axis, tol);
  r.unbiased_defect = op_norm(r.mean_noise_op);
  r.unbiased = r.unbiased_defect <= tol.unbiased;
  r.independence_r = r.mean_noise_op.trace().real() / static_cast<double>(p.dim());
  r.independence_residual = op_norm(r.mean_noise_op - r.independence_r * identity(p.dim()));
  r.stat_independent = r.independence_residual <= tol.independence;
  return r;
}

}  // namespace jmlab
