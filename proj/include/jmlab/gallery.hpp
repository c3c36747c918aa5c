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

// Canonical constructions: the clock/shift conjugate pair, the constant-guess
// joint measurement, the difference/sum measurement on two copies of a qudit,
// independent-noise models, and the truncated two-oscillator demonstration.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "jmlab/operator.hpp"
#include "jmlab/povm.hpp"
#include "jmlab/process.hpp"
#include "jmlab/relations.hpp"

namespace jmlab {

// ---------------------------------------------------------------------------
// Clock / shift pair

struct DiscretePair {
  Eigen::Index d = 0;
  Operator x;        // diag(0, ..., d-1)
  Operator p;        // F x F^dagger
  Operator fourier;  // F(j,k) = exp(2 pi i j k / d) / sqrt(d)
};

inline DiscretePair discrete_pair(Eigen::Index d) {
  if (d < 2) throw Error("discrete_pair: dimension must be at least 2");
  DiscretePair dp;
  dp.d = d;
  dp.x = Operator::Zero(d, d);
  dp.fourier = Operator(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    dp.x(j, j) = static_cast<double>(j);
    for (Eigen::Index k = 0; k < d; ++k) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((j * k) % d) / static_cast<double>(d);
      dp.fourier(j, k) = norm * Complex(std::cos(phase), std::sin(phase));
    }
  }
  dp.p = hermitize(dp.fourier * dp.x * dp.fourier.adjoint());
  return dp;
}

// ---------------------------------------------------------------------------
// Guess model

/// Precise A measurement paired with the constant output y0 for B:
/// Pi(x, y) = E^A(x) delta(y, y0).
inline JointPovm guess_model(const Operator& a, const Operator& b, double y0, const Tolerances& tol = {}) {
  require_same_dim(a, b, "guess_model");
  const auto sd = spectral(a, -1.0, tol);
  return JointPovm(a.rows(), sd.eigenvalues, {y0}, sd.projectors);
}

// ---------------------------------------------------------------------------
// Difference / sum measurement

/// Ancilla state on C^d with clock amplitudes ~ exp(-k^2 / (4 width^2)),
/// k = 0..d-1. Smaller widths concentrate the state at clock value 0.
inline StateVector sharpened_clock_state(Eigen::Index d, double width) {
  if (!(width > 0.0)) throw Error("sharpened_clock_state: width must be positive");
  ComplexVector v(d);
  for (Eigen::Index k = 0; k < d; ++k)
    v(k) = std::exp(-static_cast<double>(k * k) / (4.0 * width * width));
  return StateVector::normalized(v);
}

/// Measures C = (X (x) I - I (x) X) mod d and D = (P (x) I + I (x) P) mod d on
/// object (x) ancilla, the finite analog of the pair Q - Q', P + P'. Outcome
/// values are the integers 0..d-1, so N_A = C - X (x) I is an ordinary
/// operator difference. The object observables are discrete_pair(d).x and .p.
inline Ancilla epr_difference_sum_model(Eigen::Index d, const StateVector& xi, const Tolerances& tol = {}) {
  if (d < 2) throw Error("epr_difference_sum_model: dimension must be at least 2");
  if (xi.dim() != d) throw Error("epr_difference_sum_model: ancilla state has wrong dimension");
  const DiscretePair dp = discrete_pair(d);
  const Eigen::Index n = d * d;
  Operator c = Operator::Zero(n, n);
  Operator dsum = Operator::Zero(n, n);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) {
      c(a * d + b, a * d + b) = static_cast<double>(((a - b) % d + d) % d);
      dsum(a * d + b, a * d + b) = static_cast<double>((a + b) % d);
    }
  const Operator ff = tensor(dp.fourier, dp.fourier);
  dsum = hermitize(ff * dsum * ff.adjoint());
  const double defect = op_norm(commutator(c, dsum));
  if (defect > tol.commute) throw Error("epr_difference_sum_model: [C, D] = " + std::to_string(defect));
  return Ancilla{d, d, xi, std::move(c), std::move(dsum)};
}

// ---------------------------------------------------------------------------
// Independent-noise models

/// C = A (x) I + I (x) G1 and D = B (x) I + I (x) G2. The mean noise operators
/// are <xi|G|xi> I, so the noise is statistically independent for both
/// observables. Rejected unless [C, D] vanishes, which in finite dimension
/// requires [A, B] = 0 and [G1, G2] = 0.
inline Ancilla independent_noise_model(const Operator& a, const Operator& b, const Operator& g1, const Operator& g2,
                                       const StateVector& xi, const Tolerances& tol = {}) {
  require_same_dim(a, b, "independent_noise_model");
  require_same_dim(g1, g2, "independent_noise_model");
  if (g1.rows() != xi.dim()) throw Error("independent_noise_model: ancilla state has wrong dimension");
  const Operator ih = identity(a.rows());
  const Operator ik = identity(g1.rows());
  Operator c = tensor(a, ik) + tensor(ih, g1);
  Operator d = tensor(b, ik) + tensor(ih, g2);
  const double defect = op_norm(commutator(c, d));
  if (defect > tol.commute)
    throw Error("independent_noise_model: [C, D] = " + std::to_string(defect) + ", construction rejected");
  return Ancilla{a.rows(), g1.rows(), xi, std::move(c), std::move(d)};
}

/// With probability w measure A precisely and report (a / w, gB / w); otherwise
/// measure B precisely and report (gA / (1 - w), b / (1 - w)). The first
/// moments are A + gA I and B + gB I, so both noises are statistically
/// independent, and unbiased when the offsets are zero.
inline JointPovm randomized_choice_model(const Operator& a, const Operator& b, double w, double offset_a = 0.0,
                                         double offset_b = 0.0, const Tolerances& tol = {}) {
  require_same_dim(a, b, "randomized_choice_model");
  if (!(w > 0.0 && w < 1.0)) throw Error("randomized_choice_model: weight must lie in (0, 1)");
  const auto sa = spectral(a, -1.0, tol);
  const auto sb = spectral(b, -1.0, tol);
  std::vector<LabeledElement> items;
  for (std::size_t i = 0; i < sa.size(); ++i)
    items.push_back({sa.eigenvalues[i] / w, offset_b / w, w * sa.projectors[i]});
  for (std::size_t j = 0; j < sb.size(); ++j)
    items.push_back({offset_a / (1.0 - w), sb.eigenvalues[j] / (1.0 - w), (1.0 - w) * sb.projectors[j]});
  return JointPovm::from_labeled(a.rows(), items, tol.value_match);
}

/// Unbiased joint measurement of sigma_x and sigma_y:
/// Pi(s/eta, t/eta) = (I + eta (s sigma_x + t sigma_y)) / 4, s, t = +-1,
/// positive for 0 < eta <= 1/sqrt(2).
inline JointPovm unbiased_qubit_xy_model(double eta) {
  if (!(eta > 0.0 && eta <= 1.0 / std::sqrt(2.0) + 1e-12))
    throw Error("unbiased_qubit_xy_model: eta must lie in (0, 1/sqrt(2)]");
  std::vector<Operator> elems;
  for (int s : {-1, 1})
    for (int t : {-1, 1}) elems.push_back(0.25 * (identity(2) + eta * (s * pauli::x() + t * pauli::y())));
  return JointPovm(2, {-1.0 / eta, 1.0 / eta}, {-1.0 / eta, 1.0 / eta}, std::move(elems));
}

// ---------------------------------------------------------------------------
// Truncated oscillators

struct TruncatedOscillator {
  Eigen::Index cutoff = 0;
  double hbar = 1.0;
  Operator q;
  Operator p;
};

/// Q = sqrt(hbar/2)(a + a^dagger), P = i sqrt(hbar/2)(a^dagger - a) on the
/// first `cutoff` number states. [Q, P] = i hbar except in the last row and
/// column.
inline TruncatedOscillator truncated_oscillator(Eigen::Index cutoff, double hbar = 1.0) {
  if (cutoff < 2) throw Error("truncated_oscillator: cutoff must be at least 2");
  if (!(hbar > 0.0)) throw Error("truncated_oscillator: hbar must be positive");
  Operator lower = Operator::Zero(cutoff, cutoff);
  for (Eigen::Index n = 1; n < cutoff; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n));
  const double s = std::sqrt(hbar / 2.0);
  TruncatedOscillator osc;
  osc.cutoff = cutoff;
  osc.hbar = hbar;
  osc.q = s * (lower + lower.adjoint());
  osc.p = Complex(0.0, s) * (Operator(lower.adjoint()) - lower);
  return osc;
}

/// Low-lying oscillator states described independently of the cutoff.
struct OscillatorState {
  enum class Kind { Number, Coherent, Squeezed };
  Kind kind = Kind::Number;
  double parameter = 0.0;  // number n, coherent amplitude alpha (real), or squeeze r
  // Squeezed vacuum with r < 0 narrows P: (dP)^2 = hbar/2 exp(2r).

  static OscillatorState number(int n) { return {Kind::Number, static_cast<double>(n)}; }
  static OscillatorState coherent(double alpha) { return {Kind::Coherent, alpha}; }
  static OscillatorState squeezed(double r) { return {Kind::Squeezed, r}; }
};

/// Number-basis amplitudes of the state on indices 0..cutoff-1, renormalized.
inline StateVector oscillator_state(const OscillatorState& s, Eigen::Index cutoff) {
  ComplexVector v = ComplexVector::Zero(cutoff);
  switch (s.kind) {
    case OscillatorState::Kind::Number: {
      const auto n = static_cast<Eigen::Index>(s.parameter);
      if (n < 0 || n >= cutoff) throw Error("oscillator_state: number state outside the cutoff");
      v(n) = 1.0;
      break;
    }
    case OscillatorState::Kind::Coherent: {
      double c = std::exp(-0.5 * s.parameter * s.parameter);
      for (Eigen::Index n = 0; n < cutoff; ++n) {
        v(n) = c;
        c *= s.parameter / std::sqrt(static_cast<double>(n + 1));
      }
      break;
    }
    case OscillatorState::Kind::Squeezed: {
      const double t = -std::tanh(s.parameter);
      double c = 1.0 / std::sqrt(std::cosh(s.parameter));
      for (Eigen::Index m = 0; 2 * m < cutoff; ++m) {
        v(2 * m) = c;
        // c_{2m+2} / c_{2m} = t sqrt((2m+1)(2m+2)) / (2 (m+1))
        c *= t * std::sqrt(static_cast<double>((2 * m + 1) * (2 * m + 2))) / (2.0 * static_cast<double>(m + 1));
      }
      break;
    }
  }
  return StateVector::normalized(v);
}

/// Probability weight on number states >= cutoff / 2.
inline double upper_half_weight(const StateVector& psi) {
  const Eigen::Index half = psi.dim() / 2;
  return psi.vec().tail(psi.dim() - half).squaredNorm();
}

struct CcrDemoConfig {
  Eigen::Index cutoff = 16;
  double hbar = 1.0;
  double max_upper_weight = 1e-2;  // admissible probability on indices >= cutoff / 2
};

struct CcrDemoReport {
  Eigen::Index cutoff = 0;
  double hbar = 1.0;
  double eps_a = 0.0;     // noise of the P + P' output (measured exactly)
  double eps_b = 0.0;     // noise of the Q output, <Q'^2>^(1/2)
  double delta_a = 0.0;   // d(P + P')
  double delta_b = 0.0;   // dQ
  double delta_p1 = 0.0;  // dP
  double delta_p2 = 0.0;  // dP'
  double delta_q2 = 0.0;  // dQ'
  RelationRecord generalized;
  RelationRecord closing;  // eps(Q)^2 >= hbar^2 / (4 dP^2 + 4 dP'^2)
  double truncation_estimate = 0.0;
  double closing_tolerance = 0.0;
  double low_block_ccr_defect = 0.0;  // rows < cutoff-1 of [Q,P] - i hbar I
  double upper_weight_1 = 0.0;
  double upper_weight_2 = 0.0;
};

/// Joint measurement of P + P' (exactly) and Q (read off as Q - Q') on two
/// truncated oscillators in the product state psi1 (x) psi2, with A = P + P'
/// and B = Q. The noises are N_A = 0 and N_B = -Q'.
///
/// The truncated pair C = P + P', D = Q - Q' commutes only up to the boundary
/// rows, so both inequalities are checked against
///   estimate = 2 (||([Q,P] - i hbar) psi1|| + ||([Q,P] - i hbar) psi2||),
/// which bounds |<[C, D]>| and the deviation of |<[A, B]>| from hbar.
inline CcrDemoReport truncated_ccr_demo(const OscillatorState& s1, const OscillatorState& s2,
                                        const CcrDemoConfig& cfg = {}, const Tolerances& tol = {}) {
  if (cfg.cutoff < 8) throw Error("truncated_ccr_demo: cutoff must be at least 8");
  const TruncatedOscillator osc = truncated_oscillator(cfg.cutoff, cfg.hbar);
  const StateVector psi1 = oscillator_state(s1, cfg.cutoff);
  const StateVector psi2 = oscillator_state(s2, cfg.cutoff);
  CcrDemoReport r;
  r.cutoff = cfg.cutoff;
  r.hbar = cfg.hbar;
  r.upper_weight_1 = upper_half_weight(psi1);
  r.upper_weight_2 = upper_half_weight(psi2);
  if (r.upper_weight_1 > cfg.max_upper_weight || r.upper_weight_2 > cfg.max_upper_weight)
    throw Error("truncated_ccr_demo: state support extends past half the cutoff");

  const Operator id = identity(cfg.cutoff);
  const Operator ccr_defect = commutator(osc.q, osc.p) - Complex(0.0, cfg.hbar) * id;
  r.low_block_ccr_defect = ccr_defect.topRows(cfg.cutoff - 1).cwiseAbs().maxCoeff();
  const double e1 = (ccr_defect * psi1.vec()).norm();
  const double e2 = (ccr_defect * psi2.vec()).norm();
  r.truncation_estimate = 2.0 * (e1 + e2);

  const StateVector psi = tensor(psi1, psi2);
  const Operator a = tensor(osc.p, id) + tensor(id, osc.p);
  const Operator b = tensor(osc.q, id);
  const Operator noise_b = -tensor(id, osc.q);
  r.eps_a = 0.0;
  r.eps_b = (noise_b * psi.vec()).norm();
  r.delta_a = std_dev(a, psi, tol);
  r.delta_b = std_dev(b, psi, tol);
  r.delta_p1 = std_dev(osc.p, psi1, tol);
  r.delta_p2 = std_dev(osc.p, psi2, tol);
  r.delta_q2 = std_dev(osc.q, psi2, tol);

  const double half_comm = 0.5 * std::abs(expectation(commutator(a, b), psi));
  const double gur_lhs = r.eps_a * r.eps_b + r.eps_a * r.delta_b + r.delta_a * r.eps_b;
  r.generalized = make_record(RelationId::JointGeneralized, RelationKind::Universal, gur_lhs, half_comm,
                              r.truncation_estimate, {{"delta_a_eps_b", r.delta_a * r.eps_b}});

  const double denom = 4.0 * r.delta_p1 * r.delta_p1 + 4.0 * r.delta_p2 * r.delta_p2;
  const double bound = cfg.hbar * cfg.hbar / denom;
  // eps^2 >= (hbar - delta)^2 / (4 dA^2) >= bound - hbar delta / (2 dA^2).
  r.closing_tolerance = r.truncation_estimate * std::max(1.0, cfg.hbar / (2.0 * r.delta_a * r.delta_a));
  r.closing = make_record(RelationId::PreciseABound, RelationKind::Conditional, r.eps_b * r.eps_b, bound,
                          r.closing_tolerance, {{"delta_p1", r.delta_p1}, {"delta_p2", r.delta_p2}});
  return r;
}

}  // namespace jmlab
