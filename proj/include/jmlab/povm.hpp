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

// Joint POVMs over a finite outcome grid, their marginals and moment
// operators, and the precision criteria.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jmlab/operator.hpp"

namespace jmlab {

/// Which output variable of a joint apparatus: x (measuring A) or y (measuring B).
enum class Axis { A, B };

inline const char* axis_name(Axis a) { return a == Axis::A ? "A" : "B"; }

namespace detail {

inline bool values_match(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline std::optional<std::size_t> find_value(const std::vector<double>& values, double v, double tol) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values_match(values[i], v, tol)) return i;
  return std::nullopt;
}

inline void check_axis(const std::vector<double>& v, const char* name) {
  if (v.empty()) throw Error(std::string("outcome grid: empty ") + name + " axis");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw Error(std::string("outcome grid: non-finite ") + name + " value");
    if (i > 0 && !(v[i] > v[i - 1]))
      throw Error(std::string("outcome grid: ") + name + " values must be strictly increasing");
  }
}

}  // namespace detail

/// Outcome pair with its operator, used to assemble a POVM from unordered data.
struct LabeledElement {
  double x;
  double y;
  Operator element;
};

class JointPovm {
 public:
  JointPovm(Eigen::Index dim, std::vector<double> x_values, std::vector<double> y_values,
            std::vector<Operator> elements)
      : dim_(dim), xs_(std::move(x_values)), ys_(std::move(y_values)), elements_(std::move(elements)) {
    if (dim_ <= 0) throw Error("JointPovm: dimension must be positive");
    detail::check_axis(xs_, "x");
    detail::check_axis(ys_, "y");
    if (elements_.size() != xs_.size() * ys_.size())
      throw Error("JointPovm: element count does not match grid size");
    for (const auto& e : elements_)
      if (e.rows() != dim_ || e.cols() != dim_) throw Error("JointPovm: element has wrong shape");
  }

  /// Builds the grid from the labels. Labels that coincide within
  /// value_tol are merged and their elements summed; missing grid points are
  /// the zero operator.
  static JointPovm from_labeled(Eigen::Index dim, const std::vector<LabeledElement>& items,
                                double value_tol = Tolerances{}.value_match) {
    if (items.empty()) throw Error("JointPovm: no elements");
    auto axis_values = [&](auto get) {
      std::vector<double> raw;
      for (const auto& it : items) raw.push_back(get(it));
      std::sort(raw.begin(), raw.end());
      std::vector<double> out;
      for (double v : raw)
        if (out.empty() || !detail::values_match(out.back(), v, value_tol)) out.push_back(v);
      return out;
    };
    std::vector<double> xs = axis_values([](const LabeledElement& e) { return e.x; });
    std::vector<double> ys = axis_values([](const LabeledElement& e) { return e.y; });
    std::vector<Operator> elems(xs.size() * ys.size(), Operator::Zero(dim, dim));
    for (const auto& it : items) {
      if (it.element.rows() != dim || it.element.cols() != dim)
        throw Error("JointPovm: element has wrong shape");
      const auto ix = *detail::find_value(xs, it.x, value_tol);
      const auto iy = *detail::find_value(ys, it.y, value_tol);
      elems[ix * ys.size() + iy] += it.element;
    }
    return JointPovm(dim, std::move(xs), std::move(ys), std::move(elems));
  }

  Eigen::Index dim() const { return dim_; }
  const std::vector<double>& x_values() const { return xs_; }
  const std::vector<double>& y_values() const { return ys_; }
  std::size_t nx() const { return xs_.size(); }
  std::size_t ny() const { return ys_.size(); }
  std::size_t outcome_count() const { return elements_.size(); }

  /// Row-major (x-major) enumeration: index = ix * ny + iy.
  const Operator& element(std::size_t ix, std::size_t iy) const { return elements_.at(ix * ny() + iy); }
  const std::vector<Operator>& elements() const { return elements_; }

  std::optional<std::size_t> x_index(double x, double tol = Tolerances{}.value_match) const {
    return detail::find_value(xs_, x, tol);
  }
  std::optional<std::size_t> y_index(double y, double tol = Tolerances{}.value_match) const {
    return detail::find_value(ys_, y, tol);
  }

  const Operator& at(double x, double y, double tol = Tolerances{}.value_match) const {
    const auto ix = x_index(x, tol);
    const auto iy = y_index(y, tol);
    if (!ix || !iy) throw Error("JointPovm: outcome (" + std::to_string(x) + ", " + std::to_string(y) + ") not on grid");
    return element(*ix, *iy);
  }

 private:
  Eigen::Index dim_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<Operator> elements_;
};

/// Single-variable POVM, normally a marginal of a JointPovm.
struct MarginalPovm {
  Eigen::Index dim = 0;
  std::vector<double> values;
  std::vector<Operator> elements;
};

struct PovmValidity {
  bool valid = false;
  std::vector<double> min_eigenvalues;  // per element, grid order
  std::vector<double> max_eigenvalues;
  double worst_min_eigenvalue = 0.0;
  double worst_max_eigenvalue = 0.0;
  double hermitian_defect = 0.0;
  double completeness_defect = 0.0;  // trace norm of sum(Pi) - I
};

/// Checks 0 <= Pi(x,y) <= I and sum Pi = I. Never throws on bad data.
inline PovmValidity validate(const JointPovm& p, const Tolerances& tol = {}) {
  PovmValidity r;
  Operator sum = Operator::Zero(p.dim(), p.dim());
  r.worst_min_eigenvalue = std::numeric_limits<double>::infinity();
  r.worst_max_eigenvalue = -std::numeric_limits<double>::infinity();
  for (const auto& e : p.elements()) {
    r.hermitian_defect = std::max(r.hermitian_defect, hermitian_defect(e));
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(e), Eigen::EigenvaluesOnly);
    r.min_eigenvalues.push_back(es.eigenvalues().minCoeff());
    r.max_eigenvalues.push_back(es.eigenvalues().maxCoeff());
    r.worst_min_eigenvalue = std::min(r.worst_min_eigenvalue, r.min_eigenvalues.back());
    r.worst_max_eigenvalue = std::max(r.worst_max_eigenvalue, r.max_eigenvalues.back());
    sum += e;
  }
  r.completeness_defect = trace_norm_hermitian(sum - identity(p.dim()));
  r.valid = r.hermitian_defect <= tol.hermitian && r.worst_min_eigenvalue >= -tol.psd_floor &&
            r.worst_max_eigenvalue <= 1.0 + tol.psd_floor && r.completeness_defect <= tol.completeness;
  return r;
}

inline MarginalPovm marginal(const JointPovm& p, Axis axis) {
  MarginalPovm m;
  m.dim = p.dim();
  m.values = axis == Axis::A ? p.x_values() : p.y_values();
  m.elements.assign(m.values.size(), Operator::Zero(p.dim(), p.dim()));
  for (std::size_t ix = 0; ix < p.nx(); ++ix)
    for (std::size_t iy = 0; iy < p.ny(); ++iy)
      m.elements[axis == Axis::A ? ix : iy] += p.element(ix, iy);
  return m;
}

/// Trace-norm completeness defect and minimum eigenvalue of a marginal.
inline bool is_valid_marginal(const MarginalPovm& m, const Tolerances& tol = {}) {
  Operator sum = Operator::Zero(m.dim, m.dim);
  for (const auto& e : m.elements) {
    if (min_eigenvalue(e) < -tol.psd_floor) return false;
    sum += e;
  }
  return trace_norm_hermitian(sum - identity(m.dim)) <= tol.completeness;
}

inline double joint_prob(const JointPovm& p, const StateVector& psi, double x, double y,
                         const Tolerances& tol = {}) {
  if (psi.dim() != p.dim()) throw Error("joint_prob: dimension mismatch");
  return real_expectation(p.at(x, y, tol.value_match), psi);
}

/// Matrix of outcome probabilities, rows indexed by x and columns by y.
inline Eigen::MatrixXd probabilities(const JointPovm& p, const StateVector& psi) {
  if (psi.dim() != p.dim()) throw Error("probabilities: dimension mismatch");
  Eigen::MatrixXd out(p.nx(), p.ny());
  for (std::size_t ix = 0; ix < p.nx(); ++ix)
    for (std::size_t iy = 0; iy < p.ny(); ++iy) out(ix, iy) = real_expectation(p.element(ix, iy), psi);
  return out;
}

/// sum_x x^order Pi(x).
inline Operator moment_operator(const MarginalPovm& m, int order) {
  if (order != 1 && order != 2) throw Error("moment_operator: order must be 1 or 2");
  Operator out = Operator::Zero(m.dim, m.dim);
  for (std::size_t k = 0; k < m.values.size(); ++k)
    out += std::pow(m.values[k], order) * m.elements[k];
  return out;
}

struct PrecisionReport {
  bool precise = false;
  double defect = 0.0;            // max_x || Pi(x) - E^A(x) ||
  bool spectrum_on_grid = false;  // every eigenvalue of A is an outcome value
  std::string note;
};

/// Pi^A(x) == E^A(x) for every x, in operator norm. Eigenvalues of A missing
/// from the value set contribute || E^A(lambda) || = 1 to the defect.
inline PrecisionReport is_precise_for(const MarginalPovm& m, const Operator& a, const Tolerances& tol = {}) {
  PrecisionReport r;
  if (a.rows() != m.dim) throw Error("is_precise_for: dimension mismatch");
  const auto sd = spectral(a, -1.0, tol);
  std::vector<bool> matched(sd.size(), false);
  r.spectrum_on_grid = true;
  for (std::size_t k = 0; k < m.values.size(); ++k) {
    Operator target = Operator::Zero(m.dim, m.dim);
    for (std::size_t j = 0; j < sd.size(); ++j)
      if (detail::values_match(sd.eigenvalues[j], m.values[k], tol.value_match)) {
        target = sd.projectors[j];
        matched[j] = true;
        break;
      }
    r.defect = std::max(r.defect, op_norm(m.elements[k] - target));
  }
  for (std::size_t j = 0; j < sd.size(); ++j)
    if (!matched[j]) {
      r.spectrum_on_grid = false;
      r.defect = std::max(r.defect, op_norm(sd.projectors[j]));
    }
  if (!r.spectrum_on_grid) r.note = "observable has eigenvalues outside the outcome value set";
  r.precise = r.spectrum_on_grid && r.defect <= tol.precision;
  return r;
}

struct ProductProjectiveReport {
  bool holds = false;
  double defect = 0.0;  // max || Pi(x,y) - E^A(x) E^B(y) ||
  double commutator_norm = 0.0;
  bool commutation_consistent = true;  // holds implies [A,B] ~ 0
};

inline ProductProjectiveReport is_product_projective(const JointPovm& p, const Operator& a, const Operator& b,
                                                     const Tolerances& tol = {}) {
  if (a.rows() != p.dim() || b.rows() != p.dim()) throw Error("is_product_projective: dimension mismatch");
  ProductProjectiveReport r;
  const auto sa = spectral(a, -1.0, tol);
  const auto sb = spectral(b, -1.0, tol);
  const Operator zero = Operator::Zero(p.dim(), p.dim());
  auto projector_for = [&](const SpectralDecomposition& sd, double v) -> const Operator& {
    for (std::size_t j = 0; j < sd.size(); ++j)
      if (detail::values_match(sd.eigenvalues[j], v, tol.value_match)) return sd.projectors[j];
    return zero;
  };
  Operator covered = Operator::Zero(p.dim(), p.dim());
  for (std::size_t ix = 0; ix < p.nx(); ++ix)
    for (std::size_t iy = 0; iy < p.ny(); ++iy) {
      const Operator prod = projector_for(sa, p.x_values()[ix]) * projector_for(sb, p.y_values()[iy]);
      covered += prod;
      r.defect = std::max(r.defect, op_norm(p.element(ix, iy) - prod));
    }
  // Products over the grid must exhaust the identity, otherwise some joint
  // eigenspace has no outcome.
  r.defect = std::max(r.defect, op_norm(covered - identity(p.dim())));
  r.holds = r.defect <= tol.precision;
  r.commutator_norm = op_norm(commutator(a, b));
  r.commutation_consistent = !r.holds || r.commutator_norm <= 10.0 * tol.precision;
  return r;
}

/// Largest operator-norm difference between two POVMs over the union of their
/// grids; outcomes present in only one POVM compare against zero.
inline double povm_distance(const JointPovm& p, const JointPovm& q, double value_tol = Tolerances{}.value_match) {
  if (p.dim() != q.dim()) throw Error("povm_distance: dimension mismatch");
  double d = 0.0;
  std::vector<bool> seen(q.outcome_count(), false);
  for (std::size_t ix = 0; ix < p.nx(); ++ix)
    for (std::size_t iy = 0; iy < p.ny(); ++iy) {
      const auto jx = q.x_index(p.x_values()[ix], value_tol);
      const auto jy = q.y_index(p.y_values()[iy], value_tol);
      if (jx && jy) {
        seen[*jx * q.ny() + *jy] = true;
        d = std::max(d, op_norm(p.element(ix, iy) - q.element(*jx, *jy)));
      } else {
        d = std::max(d, op_norm(p.element(ix, iy)));
      }
    }
  for (std::size_t k = 0; k < q.outcome_count(); ++k)
    if (!seen[k]) d = std::max(d, op_norm(q.elements()[k]));
  return d;
}

}  // namespace jmlab
