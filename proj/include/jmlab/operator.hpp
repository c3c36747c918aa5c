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

// Dense complex operator algebra on small Hilbert spaces.
//
// Tensor products use the row-major block convention: the first factor is the
// slow index, so entry (i*dimY + k, j*dimY + l) of X (x) Y is X(i,j) * Y(k,l).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "jmlab/tolerances.hpp"

namespace jmlab {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline Operator identity(Eigen::Index n) { return Operator::Identity(n, n); }

inline void require_square(const Operator& x, const char* what) {
  if (x.rows() != x.cols() || x.rows() == 0)
    throw Error(std::string(what) + ": operator must be a nonempty square matrix");
}

inline void require_same_dim(const Operator& x, const Operator& y, const char* what) {
  require_square(x, what);
  require_square(y, what);
  if (x.rows() != y.rows()) throw Error(std::string(what) + ": dimension mismatch");
}

/// Largest entry modulus of X - X^dagger.
inline double hermitian_defect(const Operator& x) {
  if (x.size() == 0) return 0.0;
  return (x - x.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Operator& x, double tol = Tolerances{}.hermitian) {
  return x.rows() == x.cols() && hermitian_defect(x) <= tol;
}

inline Operator hermitize(const Operator& x) { return 0.5 * (x + x.adjoint()); }

/// Spectral (largest singular value) norm.
inline double op_norm(const Operator& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<Operator> svd(x);
  return svd.singularValues()(0);
}

/// Trace norm of a Hermitian operator: sum of absolute eigenvalues.
inline double trace_norm_hermitian(const Operator& x) {
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(x), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

inline double max_entry_distance(const Operator& x, const Operator& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw Error("max_entry_distance: shape mismatch");
  if (x.size() == 0) return 0.0;
  return (x - y).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// States

/// Unit vector in C^dim.
class StateVector {
 public:
  explicit StateVector(ComplexVector amplitudes, double tol = Tolerances{}.normalization)
      : amp_(std::move(amplitudes)) {
    if (amp_.size() == 0) throw Error("StateVector: empty amplitude vector");
    if (std::abs(amp_.norm() - 1.0) > tol)
      throw Error("StateVector: amplitudes not normalized (norm " + std::to_string(amp_.norm()) + ")");
  }

  /// Rescales to unit norm; rejects the zero vector.
  static StateVector normalized(const ComplexVector& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw Error("StateVector: cannot normalize zero or non-finite vector");
    return StateVector(v / n);
  }

  static StateVector basis(Eigen::Index dim, Eigen::Index k) {
    if (k < 0 || k >= dim) throw Error("StateVector::basis: index out of range");
    ComplexVector v = ComplexVector::Zero(dim);
    v(k) = 1.0;
    return StateVector(std::move(v));
  }

  Eigen::Index dim() const { return amp_.size(); }
  const ComplexVector& vec() const { return amp_; }
  Complex operator()(Eigen::Index i) const { return amp_(i); }

 private:
  ComplexVector amp_;
};

/// Tensor product of two states, first factor slow.
inline StateVector tensor(const StateVector& a, const StateVector& b) {
  ComplexVector v(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    v.segment(i * b.dim(), b.dim()) = a(i) * b.vec();
  return StateVector::normalized(v);
}

class DensityMatrix {
 public:
  explicit DensityMatrix(Operator rho, double tol = Tolerances{}.density) : rho_(std::move(rho)) {
    require_square(rho_, "DensityMatrix");
    if (hermitian_defect(rho_) > tol) throw Error("DensityMatrix: not Hermitian");
    if (std::abs(rho_.trace().real() - 1.0) > tol || std::abs(rho_.trace().imag()) > tol)
      throw Error("DensityMatrix: trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(rho_), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw Error("DensityMatrix: negative eigenvalue");
  }

  static DensityMatrix pure(const StateVector& psi) {
    return DensityMatrix(psi.vec() * psi.vec().adjoint());
  }

  Eigen::Index dim() const { return rho_.rows(); }
  const Operator& matrix() const { return rho_; }

 private:
  Operator rho_;
};

// ---------------------------------------------------------------------------
// Basic operations

inline Operator commutator(const Operator& x, const Operator& y) {
  require_same_dim(x, y, "commutator");
  return x * y - y * x;
}

inline Complex expectation(const Operator& x, const StateVector& psi) {
  require_square(x, "expectation");
  if (x.rows() != psi.dim()) throw Error("expectation: dimension mismatch");
  return psi.vec().dot(x * psi.vec());
}

/// Real part of <psi|X|psi>, asserting the imaginary part is round-off.
inline double real_expectation(const Operator& x, const StateVector& psi,
                               double tol = Tolerances{}.hermitian) {
  const Complex z = expectation(x, psi);
  if (std::abs(z.imag()) > tol * std::max(1.0, std::abs(z)))
    throw Error("real_expectation: imaginary part " + std::to_string(z.imag()) + " exceeds tolerance");
  return z.real();
}

/// (<X^2> - <X>^2)^(1/2); small negative round-off is clamped to zero.
inline double std_dev(const Operator& x, const StateVector& psi, const Tolerances& tol = {}) {
  if (!is_hermitian(x, tol.hermitian)) throw Error("std_dev: operator is not Hermitian");
  const ComplexVector xpsi = x * psi.vec();
  const double second = xpsi.squaredNorm();
  const double first = psi.vec().dot(xpsi).real();
  const double var = second - first * first;
  if (var < -tol.variance_floor * std::max(1.0, second))
    throw Error("std_dev: negative variance " + std::to_string(var));
  // Central form ||(X - <X>) psi||: same value, no cancellation near zero.
  return (xpsi - first * psi.vec()).norm();
}

inline Operator tensor(const Operator& x, const Operator& y) {
  const Eigen::Index ry = y.rows(), cy = y.cols();
  Operator out(x.rows() * ry, x.cols() * cy);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * ry, j * cy, ry, cy) = x(i, j) * y;
  return out;
}

/// Embedding H -> H (x) K, psi -> psi (x) xi, as a (dimH*dimK) x dimH matrix.
inline Operator ancilla_embedding(Eigen::Index dim_h, const StateVector& xi) {
  const Eigen::Index dk = xi.dim();
  Operator v = Operator::Zero(dim_h * dk, dim_h);
  for (Eigen::Index i = 0; i < dim_h; ++i) v.block(i * dk, i, dk, 1) = xi.vec();
  return v;
}

/// The operator m on H with <psi|m|phi> = <psi (x) xi| X |phi (x) xi>.
inline Operator partial_mean(const Operator& x, const StateVector& xi) {
  require_square(x, "partial_mean");
  const Eigen::Index dk = xi.dim();
  if (x.rows() % dk != 0) throw Error("partial_mean: dimension not divisible by ancilla dimension");
  const Operator v = ancilla_embedding(x.rows() / dk, xi);
  return v.adjoint() * x * v;
}

/// Partial trace over the second (fast-index) factor of dimension dim_k.
inline Operator partial_trace_second(const Operator& x, Eigen::Index dim_k) {
  require_square(x, "partial_trace_second");
  if (dim_k <= 0 || x.rows() % dim_k != 0)
    throw Error("partial_trace_second: dimension not divisible by traced dimension");
  const Eigen::Index dh = x.rows() / dim_k;
  Operator out = Operator::Zero(dh, dh);
  for (Eigen::Index i = 0; i < dh; ++i)
    for (Eigen::Index j = 0; j < dh; ++j)
      out(i, j) = x.block(i * dim_k, j * dim_k, dim_k, dim_k).trace();
  return out;
}

// ---------------------------------------------------------------------------
// Spectral calculus

/// Distinct eigenvalues in increasing order with their spectral projectors.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<Operator> projectors;

  std::size_t size() const { return eigenvalues.size(); }

  Operator reconstruct() const {
    Operator out = Operator::Zero(projectors.front().rows(), projectors.front().cols());
    for (std::size_t k = 0; k < size(); ++k) out += eigenvalues[k] * projectors[k];
    return out;
  }
};

/// Default merge radius: cluster_rel times the spectral range, with an
/// absolute floor so exactly degenerate spectra still merge.
inline double default_cluster_tol(const RealVector& evals, const Tolerances& tol = {}) {
  const double range = evals.size() ? evals.maxCoeff() - evals.minCoeff() : 0.0;
  const double scale = std::max({range, evals.size() ? evals.cwiseAbs().maxCoeff() : 0.0, 1.0});
  return tol.cluster_rel * scale;
}

/// Eigen-decomposition with eigenvalues closer than cluster_tol merged
/// (single linkage over the sorted spectrum). A negative cluster_tol selects
/// the default radius.
inline SpectralDecomposition spectral(const Operator& x, double cluster_tol = -1.0,
                                      const Tolerances& tol = {}) {
  require_square(x, "spectral");
  if (!is_hermitian(x, tol.hermitian)) throw Error("spectral: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(x));
  if (es.info() != Eigen::Success) throw Error("spectral: eigensolver failed");
  const RealVector& ev = es.eigenvalues();  // ascending
  const Operator& vecs = es.eigenvectors();
  if (cluster_tol < 0.0) cluster_tol = default_cluster_tol(ev, tol);

  SpectralDecomposition out;
  Eigen::Index start = 0;
  const Eigen::Index n = ev.size();
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (k == n || ev(k) - ev(k - 1) > cluster_tol) {
      const Eigen::Index len = k - start;
      const auto block = vecs.middleCols(start, len);
      out.eigenvalues.push_back(ev.segment(start, len).mean());
      out.projectors.push_back(block * block.adjoint());
      start = k;
    }
  }
  return out;
}

/// Apply a real function to the spectrum of a Hermitian operator.
template <typename F>
Operator apply_function(const Operator& x, F&& f) {
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(x));
  if (es.info() != Eigen::Success) throw Error("apply_function: eigensolver failed");
  RealVector fv = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().adjoint();
}

/// Positive square root; eigenvalues in [-psd_floor, 0) are treated as zero.
inline Operator psd_sqrt(const Operator& x, const Tolerances& tol = {}) {
  require_square(x, "psd_sqrt");
  if (!is_hermitian(x, tol.hermitian)) throw Error("psd_sqrt: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(x));
  if (es.info() != Eigen::Success) throw Error("psd_sqrt: eigensolver failed");
  if (es.eigenvalues().minCoeff() < -tol.psd_floor)
    throw Error("psd_sqrt: operator has eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
  RealVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

inline double min_eigenvalue(const Operator& x) {
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(x), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const Operator& x) {
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(x), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Max |U^dagger U - I| entry.
inline double unitarity_defect(const Operator& u) {
  return max_entry_distance(u.adjoint() * u, identity(u.cols()));
}

// Pauli matrices, used throughout tests and the gallery.
namespace pauli {
inline Operator x() { Operator m(2, 2); m << 0, 1, 1, 0; return m; }
inline Operator y() { Operator m(2, 2); m << 0, Complex(0, -1), Complex(0, 1), 0; return m; }
inline Operator z() { Operator m(2, 2); m << 1, 0, 0, -1; return m; }
}  // namespace pauli

}  // namespace jmlab
