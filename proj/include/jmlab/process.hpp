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

// Measuring processes (K, xi, U, M1, M2), ancilla quadruples (K, xi, C, D),
// the POVMs they induce, noise operators, conditional output states, and the
// dilation of an arbitrary joint POVM into a measuring process.
//
// Composite space ordering is H (x) K with H the slow index.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "jmlab/operator.hpp"
#include "jmlab/povm.hpp"
#include "jmlab/random.hpp"

namespace jmlab {

struct MeasuringProcess {
  Eigen::Index dim_h;
  Eigen::Index dim_k;
  StateVector xi;    // ancilla preparation on K
  Operator unitary;  // on H (x) K
  Operator m1;       // pointer observable for x, on K
  Operator m2;       // pointer observable for y, on K
};

struct Ancilla {
  Eigen::Index dim_h;
  Eigen::Index dim_k;
  StateVector xi;
  Operator c;  // measured in place of A (x) I
  Operator d;  // measured in place of B (x) I
};

struct NoiseOperator {
  Axis target;
  Operator matrix;  // on H (x) K
};

struct ProcessValidity {
  bool valid = false;
  bool dims_ok = false;
  double unitarity_defect = 0.0;
  double pointer_hermitian_defect = 0.0;
  double pointer_commutator = 0.0;  // || [M1, M2] ||
};

inline ProcessValidity validate(const MeasuringProcess& mp, const Tolerances& tol = {}) {
  ProcessValidity r;
  const Eigen::Index n = mp.dim_h * mp.dim_k;
  r.dims_ok = mp.dim_h > 0 && mp.dim_k > 0 && mp.xi.dim() == mp.dim_k && mp.unitary.rows() == n &&
              mp.unitary.cols() == n && mp.m1.rows() == mp.dim_k && mp.m1.cols() == mp.dim_k &&
              mp.m2.rows() == mp.dim_k && mp.m2.cols() == mp.dim_k;
  if (!r.dims_ok) return r;
  r.unitarity_defect = unitarity_defect(mp.unitary);
  r.pointer_hermitian_defect = std::max(hermitian_defect(mp.m1), hermitian_defect(mp.m2));
  r.pointer_commutator = op_norm(commutator(mp.m1, mp.m2));
  r.valid = r.unitarity_defect <= tol.unitary && r.pointer_hermitian_defect <= tol.hermitian &&
            r.pointer_commutator <= tol.commute;
  return r;
}

struct AncillaValidity {
  bool valid = false;
  bool dims_ok = false;
  double hermitian_defect = 0.0;
  double commutator = 0.0;  // || [C, D] ||
};

inline AncillaValidity validate(const Ancilla& a, const Tolerances& tol = {}) {
  AncillaValidity r;
  const Eigen::Index n = a.dim_h * a.dim_k;
  r.dims_ok = a.dim_h > 0 && a.dim_k > 0 && a.xi.dim() == a.dim_k && a.c.rows() == n && a.c.cols() == n &&
              a.d.rows() == n && a.d.cols() == n;
  if (!r.dims_ok) return r;
  r.hermitian_defect = std::max(hermitian_defect(a.c), hermitian_defect(a.d));
  r.commutator = op_norm(commutator(a.c, a.d));
  r.valid = r.hermitian_defect <= tol.hermitian && r.commutator <= tol.commute;
  return r;
}

namespace detail {

inline void require_valid(const MeasuringProcess& mp, const Tolerances& tol, const char* what) {
  const auto v = validate(mp, tol);
  if (!v.dims_ok) throw Error(std::string(what) + ": inconsistent process dimensions");
  if (!v.valid)
    throw Error(std::string(what) + ": invalid process (unitarity defect " + std::to_string(v.unitarity_defect) +
                ", pointer commutator " + std::to_string(v.pointer_commutator) + ")");
}

inline std::optional<std::size_t> find_eigenvalue(const SpectralDecomposition& sd, double v, double tol) {
  return find_value(sd.eigenvalues, v, tol);
}

}  // namespace detail

/// C = U^dagger (I (x) M1) U and D = U^dagger (I (x) M2) U.
inline Ancilla ancilla_from_process(const MeasuringProcess& mp, const Tolerances& tol = {}) {
  const auto v = validate(mp, tol);
  if (!v.dims_ok) throw Error("ancilla_from_process: inconsistent process dimensions");
  const Operator ih = identity(mp.dim_h);
  Operator c = hermitize(mp.unitary.adjoint() * tensor(ih, mp.m1) * mp.unitary);
  Operator d = hermitize(mp.unitary.adjoint() * tensor(ih, mp.m2) * mp.unitary);
  const double defect = op_norm(commutator(c, d));
  if (defect > tol.route)
    throw Error("ancilla_from_process: [C, D] = " + std::to_string(defect) + " (process pointers do not commute)");
  return Ancilla{mp.dim_h, mp.dim_k, mp.xi, std::move(c), std::move(d)};
}

/// Pi(x,y) = <xi| U^dagger [I (x) E^M1(x) E^M2(y)] U |xi>, over the grid
/// spectrum(M1) x spectrum(M2).
inline JointPovm povm_from_process(const MeasuringProcess& mp, const Tolerances& tol = {}) {
  detail::require_valid(mp, tol, "povm_from_process");
  const auto s1 = spectral(mp.m1, -1.0, tol);
  const auto s2 = spectral(mp.m2, -1.0, tol);
  const Operator w = mp.unitary * ancilla_embedding(mp.dim_h, mp.xi);  // psi -> U(psi (x) xi)
  const Operator ih = identity(mp.dim_h);
  std::vector<Operator> elems;
  elems.reserve(s1.size() * s2.size());
  for (const auto& e1 : s1.projectors)
    for (const auto& e2 : s2.projectors) {
      const Operator e = hermitize(e1 * e2);
      elems.push_back(hermitize(w.adjoint() * tensor(ih, e) * w));
    }
  return JointPovm(mp.dim_h, s1.eigenvalues, s2.eigenvalues, std::move(elems));
}

/// Joint spectral measure of a commuting Hermitian pair, as projectors on the
/// grid spectrum(C) x spectrum(D). Diagonalizes C + gamma D for a generic
/// gamma and reads the joint eigenvalues back; a gamma that merges distinct
/// joint eigenvalues is detected and replaced.
struct JointSpectrum {
  std::vector<double> c_values;
  std::vector<double> d_values;
  std::vector<Operator> projectors;  // index ic * d_values.size() + id
};

inline JointSpectrum joint_spectrum(const Operator& c, const Operator& d, const Tolerances& tol = {}) {
  require_same_dim(c, d, "joint_spectrum");
  const double defect = op_norm(commutator(c, d));
  if (defect > tol.route)
    throw Error("joint_spectrum: commutation defect " + std::to_string(defect) + " too large");
  const auto sc = spectral(c, -1.0, tol);
  const auto sd = spectral(d, -1.0, tol);
  const double scale = std::max({1.0, op_norm(c), op_norm(d)});
  const double label_tol = std::max(tol.route, 1e3 * defect) * scale;

  Rng rng(0x5eedULL);
  std::uniform_real_distribution<double> unif(0.3, 3.0);
  const std::array<double, 4> preset{0.7548776662466927, 1.3247179572447460, 0.5857864376269049,
                                     2.2360679774997896};
  for (int attempt = 0; attempt < 16; ++attempt) {
    const double gamma = attempt < static_cast<int>(preset.size()) ? preset[attempt] : unif(rng);
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(c + gamma * d));
    if (es.info() != Eigen::Success) continue;
    const RealVector& ev = es.eigenvalues();
    const double cluster_tol = default_cluster_tol(ev, tol);

    JointSpectrum out{sc.eigenvalues, sd.eigenvalues,
                      std::vector<Operator>(sc.size() * sd.size(), Operator::Zero(c.rows(), c.cols()))};
    bool ok = true;
    Eigen::Index start = 0;
    for (Eigen::Index k = 1; k <= ev.size() && ok; ++k) {
      if (k < ev.size() && ev(k) - ev(k - 1) <= cluster_tol) continue;
      const Operator wcols = es.eigenvectors().middleCols(start, k - start);
      const Operator cw = wcols.adjoint() * c * wcols;
      const Operator dw = wcols.adjoint() * d * wcols;
      const Eigen::Index len = k - start;
      const double cval = cw.trace().real() / static_cast<double>(len);
      const double dval = dw.trace().real() / static_cast<double>(len);
      const double spread = std::max(max_entry_distance(cw, cval * identity(len)),
                                     max_entry_distance(dw, dval * identity(len)));
      std::optional<std::size_t> ic, id;
      for (std::size_t j = 0; j < sc.size() && !ic; ++j)
        if (std::abs(sc.eigenvalues[j] - cval) <= label_tol) ic = j;
      for (std::size_t j = 0; j < sd.size() && !id; ++j)
        if (std::abs(sd.eigenvalues[j] - dval) <= label_tol) id = j;
      if (spread > label_tol || !ic || !id) {
        ok = false;
        break;
      }
      out.projectors[*ic * sd.size() + *id] += wcols * wcols.adjoint();
      start = k;
    }
    if (ok) return out;
  }
  throw Error("joint_spectrum: simultaneous diagonalization failed");
}

/// Pi(x,y) = <xi| E^C(x) E^D(y) |xi>.
inline JointPovm povm_from_ancilla(const Ancilla& a, const Tolerances& tol = {}) {
  const auto v = validate(a, tol);
  if (!v.dims_ok) throw Error("povm_from_ancilla: inconsistent ancilla dimensions");
  if (v.hermitian_defect > tol.hermitian) throw Error("povm_from_ancilla: C or D not Hermitian");
  const auto js = joint_spectrum(a.c, a.d, tol);
  std::vector<Operator> elems;
  elems.reserve(js.projectors.size());
  for (const auto& proj : js.projectors) elems.push_back(hermitize(partial_mean(proj, a.xi)));
  return JointPovm(a.dim_h, js.c_values, js.d_values, std::move(elems));
}

/// N_A = C - A (x) I (target A) or N_B = D - B (x) I (target B).
inline NoiseOperator noise_operator(const Ancilla& a, const Operator& observable, Axis target) {
  if (observable.rows() != a.dim_h || observable.cols() != a.dim_h)
    throw Error("noise_operator: observable dimension does not match the object space");
  const Operator& measured = target == Axis::A ? a.c : a.d;
  return NoiseOperator{target, measured - tensor(observable, identity(a.dim_k))};
}

/// State after outcome (x, y):
///   Tr_K{ P U (rho (x) |xi><xi|) U^dagger P } / Tr{ ... },  P = I (x) E^M1(x) E^M2(y).
/// For projective P this agrees with the one-sided form
/// Tr_K{ U (rho (x) |xi><xi|) U^dagger P }, since partial trace over K is
/// cyclic for operators acting on K alone and P^2 = P.
inline DensityMatrix conditional_output_state(const MeasuringProcess& mp, const DensityMatrix& rho, double x,
                                              double y, const Tolerances& tol = {}) {
  detail::require_valid(mp, tol, "conditional_output_state");
  if (rho.dim() != mp.dim_h) throw Error("conditional_output_state: state dimension mismatch");
  const auto s1 = spectral(mp.m1, -1.0, tol);
  const auto s2 = spectral(mp.m2, -1.0, tol);
  const auto i1 = detail::find_eigenvalue(s1, x, tol.value_match);
  const auto i2 = detail::find_eigenvalue(s2, y, tol.value_match);
  if (!i1 || !i2) throw Error("conditional_output_state: outcome is not in the pointer spectrum");
  const Operator p = tensor(identity(mp.dim_h), hermitize(s1.projectors[*i1] * s2.projectors[*i2]));
  const Operator xi_proj = mp.xi.vec() * mp.xi.vec().adjoint();
  const Operator evolved = mp.unitary * tensor(rho.matrix(), xi_proj) * mp.unitary.adjoint();
  const Operator num = p * evolved * p;
  const double prob = num.trace().real();
  if (prob <= tol.min_probability)
    throw Error("conditional_output_state: outcome has zero probability");
  return DensityMatrix(hermitize(partial_trace_second(num, mp.dim_k) / prob), 1e-8);
}

/// Dilates a valid joint POVM into a measuring process.
///
/// K has one basis vector per grid outcome (x-major order), xi = |0>, and the
/// isometry V psi = sum_k (Pi_k^(1/2) psi) (x) |k> is completed to a unitary
/// that agrees with V on H (x) xi. M1 and M2 are diagonal in the pointer basis
/// with the x and y labels. A nonzero seed rotates the completion by a Haar
/// unitary, giving a different dilation of the same POVM.
inline MeasuringProcess naimark_dilate(const JointPovm& p, std::uint64_t seed = 0, const Tolerances& tol = {}) {
  const auto validity = validate(p, tol);
  if (!validity.valid) throw Error("naimark_dilate: input is not a valid POVM");
  const Eigen::Index dh = p.dim();
  const Eigen::Index n = static_cast<Eigen::Index>(p.outcome_count());
  const Eigen::Index big = dh * n;

  Operator v = Operator::Zero(big, dh);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Operator root = psd_sqrt(hermitize(p.elements()[k]), tol);
    for (Eigen::Index i = 0; i < dh; ++i) v.row(i * n + k) = root.row(i);
  }
  const Operator gram = v.adjoint() * v;
  if (max_entry_distance(gram, identity(dh)) > tol.route)
    throw Error("naimark_dilate: pointer map is not an isometry");
  // Polish to an exact isometry; the change is of the order of the
  // completeness defect.
  v = v * apply_function(gram, [](double s) { return 1.0 / std::sqrt(s); });

  Eigen::HouseholderQR<Operator> qr(v);
  Operator complement = (qr.householderQ() * identity(big)).rightCols(big - dh);
  if (seed != 0 && big > dh) {
    Rng rng(seed);
    complement = complement * random_unitary(big - dh, rng);
  }

  Operator u(big, big);
  Eigen::Index next = 0;
  for (Eigen::Index col = 0; col < big; ++col) {
    if (col % n == 0) {
      u.col(col) = v.col(col / n);
    } else {
      u.col(col) = complement.col(next++);
    }
  }
  const double udef = unitarity_defect(u);
  if (udef > tol.unitary) throw Error("naimark_dilate: unitary extension failed (defect " + std::to_string(udef) + ")");

  Operator m1 = Operator::Zero(n, n);
  Operator m2 = Operator::Zero(n, n);
  for (std::size_t ix = 0; ix < p.nx(); ++ix)
    for (std::size_t iy = 0; iy < p.ny(); ++iy) {
      const auto k = static_cast<Eigen::Index>(ix * p.ny() + iy);
      m1(k, k) = p.x_values()[ix];
      m2(k, k) = p.y_values()[iy];
    }
  return MeasuringProcess{dh, n, StateVector::basis(n, 0), std::move(u), std::move(m1), std::move(m2)};
}

}  // namespace jmlab
