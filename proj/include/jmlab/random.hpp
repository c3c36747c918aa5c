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

// Seeded random matrices and states. All generators take the engine by
// reference; there is no global state.

#include <cstdint>
#include <random>

#include "jmlab/operator.hpp"

namespace jmlab {

using Rng = std::mt19937_64;

/// Matrix with i.i.d. standard complex Gaussian entries.
inline Operator ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Operator g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = Complex(n01(rng), n01(rng)) / std::sqrt(2.0);
  return g;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
inline Operator random_unitary(Eigen::Index n, Rng& rng) {
  const Operator g = ginibre(n, n, rng);
  Eigen::HouseholderQR<Operator> qr(g);
  Operator q = qr.householderQ() * identity(n);
  const Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

/// Random isometry rows x cols (cols <= rows).
inline Operator random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  if (cols > rows) throw Error("random_isometry: cols exceeds rows");
  return random_unitary(rows, rng).leftCols(cols);
}

inline Operator random_hermitian(Eigen::Index n, Rng& rng, double scale = 1.0) {
  const Operator g = ginibre(n, n, rng);
  return scale * hermitize(g);
}

inline Operator random_psd(Eigen::Index n, Rng& rng) {
  const Operator g = ginibre(n, n, rng);
  return g * g.adjoint();
}

inline StateVector random_state(Eigen::Index n, Rng& rng) {
  return StateVector::normalized(ginibre(n, 1, rng).col(0));
}

inline Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace jmlab
