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

#include <stdexcept>
#include <string>

namespace jmlab {

/// Numerical thresholds shared by every module. Each default is the absolute
/// tolerance the corresponding check is specified with.
struct Tolerances {
  double hermitian = 1e-10;      // max |X - X^dagger| entry
  double normalization = 1e-10;  // | ||psi|| - 1 |
  double density = 1e-10;        // trace, Hermiticity and eigenvalue floor of rho
  double projector = 1e-9;       // idempotence / completeness of spectral projectors
  double cluster_rel = 1e-8;     // eigenvalue merge radius relative to spectral range
  double psd_floor = 1e-10;      // most negative eigenvalue accepted as round-off
  double rank_floor = 1e-13;     // element eigenvalues below this count as exact zeros in noise sums
  double variance_floor = 1e-12; // most negative variance accepted as round-off
  double completeness = 1e-9;    // || sum Pi - I ||
  double precision = 1e-9;       // || Pi^A(x) - E^A(x) ||
  double value_match = 1e-9;     // outcome label vs eigenvalue matching
  double commute = 1e-9;         // || [X, Y] ||
  double unitary = 1e-9;         // || U^dagger U - I ||
  double route = 1e-8;           // disagreement between two computation routes
  double holds = 1e-9;           // relation slack floor
  double unbiased = 1e-9;        // || O(Pi^A) - A ||
  double independence = 1e-9;    // || n_A - r I ||
  double min_probability = 1e-12;// smallest outcome probability for conditioning
};

/// Thrown for malformed inputs and violated preconditions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error("jmlab: " + what) {}
};

/// Thrown when two routes that must agree mathematically disagree numerically.
class InconsistencyError : public Error {
 public:
  explicit InconsistencyError(const std::string& what) : Error(what) {}
};

}  // namespace jmlab
