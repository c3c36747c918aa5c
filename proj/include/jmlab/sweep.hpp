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

// Randomized relation sweeps over dilated joint POVMs.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "jmlab/parallel.hpp"
#include "jmlab/random.hpp"
#include "jmlab/gallery.hpp"
#include "jmlab/relations.hpp"
#include "jmlab/search.hpp"

namespace jmlab {

/// Random joint POVM on an nx x ny grid: Pi_k = V_k^dagger V_k for the blocks
/// of a Haar isometry. Grid labels are increasing with random gaps in [0.5, 1.5).
inline JointPovm random_joint_povm(Eigen::Index dim, std::size_t nx, std::size_t ny, Rng& rng) {
  if (nx == 0 || ny == 0) throw Error("random_joint_povm: empty grid");
  std::uniform_real_distribution<double> gap(0.5, 1.5);
  auto axis = [&](std::size_t n) {
    std::vector<double> v(n);
    double at = -0.5 * static_cast<double>(n);
    for (auto& x : v) {
      x = at;
      at += gap(rng);
    }
    return v;
  };
  std::vector<double> xs = axis(nx), ys = axis(ny);
  const auto n = static_cast<Eigen::Index>(nx * ny);
  const Operator v = random_isometry(n * dim, dim, rng);
  std::vector<Operator> elems;
  elems.reserve(nx * ny);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Operator block = v.middleRows(k * dim, dim);
    elems.push_back(hermitize(block.adjoint() * block));
  }
  return JointPovm(dim, std::move(xs), std::move(ys), std::move(elems));
}

struct RelationSweepConfig {
  std::size_t instances = 1000;
  Eigen::Index min_dim = 2;
  Eigen::Index max_dim = 5;
  std::size_t max_outcomes = 3;  // per axis
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  Tolerances tol;
};

struct RelationSweepInstance {
  std::size_t index = 0;
  Eigen::Index dim = 0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  RelationReport report;
};

struct RelationSummary {
  std::string name;
  std::string kind;
  std::size_t applicable = 0;
  std::size_t violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();  // over applicable records
};

struct RelationSweepResult {
  std::vector<RelationSweepInstance> instances;
  std::vector<RelationSummary> summary;  // report order
  std::size_t violations = 0;
};

/// Instance i draws its dimension, grid, POVM, observables and state from
/// derived_rng(seed, i), dilates the POVM (completion seeded by i + 1) and
/// evaluates the full report on the resulting measuring process.
inline RelationSweepInstance relation_sweep_instance(const RelationSweepConfig& cfg, std::size_t i) {
  if (cfg.min_dim < 1 || cfg.max_dim < cfg.min_dim) throw Error("relation_sweep: bad dimension range");
  if (cfg.max_outcomes < 1) throw Error("relation_sweep: max_outcomes must be positive");
  Rng rng = derived_rng(cfg.seed, i);
  std::uniform_int_distribution<Eigen::Index> dims(cfg.min_dim, cfg.max_dim);
  std::uniform_int_distribution<std::size_t> outs(1, cfg.max_outcomes);
  RelationSweepInstance inst;
  inst.index = i;
  inst.dim = dims(rng);
  inst.nx = outs(rng);
  inst.ny = outs(rng);
  const JointPovm p = random_joint_povm(inst.dim, inst.nx, inst.ny, rng);
  const Operator a = random_hermitian(inst.dim, rng);
  const Operator b = random_hermitian(inst.dim, rng);
  const StateVector psi = random_state(inst.dim, rng);
  const Model model = naimark_dilate(p, i + 1, cfg.tol);
  inst.report = full_report(model, a, b, psi, cfg.tol);
  return inst;
}

inline RelationSweepResult relation_sweep(const RelationSweepConfig& cfg) {
  RelationSweepResult res;
  res.instances.resize(cfg.instances);
  parallel_for(cfg.instances, cfg.jobs, [&](std::size_t i) { res.instances[i] = relation_sweep_instance(cfg, i); });
  for (const auto& inst : res.instances) {
    const auto& rels = inst.report.relations;
    if (res.summary.empty())
      for (const auto& r : rels) res.summary.push_back({r.name(), kind_name(r.kind)});
    for (std::size_t k = 0; k < rels.size(); ++k) {
      const auto& r = rels[k];
      auto& s = res.summary[k];
      if (!r.applicable) continue;
      ++s.applicable;
      s.min_slack = std::min(s.min_slack, r.slack);
      if (r.is_violation()) {
        ++s.violations;
        ++res.violations;
      }
    }
  }
  return res;
}

inline std::string relation_sweep_csv(const RelationSweepResult& res) {
  std::ostringstream os;
  os.precision(17);
  os << "relation,kind,instances,applicable,violations,min_slack\n";
  for (const auto& s : res.summary)
    os << s.name << ',' << s.kind << ',' << res.instances.size() << ',' << s.applicable << ',' << s.violations << ','
       << (s.applicable ? s.min_slack : 0.0) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Scenario families for search sweeps

/// sigma_x / sigma_y with `count` random qubit states from derived_rng(seed, i).
inline std::vector<Scenario> qubit_xy_family(std::size_t count, std::uint64_t seed) {
  std::vector<Scenario> out;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = derived_rng(seed, i);
    out.push_back({pauli::x(), pauli::y(), random_state(2, rng)});
  }
  return out;
}

/// Clock / shift pair in dimension d with random states.
inline std::vector<Scenario> clock_shift_family(Eigen::Index d, std::size_t count, std::uint64_t seed) {
  const DiscretePair dp = discrete_pair(d);
  std::vector<Scenario> out;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = derived_rng(seed, i);
    out.push_back({dp.x, dp.p, random_state(d, rng)});
  }
  return out;
}

}  // namespace jmlab
