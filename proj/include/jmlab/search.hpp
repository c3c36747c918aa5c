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

// Derivative-free search over parametrized joint POVMs.
//
// A parameter vector encodes an isometry whose blocks K_k give
// Pi_k = K_k^dagger K_k, so every decoded candidate is a valid POVM. In the
// precise-A manifold the isometry acts inside each eigenspace of A, which
// fixes the A-marginal to E^A exactly.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jmlab/parallel.hpp"
#include "jmlab/random.hpp"
#include "jmlab/relations.hpp"

namespace jmlab {

struct Scenario {
  Operator a;
  Operator b;
  StateVector psi;
};

enum class Objective { NoiseProduct, EpsBGivenPreciseA, OutputSpreadProduct };
enum class Optimizer { NelderMead, RandomRestartDescent };
enum class Manifold { Free, PreciseA };

inline const char* objective_name(Objective o) {
  switch (o) {
    case Objective::NoiseProduct: return "noise_product";
    case Objective::EpsBGivenPreciseA: return "eps_B_given_precise_A";
    case Objective::OutputSpreadProduct: return "output_spread_product";
  }
  return "unknown";
}

inline Objective parse_objective(const std::string& s) {
  if (s == "noise_product") return Objective::NoiseProduct;
  if (s == "eps_B_given_precise_A") return Objective::EpsBGivenPreciseA;
  if (s == "output_spread_product") return Objective::OutputSpreadProduct;
  throw Error("unknown objective '" + s + "'");
}

inline const char* optimizer_name(Optimizer o) {
  return o == Optimizer::NelderMead ? "nelder_mead" : "random_restart_descent";
}

inline Optimizer parse_optimizer(const std::string& s) {
  if (s == "nelder_mead") return Optimizer::NelderMead;
  if (s == "random_restart_descent") return Optimizer::RandomRestartDescent;
  throw Error("unknown optimizer '" + s + "'");
}

// ---------------------------------------------------------------------------
// Parametrization

namespace detail {

/// Block isometry of `outcomes` stacked r x r blocks from 2 * outcomes * r * r
/// reals, via the polar factor of (base + G). `base` must itself be an
/// isometry; when empty it stacks I / sqrt(outcomes), so zero parameters
/// decode to the uniform POVM I / outcomes.
inline std::vector<Operator> decode_blocks(const double* params, Eigen::Index outcomes, Eigen::Index r,
                                           std::uint64_t jitter_seed, const Operator& base = Operator()) {
  const Eigen::Index rows = outcomes * r;
  Operator m(rows, r);
  std::size_t idx = 0;
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = Complex(params[idx], params[idx + 1]);
      idx += 2;
    }
  if (base.size() == 0) {
    const double w = 1.0 / std::sqrt(static_cast<double>(outcomes));
    for (Eigen::Index k = 0; k < outcomes; ++k) m.block(k * r, 0, r, r) += w * identity(r);
  } else {
    m += base;
  }

  Rng rng(jitter_seed);
  for (int attempt = 0;; ++attempt) {
    Eigen::SelfAdjointEigenSolver<Operator> es(hermitize(m.adjoint() * m));
    const double smallest = es.eigenvalues().minCoeff();
    if (smallest > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) {
      RealVector inv_root = es.eigenvalues().cwiseSqrt().cwiseInverse();
      const Operator v = m * (es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().adjoint());
      std::vector<Operator> blocks;
      blocks.reserve(outcomes);
      for (Eigen::Index k = 0; k < outcomes; ++k) {
        const Operator kk = v.block(k * r, 0, r, r);
        blocks.push_back(hermitize(kk.adjoint() * kk));
      }
      return blocks;
    }
    if (attempt >= 8) throw Error("decode: parameter block is rank deficient");
    m += 1e-6 * ginibre(rows, r, rng);
  }
}

}  // namespace detail

class PovmParametrization {
 public:
  /// Unconstrained joint POVMs on the given grid.
  static PovmParametrization free(Eigen::Index dim, std::vector<double> x_values, std::vector<double> y_values) {
    PovmParametrization p;
    p.dim_ = dim;
    p.manifold_ = Manifold::Free;
    p.xs_ = std::move(x_values);
    p.ys_ = std::move(y_values);
    JointPovm(dim, p.xs_, p.ys_, std::vector<Operator>(p.xs_.size() * p.ys_.size(), Operator::Zero(dim, dim)));
    p.count_ = 2 * p.xs_.size() * p.ys_.size() * static_cast<std::size_t>(dim * dim);
    return p;
  }

  /// Free manifold centred on the symmetrized sequential measurement
  /// (E^A(x) E^B(y) E^A(x) + E^B(y) E^A(x) E^B(y)) / 2, which is the product
  /// measurement when A and B commute. Falls back to the uniform centre when
  /// a spectral value of A or B is missing from the grid.
  static PovmParametrization free(const Operator& a, const Operator& b, std::vector<double> x_values,
                                  std::vector<double> y_values, const Tolerances& tol = {}) {
    PovmParametrization p = free(a.rows(), std::move(x_values), std::move(y_values));
    const auto sa = spectral(a, -1.0, tol);
    const auto sb = spectral(b, -1.0, tol);
    const Eigen::Index d = a.rows();
    const auto ny = p.ys_.size();
    std::vector<Operator> elems(p.xs_.size() * ny, Operator::Zero(d, d));
    for (std::size_t i = 0; i < sa.eigenvalues.size(); ++i) {
      const auto ix = detail::find_value(p.xs_, sa.eigenvalues[i], tol.value_match);
      if (!ix) return p;
      for (std::size_t j = 0; j < sb.eigenvalues.size(); ++j) {
        const auto iy = detail::find_value(p.ys_, sb.eigenvalues[j], tol.value_match);
        if (!iy) return p;
        const Operator& ea = sa.projectors[i];
        const Operator& eb = sb.projectors[j];
        elems[*ix * ny + *iy] += 0.5 * (ea * eb * ea + eb * ea * eb);
      }
    }
    p.base_ = Operator::Zero(static_cast<Eigen::Index>(elems.size()) * d, d);
    for (std::size_t k = 0; k < elems.size(); ++k)
      p.base_.block(static_cast<Eigen::Index>(k) * d, 0, d, d) = psd_sqrt(hermitize(elems[k]), tol);
    return p;
  }

  /// Joint POVMs whose A-marginal is E^A: x values are the spectrum of A and
  /// Pi(x, y) = E^A(x) R_x(y) E^A(x) with sum_y R_x(y) = I on each eigenspace.
  static PovmParametrization precise_a(const Operator& a, std::vector<double> y_values, const Tolerances& tol = {}) {
    PovmParametrization p;
    p.dim_ = a.rows();
    p.manifold_ = Manifold::PreciseA;
    p.ys_ = std::move(y_values);
    const auto sd = spectral(a, -1.0, tol);
    p.xs_ = sd.eigenvalues;
    for (const auto& proj : sd.projectors) {
      Eigen::SelfAdjointEigenSolver<Operator> es(proj);
      const Eigen::Index rank = static_cast<Eigen::Index>(std::lround(proj.trace().real()));
      p.eigenbases_.push_back(es.eigenvectors().rightCols(rank));
      p.count_ += 2 * p.ys_.size() * static_cast<std::size_t>(rank * rank);
    }
    JointPovm(p.dim_, p.xs_, p.ys_, std::vector<Operator>(p.xs_.size() * p.ys_.size(), Operator::Zero(p.dim_, p.dim_)));
    return p;
  }

  Eigen::Index dim() const { return dim_; }
  Manifold manifold() const { return manifold_; }
  std::size_t param_count() const { return count_; }
  const std::vector<double>& x_values() const { return xs_; }
  const std::vector<double>& y_values() const { return ys_; }

  /// Deterministic in the parameter vector. Zero parameters give the centre of
  /// the free manifold (uniform I / (nx ny) unless built from A and B) and
  /// E^A(x) / ny in the precise one.
  JointPovm decode(const std::vector<double>& params) const {
    if (params.size() != count_) throw Error("decode: wrong parameter count");
    const auto ny = static_cast<Eigen::Index>(ys_.size());
    std::vector<Operator> elems;
    if (manifold_ == Manifold::Free) {
      elems = detail::decode_blocks(params.data(), static_cast<Eigen::Index>(xs_.size()) * ny, dim_, jitter_seed_, base_);
    } else {
      elems.reserve(xs_.size() * ys_.size());
      std::size_t offset = 0;
      for (const auto& w : eigenbases_) {
        const Eigen::Index r = w.cols();
        const auto blocks = detail::decode_blocks(params.data() + offset, ny, r, jitter_seed_);
        offset += 2 * static_cast<std::size_t>(ny * r * r);
        for (const auto& s : blocks) elems.push_back(hermitize(w * s * w.adjoint()));
      }
    }
    return JointPovm(dim_, xs_, ys_, std::move(elems));
  }

 private:
  PovmParametrization() = default;

  Eigen::Index dim_ = 0;
  Manifold manifold_ = Manifold::Free;
  std::vector<double> xs_;
  std::vector<double> ys_;
  Operator base_;                     // empty: uniform centre
  std::vector<Operator> eigenbases_;  // orthonormal columns spanning each eigenspace of A
  std::size_t count_ = 0;
  std::uint64_t jitter_seed_ = 0x6a69747465ULL;
};

/// Spectrum of the observable plus one slack outcome at the midpoint of the
/// spectral range (skipped when it coincides with an eigenvalue).
inline std::vector<double> default_axis_values(const Operator& obs, const Tolerances& tol = {}) {
  std::vector<double> v = spectral(obs, -1.0, tol).eigenvalues;
  const double mid = 0.5 * (v.front() + v.back());
  if (!detail::find_value(v, mid, 1e-6)) {
    v.push_back(mid);
    std::sort(v.begin(), v.end());
  }
  return v;
}

// ---------------------------------------------------------------------------
// Optimizers

struct OptimizeResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
};

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

/// Nelder-Mead with dimension-adaptive coefficients.
inline OptimizeResult nelder_mead(const ObjectiveFn& f, std::vector<double> x0, double step, std::size_t max_evals,
                                  double ftol = 1e-13) {
  const std::size_t n = x0.size();
  const double nd = static_cast<double>(n);
  const double alpha = 1.0, beta = 1.0 + 2.0 / nd, gamma = 0.75 - 0.5 / nd, delta = 1.0 - 1.0 / nd;
  OptimizeResult best;
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    ++best.evaluations;
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
    return v;
  };
  if (max_evals == 0) return best;

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  fv[0] = eval(x0);
  for (std::size_t i = 0; i < n && best.evaluations < max_evals; ++i) {
    simplex[i + 1][i] += step;
    fv[i + 1] = eval(simplex[i + 1]);
  }
  if (best.evaluations < n + 1) return best;

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  while (best.evaluations < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return fv[i] < fv[j]; });
    const std::size_t lo = order.front(), hi = order.back(), second = order[n - 1];
    if (std::abs(fv[hi] - fv[lo]) <= ftol * (std::abs(fv[lo]) + ftol)) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != hi)
        for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / nd;

    for (std::size_t k = 0; k < n; ++k) xr[k] = centroid[k] + alpha * (centroid[k] - simplex[hi][k]);
    const double fr = eval(xr);
    if (fr < fv[lo]) {
      for (std::size_t k = 0; k < n; ++k) xe[k] = centroid[k] + beta * (xr[k] - centroid[k]);
      const double fe = best.evaluations < max_evals ? eval(xe) : fr;
      if (fe < fr) {
        simplex[hi] = xe;
        fv[hi] = fe;
      } else {
        simplex[hi] = xr;
        fv[hi] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[hi] = xr;
      fv[hi] = fr;
      continue;
    }
    const bool outside = fr < fv[hi];
    for (std::size_t k = 0; k < n; ++k)
      xc[k] = outside ? centroid[k] + gamma * (xr[k] - centroid[k]) : centroid[k] - gamma * (centroid[k] - simplex[hi][k]);
    if (best.evaluations >= max_evals) break;
    const double fc = eval(xc);
    if (fc < std::min(fr, fv[hi])) {
      simplex[hi] = xc;
      fv[hi] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 0; i <= n && best.evaluations < max_evals; ++i) {
      if (i == lo) continue;
      for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[lo][k] + delta * (simplex[i][k] - simplex[lo][k]);
      fv[i] = eval(simplex[i]);
    }
  }
  return best;
}

/// Central-difference gradient descent with backtracking line search. The
/// objective is assumed nonnegative; steps are taken on its square, which is
/// smooth where the objective itself has a cone-shaped zero.
inline OptimizeResult gradient_descent(const ObjectiveFn& f, std::vector<double> x0, double step,
                                       std::size_t max_evals, double ftol = 1e-13) {
  const std::size_t n = x0.size();
  OptimizeResult best;
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    ++best.evaluations;
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
    return v * v;
  };
  if (max_evals == 0) return best;
  std::vector<double> x = std::move(x0), g(n), trial(n);
  double fx = eval(x);
  double lr = step;
  const double h = 1e-6;
  while (best.evaluations + 2 * n + 1 <= max_evals) {
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      g[k] = (eval(xp) - eval(xm)) / (2.0 * h);
    }
    double gnorm2 = 0.0;
    for (double gk : g) gnorm2 += gk * gk;
    if (gnorm2 == 0.0) break;
    bool improved = false;
    while (best.evaluations < max_evals && lr > 1e-12) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = x[k] - lr * g[k];
      const double ft = eval(trial);
      if (ft <= fx - 1e-4 * lr * gnorm2) {
        const double drop = fx - ft;
        x = trial;
        fx = ft;
        lr *= 2.0;
        improved = drop > ftol * ftol * (fx + ftol * ftol);
        break;
      }
      lr *= 0.5;
    }
    if (!improved) break;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Search

struct SearchConfig {
  Objective objective = Objective::NoiseProduct;
  Optimizer optimizer = Optimizer::NelderMead;
  std::size_t max_evals = 5000;
  std::size_t restarts = 4;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  double initial_step = 0.5;  // simplex edge / first learning rate
  double restart_scale = 0.5; // std-dev of random restart points
  double ftol = 1e-13;
  std::optional<Manifold> manifold;  // default: PreciseA for eps_B_given_precise_A, else Free
  std::optional<std::vector<double>> x_values;
  std::optional<std::vector<double>> y_values;
  Tolerances tol;
};

struct TraceEntry {
  std::size_t eval_index = 0;
  std::size_t restart = 0;
  double objective = 0.0;
  double slack_universal = 0.0;    // joint_universal
  double slack_generalized = 0.0;  // joint_generalized
};

struct SearchResult {
  Objective objective = Objective::NoiseProduct;
  double best_value = std::numeric_limits<double>::infinity();
  double floor = 0.0;  // theoretical lower bound for the objective, 0 when none
  std::vector<double> best_params;
  std::optional<JointPovm> best_povm;
  std::vector<TraceEntry> trace;
  std::size_t evaluations = 0;
};

/// Lower bound the objective must respect: |<[A,B]>| / 2 over dA for the
/// precise-A objective (times dA, since the objective is dA eps(B)), else 0.
inline double objective_floor(const Scenario& s, Objective o) {
  if (o == Objective::EpsBGivenPreciseA) return 0.5 * std::abs(expectation(commutator(s.a, s.b), s.psi));
  return 0.0;
}

struct CandidateEvaluation {
  double objective = 0.0;
  double slack_universal = 0.0;
  double slack_generalized = 0.0;
  double eps_a = 0.0;
};

/// Objective plus the universal-relation slacks for one candidate. Throws
/// InconsistencyError if a universal relation fails or the precision
/// constraint is broken.
inline CandidateEvaluation evaluate_candidate(const Scenario& s, const JointPovm& p, Objective objective,
                                              Manifold manifold, const Tolerances& tol) {
  const RelationContext ctx = make_context(p, s.a, s.b, s.psi, nullptr, tol);
  const auto uvur = eval_uvur(ctx).first;
  const auto gur = eval_gur(ctx);
  CandidateEvaluation ev;
  ev.slack_universal = uvur.slack;
  ev.slack_generalized = gur.slack;
  ev.eps_a = ctx.noise_a.rms_noise;
  if (uvur.slack < -tol.holds || gur.slack < -tol.holds) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "search: universal relation violated by a valid candidate (universal slack " << uvur.slack
        << ", generalized slack " << gur.slack << ")";
    throw InconsistencyError(msg.str());
  }
  if (manifold == Manifold::PreciseA && ev.eps_a > tol.precision)
    throw InconsistencyError("search: candidate on the precise-A manifold has eps(A) = " + std::to_string(ev.eps_a));
  switch (objective) {
    case Objective::NoiseProduct: ev.objective = ctx.noise_a.rms_noise * ctx.noise_b.rms_noise; break;
    case Objective::EpsBGivenPreciseA: ev.objective = ctx.delta_a * ctx.noise_b.rms_noise; break;
    case Objective::OutputSpreadProduct: ev.objective = ctx.noise_a.output_std * ctx.noise_b.output_std; break;
  }
  if (!std::isfinite(ev.objective)) throw Error("search: objective is not finite");
  return ev;
}

inline PovmParametrization make_parametrization(const Scenario& s, const SearchConfig& cfg) {
  const Manifold manifold =
      cfg.manifold.value_or(cfg.objective == Objective::EpsBGivenPreciseA ? Manifold::PreciseA : Manifold::Free);
  if (cfg.objective == Objective::EpsBGivenPreciseA && manifold != Manifold::PreciseA)
    throw Error("search: eps_B_given_precise_A requires the precise-A manifold");
  std::vector<double> ys = cfg.y_values.value_or(default_axis_values(s.b, cfg.tol));
  if (manifold == Manifold::PreciseA) return PovmParametrization::precise_a(s.a, std::move(ys), cfg.tol);
  std::vector<double> xs = cfg.x_values.value_or(default_axis_values(s.a, cfg.tol));
  return PovmParametrization::free(s.a, s.b, std::move(xs), std::move(ys), cfg.tol);
}

/// Minimizes the configured objective with restarts. Restart 0 starts at the
/// zero parameter vector; restart k > 0 starts at a Gaussian point drawn from
/// a stream derived from (seed, k). Restarts may run concurrently; the trace
/// is assembled in restart order, so results depend only on the config.
inline SearchResult minimize(const Scenario& s, const SearchConfig& cfg) {
  if (cfg.max_evals < 1) throw Error("search: max_evals must be at least 1");
  if (cfg.restarts < 1) throw Error("search: restarts must be at least 1");
  if (s.a.rows() != s.psi.dim() || s.b.rows() != s.psi.dim()) throw Error("search: scenario dimension mismatch");
  const PovmParametrization param = make_parametrization(s, cfg);
  const std::size_t n = param.param_count();

  struct RestartOutcome {
    OptimizeResult opt;
    std::vector<TraceEntry> trace;
  };
  std::vector<RestartOutcome> outcomes(cfg.restarts);
  parallel_for(cfg.restarts, cfg.jobs, [&](std::size_t k) {
    const std::size_t budget = cfg.max_evals / cfg.restarts + (k < cfg.max_evals % cfg.restarts ? 1 : 0);
    std::vector<double> x0(n, 0.0);
    if (k > 0) {
      Rng rng = derived_rng(cfg.seed, k);
      std::normal_distribution<double> nd(0.0, cfg.restart_scale);
      for (auto& v : x0) v = nd(rng);
    }
    auto& out = outcomes[k];
    ObjectiveFn f = [&](const std::vector<double>& x) {
      const JointPovm p = param.decode(x);
      const CandidateEvaluation ev = evaluate_candidate(s, p, cfg.objective, param.manifold(), cfg.tol);
      out.trace.push_back({0, k, ev.objective, ev.slack_universal, ev.slack_generalized});
      return ev.objective;
    };
    out.opt = cfg.optimizer == Optimizer::NelderMead ? nelder_mead(f, x0, cfg.initial_step, budget, cfg.ftol)
                                                     : gradient_descent(f, x0, cfg.initial_step, budget, cfg.ftol);
  });

  SearchResult res;
  res.objective = cfg.objective;
  res.floor = objective_floor(s, cfg.objective);
  for (auto& o : outcomes) {
    for (auto& t : o.trace) {
      t.eval_index = res.trace.size();
      res.trace.push_back(t);
    }
    res.evaluations += o.opt.evaluations;
    if (o.opt.value < res.best_value) {
      res.best_value = o.opt.value;
      res.best_params = o.opt.x;
    }
  }
  if (!res.best_params.empty()) res.best_povm = param.decode(res.best_params);
  return res;
}

inline std::string trace_csv(const SearchResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "eval_index,restart,objective,slack_universal,slack_generalized\n";
  for (const auto& t : r.trace)
    os << t.eval_index << ',' << t.restart << ',' << t.objective << ',' << t.slack_universal << ','
       << t.slack_generalized << '\n';
  return os.str();
}

struct SweepRow {
  std::size_t index = 0;
  double best_value = 0.0;
  double floor = 0.0;
  std::size_t evaluations = 0;
};

/// Runs minimize on every scenario (scenario i uses seed cfg.seed + i) and
/// returns one row per scenario.
inline std::vector<SweepRow> sweep(const std::vector<Scenario>& family, const SearchConfig& cfg) {
  std::vector<SweepRow> rows(family.size());
  SearchConfig inner = cfg;
  inner.jobs = 1;
  parallel_for(family.size(), cfg.jobs, [&](std::size_t i) {
    SearchConfig c = inner;
    c.seed = cfg.seed + i;
    const SearchResult r = minimize(family[i], c);
    rows[i] = {i, r.best_value, r.floor, r.evaluations};
  });
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows, Objective objective) {
  std::ostringstream os;
  os.precision(17);
  os << "index,objective,best_value,floor,floor_slack,evaluations\n";
  for (const auto& r : rows)
    os << r.index << ',' << objective_name(objective) << ',' << r.best_value << ',' << r.floor << ','
       << r.best_value - r.floor << ',' << r.evaluations << '\n';
  return os.str();
}

}  // namespace jmlab
