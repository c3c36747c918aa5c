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


// Acceptance run: one PASS/FAIL line per criterion at the pinned tolerances.
// Unit-test executables given on the command line are run as part of the
// wall-clock criterion.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"

namespace jmlab {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;
  void require(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok) ++failed;
  }
  std::size_t failed = 0;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// 1
void robertson_sweep(Check& c, std::string& note) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  double worst = 1e300;
  for (int t = 0; t < 1000; ++t) {
    const int n = oracle::uniform_int(2, 8, rng);
    const Operator a = oracle::hermitian(n, rng), b = oracle::hermitian(n, rng);
    const StateVector psi = oracle::state(n, rng);
    const auto r = eval_robertson(a, b, psi);
    const double lhs = oracle::spectral_std(a, psi.vec()) * oracle::spectral_std(b, psi.vec());
    const double rhs = 0.5 * std::abs(oracle::expectation(oracle::commutator(a, b), psi.vec()));
    c.require(r.slack >= -1e-9, "instance " + std::to_string(t) + " slack " + num(r.slack));
    c.require(std::abs(r.lhs - lhs) <= 1e-9 && std::abs(r.rhs - rhs) <= 1e-9,
              "instance " + std::to_string(t) + " disagrees with oracle");
    worst = std::min(worst, r.slack);
  }
  const double dt = seconds_since(t0);
  c.require(dt < 10.0, "runtime " + num(dt) + " s");
  note = "min slack " + num(worst);
}

// 2
void universal_sweep(Check& c, std::string& note) {
  const auto t0 = Clock::now();
  RelationSweepConfig cfg;
  cfg.instances = 500;
  cfg.min_dim = 2;
  cfg.max_dim = 5;
  cfg.max_outcomes = 3;
  cfg.seed = 2002;
  const auto res = relation_sweep(cfg);
  double worst = 1e300;
  for (const auto& inst : res.instances) {
    const auto& rep = inst.report;
    const std::string id = "instance " + std::to_string(inst.index);
    for (auto rid : {RelationId::JointUniversal, RelationId::JointUniversalNoiseStd, RelationId::JointGeneralized}) {
      const auto& r = rep.find(rid);
      c.require(r.slack >= -1e-9, id + " " + r.name() + " slack " + num(r.slack));
      worst = std::min(worst, r.slack);
    }
    const double gur = rep.find(RelationId::JointGeneralized).lhs;
    const double uvur = rep.find(RelationId::JointUniversal).lhs;
    const double rhs = rep.find(RelationId::JointUniversal).rhs;
    c.require(gur >= uvur - 1e-9 && uvur >= rhs - 1e-9, id + " chain ordering");
    c.require(inst.dim >= 2 && inst.dim <= 5 && inst.nx <= 3 && inst.ny <= 3, id + " shape");
  }
  const double dt = seconds_since(t0);
  c.require(dt < 60.0, "runtime " + num(dt) + " s");
  note = "min slack " + num(worst);
}

// 3
void qubit_anchor(Check& c, std::string& note) {
  const Operator a = pauli::x(), b = pauli::y();
  const StateVector psi = StateVector::basis(2, 0);
  const JointPovm p = guess_model(a, b, 0.0);
  const auto rep = full_report(p, a, b, psi);
  const MarginalPovm ma = marginal(p, Axis::A), mb = marginal(p, Axis::B);
  const double eps_a = oracle::rms_noise_sum_form(ma.values, ma.elements, a, psi.vec());
  const double eps_b = oracle::rms_noise_sum_form(mb.values, mb.elements, b, psi.vec());
  const double da = oracle::spectral_std(a, psi.vec());
  const double half = 0.5 * std::abs(oracle::expectation(oracle::commutator(a, b), psi.vec()));
  c.require(std::abs(eps_a) <= 1e-12 && std::abs(rep.noise_a.rms_noise) <= 1e-12, "eps(A) " + num(rep.noise_a.rms_noise));
  c.require(std::abs(eps_b - 1.0) <= 1e-12 && std::abs(rep.noise_b.rms_noise - 1.0) <= 1e-12,
            "eps(B) " + num(rep.noise_b.rms_noise));
  c.require(std::abs(half - 1.0) <= 1e-12, "half commutator " + num(half));
  const auto& precise = rep.find(RelationId::PreciseABound);
  c.require(precise.applicable, "precise-A bound not applicable");
  c.require(std::abs(precise.lhs - 1.0) <= 1e-12 && std::abs(da * eps_b - 1.0) <= 1e-12,
            "dA eps(B) " + num(precise.lhs));
  const auto& uvur = rep.find(RelationId::JointUniversal);
  c.require(std::abs(uvur.lhs - 1.0) <= 1e-12 && std::abs(uvur.rhs - 1.0) <= 1e-12,
            "universal lhs " + num(uvur.lhs) + " rhs " + num(uvur.rhs));
  const auto& heis = rep.find(RelationId::HeisenbergProduct);
  c.require(std::abs(heis.lhs) <= 1e-12 && heis.rhs > 1.0 - 1e-12 && !heis.holds, "Heisenberg product not violated");
  c.require(rep.violation_count() == 0, "report has violations");
  note = "eps(A)eps(B) = " + num(heis.lhs) + " < 1";
}

// 4
void dilation_roundtrip(Check& c, std::string& note) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4004);
  double worst_rt = 0.0, worst_route = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = oracle::uniform_int(2, 5, rng);
    const JointPovm p = oracle::random_povm(n, oracle::uniform_int(1, 3, rng), oracle::uniform_int(1, 3, rng), rng);
    const MeasuringProcess mp = naimark_dilate(p, static_cast<std::uint64_t>(t));
    const JointPovm q = povm_from_process(mp);
    const JointPovm r = povm_from_ancilla(ancilla_from_process(mp));
    for (std::size_t ix = 0; ix < p.nx(); ++ix)
      for (std::size_t iy = 0; iy < p.ny(); ++iy) {
        // pointer projector route computed independently
        const Operator proj = oracle::matmul(oracle::eigenprojector(mp.m1, p.x_values()[ix]),
                                             oracle::eigenprojector(mp.m2, p.y_values()[iy]));
        const Operator big = oracle::matmul(oracle::adjoint(mp.unitary),
                                            oracle::matmul(oracle::kron(identity(n), proj), mp.unitary));
        const Operator direct = oracle::partial_mean(big, mp.xi.vec());
        const double rt = std::max(oracle::max_abs(q.element(ix, iy) - p.element(ix, iy)),
                                   oracle::max_abs(direct - p.element(ix, iy)));
        const double route = oracle::max_abs(q.element(ix, iy) - r.element(ix, iy));
        worst_rt = std::max(worst_rt, rt);
        worst_route = std::max(worst_route, route);
      }
  }
  c.require(worst_rt <= 1e-8, "round-trip defect " + num(worst_rt));
  c.require(worst_route <= 1e-9, "route disagreement " + num(worst_route));
  const double dt = seconds_since(t0);
  c.require(dt < 30.0, "runtime " + num(dt) + " s");
  note = "round-trip " + num(worst_rt) + ", routes " + num(worst_route);
}

// 5
JointPovm smeared(const Operator& a, double eta) {
  const auto sd = spectral(a);
  const double n = static_cast<double>(sd.size());
  std::vector<Operator> elems;
  for (std::size_t i = 0; i < sd.size(); ++i)
    elems.push_back((1 - eta) * sd.projectors[i] + eta / n * identity(a.rows()));
  return JointPovm(a.rows(), sd.eigenvalues, {0.0}, elems);
}

void precision_equivalence(Check& c, std::string& note) {
  std::mt19937_64 rng(5005);
  const int n = 3;
  const Operator a = oracle::hermitian(n, rng);
  std::vector<std::pair<std::string, JointPovm>> models;
  for (double eta : {0.0, 0.05, 0.2}) models.push_back({"smeared eta=" + num(eta), smeared(a, eta)});
  // projective joint POVM E^A(x) R(y) E^A(x)
  {
    const auto sd = spectral(a);
    const auto r = oracle::random_povm(n, 1, 2, rng);
    std::vector<Operator> elems;
    for (std::size_t i = 0; i < sd.size(); ++i)
      for (const auto& e : r.elements()) elems.push_back(sd.projectors[i] * e * sd.projectors[i]);
    models.push_back({"projective", JointPovm(n, sd.eigenvalues, r.y_values(), elems)});
  }
  std::vector<StateVector> states;
  for (int k = 0; k < n; ++k) states.push_back(StateVector::basis(n, k));
  for (int t = 0; t < 100; ++t) states.push_back(oracle::state(n, rng));
  std::ostringstream summary;
  for (const auto& [name, p] : models) {
    double worst = 0.0;
    for (const auto& s : states) worst = std::max(worst, rms_noise(p, a, s, Axis::A));
    const MarginalPovm m = marginal(p, Axis::A);
    double defect = 0.0;
    for (std::size_t i = 0; i < m.values.size(); ++i)
      defect = std::max(defect, oracle::max_abs(m.elements[i] - oracle::eigenprojector(a, m.values[i])));
    const bool zero_noise = worst <= 1e-9;
    const bool equal_spectral = defect <= 1e-9;
    c.require(zero_noise == equal_spectral, name + ": eps " + num(worst) + " vs defect " + num(defect));
    c.require(is_precise_for(m, a).precise == equal_spectral, name + ": library precision flag");
    const bool expect_precise = name == "projective" || name == "smeared eta=0";
    c.require(equal_spectral == expect_precise, name + ": unexpected precision");
    summary << name << (zero_noise ? " precise; " : " imprecise; ");
  }
  note = summary.str();
}

// 6
void check_independent(Check& c, const std::string& id, const JointPovm& p, const Operator& a, const Operator& b,
                       const StateVector& psi, const Ancilla* anc, std::mt19937_64& rng) {
  const auto rep = full_report(p, a, b, psi);
  for (auto [obs, ax, nr] : {std::tuple{a, Axis::A, rep.noise_a}, std::tuple{b, Axis::B, rep.noise_b}}) {
    const std::string tag = id + " " + axis_name(ax);
    c.require(nr.stat_independent, tag + " not independent");
    // (dN)^2 = eps^2 - <n>^2
    c.require(std::abs(nr.noise_std * nr.noise_std - (nr.rms_noise * nr.rms_noise - nr.mean_noise_value * nr.mean_noise_value)) <= 1e-9,
              tag + " noise variance identity");
    const double d = oracle::spectral_std(obs, psi.vec());
    c.require(std::abs(nr.output_std * nr.output_std - (d * d + nr.noise_std * nr.noise_std)) <= 1e-9,
              tag + " variance additivity");
    if (anc) {
      const Operator big_n = noise_operator(*anc, obs, ax).matrix;
      const ComplexVector joint = oracle::kron(psi.vec(), anc->xi.vec());
      const double m = oracle::expectation(big_n, joint).real();
      const double sq = oracle::expectation(oracle::matmul(big_n, big_n), joint).real();
      c.require(std::abs(std::sqrt(std::max(0.0, sq - m * m)) - nr.noise_std) <= 1e-9, tag + " ancilla noise std");
      double worst = 0.0;
      for (int k = 0; k < 100; ++k)
        worst = std::max(worst, verify_independence_factorization(*anc, obs, oracle::hermitian(p.dim(), rng), psi, ax));
      c.require(worst <= 1e-9, tag + " factorization defect " + num(worst));
    }
  }
  for (auto rid : {RelationId::IndependentNoiseHeisenberg, RelationId::OutputSpread}) {
    const auto& r = rep.find(rid);
    c.require(r.applicable, id + " " + r.name() + " not applicable");
    c.require(r.slack >= -1e-9, id + " " + r.name() + " slack " + num(r.slack));
  }
}

void independent_suite(Check& c, std::string& note) {
  std::mt19937_64 rng(6006);
  int models = 0;
  for (int t = 0; t < 20; ++t) {
    const int n = oracle::uniform_int(2, 4, rng);
    const Operator a = oracle::hermitian(n, rng), b = oracle::hermitian(n, rng);
    const double w = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
    const JointPovm p = randomized_choice_model(a, b, w, 0.3, -0.2);
    const Ancilla anc = ancilla_from_process(naimark_dilate(p, 7));
    check_independent(c, "randomized choice " + std::to_string(t), p, a, b, oracle::state(n, rng), &anc, rng);
    ++models;
  }
  for (double eta : {0.2, 0.5, 1.0 / std::sqrt(2.0)}) {
    const JointPovm p = unbiased_qubit_xy_model(eta);
    const Ancilla anc = ancilla_from_process(naimark_dilate(p, 9));
    check_independent(c, "unbiased eta=" + num(eta), p, pauli::x(), pauli::y(), oracle::state(2, rng), &anc, rng);
    ++models;
  }
  for (int t = 0; t < 10; ++t) {
    // commuting A, B with commuting ancilla generators
    const int n = oracle::uniform_int(2, 3, rng), k = oracle::uniform_int(2, 3, rng);
    const Operator w = oracle::unitary(n, rng), v = oracle::unitary(k, rng);
    Eigen::VectorXcd da(n), db(n), g1(k), g2(k);
    for (int i = 0; i < n; ++i) {
      da(i) = static_cast<double>(oracle::uniform_int(-1, 1, rng));
      db(i) = static_cast<double>(oracle::uniform_int(0, 2, rng));
    }
    for (int i = 0; i < k; ++i) {
      g1(i) = 0.5 * static_cast<double>(oracle::uniform_int(-2, 2, rng));
      g2(i) = 0.25 * static_cast<double>(oracle::uniform_int(-2, 2, rng));
    }
    const Operator a = hermitize(w * da.asDiagonal() * w.adjoint()), b = hermitize(w * db.asDiagonal() * w.adjoint());
    const Ancilla anc = independent_noise_model(a, b, hermitize(v * g1.asDiagonal() * v.adjoint()),
                                                hermitize(v * g2.asDiagonal() * v.adjoint()), oracle::state(k, rng));
    check_independent(c, "commuting " + std::to_string(t), povm_from_ancilla(anc), a, b, oracle::state(n, rng), &anc,
                      rng);
    ++models;
  }
  note = std::to_string(models) + " models";
}

// 7
void ancilla_invariance(Check& c, std::string& note) {
  std::mt19937_64 rng(7007);
  double worst = 0.0;
  for (int t = 0; t < 30; ++t) {
    const int n = oracle::uniform_int(2, 4, rng);
    const JointPovm p = oracle::random_povm(n, oracle::uniform_int(1, 3, rng), oracle::uniform_int(1, 3, rng), rng);
    const auto mp1 = naimark_dilate(p, 0);
    const auto mp2 = naimark_dilate(p, 500 + static_cast<std::uint64_t>(t));
    const Ancilla a1 = ancilla_from_process(mp1), a2 = ancilla_from_process(mp2);
    const bool distinct = p.outcome_count() == 1 || oracle::max_abs(a1.c - a2.c) + oracle::max_abs(a1.d - a2.d) > 1e-3;
    c.require(distinct, "dilations " + std::to_string(t) + " coincide");
    const Operator obs_a = oracle::hermitian(n, rng), obs_b = oracle::hermitian(n, rng);
    const StateVector psi = oracle::state(n, rng);
    for (Axis ax : {Axis::A, Axis::B}) {
      const Operator& obs = ax == Axis::A ? obs_a : obs_b;
      const auto r1 = noise_report(povm_from_process(mp1), obs, psi, ax, &a1);
      const auto r2 = noise_report(povm_from_process(mp2), obs, psi, ax, &a2);
      for (auto [x, y] : {std::pair{r1.rms_noise, r2.rms_noise}, {r1.noise_std, r2.noise_std},
                          {r1.output_std, r2.output_std}, {r1.mean_noise_value, r2.mean_noise_value},
                          {r1.unbiased_defect, r2.unbiased_defect}, {r1.independence_r, r2.independence_r},
                          {r1.independence_residual, r2.independence_residual}})
        worst = std::max(worst, std::abs(x - y));
      c.require(r1.unbiased == r2.unbiased && r1.stat_independent == r2.stat_independent, "flags differ");
      // the same quantities straight from each dilation's noise operator
      double eps[2], sd[2];
      const Ancilla* ancs[2] = {&a1, &a2};
      for (int k = 0; k < 2; ++k) {
        const Ancilla& an = *ancs[k];
        const Operator big_n = (ax == Axis::A ? an.c : an.d) - oracle::kron(obs, identity(an.dim_k));
        const ComplexVector joint = oracle::kron(psi.vec(), an.xi.vec());
        const double m = oracle::expectation(big_n, joint).real();
        const double sq = oracle::expectation(oracle::matmul(big_n, big_n), joint).real();
        eps[k] = std::sqrt(std::max(0.0, sq));
        sd[k] = std::sqrt(std::max(0.0, sq - m * m));
      }
      worst = std::max({worst, std::abs(eps[0] - eps[1]), std::abs(sd[0] - sd[1]), std::abs(eps[0] - r1.rms_noise),
                        std::abs(sd[0] - r1.noise_std)});
    }
  }
  c.require(worst <= 1e-9, "max field difference " + num(worst));
  note = "max field difference " + num(worst);
}

// 8
void search_attainability(Check& c, std::string& note) {
  const Scenario s{pauli::x(), pauli::y(), StateVector::basis(2, 0)};
  SearchConfig cfg;
  cfg.objective = Objective::EpsBGivenPreciseA;
  cfg.max_evals = 5000;
  cfg.seed = 8008;
  const auto r1 = minimize(s, cfg);
  const auto r2 = minimize(s, cfg);
  cfg.jobs = 2;
  const auto r3 = minimize(s, cfg);
  c.require(r1.evaluations <= 5000, "evaluations " + std::to_string(r1.evaluations));
  c.require(std::abs(r1.best_value - 1.0) <= 0.05, "best " + num(r1.best_value));
  c.require(trace_csv(r1) == trace_csv(r2) && trace_csv(r1) == trace_csv(r3), "trace not deterministic");
  double worst = 1e300;
  for (const auto& t : r1.trace) worst = std::min(worst, t.slack_universal);
  c.require(worst >= -1e-9, "universal slack " + num(worst));
  note = "best " + num(r1.best_value) + " after " + std::to_string(r1.evaluations) + " evaluations";
}

// 9
void ccr_demo(Check& c, std::string& note) {
  const std::vector<std::pair<std::string, OscillatorState>> states{
      {"number(0)", OscillatorState::number(0)},
      {"number(1)", OscillatorState::number(1)},
      {"coherent(0.7)", OscillatorState::coherent(0.7)},
      {"squeezed(-0.3)", OscillatorState::squeezed(-0.3)}};
  CcrDemoConfig cfg;
  cfg.cutoff = 16;
  for (const auto& [n1, s1] : states)
    for (const auto& [n2, s2] : states) {
      const auto r = truncated_ccr_demo(s1, s2, cfg);
      const std::string id = n1 + " x " + n2;
      c.require(r.generalized.slack >= -r.truncation_estimate, id + " generalized slack " + num(r.generalized.slack));
      c.require(r.closing.slack >= -r.truncation_estimate, id + " closing slack " + num(r.closing.slack));
    }
  std::ostringstream est;
  double prev = 1e300;
  for (Eigen::Index n : {8, 12, 16, 24}) {
    cfg.cutoff = n;
    const auto r = truncated_ccr_demo(OscillatorState::coherent(0.7), OscillatorState::coherent(0.7), cfg);
    c.require(r.truncation_estimate <= prev, "estimate grew at N=" + std::to_string(n));
    prev = r.truncation_estimate;
    est << num(r.truncation_estimate) << (n == 24 ? "" : ", ");
  }
  note = "estimates N=8..24: " + est.str();
}

}  // namespace
}  // namespace jmlab

int main(int argc, char** argv) {
  using namespace jmlab;
  const auto start = Clock::now();
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Check&, std::string&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "robertson_sweep", robertson_sweep},
      {2, "universal_relation_sweep", universal_sweep},
      {3, "qubit_anchor", qubit_anchor},
      {4, "dilation_roundtrip", dilation_roundtrip},
      {5, "precision_equivalence", precision_equivalence},
      {6, "independent_noise_suite", independent_suite},
      {7, "ancilla_invariance", ancilla_invariance},
      {8, "search_attainability", search_attainability},
      {9, "truncated_ccr_demo", ccr_demo},
  };
  int failed = 0;
  auto report = [&](int id, const char* name, const Check& c, double dt, const std::string& note) {
    const bool ok = c.failed == 0;
    failed += ok ? 0 : 1;
    std::printf("%s %2d %-26s %8.3f s  %s\n", ok ? "PASS" : "FAIL", id, name, dt, note.c_str());
    for (const auto& f : c.failures) std::printf("       - %s\n", f.c_str());
    std::fflush(stdout);
  };
  for (const auto& cr : criteria) {
    Check c;
    std::string note;
    const auto t0 = Clock::now();
    try {
      cr.run(c, note);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    report(cr.id, cr.name, c, seconds_since(t0), note);
  }

  // 10: the unit-test executables plus everything above
  Check c;
  const auto t0 = Clock::now();
  for (int i = 1; i < argc; ++i) {
    const std::string cmd = std::string("\"") + argv[i] + "\" --gtest_brief=1 > /dev/null";
    const int rc = std::system(cmd.c_str());
    c.require(rc == 0, std::string(argv[i]) + " failed");
  }
  const double total = seconds_since(start);
  c.require(total < 120.0, "wall clock " + std::to_string(total) + " s");
  report(10, "full_suite_wall_clock", c, seconds_since(t0),
         "total " + std::to_string(total).substr(0, 6) + " s over " + std::to_string(argc - 1) + " unit binaries");
  std::printf("%s: %d of 10 criteria failed\n", failed ? "FAILED" : "ALL PASSED", failed);
  return failed ? 1 : 0;
}
