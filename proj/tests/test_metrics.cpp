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

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace jmlab {
namespace {

using pauli::x;
using pauli::y;
using pauli::z;

StateVector ket0() { return StateVector::basis(2, 0); }

JointPovm smeared(const Operator& a, double eta) {
  const auto sd = spectral(a);
  const double n = static_cast<double>(sd.size());
  std::vector<Operator> elems;
  for (std::size_t i = 0; i < sd.size(); ++i) elems.push_back((1 - eta) * sd.projectors[i] + eta / n * identity(a.rows()));
  return JointPovm(a.rows(), sd.eigenvalues, {0.0}, elems);
}

// Outcomes a_i + delta with a kernel w(delta) symmetric about zero.
JointPovm symmetric_kernel(const Operator& a, double s, double w_side) {
  const auto sd = spectral(a);
  std::vector<LabeledElement> items;
  for (std::size_t i = 0; i < sd.size(); ++i) {
    items.push_back({sd.eigenvalues[i] - s, 0.0, w_side * sd.projectors[i]});
    items.push_back({sd.eigenvalues[i], 0.0, (1 - 2 * w_side) * sd.projectors[i]});
    items.push_back({sd.eigenvalues[i] + s, 0.0, w_side * sd.projectors[i]});
  }
  return JointPovm::from_labeled(a.rows(), items);
}

JointPovm shifted(const JointPovm& p, double c) {
  std::vector<double> xs = p.x_values();
  for (auto& v : xs) v += c;
  return JointPovm(p.dim(), xs, p.y_values(), p.elements());
}

TEST(MeanNoise, Examples) {
  EXPECT_LT(op_norm(mean_noise_operator(guess_model(x(), y(), 0.0), x(), Axis::A)), 1e-14);
  const double y0 = 0.3;
  const auto nb = mean_noise_operator(guess_model(x(), y(), y0), y(), Axis::B);
  EXPECT_LT(max_entry_distance(nb, y0 * identity(2) - y()), 1e-15);
}

TEST(MeanNoise, ThreeRoutesAgree) {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 30; ++t) {
    const auto mp = oracle::random_process(oracle::uniform_int(2, 3, rng), 2, 2, rng);
    const auto p = povm_from_process(mp);
    const auto anc = ancilla_from_process(mp);
    const Operator a = oracle::hermitian(mp.dim_h, rng);
    const Operator n = mean_noise_operator(p, a, Axis::A, &anc);
    const auto m = marginal(p, Axis::A);
    Operator sum = Operator::Zero(p.dim(), p.dim());
    for (std::size_t k = 0; k < m.values.size(); ++k) sum += m.elements[k] * (m.values[k] * identity(p.dim()) - a);
    EXPECT_LT(max_entry_distance(n, sum), 1e-10);
    const Operator nop = anc.c - oracle::kron(a, identity(mp.dim_k));
    EXPECT_LT(max_entry_distance(n, oracle::partial_mean(nop, mp.xi.vec())), 1e-10);
  }
}

TEST(MeanNoise, MismatchedAncillaIsInconsistent) {
  const auto mp = naimark_dilate(guess_model(z(), x(), 0.0));
  const auto anc = ancilla_from_process(mp);
  EXPECT_THROW(mean_noise_operator(guess_model(x(), z(), 0.0), x(), Axis::A, &anc), InconsistencyError);
}

TEST(RmsNoise, Examples) {
  std::mt19937_64 rng(62);
  const auto pz = guess_model(z(), x(), 0.0);
  for (int t = 0; t < 10; ++t) EXPECT_NEAR(rms_noise(pz, z(), oracle::state(2, rng), Axis::A), 0.0, 1e-12);
  EXPECT_NEAR(rms_noise(guess_model(x(), y(), 0.0), y(), ket0(), Axis::B), 1.0, 1e-12);
  EXPECT_NEAR(rms_noise(guess_model(z(), z(), 0.0), z(), ket0(), Axis::B), 1.0, 1e-12);
}

TEST(RmsNoise, SumFormAndAncillaRoute) {
  std::mt19937_64 rng(63);
  for (int t = 0; t < 50; ++t) {
    const auto mp = oracle::random_process(oracle::uniform_int(2, 3, rng), oracle::uniform_int(1, 3, rng), 2, rng);
    const auto p = povm_from_process(mp);
    const auto anc = ancilla_from_process(mp);
    const Operator a = oracle::hermitian(mp.dim_h, rng);
    const StateVector psi = oracle::state(mp.dim_h, rng);
    const auto m = marginal(p, Axis::A);
    const double eps = rms_noise(p, a, psi, Axis::A, &anc);
    EXPECT_NEAR(eps, oracle::rms_noise_sum_form(m.values, m.elements, a, psi.vec()), 1e-9);
    const Operator nop = anc.c - oracle::kron(a, identity(mp.dim_k));
    const ComplexVector joint = oracle::kron(psi.vec(), mp.xi.vec());
    EXPECT_NEAR(eps, std::sqrt(oracle::expectation(nop * nop, joint).real()), 1e-9);
  }
}

TEST(NoiseStd, Examples) {
  EXPECT_NEAR(noise_std(guess_model(z(), x(), 1.0), z(), ket0(), Axis::A), 0.0, 1e-12);
  EXPECT_NEAR(noise_std(guess_model(x(), y(), 0.0), y(), ket0(), Axis::B), 1.0, 1e-12);
}

TEST(NoiseStd, MatchesAncillaStdDevAndIdentity) {
  std::mt19937_64 rng(64);
  for (int t = 0; t < 50; ++t) {
    const auto mp = oracle::random_process(oracle::uniform_int(2, 3, rng), 2, oracle::uniform_int(1, 3, rng), rng);
    const auto p = povm_from_process(mp);
    const auto anc = ancilla_from_process(mp);
    const Operator b = oracle::hermitian(mp.dim_h, rng);
    const StateVector psi = oracle::state(mp.dim_h, rng);
    const double dn = noise_std(p, b, psi, Axis::B, &anc);
    const Operator nop = anc.d - oracle::kron(b, identity(mp.dim_k));
    EXPECT_NEAR(dn, oracle::spectral_std(nop, oracle::kron(psi.vec(), mp.xi.vec())), 1e-9);
    const auto r = noise_report(p, b, psi, Axis::B, &anc);
    EXPECT_NEAR(r.noise_std * r.noise_std, r.rms_noise * r.rms_noise - r.mean_noise_value * r.mean_noise_value,
                1e-9);
    EXPECT_GE(r.rms_noise + 1e-12, r.noise_std);
    EXPECT_GE(r.noise_std, 0.0);
  }
}

TEST(OutputStd, Examples) {
  const auto pz = guess_model(z(), x(), 0.0);
  EXPECT_NEAR(output_std(pz, ket0(), Axis::A), 0.0, 1e-14);
  EXPECT_NEAR(output_std(pz, StateVector::normalized(ComplexVector::Ones(2)), Axis::A), 1.0, 1e-14);
}

TEST(OutputStd, ClassicalDistributionOracle) {
  std::mt19937_64 rng(65);
  for (int t = 0; t < 50; ++t) {
    const int n = oracle::uniform_int(2, 6, rng);
    const auto p = oracle::random_povm(n, oracle::uniform_int(1, 3, rng), oracle::uniform_int(1, 3, rng), rng);
    const StateVector psi = oracle::state(n, rng);
    for (Axis ax : {Axis::A, Axis::B}) {
      const auto m = marginal(p, ax);
      std::vector<double> probs;
      for (const auto& e : m.elements) probs.push_back(oracle::expectation(e, psi.vec()).real());
      EXPECT_NEAR(output_std(p, psi, ax), oracle::classical_std(m.values, probs), 1e-10);
    }
  }
}

TEST(Unbiased, Examples) {
  EXPECT_TRUE(is_unbiased(guess_model(z(), x(), 0.0), z(), Axis::A).unbiased);
  const auto g = is_unbiased(guess_model(x(), y(), 0.5), y(), Axis::B);
  EXPECT_FALSE(g.unbiased);
  EXPECT_NEAR(g.defect, op_norm(0.5 * identity(2) - y()), 1e-12);
  EXPECT_NEAR(g.mean_noise_norm, g.defect, 1e-12);

  std::mt19937_64 rng(66);
  const Operator a = oracle::hermitian(3, rng);
  const auto k = symmetric_kernel(a, 0.37, 0.2);
  EXPECT_TRUE(validate(k).valid);
  const auto r = is_unbiased(k, a, Axis::A);
  EXPECT_TRUE(r.unbiased) << r.defect;
  EXPECT_GT(rms_noise(k, a, oracle::state(3, rng), Axis::A), 0.1);
}

TEST(Independence, Examples) {
  const auto pz = guess_model(z(), x(), 0.0);
  const auto r0 = is_stat_independent(pz, z(), Axis::A);
  EXPECT_TRUE(r0.independent);
  EXPECT_NEAR(r0.r, 0.0, 1e-14);

  const double c = 0.75;
  const auto rc = is_stat_independent(shifted(pz, c), z(), Axis::A);
  EXPECT_TRUE(rc.independent);
  EXPECT_NEAR(rc.r, c, 1e-14);

  const auto rg = is_stat_independent(guess_model(x(), y(), 0.0), y(), Axis::B);
  EXPECT_FALSE(rg.independent);
  EXPECT_NEAR(rg.residual, 1.0, 1e-12);
}

TEST(Independence, UnbiasedImpliesIndependent) {
  std::mt19937_64 rng(67);
  for (int t = 0; t < 200; ++t) {
    const int n = oracle::uniform_int(2, 5, rng);
    const auto p = oracle::random_povm(n, oracle::uniform_int(1, 3, rng), oracle::uniform_int(1, 3, rng), rng);
    // The first moment of any POVM is an observable it measures without bias.
    const Operator a = hermitize(moment_operator(marginal(p, Axis::A), 1));
    const auto u = is_unbiased(p, a, Axis::A);
    ASSERT_TRUE(u.unbiased);
    const auto ind = is_stat_independent(p, a, Axis::A);
    EXPECT_TRUE(ind.independent);
    EXPECT_NEAR(ind.r, 0.0, 1e-9);
  }
}

TEST(Factorization, AdditiveAncillaNoise) {
  std::mt19937_64 rng(68);
  const Operator a = oracle::hermitian(2, rng), g = oracle::hermitian(3, rng);
  const StateVector xi = oracle::state(3, rng);
  const Ancilla anc{2, 3, xi, tensor(a, identity(3)) + tensor(identity(2), g), Operator::Zero(6, 6)};
  const StateVector psi = oracle::state(2, rng);
  for (int t = 0; t < 100; ++t)
    EXPECT_LE(verify_independence_factorization(anc, a, oracle::hermitian(2, rng), psi), 1e-9);
  EXPECT_LE(verify_independence_factorization(anc, a, identity(2), oracle::state(2, rng)), 1e-12);
}

TEST(Factorization, DependentNoiseDefect) {
  const auto anc = ancilla_from_process(naimark_dilate(guess_model(x(), y(), 0.0)));
  EXPECT_NEAR(verify_independence_factorization(anc, y(), y(), ket0(), Axis::B), 1.0, 1e-12);
  EXPECT_LE(verify_independence_factorization(anc, y(), identity(2), ket0(), Axis::B), 1e-12);
}

TEST(PrecisionEquivalence, BothDirections) {
  std::mt19937_64 rng(69);
  const Operator a = oracle::hermitian(3, rng);
  for (double eta : {0.0, 0.05, 0.2}) {
    const auto p = smeared(a, eta);
    const bool precise = is_precise_for(marginal(p, Axis::A), a).precise;
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) worst = std::max(worst, rms_noise(p, a, StateVector::basis(3, k), Axis::A));
    for (int t = 0; t < 100; ++t) worst = std::max(worst, rms_noise(p, a, oracle::state(3, rng), Axis::A));
    EXPECT_EQ(precise, eta == 0.0);
    EXPECT_EQ(worst <= 1e-9, precise) << "eta " << eta << " worst eps " << worst;
  }
}

TEST(VarianceAdditivity, IndependentNoiseModels) {
  std::mt19937_64 rng(70);
  for (int t = 0; t < 30; ++t) {
    const int n = oracle::uniform_int(2, 4, rng);
    const Operator a = oracle::hermitian(n, rng), b = oracle::hermitian(n, rng);
    const double w = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
    const auto p = randomized_choice_model(a, b, w, 0.3, -0.2);
    ASSERT_TRUE(validate(p).valid);
    const StateVector psi = oracle::state(n, rng);
    for (auto [obs, ax] : {std::pair{a, Axis::A}, std::pair{b, Axis::B}}) {
      const auto r = noise_report(p, obs, psi, ax);
      ASSERT_TRUE(r.stat_independent);
      const double d = std_dev(obs, psi);
      EXPECT_NEAR(r.output_std * r.output_std, d * d + r.noise_std * r.noise_std, 1e-9);
    }
  }
  for (double eta : {0.2, 0.5, 1.0 / std::sqrt(2.0)}) {
    const auto p = unbiased_qubit_xy_model(eta);
    const StateVector psi = oracle::state(2, rng);
    const auto r = noise_report(p, x(), psi, Axis::A);
    EXPECT_TRUE(r.unbiased);
    EXPECT_NEAR(r.output_std * r.output_std, std::pow(std_dev(x(), psi), 2) + r.noise_std * r.noise_std, 1e-9);
  }
}

TEST(AncillaInvariance, DistinctDilations) {
  std::mt19937_64 rng(71);
  auto same = [](const NoiseReport& r1, const NoiseReport& r2) {
    EXPECT_NEAR(r1.rms_noise, r2.rms_noise, 1e-9);
    EXPECT_NEAR(r1.noise_std, r2.noise_std, 1e-9);
    EXPECT_NEAR(r1.output_std, r2.output_std, 1e-9);
    EXPECT_NEAR(r1.mean_noise_value, r2.mean_noise_value, 1e-9);
    EXPECT_NEAR(r1.unbiased_defect, r2.unbiased_defect, 1e-9);
    EXPECT_NEAR(r1.independence_r, r2.independence_r, 1e-9);
    EXPECT_NEAR(r1.independence_residual, r2.independence_residual, 1e-9);
    EXPECT_EQ(r1.unbiased, r2.unbiased);
    EXPECT_EQ(r1.stat_independent, r2.stat_independent);
  };
  for (int t = 0; t < 20; ++t) {
    const auto p = oracle::random_povm(oracle::uniform_int(2, 4, rng), 2, 2, rng);
    const auto mp1 = naimark_dilate(p, 0);
    const auto mp2 = naimark_dilate(p, 1000 + static_cast<std::uint64_t>(t));
    const auto a1 = ancilla_from_process(mp1), a2 = ancilla_from_process(mp2);
    ASSERT_GT(max_entry_distance(a1.c, a2.c), 1e-3);  // genuinely different ancillas
    const Operator a = oracle::hermitian(p.dim(), rng);
    const StateVector psi = oracle::state(p.dim(), rng);
    same(noise_report(povm_from_process(mp1), a, psi, Axis::A, &a1),
         noise_report(povm_from_process(mp2), a, psi, Axis::A, &a2));
    same(noise_report(povm_from_process(mp1), a, psi, Axis::B, &a1),
         noise_report(povm_from_process(mp2), a, psi, Axis::B, &a2));
  }
}

}  // namespace
}  // namespace jmlab
