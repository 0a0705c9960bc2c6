#include "qal/entanglement.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qal;

namespace {
Ket schmidt_pair(double p) {
    Vec v = Vec::Zero(4);
    v(0) = std::sqrt(p);
    v(3) = std::sqrt(1 - p);
    return {v, {2, 2}};
}

SeparableAnsatz random_ansatz(int n, int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    SeparableAnsatz a(n, k);
    for (auto& p : a.params) p = u(rng);
    return a;
}
}  // namespace

TEST(Ppt, Examples) {
    EXPECT_NEAR(ppt_min_eig(projector(bell_psi_plus())), -0.5, 1e-12);
    EXPECT_TRUE(ppt_entangled(projector(bell_phi_minus())));
    EXPECT_NEAR(ppt_min_eig(maximally_mixed({2, 2})), 0.25, 1e-12);
    std::mt19937_64 rng(42);
    for (int i = 0; i < 20; ++i) EXPECT_GE(ppt_min_eig(ansatz_to_density(random_ansatz(2, 4, rng))), -1e-9);
    for (int i = 0; i < 5; ++i) {
        auto r = ansatz_to_density(random_ansatz(3, 8, rng));
        for (std::vector<int> cut : {std::vector<int>{0}, {1}, {2}}) EXPECT_GE(ppt_min_eig(r, cut), -1e-9);
    }
    EXPECT_THROW(ppt_min_eig(projector(bell_psi_plus()), {0, 1}), std::invalid_argument);
    EXPECT_THROW(ppt_min_eig(projector(bell_psi_plus()), {}), std::invalid_argument);
    EXPECT_THROW(ppt_min_eig(projector(bell_psi_plus()), {2}), std::invalid_argument);
}

TEST(Ppt, LambdaBcSeparable) {
    for (double b = 0.05; b < 0.5; b += 0.05) {
        double a = std::sqrt(1 - 4 * b * b);
        auto bc = partial_trace(lambda_state(a, b), {1, 2});
        EXPECT_GE(ppt_min_eig(bc), -1e-9) << b;
    }
}

TEST(Nielsen, Examples) {
    std::mt19937_64 rng(42);
    auto bell = bell_psi_plus();
    for (int i = 0; i < 10; ++i) EXPECT_TRUE(nielsen_convertible(bell, random_ket({2, 2}, rng)));
    EXPECT_FALSE(nielsen_convertible(ket_from_bits("00"), bell));
    EXPECT_TRUE(nielsen_convertible(bell, ket_from_bits("00")));
    EXPECT_TRUE(nielsen_convertible(schmidt_pair(0.7), schmidt_pair(0.8)));
    EXPECT_FALSE(nielsen_convertible(schmidt_pair(0.8), schmidt_pair(0.7)));
    EXPECT_THROW(nielsen_convertible(bell, ghz(3)), std::invalid_argument);
}

TEST(Ree, Bell) {
    auto r = ree(bell_phi_minus());
    EXPECT_NEAR(r.value, 1.0, 2e-3);
    EXPECT_EQ(r.restarts, 8);
    EXPECT_EQ(r.witness.params.size(), 19u);
    auto d = relative_entropy(projector(bell_phi_minus()), r.closest);
    if (!d.infinite) EXPECT_NEAR(d.value, r.value, 1e-9);
}

TEST(Ree, SeparableInputs) {
    std::mt19937_64 rng(42);
    ReeOptions o;
    o.restarts = 2;
    for (int i = 0; i < 50; ++i) {
        double e = ree(ansatz_to_density(random_ansatz(2, 4, rng)), o).value;
        EXPECT_GE(e, 0.0);
        EXPECT_LT(e, 1e-3) << i;
    }
    EXPECT_LT(ree(maximally_mixed({2, 2})).value, 1e-3);
}

TEST(Ree, WclassBc) {
    const double f2 = 1.0 / 6;
    auto bc = partial_trace(wclass_state(std::sqrt(1 - 2 * f2), std::sqrt(f2)), {1, 2});
    EXPECT_NEAR(wclass_bc_closed(f2), 0.04841568, 1e-8);
    auto r = ree(bc);
    EXPECT_NEAR(r.value, wclass_bc_closed(f2), 2e-3);
    EXPECT_NEAR(r.value, 0.0484, 2e-3);
}

TEST(Ree, WernerMatchesBinaryEntropy) {
    auto bell = projector(bell_phi_minus());
    for (double p : {0.4, 0.6, 0.8, 0.95}) {
        DensityOp w{p * bell.m + (1 - p) * maximally_mixed({2, 2}).m, {2, 2}};
        double f = (1 + 3 * p) / 4;
        double want = 1 + f * std::log2(f) + (1 - f) * std::log2(1 - f);
        EXPECT_NEAR(ree(w).value, want, 2e-3) << p;
    }
    EXPECT_LT(ree(DensityOp{0.3 * bell.m + 0.7 * maximally_mixed({2, 2}).m, {2, 2}}).value, 1e-3);
}

TEST(Ree, LocalUnitaryInvariance) {
    std::mt19937_64 rng(7);
    auto bell = projector(bell_phi_minus());
    for (int i = 0; i < 20; ++i) {
        auto u = local_unitary({random_unitary(2, rng), random_unitary(2, rng)});
        EXPECT_NEAR(ree(conjugate(bell, u)).value, 1.0, 3e-3) << i;
    }
}

TEST(Ree, PureStatesMatchEntropy) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        auto psi = random_ket({2, 2}, rng);
        EXPECT_NEAR(ree(psi).value, vn_entropy(partial_trace(psi, {0})), 3e-3) << i;
    }
}

TEST(Ree, MultistartAgreement) {
    std::mt19937_64 rng(5);
    std::vector<DensityOp> inputs = {projector(bell_phi_minus()), partial_trace(lambda_state(1 / std::sqrt(5.0), 1 / std::sqrt(5.0)), {0, 2})};
    const double f = std::sqrt(1.0 / 6);
    auto w = wclass_state(std::sqrt(1 - 2 * f * f), f);
    inputs.push_back(partial_trace(w, {1, 2}));
    inputs.push_back(partial_trace(w, {0, 1}));
    for (int i = 0; i < 4; ++i) inputs.push_back(random_density({2, 2}, rng, 2));
    for (const auto& s : inputs) {
        auto r = ree(s);
        auto [lo, hi] = std::minmax_element(r.restart_values.begin(), r.restart_values.end());
        EXPECT_LT(*hi - *lo, 3e-3);
    }
}

TEST(Ree, GapClosesAtOptimum) {
    auto bc = partial_trace(wclass_state(std::sqrt(2.0 / 3), std::sqrt(1.0 / 6)), {1, 2});
    detail::ReeObjective obj(bc, 4);
    auto r = ree(bc);
    EXPECT_LT(detail::fw_gap(obj, r.witness.params), 1e-6);
}

TEST(Ree, NptImpliesPositive) {
    std::mt19937_64 rng(3);
    int npt = 0;
    for (int i = 0; i < 30; ++i) {
        auto s = random_density({2, 2}, rng, 1 + i % 3);
        if (ppt_min_eig(s) < -1e-9) {
            ++npt;
            EXPECT_GT(ree(s).value, 1e-3) << i;
        }
    }
    EXPECT_GT(npt, 5);
}

TEST(Ree, Errors) {
    EXPECT_THROW(ree(ket_from_bits("0")), std::invalid_argument);
    EXPECT_THROW(ree(ket_from_bits("0000")), std::invalid_argument);
    EXPECT_THROW(ree(projector(Ket{Vec::Ones(9) / 3.0, {3, 3}})), std::invalid_argument);
}

TEST(Ree, AnalyticGradientAgrees) {
    ReeOptions o;
    o.gradient = Gradient::Analytic;
    auto sigma = partial_trace(lambda_state(1 / std::sqrt(5.0), 1 / std::sqrt(5.0)), {0, 2});
    EXPECT_NEAR(ree(sigma, o).value, ree(sigma).value, 1e-4);
}

TEST(Ree, ThreeQubit) {
    double w = ree_w3();
    double g = ree(ghz(3)).value;
    EXPECT_NEAR(w3_ree_exact(), 2 * std::log2(3.0) - 2, 1e-15);
    EXPECT_NEAR(w, 1.1699, 5e-3);
    EXPECT_NEAR(g, 1.0, 5e-3);
    EXPECT_GT(w, g);
}

TEST(Wclass, Prediction) {
    EXPECT_NEAR(wclass_prediction(1.0 / 6), 0.31668, 1e-5);
    EXPECT_NEAR(wclass_prediction(1e-12), 0.0, 1e-9);
    const double f2 = 0.25;
    double want = (f2 - 1) * std::log2(1 - f2) - 2 * f2 * std::log2(2 * f2) + f2 * std::log2(f2);
    EXPECT_NEAR(wclass_prediction(f2), want, 1e-15);
    EXPECT_NEAR(wclass_prediction(f2), 0.311278124459, 1e-11);
    EXPECT_THROW(wclass_prediction(0.0), std::invalid_argument);
    EXPECT_THROW(wclass_prediction(0.5), std::invalid_argument);
}

TEST(Corcond, Ghz) {
    auto c = corcond_residuals(ghz(3));
    for (double s : {c.s_ab, c.s_ac, c.s_bc}) EXPECT_NEAR(s, 0.0, 1e-3);
    EXPECT_NEAR(c.g, 1.0, 3e-3);
    for (double r : c.residuals) EXPECT_NEAR(r, 0.0, 3e-3);
}

TEST(Corcond, Lambda) {
    const double b = 1 / std::sqrt(5.0);
    auto psi = lambda_state(b, b);
    auto c = corcond_residuals(psi);
    double pred = vn_entropy(partial_trace(psi, {0})) - vn_entropy(partial_trace(psi, {1}));
    EXPECT_NEAR(pred, 0.1541, 2e-3);
    EXPECT_NEAR(c.s_ac, 0.1971, 2e-3);
    EXPECT_NEAR(c.s_bc, 0.0, 1e-3);
    EXPECT_NEAR(c.residuals[0], 0.0, 1e-12);
    EXPECT_NEAR(c.residuals[1], c.s_ac - pred, 3e-3);
    EXPECT_NEAR(c.residuals[1], 0.043, 2e-3);
}

TEST(Corcond, Wclass) {
    const double f2 = 1.0 / 6;
    auto c = corcond_residuals(wclass_state(std::sqrt(1 - 2 * f2), std::sqrt(f2)));
    EXPECT_NEAR(c.s_ab, 0.3548, 2e-3);
    EXPECT_NEAR(c.s_ab, c.s_ac, 1e-3);
    EXPECT_NEAR(c.residuals[2], c.s_ab - wclass_prediction(f2), 3e-3);
    EXPECT_NEAR(c.residuals[2], 0.038, 2e-3);
    EXPECT_THROW(corcond_residuals(bell_psi_plus()), std::invalid_argument);
}
