#include "qal/cloning.hpp"

#include <gtest/gtest.h>

using namespace qal;

namespace {
std::vector<Ket> pair_with_overlap(double t) {
    return {basis_ket({2}, 0), bloch(2 * t, 0.0)};
}
}  // namespace

TEST(Uqcm, Examples) {
    EXPECT_NEAR(uqcm_fidelity(1, 2, 2), 5.0 / 6, 1e-15);
    EXPECT_NEAR(uqcm_fidelity(2, 3, 3), 13.0 / 15, 1e-15);
    for (int n = 1; n <= 4; ++n) EXPECT_NEAR(uqcm_fidelity(n, 1 << 24, 2), (n + 1.0) / (n + 2), 1e-6);
    EXPECT_THROW(uqcm_fidelity(2, 2, 2), std::invalid_argument);
    EXPECT_THROW(uqcm_fidelity(1, 2, 1), std::invalid_argument);
}

TEST(Uqcm, Monotone) {
    for (int d = 2; d <= 16; ++d)
        for (int n = 1; n < 64; ++n)
            for (int m = n + 1; m <= 64; ++m) {
                double f = uqcm_fidelity(n, m, d);
                EXPECT_GT(f, 0.0);
                EXPECT_LE(f, 1.0);
                if (m < 64) EXPECT_GT(f, uqcm_fidelity(n, m + 1, d));
                if (n + 1 < m) EXPECT_LT(f, uqcm_fidelity(n + 1, m, d));
            }
}

TEST(Balance, Examples) {
    auto b = fidelity_balance(1, 2, 2);
    EXPECT_NEAR(b.iq_before, 1.0 / 3, 1e-15);
    EXPECT_NEAR(b.iq_after, 1.0 / 3, 1e-15);
    b = fidelity_balance(1, 3, 2);
    EXPECT_NEAR(b.iq_after, 1.0 / 3, 1e-15);
    b = fidelity_balance(2, 5, 3);
    EXPECT_NEAR(b.iq_before, 0.8, 1e-15);
    EXPECT_NEAR(b.iq_after, 0.8, 1e-15);
}

TEST(Balance, Sweep) {
    for (int d = 2; d <= 16; ++d)
        for (int n = 1; n < 64; ++n)
            for (int m = n + 1; m <= 64; ++m) {
                auto b = fidelity_balance(n, m, d);
                double want = n * (d - 1.0) / (n + d);
                EXPECT_NEAR(b.iq_before, want, 1e-12);
                EXPECT_NEAR(b.iq_after, want, 1e-12);
            }
}

TEST(TaskScores, Qubit) {
    auto s = task_scores(2, 2);
    EXPECT_EQ(s.f_cloning, Rational(5, 6));
    EXPECT_EQ(s.f_estimate, Rational(2, 3));
    EXPECT_EQ(s.f_single, Rational(3, 4));
    auto big = task_scores(1 << 20, 2);
    EXPECT_NEAR(to_double(big.f_cloning), 2.0 / 3, 1e-6);
    EXPECT_THROW(task_scores(1, 2), std::invalid_argument);
}

TEST(TaskScores, CloningWins) {
    for (int m = 2; m <= 64; ++m)
        for (int d = 2; d <= 16; ++d) {
            auto s = task_scores(m, d);
            EXPECT_GT(s.f_cloning, s.f_estimate);
            EXPECT_GT(s.f_cloning, s.f_single);
        }
}

TEST(ProbClone, Trivial) {
    auto three = std::vector<Ket>{basis_ket({3}, 0), basis_ket({3}, 1), basis_ket({3}, 2)};
    EXPECT_TRUE(prob_clone_feasible({three, {1, 1, 1}}).feasible);
    auto pair = pair_with_overlap(0.4);
    EXPECT_TRUE(prob_clone_feasible({pair, {0, 0}}).feasible);
    EXPECT_FALSE(prob_clone_feasible({pair, {1, 1}}).feasible);
    EXPECT_THROW(prob_clone_feasible({{basis_ket({2}, 0), basis_ket({2}, 0)}, {0, 0}}), std::invalid_argument);
    EXPECT_THROW(prob_clone_feasible({pair, {0}}), std::invalid_argument);
}

TEST(ProbClone, PrintedGammas) {
    auto c = chapter6_pipeline();
    EXPECT_TRUE(c.feasibility.feasible);
    EXPECT_GT(c.feasibility.min_eig, 0.0);
}

TEST(ProbClone, PairOptimum) {
    for (double t : {0.2, 0.5, 0.9, 1.3}) {
        auto states = pair_with_overlap(t);
        double c = std::cos(t);
        auto r = prob_clone_search(states, CloneObjective::Average);
        EXPECT_NEAR(r.value, 1.0 / (1.0 + c), 1e-6) << t;
        EXPECT_TRUE(prob_clone_feasible({states, r.gammas}).feasible);
    }
}

TEST(ProbClone, OverlapMonotone) {
    double prev = 2.0;
    for (double t = 1.5; t > 0.05; t -= 0.1) {
        double v = prob_clone_search(pair_with_overlap(t), CloneObjective::Average).value;
        EXPECT_LE(v, prev + 1e-9) << t;
        prev = v;
    }
}

TEST(ProbClone, SearchObjectives) {
    auto states = chapter6_pipeline().f0_states;
    auto frac = prob_clone_search(states, CloneObjective::Fraction);
    EXPECT_NEAR(frac.value, 0.467, 1e-3);
    EXPECT_NEAR(frac.gammas[1], frac.gammas[2], 1e-15);
    EXPECT_TRUE(prob_clone_feasible({states, frac.gammas}).feasible);

    auto p2 = prob_clone_search(states, CloneObjective::TaskP2);
    EXPECT_GE(p2.value, 0.7320 - 1e-4);
    EXPECT_NEAR(p2.value, 0.7320, 1e-3);
    EXPECT_TRUE(prob_clone_feasible({states, p2.gammas}).feasible);
    EXPECT_GT(p2.value, 0.6875);

    auto free = prob_clone_search(states, CloneObjective::Average, false);
    EXPECT_GE(free.value, frac.value - 1e-9);
    EXPECT_TRUE(prob_clone_feasible({states, free.gammas}).feasible);

    EXPECT_THROW(prob_clone_search(pair_with_overlap(0.3), CloneObjective::Fraction), std::invalid_argument);
}

TEST(Chapter6, Pipeline) {
    auto c = chapter6_pipeline();
    EXPECT_TRUE(c.h_orthonormal);
    EXPECT_TRUE(c.s1_orthogonal);
    EXPECT_TRUE(c.s2_orthogonal);
    EXPECT_TRUE(c.outputs_identify_sets);
    EXPECT_EQ(c.p1, Rational(11, 16));
    EXPECT_NEAR(to_double(c.p1), 0.6875, 1e-15);
    EXPECT_NEAR(c.p_success, 0.42803, 1e-5);
    EXPECT_NEAR(c.p_0010, 0.5002, 1e-4);
    EXPECT_NEAR(c.p2, 0.73202, 1e-4);
}

TEST(Unambig, Examples) {
    auto orth = std::vector<Ket>{basis_ket({2}, 0), basis_ket({2}, 1)};
    EXPECT_NEAR(unambig_disc_max(orth).value, 1.0, 1e-12);
    for (double t : {0.3, 0.7, 1.1}) {
        double c = std::cos(t);
        EXPECT_NEAR(unambig_disc_max(pair_with_overlap(t)).value, 1.0 - c, 2e-9) << t;
    }
    auto states = chapter6_pipeline().f0_states;
    auto u = unambig_disc_max(states);
    EXPECT_LE(u.value, 1.0 / 3 + 1e-4);
    EXPECT_NEAR(u.value, 1.0 / 3, 1e-6);
    EXPECT_GE(u.min_eig, -1e-9);
}

TEST(Unambig, BelowCloning) {
    for (double t : {0.3, 0.8, 1.2}) {
        auto s = pair_with_overlap(t);
        EXPECT_LE(unambig_disc_max(s).value, prob_clone_search(s, CloneObjective::Average).value + 1e-9);
    }
    auto states = chapter6_pipeline().f0_states;
    EXPECT_LE(unambig_disc_max(states).value, prob_clone_search(states, CloneObjective::Average).value + 1e-9);
}

TEST(NoCloning, Witness) {
    auto zero = basis_ket({2}, 0);
    EXPECT_FALSE(no_cloning_witness(zero, zero).contradiction);
    EXPECT_FALSE(no_cloning_witness(zero, basis_ket({2}, 1)).contradiction);
    auto w = no_cloning_witness(zero, bloch(kPi / 2, 0));
    EXPECT_TRUE(w.contradiction);
    EXPECT_NEAR(w.overlap, 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(w.overlap_sq, 0.5, 1e-15);
    EXPECT_THROW(no_cloning_witness(zero, basis_ket({3}, 0)), std::invalid_argument);
}
