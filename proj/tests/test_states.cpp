#include "qal/nonlocality.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qal;

TEST(Bloch, Examples) {
    EXPECT_LT((bloch(0.0, 1.234).amps - basis_ket({2}, 0).amps).norm(), 1e-15);
    Vec plus(2);
    plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    EXPECT_LT((bloch(kPi / 2, 0).amps - plus).norm(), 1e-15);
    Vec phi00(2);
    phi00 << 1 / std::sqrt(2.0), std::exp(kI * kPi / 4.0) / std::sqrt(2.0);
    EXPECT_LT((bloch(kPi / 2, kPi / 4).amps - phi00).norm(), 1e-15);
}

TEST(NamedState, AllNamesNormalized) {
    for (const auto& n : state_names()) {
        Ket k = named_state(n);
        EXPECT_NO_THROW(validate(k)) << n;
    }
    EXPECT_THROW(named_state("nope"), std::invalid_argument);
}

TEST(NamedState, Ghz) {
    Ket g = named_state("ghz", {3, 0.0});
    EXPECT_EQ(g.dims, (Dims{2, 2, 2}));
    EXPECT_NEAR(g.amps(0).real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(g.amps(7).real(), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(g.amps.segment(1, 6).norm(), 0.0, 1e-15);
}

TEST(NamedState, LambdaReducedPair) {
    const double s = 1 / std::sqrt(5.0);
    DensityOp ab = partial_trace(named_state("lambda", {s, s}), {0, 1});
    Mat want(4, 4);
    want << 1, 0, 1, 1, 0, 0, 0, 0, 1, 0, 2, 2, 1, 0, 2, 2;
    EXPECT_LT((ab.m - want / 5.0).cwiseAbs().maxCoeff(), 1e-12);
    DensityOp bc = partial_trace(named_state("lambda", {s, s}), {1, 2});
    Mat want_bc = Mat::Constant(4, 4, 1.0);
    want_bc(0, 0) = 2.0;
    EXPECT_LT((bc.m - want_bc / 5.0).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NamedState, ConstraintViolations) {
    EXPECT_THROW(lambda_state(0.5, 0.5), std::invalid_argument);
    EXPECT_THROW(wclass_state(0.5, 0.5), std::invalid_argument);
    EXPECT_THROW(hardy_state({0.6, 0.6, 0.6, 0.8}), std::invalid_argument);
}

TEST(NamedState, HardyAtOptimum) {
    auto opt = hardy_maximize();
    double a = std::cos(opt.theta_a), b = std::cos(opt.theta_b);
    Ket h = named_state("hardy", {a, b});
    Vec ca = hardy_c(a, std::sin(opt.theta_a)), cb = hardy_c(b, std::sin(opt.theta_b));
    double pcc = std::norm(kron(ca, cb).dot(h.amps));
    const double tau = (1 + std::sqrt(5.0)) / 2;
    EXPECT_NEAR(pcc, 1 / std::pow(tau, 5), 1e-6);
}

TEST(Mub, Qubit) {
    MubSet m = mub(2);
    ASSERT_EQ(m.bases.size(), 3u);
    EXPECT_NEAR(std::norm(m.bases[0][0].dot(m.bases[2][0])), 0.5, 1e-15);
}

TEST(Mub, QutritOverlap) {
    MubSet m = mub(3);
    ASSERT_EQ(m.bases.size(), 2u);
    const cplx w = std::exp(2.0 * kPi * kI / 3.0);
    Vec a1(3), b2(3);
    a1 << w, 1, 1;
    b2 << 1, std::conj(w), 1;
    a1 /= std::sqrt(3.0);
    b2 /= std::sqrt(3.0);
    EXPECT_LT((m.bases[0][0] - a1).norm(), 1e-15);
    EXPECT_LT((m.bases[1][1] - b2).norm(), 1e-15);
    EXPECT_NEAR(std::norm(a1.dot(b2)), 1.0 / 3, 1e-12);
}

TEST(Mub, OrthonormalAndUnbiased) {
    for (int d : {2, 3}) {
        MubSet m = mub(d);
        for (size_t j = 0; j < m.bases.size(); ++j)
            for (size_t l = 0; l < m.bases.size(); ++l)
                for (int i = 0; i < d; ++i)
                    for (int k = 0; k < d; ++k) {
                        double o = std::norm(m.bases[j][i].dot(m.bases[l][k]));
                        double want = j == l ? (i == k ? 1.0 : 0.0) : 1.0 / d;
                        EXPECT_NEAR(o, want, 1e-10);
                    }
    }
    EXPECT_THROW(mub(4), std::invalid_argument);
}

TEST(Ansatz, ParameterCounts) {
    EXPECT_EQ(SeparableAnsatz::num_params(2, 4), 19);
    EXPECT_EQ(SeparableAnsatz::num_params(3, 64), 447);
    EXPECT_EQ(SeparableAnsatz(3, 64).params.size(), 447u);
}

TEST(Ansatz, SingleTermProduct) {
    SeparableAnsatz a(2, 1);
    DensityOp r = ansatz_to_density(a);
    Mat want = Mat::Zero(4, 4);
    want(0, 0) = 1.0;
    EXPECT_LT((r.m - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Ansatz, EqualWeightBasisGivesIdentity) {
    SeparableAnsatz a(2, 4);
    auto ang = weight_angles({0.25, 0.25, 0.25, 0.25});
    for (int i = 0; i < 3; ++i) a.params[i] = ang[i];
    for (int t = 0; t < 4; ++t) {
        a.params[a.angle_index(t, 0)] = (t >> 1) ? kPi : 0.0;
        a.params[a.angle_index(t, 1)] = (t & 1) ? kPi : 0.0;
    }
    auto p = ansatz_probabilities(a);
    for (double x : p) EXPECT_NEAR(x, 0.25, 1e-12);
    EXPECT_LT((ansatz_to_density(a).m - Mat::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ansatz, RandomOutputsArePptAndValid) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int t = 0; t < 200; ++t) {
        SeparableAnsatz a(2, 4);
        for (auto& x : a.params) x = u(rng);
        DensityOp r = ansatz_to_density(a);
        EXPECT_NO_THROW(validate(r));
        EXPECT_GE(min_eig(partial_transpose(r, 0)), -1e-9);
        double s = 0;
        for (double p : ansatz_probabilities(a)) s += p;
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
}
