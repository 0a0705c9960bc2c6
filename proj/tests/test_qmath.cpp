#include "qal/states.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qal;

namespace {

Ket k0() { return basis_ket({2}, 0); }
Ket k1() { return basis_ket({2}, 1); }

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Tensor, BasisKets) {
    Ket k = tensor(k0(), k1());
    EXPECT_EQ(k.dims, (Dims{2, 2}));
    Vec want = Vec::Zero(4);
    want(1) = 1.0;
    EXPECT_LT((k.amps - want).norm(), 1e-15);
}

TEST(Tensor, PlusPlusIsUniform) {
    Ket p = bloch(kPi / 2, 0.0);
    Ket k = tensor(p, p);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(k.amps(i) - cplx(0.5)), 0.0, 1e-15);
}

TEST(Tensor, MixedTimesMixed) {
    DensityOp r = tensor(maximally_mixed({2}), maximally_mixed({2}));
    EXPECT_EQ(r.dims, (Dims{2, 2}));
    EXPECT_LT(max_abs(r.m - Mat::Identity(4, 4) / 4.0), 1e-15);
}

TEST(PartialTrace, BellGivesMaximallyMixed) {
    DensityOp r = partial_trace(bell_psi_plus(), {0});
    EXPECT_LT(max_abs(r.m - Mat::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, WClassPair) {
    const double e2 = 2.0 / 3, f2 = 1.0 / 6, ef = std::sqrt(e2 * f2);
    DensityOp r = partial_trace(wclass_state(std::sqrt(e2), std::sqrt(f2)), {0, 1});
    Mat want = Mat::Zero(4, 4);
    want(0, 0) = e2;
    want(0, 3) = want(3, 0) = ef;
    want(2, 2) = want(3, 3) = f2;
    EXPECT_LT(max_abs(r.m - want), 1e-12);
}

TEST(PartialTrace, GhzSingleParty) {
    DensityOp r = partial_trace(ghz(3), {0});
    EXPECT_LT(max_abs(r.m - Mat::Identity(2, 2) / 2.0), 1e-15);
}

TEST(PartialTrace, RejectsBadKeep) {
    DensityOp r = projector(ghz(3));
    EXPECT_THROW(partial_trace(r, {}), std::invalid_argument);
    EXPECT_THROW(partial_trace(r, {3}), std::invalid_argument);
    EXPECT_THROW(partial_trace(r, {-1}), std::invalid_argument);
}

TEST(PartialTrace, SequentialOrderGivesUnitTrace) {
    std::mt19937_64 rng(7);
    DensityOp r = random_density({2, 3, 2}, rng);
    DensityOp a = partial_trace(partial_trace(r, {0, 2}), {0});
    DensityOp b = partial_trace(partial_trace(r, {1, 2}), {1});
    EXPECT_NEAR(partial_trace(a, {0}).m.trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(b.m.trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(partial_trace(r, {1}).m.trace().real(), 1.0, 1e-12);
}

TEST(PartialTranspose, ProductStaysPositive) {
    DensityOp r = projector(tensor(bloch(0.3, 1.1), bloch(2.0, -0.4)));
    EXPECT_GT(min_eig(partial_transpose(r, 1)), -1e-12);
}

TEST(PartialTranspose, BellMinimumEigenvalue) {
    // PT of |Phi+><Phi+| is SWAP/2, spectrum {1/2, 1/2, 1/2, -1/2}
    Mat pt = partial_transpose(projector(bell_psi_plus()), 0);
    Mat swap = Mat::Zero(4, 4);
    swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 0.5;
    EXPECT_LT(max_abs(pt - swap), 1e-15);
    EXPECT_NEAR(min_eig(pt), -0.5, 1e-12);
}

TEST(PartialTranspose, IdentityFixed) {
    EXPECT_LT(max_abs(partial_transpose(maximally_mixed({2, 2}), 1) - Mat::Identity(4, 4) / 4.0), 1e-15);
    EXPECT_THROW(partial_transpose(maximally_mixed({2, 2}), 2), std::invalid_argument);
}

TEST(HermEig, SmallCases) {
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = 1.0;
    auto e = herm_eig(d);
    EXPECT_NEAR(e.values(0), 1.0, 1e-15);
    EXPECT_NEAR(e.values(1), 0.0, 1e-15);
    auto x = herm_eig(pauli('X'));
    EXPECT_NEAR(x.values(0), 1.0, 1e-15);
    EXPECT_NEAR(x.values(1), -1.0, 1e-15);
}

TEST(HermEig, WClassBcSpectrum) {
    DensityOp r = partial_trace(wclass_state(std::sqrt(2.0 / 3), std::sqrt(1.0 / 6)), {1, 2});
    auto e = herm_eig(r.m);
    const double want[4] = {2.0 / 3, 1.0 / 3, 0.0, 0.0};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(e.values(i), want[i], 1e-12);
}

TEST(HermEig, RejectsNonHermitian) {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = 1.0;
    EXPECT_THROW(herm_eig(m), std::invalid_argument);
}

TEST(HermEig, ReconstructionOnRandomMatrices) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int t = 0; t < 200; ++t) {
        Mat a(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) a(i, j) = cplx(g(rng), g(rng));
        Mat h = a + a.adjoint();
        auto e = herm_eig(h);
        Mat rec = e.vectors * e.values.cast<cplx>().asDiagonal() * e.vectors.adjoint();
        EXPECT_LE(max_abs(rec - h), 1e-9);
        for (int i = 0; i + 1 < 4; ++i) EXPECT_GE(e.values(i), e.values(i + 1));
    }
}

TEST(Entropy, Basics) {
    EXPECT_NEAR(vn_entropy(projector(bloch(1.0, 2.0))), 0.0, 1e-12);
    EXPECT_NEAR(vn_entropy(maximally_mixed({2})), 1.0, 1e-12);
    DensityOp a = partial_trace(wclass_state(std::sqrt(2.0 / 3), std::sqrt(1.0 / 6)), {0});
    double want = -(2.0 / 3) * std::log2(2.0 / 3) - (1.0 / 3) * std::log2(1.0 / 3);
    EXPECT_NEAR(vn_entropy(a), want, 1e-12);
    EXPECT_NEAR(want, 0.9183, 1e-4);
}

TEST(Entropy, BoundsAndAdditivity) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 100; ++t) {
        DensityOp r = random_density({2}, rng), s = random_density({3}, rng);
        double sr = vn_entropy(r), ss = vn_entropy(s);
        EXPECT_GE(sr, 0.0);
        EXPECT_LE(sr, 1.0 + 1e-12);
        EXPECT_NEAR(vn_entropy(tensor(r, s)), sr + ss, 1e-9);
    }
}

TEST(RelativeEntropy, Examples) {
    std::mt19937_64 rng(5);
    DensityOp r = random_density({2, 2}, rng);
    EXPECT_NEAR(relative_entropy(r, r).value, 0.0, 1e-10);
    // D(|0><0| || I/2) = -log2(1/2)
    auto d = relative_entropy(projector(k0()), maximally_mixed({2}));
    EXPECT_FALSE(d.infinite);
    EXPECT_NEAR(d.value, 1.0, 1e-12);
    EXPECT_TRUE(relative_entropy(projector(k0()), projector(k1())).infinite);
    EXPECT_THROW(relative_entropy(projector(k0()), maximally_mixed({2, 2})), std::invalid_argument);
}

TEST(RelativeEntropy, KleinOnRandomPairs) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 1000; ++t) {
        DensityOp s = random_density({2}, rng), r = random_density({2}, rng);
        auto d = relative_entropy(s, r);
        ASSERT_FALSE(d.infinite);
        EXPECT_GE(d.value, 0.0);
    }
}

TEST(Fidelity, Examples) {
    Ket psi = bloch(0.7, 0.2);
    EXPECT_NEAR(fidelity_pure(psi, projector(psi)), 1.0, 1e-12);
    EXPECT_NEAR(fidelity_pure(k0(), maximally_mixed({2})), 0.5, 1e-12);
    for (double eta : {0.0, 0.25, 2.0 / 3, 1.0}) {
        DensityOp out{eta * projector(psi).m + (1 - eta) * Mat::Identity(2, 2) / 2.0, {2}};
        EXPECT_NEAR(fidelity_pure(psi, out), 0.5 + eta / 2, 1e-12);
    }
    EXPECT_THROW(fidelity_pure(k0(), maximally_mixed({2, 2})), std::invalid_argument);
}

TEST(Validate, RejectsMalformed) {
    EXPECT_THROW(make_ket(Vec::Ones(3), {2}), std::invalid_argument);
    EXPECT_THROW(validate(DensityOp{Mat::Identity(2, 2), {2}}), std::invalid_argument);
}
