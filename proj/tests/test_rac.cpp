#include "qal/rac.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace qal;

namespace {
const double kCube = 0.5 + std::sqrt(3.0) / 6;
}

TEST(Qrac, TwoToOne) {
    auto s = qrac_success(qrac_2x1());
    EXPECT_NEAR(s.average, std::pow(std::cos(kPi / 8), 2), 1e-12);
    EXPECT_NEAR(s.per_query_worst, s.average, 1e-12);
}

TEST(Qrac, ThreeToOne) {
    auto s = qrac_success(qrac_3x1());
    EXPECT_NEAR(s.average, kCube, 1e-12);
    EXPECT_NEAR(s.per_query_worst, s.average, 1e-12);
}

TEST(Qrac, Qutrit) {
    auto q = qutrit_code_build();
    auto s = qrac_success(q.code);
    EXPECT_NEAR(s.average, kCube, 1e-12);
    std::set<std::pair<int, int>> labels;
    for (const auto& r : q.table) {
        EXPECT_NEAR(r.overlap0, kCube, 1e-9) << r.generator;
        EXPECT_NEAR(r.overlap1, kCube, 1e-9) << r.generator;
        labels.insert({r.label0, r.label1});
    }
    EXPECT_EQ(labels.size(), 9u);
}

TEST(Qrac, QutritDesignations) {
    auto q = qutrit_code_build();
    auto find = [&](const std::string& g) {
        for (const auto& r : q.table)
            if (r.generator == g) return std::make_pair(r.label0, r.label1);
        return std::make_pair(-1, -1);
    };
    EXPECT_EQ(find("1"), std::make_pair(0, 0));
    EXPECT_EQ(find("V"), std::make_pair(1, 1));
    EXPECT_EQ(find("V^2"), std::make_pair(2, 2));
    EXPECT_EQ(find("U"), std::make_pair(2, 1));
    EXPECT_EQ(find("V^2U"), std::make_pair(1, 0));
    EXPECT_EQ(find("U^2"), std::make_pair(1, 2));
    EXPECT_EQ(find("VU^2"), std::make_pair(2, 0));
    EXPECT_EQ(find("V^2U^2"), std::make_pair(0, 1));
    EXPECT_EQ(find("VU"), std::make_pair(0, 2));
}

TEST(Qrac, QutritBaseStateOverlap) {
    Vec base = qutrit_base_state();
    EXPECT_NEAR(base.norm(), 1.0, 1e-15);
    EXPECT_NEAR(std::norm(base(0)), 0.5 - std::sqrt(3.0) / 6, 1e-12);
    const MubSet m = mub(3);
    EXPECT_NEAR(std::norm(m.bases[0][0].dot(base)), kCube, 1e-12);
    EXPECT_NEAR(std::norm(m.bases[1][0].dot(base)), kCube, 1e-12);

    // the alternative magnitude a^2 = 1/2 + sqrt(3)/6 falls well short
    double a = -std::sqrt(kCube), b = std::sqrt((1 - a * a) / 2);
    Vec alt(3);
    alt << a, b, b;
    EXPECT_NEAR(std::norm(m.bases[0][0].dot(alt)), 0.596, 1e-3);
}

TEST(Qrac, QutritOverlapIsMaximalOverRealStates) {
    // grid over real states a|0> + b|1> + c|2>: the sum of the two designated overlaps never exceeds 2 kCube
    const MubSet m = mub(3);
    double best = 0.0;
    for (int i = 0; i <= 400; ++i)
        for (int j = 0; j <= 400; ++j) {
            double th = kPi * i / 400, ph = 2 * kPi * j / 400;
            Vec v(3);
            v << std::cos(th), std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph);
            best = std::max(best, std::norm(m.bases[0][0].dot(v)) + std::norm(m.bases[1][0].dot(v)));
        }
    EXPECT_LE(best, 2 * kCube + 1e-9);
    EXPECT_GT(best, 2 * kCube - 1e-3);
}

TEST(Classical, Optima) {
    EXPECT_EQ(classical_rac_optimal(1).p_c, Rational(1));
    EXPECT_EQ(classical_rac_optimal(2).p_c, Rational(3, 4));
    EXPECT_EQ(classical_rac_optimal(3).p_c, Rational(3, 4));
    EXPECT_EQ(classical_rac_optimal(4).p_c, Rational(11, 16));
    EXPECT_THROW(classical_rac_optimal(0), std::invalid_argument);
    EXPECT_THROW(classical_rac_optimal(5), std::invalid_argument);
}

TEST(Classical, QuantumBeatsClassical) {
    EXPECT_GT(qrac_success(qrac_2x1()).average, to_double(classical_rac_optimal(2).p_c));
    EXPECT_GT(qrac_success(qrac_3x1()).average, to_double(classical_rac_optimal(3).p_c));
}

TEST(Classical, WitnessAchievesOptimum) {
    auto r = classical_rac_optimal(2);
    RacCode c;
    c.m = 2;
    c.q = 2;
    const MubSet m = mub(2);
    for (int x = 0; x < 4; ++x) c.encoding.push_back(basis_ket({2}, int((r.witness >> x) & 1)));
    // classical decoding as a measurement in the z basis
    for (int i = 0; i < 2; ++i) {
        int cnt[2][2] = {};
        for (int x = 0; x < 4; ++x) cnt[(r.witness >> x) & 1][rac_symbol(x, i, 2, 2)]++;
        c.decodings.push_back({m.bases[2], {cnt[0][1] > cnt[0][0], cnt[1][1] > cnt[1][0]}});
    }
    EXPECT_NEAR(qrac_success(c).average, 0.75, 1e-12);
}

TEST(InvariantInfo, Examples) {
    const MubSet m = mub(2);
    EXPECT_NEAR(invariant_info(projector(bloch(0.4, 1.0)), m), 0.5, 1e-12);
    EXPECT_NEAR(invariant_info(maximally_mixed({2}), m), 0.0, 1e-12);
    EXPECT_THROW(invariant_info(maximally_mixed({3}), m), std::invalid_argument);
}

TEST(InvariantInfo, EqualsPurityMinusInverseDimension) {
    std::mt19937_64 rng(21);
    const MubSet m = mub(2);
    for (int t = 0; t < 1000; ++t) {
        DensityOp r = random_density({2}, rng);
        EXPECT_NEAR(invariant_info(r, m), purity(r) - 0.5, 1e-10);
    }
}

TEST(InvariantInfo, UnitaryInvarianceVersusShannon) {
    std::mt19937_64 rng(22);
    const MubSet m = mub(2);
    Ket psi = basis_ket({2}, 0);
    double lo = 1e9, hi = -1e9;
    for (int t = 0; t < 50; ++t) {
        Mat u = random_unitary(2, rng);
        Ket k{u * psi.amps, {2}};
        EXPECT_NEAR(invariant_info(projector(k), m), 0.5, 1e-10);
        double s = shannon_total_info(k, m);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    EXPECT_GT(hi - lo, 1e-3);
}

TEST(ShannonInfo, Examples) {
    const MubSet m = mub(2);
    EXPECT_NEAR(shannon_total_info(basis_ket({2}, 0), m), 1.0, 1e-12);
    EXPECT_NEAR(shannon_total_info(bloch(kPi / 2, 0), m), 1.0, 1e-12);
    EXPECT_GT(std::abs(shannon_total_info(bloch(kPi / 4, 0), m) - 1.0), 1e-3);
}

TEST(EquipartitionBound, Values) {
    EXPECT_NEAR(mub_equipartition_bound(2, 2), 0.5 + std::sqrt(2.0) / 4, 1e-12);
    EXPECT_NEAR(mub_equipartition_bound(2, 3), kCube, 1e-12);
    EXPECT_NEAR(mub_equipartition_bound(3, 2), 1.0 / 3 + std::sqrt(2.0) / 3, 1e-12);
    EXPECT_NEAR(mub_equipartition_bound(2, 2), 0.85355, 1e-5);
    EXPECT_NEAR(mub_equipartition_bound(3, 2), 0.80474, 1e-5);
    EXPECT_THROW(mub_equipartition_bound(3, 3), std::invalid_argument);
}

TEST(EquipartitionBound, SolvesInformationEquation) {
    for (auto [d, n] : {std::pair{2, 2}, {2, 3}, {3, 2}}) {
        double p = mub_equipartition_bound(d, n);
        double rest = (1 - p) / (d - 1);
        double info = (p - 1.0 / d) * (p - 1.0 / d) + (d - 1) * (rest - 1.0 / d) * (rest - 1.0 / d);
        EXPECT_NEAR(info, (d - 1.0) / d / n, 1e-12);
    }
}

TEST(Validate, RejectsMalformedCode) {
    RacCode c = qrac_2x1();
    c.encoding.pop_back();
    EXPECT_THROW(qrac_success(c), std::invalid_argument);
    c = qrac_2x1();
    c.decodings[0].basis[1] = c.decodings[0].basis[0];
    EXPECT_THROW(qrac_success(c), std::invalid_argument);
}
