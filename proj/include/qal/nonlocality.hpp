#pragma once

#include "qal/states.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace qal {

struct Direction {
    double theta = 0.0;
    double phi = 0.0;
};

struct ChshSettings {
    Direction a1, a2, b1, b2;
};

inline ChshSettings optimal_chsh_settings() {
    return {{0.0, 0.0}, {kPi / 2, 0.0}, {kPi / 4, 0.0}, {3 * kPi / 4, 0.0}};
}

// n.sigma = 2 P(theta, phi) - I
inline Mat spin_observable(const Direction& d) {
    Vec v = bloch_vec(d.theta, d.phi);
    return 2.0 * v * v.adjoint() - Mat::Identity(2, 2);
}

inline DensityOp as_density(const Ket& k) { return projector(k); }
inline DensityOp as_density(const DensityOp& r) { return r; }

inline void require_two_qubits(const DensityOp& r) {
    if (r.dims != Dims{2, 2}) throw std::invalid_argument("expected a two-qubit state");
}

inline double correlator(const DensityOp& rho, const Direction& a, const Direction& b) {
    return expectation(rho, kron(spin_observable(a), spin_observable(b)));
}

// <A1B1> + <A2B1> + <A2B2> - <A1B2>, with sign
template <class State>
double chsh_signed(const State& state, const ChshSettings& s) {
    DensityOp rho = as_density(state);
    require_two_qubits(rho);
    return correlator(rho, s.a1, s.b1) + correlator(rho, s.a2, s.b1) + correlator(rho, s.a2, s.b2) -
           correlator(rho, s.a1, s.b2);
}

template <class State>
double chsh_value(const State& state, const ChshSettings& s) {
    return std::abs(chsh_signed(state, s));
}

// p^d(a1,b1) + p^d(a2,b1) + p^d(a2,b2) + p^e(a1,b2); local bound 3
template <class State>
double chsh_prob_form(const State& state, const ChshSettings& s) {
    DensityOp rho = as_density(state);
    require_two_qubits(rho);
    auto pd = [&](const Direction& a, const Direction& b) { return 0.5 * (1.0 - correlator(rho, a, b)); };
    auto pe = [&](const Direction& a, const Direction& b) { return 0.5 * (1.0 + correlator(rho, a, b)); };
    return pd(s.a1, s.b1) + pd(s.a2, s.b1) + pd(s.a2, s.b2) + pe(s.a1, s.b2);
}

inline DensityOp werner(double eps) {
    DensityOp bell = projector(bell_phi_minus());
    return {eps * bell.m + (1 - eps) * Mat::Identity(4, 4) / 4.0, {2, 2}};
}

struct HardyProbs {
    double p_aa, p_cd, p_dc, p_cc;
};

inline HardyProbs hardy_probs(const HardyParams& p) {
    Ket psi = hardy_state(p);
    Vec a(2), d(2);
    a << 1, 0;
    d << 0, 1;
    Vec ca = hardy_c(p.alpha_a, p.beta_a), cb = hardy_c(p.alpha_b, p.beta_b);
    auto prob = [&](const Vec& x, const Vec& y) { return std::norm(kron(x, y).dot(psi.amps)); };
    return {prob(a, a), prob(ca, d), prob(d, cb), prob(ca, cb)};
}

inline HardyParams hardy_from_angles(double ta, double tb) {
    return {std::cos(ta), std::cos(tb), std::sin(ta), std::sin(tb)};
}

struct HardyOptimum {
    double theta_a = 0, theta_b = 0;
    double p_cc = 0;
    HardyParams params{};
};

namespace detail {
template <class F>
double golden_max(F f, double lo, double hi, double tol) {
    const double g = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}
}  // namespace detail

inline double hardy_pcc(double ta, double tb) {
    const double eps = 1e-9;
    if (std::cos(ta) * std::cos(tb) * std::sin(ta) * std::sin(tb) == 0.0) return 0.0;
    if (std::abs(std::sin(ta)) < eps && std::abs(std::sin(tb)) < eps) return 0.0;
    return hardy_probs(hardy_from_angles(ta, tb)).p_cc;
}

// Multistart coordinate ascent over (theta_A, theta_B) in (0, pi/2)
inline std::vector<HardyOptimum> hardy_multistart(int restarts = 20, std::uint64_t seed = 42, double tol = 1e-10) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, kPi / 2 - 0.05);
    std::vector<HardyOptimum> out;
    const double lo = 1e-6, hi = kPi / 2 - 1e-6;
    for (int r = 0; r < restarts; ++r) {
        double ta = u(rng), tb = u(rng);
        double prev = -1.0, cur = hardy_pcc(ta, tb);
        for (int it = 0; it < 200 && std::abs(cur - prev) > tol * 1e-3; ++it) {
            prev = cur;
            ta = detail::golden_max([&](double x) { return hardy_pcc(x, tb); }, lo, hi, tol);
            tb = detail::golden_max([&](double x) { return hardy_pcc(ta, x); }, lo, hi, tol);
            cur = hardy_pcc(ta, tb);
        }
        out.push_back({ta, tb, cur, hardy_from_angles(ta, tb)});
    }
    return out;
}

inline HardyOptimum hardy_maximize(int restarts = 20, std::uint64_t seed = 42) {
    auto runs = hardy_multistart(restarts, seed);
    return *std::max_element(runs.begin(), runs.end(),
                             [](const auto& a, const auto& b) { return a.p_cc < b.p_cc; });
}

inline double golden_ratio() { return (1 + std::sqrt(5.0)) / 2; }

struct PeresRecord {
    std::array<double, 3> eigen_constraints;
    double direct_ab;
    double factored_ab;
};

inline PeresRecord peres_contradiction() {
    Ket s = bell_phi_minus();
    auto eigval = [&](const std::string& ops) {
        Vec w = pauli_string(ops) * s.amps;
        cplx lam = s.amps.dot(w);
        if ((w - lam * s.amps).norm() > 1e-12) throw std::runtime_error("peres: singlet is not an eigenvector of " + ops);
        return std::round(lam.real());
    };
    PeresRecord r;
    r.eigen_constraints = {eigval("XX"), eigval("YY"), eigval("ZZ")};
    Mat a = pauli_string("XY"), b = pauli_string("YX");
    double e = expectation(s, a * b);
    if (std::abs(std::abs(e) - 1.0) > 1e-12) throw std::runtime_error("peres: XY.YX is not sharp on the singlet");
    r.direct_ab = std::round(e);
    // noncontextual values x1 y2 and y1 x2 fixed by the singlet constraints x2 = -x1, y2 = -y1
    std::vector<int> seen;
    for (int x1 : {-1, 1})
        for (int y1 : {-1, 1}) {
            int x2 = -x1, y2 = -y1;
            seen.push_back((x1 * y2) * (y1 * x2));
        }
    if (std::adjacent_find(seen.begin(), seen.end(), std::not_equal_to<>()) != seen.end())
        throw std::runtime_error("peres: factored prediction depends on the assignment");
    r.factored_ab = seen.front();
    return r;
}

struct MerminRecord {
    std::array<double, 3> row_products;  // +1 or -1 multiple of identity
    std::array<double, 3> col_products;
    bool assignment_exists;
    int assignments_checked;
};

inline std::array<std::array<std::string, 3>, 3> mermin_array() {
    return {{{"IZ", "ZI", "ZZ"}, {"XI", "IX", "XX"}, {"XZ", "ZX", "YY"}}};
}

inline MerminRecord mermin_square() {
    auto arr = mermin_array();
    auto as_scalar = [](const Mat& m) {
        Mat id = Mat::Identity(4, 4);
        if ((m - id).cwiseAbs().maxCoeff() < 1e-12) return 1.0;
        if ((m + id).cwiseAbs().maxCoeff() < 1e-12) return -1.0;
        throw std::runtime_error("mermin: product is not +-identity");
    };
    MerminRecord r{};
    for (int i = 0; i < 3; ++i) {
        Mat row = Mat::Identity(4, 4), col = Mat::Identity(4, 4);
        for (int j = 0; j < 3; ++j) {
            row = row * pauli_string(arr[i][j]);
            col = col * pauli_string(arr[j][i]);
        }
        r.row_products[i] = as_scalar(row);
        r.col_products[i] = as_scalar(col);
    }
    r.assignment_exists = false;
    r.assignments_checked = 0;
    for (int mask = 0; mask < 512; ++mask) {
        ++r.assignments_checked;
        auto v = [&](int i, int j) { return (mask >> (3 * i + j)) & 1 ? -1 : 1; };
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i) {
            ok = v(i, 0) * v(i, 1) * v(i, 2) == int(r.row_products[i]) &&
                 v(0, i) * v(1, i) * v(2, i) == int(r.col_products[i]);
        }
        if (ok) r.assignment_exists = true;
    }
    return r;
}

}  // namespace qal
