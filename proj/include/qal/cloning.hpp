#pragma once

#include "qal/rational.hpp"
#include "qal/states.hpp"

#include <functional>
#include <map>

namespace qal {

inline double uqcm_fidelity(int N, int M, int d) {
    if (N < 1 || M <= N || d < 2) throw std::invalid_argument("uqcm_fidelity: requires 1 <= N < M and d >= 2");
    return double(M - N + N * (M + d)) / double(M * (N + d));
}

// M -> infinity limit of the cloning fidelity (optimal state estimation)
inline double estimate_fidelity(int N, int d) { return double(1 + N) / double(N + d); }

struct Balance {
    double iq_before, iq_after;
};

inline Balance fidelity_balance(int N, int M, int d) {
    double fe = estimate_fidelity(N, d);
    return {N * (1 - fe), M * (uqcm_fidelity(N, M, d) - fe)};
}

struct TaskScores {
    Rational f_cloning, f_estimate, f_single;
};

inline TaskScores task_scores(int M, int d) {
    if (M < 2 || d < 2) throw std::invalid_argument("task_scores: requires M >= 2 and d >= 2");
    return {Rational(2 * M + d - 1, std::int64_t(M) * (d + 1)), Rational(2, d + 1),
            Rational(1, M) * (1 + Rational(M - 1, d))};
}

struct CloneSpec {
    std::vector<Ket> states;
    std::vector<double> gammas;
};

inline Mat gram(const std::vector<Ket>& states) {
    const int n = int(states.size());
    Mat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = states[i].amps.dot(states[j].amps);
    return g;
}

inline void require_independent(const std::vector<Ket>& states) {
    if (states.empty()) throw std::invalid_argument("clone: empty state list");
    Mat a(states[0].amps.size(), states.size());
    for (size_t i = 0; i < states.size(); ++i) {
        if (states[i].amps.size() != a.rows()) throw std::invalid_argument("clone: states of different dimension");
        a.col(i) = states[i].amps;
    }
    Eigen::JacobiSVD<Mat> svd(a);
    if (states.size() > size_t(a.rows()) || svd.singularValues().minCoeff() <= 1e-10)
        throw std::invalid_argument("clone: states are linearly dependent");
}

struct CloneFeasibility {
    bool feasible;
    double min_eig;
    std::vector<int> output_signs;  // sign attached to each clone output
};

// T = X1 - sqrt(G) D* X2 D sqrt(G) over output sign choices D; the clone outputs are fixed only up to phase
inline CloneFeasibility prob_clone_feasible(const CloneSpec& spec, double tol = 1e-9) {
    require_independent(spec.states);
    const int n = int(spec.states.size());
    if (int(spec.gammas.size()) != n) throw std::invalid_argument("clone: need one efficiency per state");
    for (double g : spec.gammas)
        if (g < 0 || g > 1) throw std::invalid_argument("clone: efficiencies must lie in [0,1]");
    Mat x1 = gram(spec.states);
    Mat x2 = x1.cwiseProduct(x1);
    CloneFeasibility best{false, -1e300, {}};
    for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
        std::vector<int> sg(n, 1);
        for (int i = 1; i < n; ++i)
            if (mask >> (i - 1) & 1) sg[i] = -1;
        Mat t = x1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                t(i, j) -= std::sqrt(spec.gammas[i] * spec.gammas[j]) * double(sg[i] * sg[j]) * x2(i, j);
        double e = min_eig(0.5 * (t + t.adjoint()));
        if (e > best.min_eig) best = {e >= -tol, e, sg};
    }
    return best;
}

inline double unambig_min_eig(const std::vector<Ket>& states, const std::vector<double>& gammas) {
    Mat t = gram(states);
    for (size_t i = 0; i < states.size(); ++i) t(i, i) -= gammas[i];
    return min_eig(t);
}

struct GammaSearch {
    std::vector<double> gammas;
    double value = -1.0;
    double min_eig = 0.0;
};

namespace detail {

// Both feasible sets are star-shaped about Gamma = 0, so the search runs over ray directions
// with the boundary radius found by bisection
inline std::vector<double> ray_point(const std::vector<double>& ang, int k,
                                     const std::function<bool(const std::vector<double>&)>& feasible) {
    std::vector<double> u(k);
    double s = 1.0;
    for (int i = 0; i + 1 < k; ++i) {
        u[i] = s * std::cos(ang[i]);
        s *= std::sin(ang[i]);
    }
    u[k - 1] = s;
    double umax = 0.0;
    for (auto& v : u) {
        v = std::abs(v);
        umax = std::max(umax, v);
    }
    double lo = 0.0, hi = 1.0 / umax;
    std::vector<double> y(k);
    auto at = [&](double t) {
        for (int i = 0; i < k; ++i) y[i] = std::min(1.0, t * u[i]);
        return y;
    };
    if (feasible(at(hi))) return at(hi);
    for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (lo + hi);
        (feasible(at(m)) ? lo : hi) = m;
    }
    return at(lo);
}

inline std::vector<double> maximize_radial(const std::function<double(const std::vector<double>&)>& objective,
                                           const std::function<bool(const std::vector<double>&)>& feasible, int k,
                                           int restarts = 16) {
    const double half = kPi / 2;
    if (k == 1) return ray_point({}, 1, feasible);
    const int dims = k - 1;
    auto value = [&](const std::vector<double>& ang) { return objective(ray_point(ang, k, feasible)); };

    // lattice of directions, the best few seed local refinement
    const int per_axis = dims == 1 ? 256 : 48;
    std::vector<std::pair<double, std::vector<double>>> grid;
    std::vector<int> idx(dims, 0);
    for (;;) {
        std::vector<double> ang(dims);
        for (int i = 0; i < dims; ++i) ang[i] = half * (idx[i] + 0.5) / per_axis;
        grid.push_back({value(ang), ang});
        int d = 0;
        while (d < dims && ++idx[d] == per_axis) idx[d++] = 0;
        if (d == dims) break;
    }
    std::stable_sort(grid.begin(), grid.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<double> best;
    double best_v = -1e300;
    for (int r = 0; r < std::min<int>(restarts, int(grid.size())); ++r) {
        auto [v, ang] = grid[r];
        for (double step = half / per_axis; step > 1e-12;) {
            bool moved = false;
            for (int i = 0; i < dims && !moved; ++i)
                for (double sg : {1.0, -1.0}) {
                    auto a = ang;
                    a[i] = std::clamp(a[i] + sg * step, 0.0, half);
                    double va = value(a);
                    if (va > v + 1e-15) {
                        ang = a;
                        v = va;
                        moved = true;
                        break;
                    }
                }
            if (!moved) step *= 0.5;
        }
        auto x = ray_point(ang, k, feasible);
        if (v > best_v + 1e-12 || (std::abs(v - best_v) <= 1e-12 && x < best)) {
            best_v = std::max(v, best_v);
            best = x;
        }
    }
    return best;
}

}  // namespace detail

enum class CloneObjective { Average, Fraction, TaskP2 };

inline double chapter6_p2(double g1, double g2) {
    double ps = (g1 + 2 * g2) / 3;
    double p0010 = (1 - g1) / ((1 - g1) + 2 * (1 - g2));
    return ps + (1 - ps) * (p0010 + (1 - p0010) / 16);
}

// Fraction and TaskP2 tie gamma_2 = gamma_3 (three-state sets); Average is unconstrained unless symmetric
inline GammaSearch prob_clone_search(const std::vector<Ket>& states, CloneObjective obj, bool symmetric = false) {
    require_independent(states);
    const int n = int(states.size());
    if (obj != CloneObjective::Average) {
        if (n != 3) throw std::invalid_argument("clone search: fraction and p2 objectives need three states");
        symmetric = true;
    }
    const int k = symmetric && n == 3 ? 2 : n;
    auto expand = [&](const std::vector<double>& v) {
        if (k == n) return v;
        return std::vector<double>{v[0], v[1], v[1]};
    };
    auto feasible = [&](const std::vector<double>& v) { return prob_clone_feasible({states, expand(v)}).feasible; };
    std::function<double(const std::vector<double>&)> objective = [&](const std::vector<double>& v) {
        auto g = expand(v);
        if (obj == CloneObjective::TaskP2) return chapter6_p2(g[0], g[1]);
        double s = 0;
        for (double x : g) s += x;
        return s / n;
    };
    auto x = detail::maximize_radial(objective, feasible, k);
    GammaSearch r;
    r.gammas = expand(x);
    r.value = objective(x);
    r.min_eig = prob_clone_feasible({states, r.gammas}).min_eig;
    return r;
}

inline GammaSearch unambig_disc_max(const std::vector<Ket>& states) {
    require_independent(states);
    const int n = int(states.size());
    auto feasible = [&](const std::vector<double>& g) { return unambig_min_eig(states, g) >= -1e-9; };
    auto objective = [&](const std::vector<double>& g) {
        double s = 0;
        for (double x : g) s += x;
        return s / n;
    };
    auto x = detail::maximize_radial(objective, feasible, n);
    return {x, objective(x), unambig_min_eig(states, x)};
}

// (1/2) sum_x (-1)^{h(x)} |x>, with h given as the bit string h(00) h(01) h(10) h(11)
inline Ket phase_state(const std::string& h) {
    Vec v(4);
    for (int x = 0; x < 4; ++x) v(x) = h[x] == '1' ? -0.5 : 0.5;
    return {v, {2, 2}};
}

inline std::string xor_bits(const std::string& a, const std::string& b) {
    std::string r(a.size(), '0');
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] == b[i] ? '0' : '1';
    return r;
}

struct Chapter6 {
    std::vector<Ket> f0_states;
    bool h_orthonormal;
    bool s1_orthogonal, s2_orthogonal;
    bool outputs_identify_sets;
    std::vector<double> gammas;
    CloneFeasibility feasibility;
    double p_success, p_0010;
    Rational p1;
    double p2;
};

inline std::vector<std::string> chapter6_f0() { return {"0010", "0101", "1001"}; }
inline std::vector<std::string> chapter6_s1() { return {"0001", "0010", "0100", "1000"}; }
inline std::vector<std::string> chapter6_s2() { return {"0000", "0011", "0101", "1001"}; }

inline Chapter6 chapter6_pipeline(double g1 = 0.14165, double g2 = 0.57122) {
    Chapter6 c;
    for (const auto& h : chapter6_f0()) c.f0_states.push_back(phase_state(h));
    auto orthonormal = [](const std::vector<std::string>& set) {
        std::vector<Ket> ks;
        for (const auto& h : set) ks.push_back(phase_state(h));
        Mat g = gram(ks);
        return (g - Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-12;
    };
    c.h_orthonormal = orthonormal(chapter6_s2());
    c.s1_orthogonal = orthonormal(chapter6_s1());
    c.s2_orthogonal = c.h_orthonormal;

    // every admissible f0 xor fi lands on +-one h state, and that state names its two-element set
    const std::map<std::string, std::string> set_of = {{"0000", "0000"}, {"1111", "0000"}, {"0011", "0011"},
                                                       {"1100", "0011"}, {"0101", "0101"}, {"1010", "0101"},
                                                       {"1001", "1001"}, {"0110", "1001"}};
    std::vector<std::string> f12 = chapter6_s1();
    for (const auto& h : chapter6_s2()) f12.push_back(h);
    c.outputs_identify_sets = true;
    for (const auto& f0 : chapter6_f0())
        for (const auto& fi : f12) {
            std::string x = xor_bits(f0, fi);
            auto it = set_of.find(x);
            if (it == set_of.end()) continue;
            Vec out = phase_state(x).amps;
            for (const auto& h : chapter6_s2()) {
                double ov = std::abs(phase_state(h).amps.dot(out));
                bool expect = h == it->second;
                if (std::abs(ov - (expect ? 1.0 : 0.0)) > 1e-12) c.outputs_identify_sets = false;
            }
        }

    c.gammas = {g1, g2, g2};
    c.feasibility = prob_clone_feasible({c.f0_states, c.gammas});
    c.p_success = (g1 + 2 * g2) / 3;
    c.p_0010 = (1 - g1) / ((1 - g1) + 2 * (1 - g2));
    c.p1 = Rational(2, 3) + Rational(1, 3) * Rational(1, 16);
    c.p2 = chapter6_p2(g1, g2);
    return c;
}

struct NoCloningWitness {
    double overlap, overlap_sq;
    bool contradiction;
};

inline NoCloningWitness no_cloning_witness(const Ket& psi, const Ket& phi) {
    if (psi.amps.size() != phi.amps.size()) throw std::invalid_argument("no_cloning_witness: dimension mismatch");
    double o = std::abs(psi.amps.dot(phi.amps));
    const double eps = 1e-12;
    return {o, o * o, o > eps && o < 1 - eps};
}

}  // namespace qal
