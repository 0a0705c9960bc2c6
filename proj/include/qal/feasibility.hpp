#pragma once

#include "qal/rational.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qal {

struct NoiseModel {
    double eta = 1.0;
    double mu = 1.0;
    double t = 1.0;
    double s = 1.0;
};

inline void validate(const NoiseModel& nm) {
    for (double v : {nm.eta, nm.mu, nm.t, nm.s})
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("noise model: parameters must lie in [0,1]");
}

struct Verdict {
    bool beats;
    double margin;  // lhs - p_c
};

inline Verdict verdict(double margin) { return {margin > 0.0, margin}; }

inline double qrac_pq() { return std::pow(std::cos(std::numbers::pi / 8), 2); }

// Optimal classical success, broadcast model (one bit from each party to the last)
inline Rational broadcast_pc(int n) {
    switch (n) {
        case 3: case 4: return Rational(3, 4);
        case 5: case 6: return Rational(5, 8);
        case 7: return Rational(9, 16);
        default: throw std::invalid_argument("broadcast_pc: N must be in 3..7");
    }
}

// Optimal classical success, sequential one-bit model
inline Rational sequential_pc(int n) {
    switch (n) {
        case 3: case 4: return Rational(3, 4);
        case 5: case 6: return Rational(5, 8);
        default: throw std::invalid_argument("sequential_pc: no exact value for this N");
    }
}

inline Verdict qrac_qubitcomm_beats(const NoiseModel& nm) {
    validate(nm);
    double em = nm.eta * nm.mu;
    return verdict(em * qrac_pq() + (1 - em) / 2 - 0.75);
}

inline Verdict qrac_entanglement_beats(const NoiseModel& nm) {
    validate(nm);
    const double pc = 0.75, e2m2 = std::pow(nm.eta * nm.mu, 2), d2 = std::pow(1 - nm.eta, 2);
    return verdict(e2m2 * qrac_pq() + d2 * pc + (1 - e2m2 - d2) / 2 - pc);
}

inline Verdict multiparty_ent_beats(int n, const NoiseModel& nm) {
    validate(nm);
    const double pc = to_double(broadcast_pc(n));
    const double em = std::pow(nm.eta * nm.mu, n), dn = std::pow(1 - nm.eta, n);
    return verdict(em * 1.0 + dn * pc + (1 - em - dn) / 2 - pc);
}

inline Verdict qubitcomm_multiparty_beats(int n, const NoiseModel& nm) {
    validate(nm);
    const double pc = to_double(sequential_pc(n));
    const double x = nm.mu * nm.eta * nm.t;
    return verdict(x * nm.s + (1 - x) / 2 - pc);
}

// Smallest eta with better-than-classical performance; empty if none in [0,1]
inline std::optional<double> qubitcomm_eta_threshold(int n, double mu, double t, double s) {
    const double pc = to_double(sequential_pc(n));
    if (s <= 0.5 || mu * t == 0.0) return std::nullopt;
    double eta = (pc - 0.5) / (mu * t * (s - 0.5));
    if (eta > 1.0) return std::nullopt;
    return eta;
}

using MarginFn = std::function<double(double eta, double mu)>;

inline MarginFn margin_fn(const std::string& protocol, int n = 3, double t = 1.0, double s = 1.0) {
    if (protocol == "qrac-qubit") return [](double e, double m) { return qrac_qubitcomm_beats({e, m}).margin; };
    if (protocol == "qrac-ent") return [](double e, double m) { return qrac_entanglement_beats({e, m}).margin; };
    if (protocol == "multi-ent") {
        broadcast_pc(n);
        return [n](double e, double m) { return multiparty_ent_beats(n, {e, m}).margin; };
    }
    if (protocol == "multi-qubit") {
        sequential_pc(n);
        return [n, t, s](double e, double m) { return qubitcomm_multiparty_beats(n, {e, m, t, s}).margin; };
    }
    throw std::invalid_argument("unknown protocol: " + protocol);
}

// Root of an increasing function on [lo, hi] by bisection
inline std::optional<double> bisect_increasing(const std::function<double(double)>& f, double lo = 0.0,
                                               double hi = 1.0, double tol = 1e-12) {
    if (f(hi) <= 0.0) return std::nullopt;
    if (f(lo) > 0.0) return lo;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

inline std::optional<double> mu_boundary(const MarginFn& f, double eta) {
    return bisect_increasing([&](double mu) { return f(eta, mu); });
}

inline std::optional<double> eta_boundary(const MarginFn& f, double mu) {
    return bisect_increasing([&](double eta) { return f(eta, mu); });
}

// Closed-form mu boundaries
inline double qrac_qubit_mu_closed(double eta) { return std::sqrt(2.0) / (2 * eta); }

inline double qrac_ent_mu_closed(double eta) { return std::pow(0.5, 0.25) * std::sqrt(2.0 / eta - 1.0); }

inline double multi_ent_mu_closed(int n, double eta) {
    const double e = eta;
    switch (n) {
        case 3: return std::cbrt(4 * std::pow(e, 3) - 12 * e * e + 12 * e) / (2 * e);
        case 4:
            return std::pow(2.0, 0.75) * std::pow(-std::pow(e, 4) + 4 * std::pow(e, 3) - 6 * e * e + 4 * e, 0.25) /
                   (2 * e);
        case 5:
            return std::pow(2.0, 0.6) *
                   std::pow(std::pow(e, 5) - 5 * std::pow(e, 4) + 10 * std::pow(e, 3) - 10 * e * e + 5 * e, 0.2) /
                   (2 * e);
        case 6:
            return std::pow(2.0, 2.0 / 3) *
                   std::pow(-std::pow(e, 6) + 6 * std::pow(e, 5) - 15 * std::pow(e, 4) + 20 * std::pow(e, 3) -
                                15 * e * e + 6 * e,
                            1.0 / 6) /
                   (2 * e);
        case 7:
            return std::pow(2.0, 4.0 / 7) *
                   std::pow(std::pow(e, 7) - 7 * std::pow(e, 6) + 21 * std::pow(e, 5) - 35 * std::pow(e, 4) +
                                35 * std::pow(e, 3) - 21 * e * e + 7 * e,
                            1.0 / 7) /
                   (2 * e);
        default: throw std::invalid_argument("multi_ent_mu_closed: N must be in 3..7");
    }
}

inline double multi_ent_mu_min_closed(int n) {
    switch (n) {
        case 3: case 6: return std::pow(2.0, -1.0 / 3);
        case 4: return std::pow(2.0, -0.25);
        case 5: return std::pow(2.0, -0.4);
        case 7: return std::pow(2.0, -3.0 / 7);
        default: throw std::invalid_argument("multi_ent_mu_min_closed: N must be in 3..7");
    }
}

struct WernerThreshold {
    Rational epsilon;
    std::optional<double> conjecture;  // 2^(-(N-1)/2), odd N only
};

inline WernerThreshold werner_threshold(int n) {
    WernerThreshold w{2 * broadcast_pc(n) - 1, std::nullopt};
    if (n % 2) w.conjecture = std::pow(2.0, -(n - 1) / 2.0);
    return w;
}

struct ScanCell {
    double eta, mu;
    bool beats;
};

struct RegionScan {
    std::vector<ScanCell> cells;                       // eta ascending, then mu ascending
    std::vector<std::pair<double, double>> boundary;   // (eta, mu_boundary) where one exists
};

inline RegionScan region_scan(const MarginFn& f, int resolution) {
    if (resolution < 2 || resolution > 2001) throw std::invalid_argument("region_scan: resolution must be in 2..2001");
    RegionScan r;
    for (int i = 0; i < resolution; ++i) {
        double eta = double(i) / (resolution - 1);
        for (int j = 0; j < resolution; ++j) {
            double mu = double(j) / (resolution - 1);
            r.cells.push_back({eta, mu, f(eta, mu) > 0.0});
        }
        if (auto b = mu_boundary(f, eta)) r.boundary.push_back({eta, *b});
    }
    return r;
}

}  // namespace qal
