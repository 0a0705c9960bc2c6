#pragma once

#include "qal/qmath.hpp"

#include <map>
#include <string>

namespace qal {

inline Ket bloch(double theta, double phi) {
    Vec v(2);
    v << std::cos(theta / 2), std::exp(kI * phi) * std::sin(theta / 2);
    return {v, {2}};
}

inline Vec bloch_vec(double theta, double phi) { return bloch(theta, phi).amps; }

inline Ket ket_from_bits(const std::string& bits) {
    Dims dims(bits.size(), 2);
    return basis_ket(dims, std::stoi(bits, nullptr, 2));
}

inline Ket superpose(const std::vector<std::pair<cplx, std::string>>& terms) {
    Ket first = ket_from_bits(terms.at(0).second);
    Vec v = Vec::Zero(first.amps.size());
    for (const auto& [c, bits] : terms) v += c * ket_from_bits(bits).amps;
    return make_ket(v, first.dims);
}

inline Ket bell_phi_minus() {
    const double s = 1.0 / std::sqrt(2.0);
    return superpose({{s, "01"}, {-s, "10"}});
}

inline Ket bell_psi_plus() {
    const double s = 1.0 / std::sqrt(2.0);
    return superpose({{s, "00"}, {s, "11"}});
}

inline Ket ghz(int n, double phi = 0.0) {
    if (n < 2) throw std::invalid_argument("ghz: need at least 2 parties");
    Dims dims(n, 2);
    Vec v = Vec::Zero(1 << n);
    v(0) = 1.0 / std::sqrt(2.0);
    v((1 << n) - 1) = std::exp(kI * phi) / std::sqrt(2.0);
    return {v, dims};
}

inline Ket w3() {
    const double s = 1.0 / std::sqrt(3.0);
    return superpose({{s, "001"}, {s, "010"}, {s, "100"}});
}

inline Ket lambda_state(double a, double b) {
    if (std::abs(a * a + 4 * b * b - 1.0) > 1e-9)
        throw std::invalid_argument("lambda state: requires a^2 + 4 b^2 = 1");
    return superpose({{a, "000"}, {b, "100"}, {b, "101"}, {b, "110"}, {b, "111"}});
}

inline Ket wclass_state(double e, double f) {
    if (std::abs(e * e + 2 * f * f - 1.0) > 1e-9)
        throw std::invalid_argument("W-class state: requires e^2 + 2 f^2 = 1");
    return superpose({{e, "000"}, {f, "101"}, {f, "110"}});
}

struct HardyParams {
    cplx alpha_a, alpha_b, beta_a, beta_b;
};

inline void check_hardy(const HardyParams& p) {
    auto bad = [](cplx a, cplx b) { return std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-9; };
    if (bad(p.alpha_a, p.beta_a) || bad(p.alpha_b, p.beta_b))
        throw std::invalid_argument("hardy: requires |alpha|^2 + |beta|^2 = 1 for each party");
}

// N(|h>|h> - alpha_A alpha_B |aa>) with |a> = |0>, |d> = |1>
inline Ket hardy_state(const HardyParams& p) {
    check_hardy(p);
    Vec ha(2), hb(2), aa = Vec::Zero(4);
    ha << p.alpha_a, p.beta_a;
    hb << p.alpha_b, p.beta_b;
    aa(0) = 1.0;
    Vec v = kron(ha, hb) - p.alpha_a * p.alpha_b * aa;
    if (v.norm() < 1e-14) throw std::invalid_argument("hardy: state vanishes for these parameters");
    return {v / v.norm(), {2, 2}};
}

// |c> orthogonal to |h> = alpha|a> + beta|d>
inline Vec hardy_c(cplx alpha, cplx beta) {
    Vec c(2);
    c << std::conj(beta), -std::conj(alpha);
    return c;
}

struct MubSet {
    int d = 0;
    std::vector<std::vector<Vec>> bases;
};

inline MubSet mub(int d) {
    MubSet s;
    s.d = d;
    if (d == 2) {
        const double r = 1.0 / std::sqrt(2.0);
        Vec x0(2), x1(2), y0(2), y1(2), z0(2), z1(2);
        x0 << r, r;
        x1 << r, -r;
        y0 << r, kI * r;
        y1 << r, -kI * r;
        z0 << 1, 0;
        z1 << 0, 1;
        s.bases = {{x0, x1}, {y0, y1}, {z0, z1}};
    } else if (d == 3) {
        const cplx w = std::exp(2.0 * kPi * kI / 3.0);
        const double r = 1.0 / std::sqrt(3.0);
        for (cplx om : {w, std::conj(w)}) {
            std::vector<Vec> b;
            for (int k = 0; k < 3; ++k) {
                Vec v = Vec::Constant(3, r);
                v(k) = om * r;
                b.push_back(v);
            }
            s.bases.push_back(b);
        }
    } else {
        throw std::invalid_argument("mub: only d = 2 or d = 3 supported");
    }
    return s;
}

// Convex mixture of product qubit states; weights on the unit sphere via hyperspherical angles
struct SeparableAnsatz {
    int parties = 2;
    int terms = 4;
    std::vector<double> params;

    SeparableAnsatz() = default;
    SeparableAnsatz(int n, int k) : parties(n), terms(k), params(num_params(n, k), 0.0) {}

    static int num_params(int n, int k) { return (k - 1) + 2 * n * k; }
    int angle_index(int term, int party) const { return (terms - 1) + 2 * (term * parties + party); }
};

inline std::vector<double> ansatz_probabilities(const SeparableAnsatz& a) {
    std::vector<double> p(a.terms);
    double s = 1.0;
    for (int i = 0; i < a.terms - 1; ++i) {
        double c = std::cos(a.params[i]);
        p[i] = s * s * c * c;
        s *= std::sin(a.params[i]);
    }
    p[a.terms - 1] = s * s;
    return p;
}

inline Vec ansatz_term(const SeparableAnsatz& a, int term) {
    Vec v = Vec::Ones(1);
    for (int j = 0; j < a.parties; ++j) {
        int k = a.angle_index(term, j);
        v = kron(v, bloch_vec(a.params[k], a.params[k + 1]));
    }
    return v;
}

inline DensityOp ansatz_to_density(const SeparableAnsatz& a) {
    const int d = 1 << a.parties;
    auto p = ansatz_probabilities(a);
    Mat m = Mat::Zero(d, d);
    for (int i = 0; i < a.terms; ++i) {
        Vec v = ansatz_term(a, i);
        m.noalias() += p[i] * (v * v.adjoint());
    }
    return {m, Dims(a.parties, 2)};
}

// Angles for given weights p (sum 1) in the hyperspherical chart
inline std::vector<double> weight_angles(const std::vector<double>& p) {
    std::vector<double> ang(p.size() - 1);
    double rest = 1.0;
    for (size_t i = 0; i + 1 < p.size(); ++i) {
        double c = rest > 0 ? std::sqrt(std::clamp(p[i] / rest, 0.0, 1.0)) : 1.0;
        ang[i] = std::acos(c);
        rest -= p[i];
        if (rest < 0) rest = 0;
    }
    return ang;
}

inline std::vector<std::string> state_names() {
    return {"bell-phi-minus", "bell-psi-plus", "ghz", "w3", "w-class", "lambda", "hardy", "bloch"};
}

// Builds a named state; params are positional: ghz(n, phi), w-class(e, f), lambda(a, b),
// hardy(alpha_a, alpha_b) real with beta = sqrt(1 - alpha^2), bloch(theta, phi)
inline Ket named_state(const std::string& name, const std::vector<double>& params = {}) {
    auto arg = [&](size_t i, double def) { return i < params.size() ? params[i] : def; };
    if (name == "bell-phi-minus") return bell_phi_minus();
    if (name == "bell-psi-plus") return bell_psi_plus();
    if (name == "ghz") return ghz(int(arg(0, 3)), arg(1, 0.0));
    if (name == "w3") return w3();
    if (name == "w-class") {
        double f = arg(1, 1.0 / std::sqrt(6.0));
        return wclass_state(arg(0, std::sqrt(1 - 2 * f * f)), f);
    }
    if (name == "lambda") {
        double b = arg(1, 1.0 / std::sqrt(5.0));
        return lambda_state(arg(0, std::sqrt(1 - 4 * b * b)), b);
    }
    if (name == "hardy") {
        double aa = arg(0, 0.5), ab = arg(1, aa);
        return hardy_state({aa, ab, std::sqrt(1 - aa * aa), std::sqrt(1 - ab * ab)});
    }
    if (name == "bloch") return bloch(arg(0, 0.0), arg(1, 0.0));
    throw std::invalid_argument("unknown state name: " + name);
}

}  // namespace qal
