#pragma once

#include "qal/rational.hpp"
#include "qal/states.hpp"

#include <cstdint>
#include <map>

namespace qal {

struct Decoding {
    std::vector<Vec> basis;
    std::vector<int> symbol;  // outcome -> decoded symbol
};

// Encodes m symbols from an alphabet of size q; input index is base-q with symbol 0 most significant
struct RacCode {
    int m = 2;
    int q = 2;
    std::vector<Ket> encoding;
    std::vector<Decoding> decodings;
};

struct RacSuccess {
    double per_query_worst;
    double average;
};

inline int rac_symbol(int input, int query, int m, int q) {
    for (int k = m - 1; k > query; --k) input /= q;
    return input % q;
}

inline void validate(const RacCode& c) {
    int n = 1;
    for (int i = 0; i < c.m; ++i) n *= c.q;
    if (int(c.encoding.size()) != n || int(c.decodings.size()) != c.m)
        throw std::invalid_argument("rac: encoding or decoding count does not match m and q");
    for (const auto& k : c.encoding) validate(k);
    for (const auto& d : c.decodings) {
        if (d.basis.size() != d.symbol.size()) throw std::invalid_argument("rac: outcome map size mismatch");
        for (size_t i = 0; i < d.basis.size(); ++i)
            for (size_t j = 0; j < d.basis.size(); ++j)
                if (std::abs(d.basis[i].dot(d.basis[j]) - (i == j ? 1.0 : 0.0)) > 1e-10)
                    throw std::invalid_argument("rac: decoding basis not orthonormal");
    }
}

inline double rac_success_prob(const RacCode& c, int input, int query) {
    const auto& dec = c.decodings[query];
    int want = rac_symbol(input, query, c.m, c.q);
    double p = 0.0;
    for (size_t o = 0; o < dec.basis.size(); ++o)
        if (dec.symbol[o] == want) p += std::norm(dec.basis[o].dot(c.encoding[input].amps));
    return p;
}

inline RacSuccess qrac_success(const RacCode& c) {
    validate(c);
    double worst = 1.0, sum = 0.0;
    const int n = int(c.encoding.size());
    for (int x = 0; x < n; ++x)
        for (int i = 0; i < c.m; ++i) {
            double p = rac_success_prob(c, x, i);
            worst = std::min(worst, p);
            sum += p;
        }
    return {worst, sum / (n * c.m)};
}

inline Decoding pauli_decoding(char axis) {
    auto b = mub(2).bases[axis == 'x' ? 0 : axis == 'y' ? 1 : 2];
    return {b, {0, 1}};
}

inline RacCode qrac_2x1() {
    RacCode c;
    c.m = 2;
    c.q = 2;
    for (double phi : {kPi / 4, 7 * kPi / 4, 3 * kPi / 4, 5 * kPi / 4}) c.encoding.push_back(bloch(kPi / 2, phi));
    c.decodings = {pauli_decoding('x'), pauli_decoding('y')};
    return c;
}

inline RacCode qrac_3x1() {
    RacCode c;
    c.m = 3;
    c.q = 2;
    for (int x = 0; x < 8; ++x) {
        double rx = (x & 4) ? -1 : 1, ry = (x & 2) ? -1 : 1, rz = (x & 1) ? -1 : 1;
        double s = 1.0 / std::sqrt(3.0);
        c.encoding.push_back(bloch(std::acos(rz * s), std::atan2(ry * s, rx * s)));
    }
    c.decodings = {pauli_decoding('x'), pauli_decoding('y'), pauli_decoding('z')};
    return c;
}

struct QutritRow {
    std::string generator;
    int label0, label1;  // designated vector index in each basis
    double overlap0, overlap1;
};

struct QutritCode {
    RacCode code;
    std::vector<QutritRow> table;
};

inline Vec qutrit_base_state() {
    const double a = -std::sqrt(0.5 - std::sqrt(3.0) / 6.0);
    const double b = std::sqrt((1 - a * a) / 2);
    Vec v(3);
    v << a, b, b;
    return v;
}

inline Mat qutrit_shift() {
    Mat v = Mat::Zero(3, 3);
    v(1, 0) = v(2, 1) = v(0, 2) = 1.0;
    return v;
}

inline Mat qutrit_clock() {
    const cplx w = std::exp(2.0 * kPi * kI / 3.0);
    Mat u = Mat::Zero(3, 3);
    u(0, 0) = 1.0;
    u(1, 1) = w;
    u(2, 2) = std::conj(w);
    return u;
}

inline QutritCode qutrit_code_build() {
    const Mat V = qutrit_shift(), U = qutrit_clock(), I = Mat::Identity(3, 3);
    const std::vector<std::pair<std::string, Mat>> gens = {
        {"1", I},          {"V", V},          {"V^2", V * V},
        {"U", U},          {"VU", V * U},     {"V^2U", V * V * U},
        {"U^2", U * U},    {"VU^2", V * U * U}, {"V^2U^2", V * V * U * U}};
    const MubSet m = mub(3);
    const Vec base = qutrit_base_state();

    QutritCode out;
    out.code.m = 2;
    out.code.q = 3;
    out.code.encoding.assign(9, Ket{});
    std::vector<bool> filled(9, false);
    for (const auto& [name, g] : gens) {
        Vec psi = g * base;
        QutritRow row{name, 0, 0, 0.0, 0.0};
        for (int k = 0; k < 3; ++k) {
            double o0 = std::norm(m.bases[0][k].dot(psi)), o1 = std::norm(m.bases[1][k].dot(psi));
            if (o0 > row.overlap0) row.overlap0 = o0, row.label0 = k;
            if (o1 > row.overlap1) row.overlap1 = o1, row.label1 = k;
        }
        int idx = 3 * row.label0 + row.label1;
        if (filled[idx]) throw std::runtime_error("qutrit code: two generators designate the same input");
        filled[idx] = true;
        out.code.encoding[idx] = Ket{psi, {3}};
        out.table.push_back(row);
    }
    out.code.decodings = {{m.bases[0], {0, 1, 2}}, {m.bases[1], {0, 1, 2}}};
    return out;
}

inline std::string qutrit_label(int basis, int k) {
    static const char* names[] = {"alpha", "beta", "gamma"};
    return std::string(names[k]) + std::to_string(basis + 1);
}

struct ClassicalRac {
    Rational p_c;
    std::uint64_t witness;  // bit x = message sent for input x
};

// Exhaustive search over one-bit encodings of m bits with majority decoding
inline ClassicalRac classical_rac_optimal(int m) {
    if (m < 1 || m > 4) throw std::invalid_argument("classical_rac_optimal: m must be in 1..4");
    const int n = 1 << m;
    const std::uint64_t count = std::uint64_t(1) << n;
    std::int64_t best = -1;
    std::uint64_t witness = 0;
    for (std::uint64_t enc = 0; enc < count; ++enc) {
        std::int64_t correct = 0;
        for (int i = 0; i < m; ++i) {
            int c[2][2] = {{0, 0}, {0, 0}};  // [message][bit value]
            for (int x = 0; x < n; ++x) c[(enc >> x) & 1][rac_symbol(x, i, m, 2)]++;
            correct += std::max(c[0][0], c[0][1]) + std::max(c[1][0], c[1][1]);
        }
        if (correct > best) best = correct, witness = enc;
    }
    return {Rational(best, std::int64_t(m) * n), witness};
}

inline double invariant_info(const DensityOp& rho, const MubSet& bases) {
    if (rho.m.rows() != bases.d) throw std::invalid_argument("invariant_info: dimension mismatch");
    double s = 0.0;
    for (const auto& b : bases.bases)
        for (const auto& v : b) {
            double p = (v.adjoint() * rho.m * v)(0, 0).real();
            s += (p - 1.0 / bases.d) * (p - 1.0 / bases.d);
        }
    return s;
}

inline double shannon_total_info(const Ket& psi, const MubSet& bases) {
    if (psi.amps.size() != bases.d) throw std::invalid_argument("shannon_total_info: dimension mismatch");
    double s = 0.0;
    for (const auto& b : bases.bases) {
        std::vector<double> p;
        for (const auto& v : b) p.push_back(std::norm(v.dot(psi.amps)));
        s += std::log2(double(bases.d)) - shannon(p);
    }
    return s;
}

// One dominant outcome p, rest uniform, carrying ((d-1)/d)/n of the invariant information
inline double mub_equipartition_bound(int d, int n_bases) {
    bool ok = (d == 2 && (n_bases == 2 || n_bases == 3)) || (d == 3 && n_bases == 2);
    if (!ok) throw std::invalid_argument("mub_equipartition_bound: unsupported (d, bases)");
    return 1.0 / d + (d - 1.0) / (d * std::sqrt(double(n_bases)));
}

}  // namespace qal
