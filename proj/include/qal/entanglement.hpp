#pragma once

#include "qal/parallel.hpp"
#include "qal/states.hpp"

#include <array>
#include <deque>
#include <limits>

namespace qal {

inline Mat partial_transpose_set(const DensityOp& rho, const std::vector<int>& cut) {
    const int n = int(rho.dims.size());
    if (cut.empty() || int(cut.size()) >= n) throw std::invalid_argument("ppt: cut must be a proper nonempty subset");
    std::vector<bool> seen(n, false);
    DensityOp t = rho;
    for (int s : cut) {
        if (s < 0 || s >= n || seen[s]) throw std::invalid_argument("ppt: invalid cut");
        seen[s] = true;
        t.m = partial_transpose(t, s);
    }
    return t.m;
}

inline double ppt_min_eig(const DensityOp& rho, const std::vector<int>& cut = {0}) {
    validate(rho);
    return min_eig(partial_transpose_set(rho, cut));
}

inline bool ppt_entangled(const DensityOp& rho, const std::vector<int>& cut = {0}) {
    return ppt_min_eig(rho, cut) < -1e-9;
}

inline RVec schmidt_spectrum(const Ket& psi) {
    if (psi.dims.size() != 2) throw std::invalid_argument("schmidt_spectrum: state must be bipartite");
    validate(psi);
    return herm_eig(partial_trace(psi, {0}).m).values;
}

// psi -> phi by LOCC iff the spectrum of psi is majorized by that of phi
inline bool nielsen_convertible(const Ket& psi, const Ket& phi) {
    if (psi.dims != phi.dims || psi.dims.size() != 2)
        throw std::invalid_argument("nielsen_convertible: states must share bipartite dims");
    RVec a = schmidt_spectrum(psi), b = schmidt_spectrum(phi);
    double sa = 0.0, sb = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        sa += a(i);
        sb += b(i);
        if (sa > sb + 1e-12) return false;
    }
    return std::abs(sa - sb) < 1e-9;
}

enum class Gradient { CentralDifference, Analytic };

struct ReeOptions {
    int restarts = 0;  // 0: 8 for two qubits, 4 for three
    int terms = 0;     // 0: 4 for two qubits, 64 for three
    double tol = 1e-9;
    long max_iter = 100000;
    Gradient gradient = Gradient::CentralDifference;
    double fd_step = 1e-6;
    unsigned seed = 0;
    int workers = 0;
};

struct ReeResult {
    double value = 0.0;
    DensityOp closest;
    SeparableAnsatz witness;
    long iterations = 0;
    bool converged = false;
    bool support_clipped = false;  // value taken from the clipped objective
    int restarts = 0;
    std::vector<double> restart_values;
};

namespace detail {

// D(sigma || rho(params)) with rho eigenvalues clipped inside the log
class ReeObjective {
public:
    ReeObjective(const DensityOp& sigma, int terms)
        : sigma_(sigma.m), n_(int(sigma.dims.size())), k_(terms), d_(int(sigma.m.rows())),
          s_sigma_(vn_entropy(sigma.m)) {}

    int size() const { return SeparableAnsatz::num_params(n_, k_); }
    int parties() const { return n_; }
    int terms() const { return k_; }

    double value(const std::vector<double>& x) const { return cross(build(x)) - s_sigma_; }

    double gradient(const std::vector<double>& x, std::vector<double>& g, Gradient mode, double h) const {
        g.assign(x.size(), 0.0);
        if (mode == Gradient::Analytic) return analytic(x, g);
        std::vector<double> y = x;
        for (size_t i = 0; i < x.size(); ++i) {
            y[i] = x[i] + h;
            double fp = value(y);
            y[i] = x[i] - h;
            double fm = value(y);
            y[i] = x[i];
            g[i] = (fp - fm) / (2 * h);
        }
        return value(x);
    }

    Mat build(const std::vector<double>& x) const {
        SeparableAnsatz a(n_, k_);
        a.params = x;
        return ansatz_to_density(a).m;
    }

    // dD/drho = -(U (S o L) U*) with S = U* sigma U and L the divided differences of the clipped log
    Mat grad_matrix(const Mat& rho, double* value = nullptr) const {
        Eigen::SelfAdjointEigenSolver<Mat> es(rho);
        const Mat& u = es.eigenvectors();
        const RVec& lam = es.eigenvalues();
        Mat st = u.adjoint() * sigma_ * u;
        double f = -s_sigma_;
        const double ln2 = std::log(2.0);
        Mat l(d_, d_);
        for (int i = 0; i < d_; ++i) {
            double li = std::max(lam(i), kEigClip);
            f -= st(i, i).real() * std::log2(li);
            for (int j = 0; j < d_; ++j) {
                double lj = std::max(lam(j), kEigClip);
                if (std::abs(lam(i) - lam(j)) > 1e-14 * std::max(1.0, std::abs(lam(i))))
                    l(i, j) = (std::log(li) - std::log(lj)) / (lam(i) - lam(j)) / ln2;
                else
                    l(i, j) = lam(i) > kEigClip ? 1.0 / (li * ln2) : 0.0;
            }
        }
        if (value) *value = f;
        return -(u * st.cwiseProduct(l) * u.adjoint());
    }

private:
    double cross(const Mat& rho) const {
        Eigen::SelfAdjointEigenSolver<Mat> es(rho);
        const Mat& u = es.eigenvectors();
        double c = 0.0;
        for (int i = 0; i < d_; ++i) {
            double w = (u.col(i).adjoint() * sigma_ * u.col(i))(0, 0).real();
            c -= w * std::log2(std::max(es.eigenvalues()(i), kEigClip));
        }
        return c;
    }

    // dD = Tr(G drho) with G from divided differences of the clipped log
    double analytic(const std::vector<double>& x, std::vector<double>& g) const {
        SeparableAnsatz a(n_, k_);
        a.params = x;
        auto p = ansatz_probabilities(a);
        std::vector<Vec> v(k_);
        Mat rho = Mat::Zero(d_, d_);
        for (int i = 0; i < k_; ++i) {
            v[i] = ansatz_term(a, i);
            rho.noalias() += p[i] * (v[i] * v[i].adjoint());
        }
        double f = 0.0;
        Mat gm = grad_matrix(rho, &f);

        // weights: nested form F = cos^2 a_0 w_0 + sin^2 a_0 (cos^2 a_1 w_1 + ...)
        std::vector<double> w(k_);
        for (int i = 0; i < k_; ++i) w[i] = (v[i].adjoint() * gm * v[i])(0, 0).real();
        std::vector<double> tail(k_);
        tail[k_ - 1] = w[k_ - 1];
        for (int i = k_ - 2; i >= 0; --i) {
            double c = std::cos(x[i]), s = std::sin(x[i]);
            tail[i] = c * c * w[i] + s * s * tail[i + 1];
        }
        double pre = 1.0;
        for (int i = 0; i + 1 < k_; ++i) {
            g[i] = pre * std::sin(2 * x[i]) * (tail[i + 1] - w[i]);
            double s = std::sin(x[i]);
            pre *= s * s;
        }

        // local angles: d(vv*) contributes 2 p Re <v|G|dv>
        for (int i = 0; i < k_; ++i) {
            Vec gv = gm * v[i];
            std::vector<Vec> loc(n_);
            for (int j = 0; j < n_; ++j) {
                int idx = a.angle_index(i, j);
                loc[j] = bloch_vec(x[idx], x[idx + 1]);
            }
            for (int j = 0; j < n_; ++j) {
                int idx = a.angle_index(i, j);
                double th = x[idx], ph = x[idx + 1];
                Vec dth(2), dph(2);
                dth << -0.5 * std::sin(th / 2), 0.5 * std::exp(kI * ph) * std::cos(th / 2);
                dph << 0.0, kI * std::exp(kI * ph) * std::sin(th / 2);
                for (int which = 0; which < 2; ++which) {
                    Vec dv = Vec::Ones(1);
                    for (int q = 0; q < n_; ++q) dv = kron(dv, q == j ? (which ? dph : dth) : loc[q]);
                    g[idx + which] = 2.0 * p[i] * gv.dot(dv).real();
                }
            }
        }
        return f;
    }

    Mat sigma_;
    int n_, k_, d_;
    double s_sigma_;
};

// Kronecker sequence with generalized golden ratio increments
inline std::vector<double> ree_start(int dim, int index) {
    double g = 2.0;
    for (int it = 0; it < 100; ++it) g = std::pow(1.0 + g, 1.0 / (dim + 1));
    std::vector<double> u(dim);
    double a = 1.0;
    for (int j = 0; j < dim; ++j) {
        a /= g;
        double t = 0.5 + (index + 1) * a;
        u[j] = t - std::floor(t);
    }
    return u;
}

struct SearchRun {
    std::vector<double> x;
    double f = 0.0;
    long iterations = 0;
    bool converged = false;
};

inline SearchRun lbfgs(const ReeObjective& obj, std::vector<double> x, const ReeOptions& o) {
    const size_t n = x.size();
    const int memory = 10;
    std::deque<std::pair<std::vector<double>, std::vector<double>>> hist;
    std::vector<double> g, gn;
    double f = obj.gradient(x, g, o.gradient, o.fd_step);
    SearchRun r;
    auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    };
    for (r.iterations = 0; r.iterations < o.max_iter; ++r.iterations) {
        std::vector<double> d = g;
        std::vector<double> alpha(hist.size());
        for (int i = int(hist.size()) - 1; i >= 0; --i) {
            const auto& [s, y] = hist[i];
            alpha[i] = dot(s, d) / dot(y, s);
            for (size_t k = 0; k < n; ++k) d[k] -= alpha[i] * y[k];
        }
        if (!hist.empty()) {
            const auto& [s, y] = hist.back();
            double scale = dot(s, y) / dot(y, y);
            for (auto& v : d) v *= scale;
        }
        for (size_t i = 0; i < hist.size(); ++i) {
            const auto& [s, y] = hist[i];
            double beta = dot(y, d) / dot(y, s);
            for (size_t k = 0; k < n; ++k) d[k] += (alpha[i] - beta) * s[k];
        }
        for (auto& v : d) v = -v;
        double slope = dot(g, d);
        if (!(slope < 0)) {
            hist.clear();
            d = g;
            for (auto& v : d) v = -v;
            slope = dot(g, d);
        }
        if (slope > -1e-300) {
            r.converged = true;
            break;
        }

        double step = hist.empty() ? std::min(1.0, 1.0 / std::sqrt(-slope)) : 1.0;
        std::vector<double> xn(n);
        double fn = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (size_t k = 0; k < n; ++k) xn[k] = x[k] + step * d[k];
            fn = obj.value(xn);
            if (fn <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (hist.empty()) {
                r.converged = true;
                break;
            }
            hist.clear();
            continue;
        }
        obj.gradient(xn, gn, o.gradient, o.fd_step);
        std::vector<double> s(n), y(n);
        for (size_t k = 0; k < n; ++k) s[k] = xn[k] - x[k], y[k] = gn[k] - g[k];
        if (dot(s, y) > 1e-16) {
            hist.emplace_back(std::move(s), std::move(y));
            if (int(hist.size()) > memory) hist.pop_front();
        }
        double improvement = f - fn;
        x.swap(xn);
        g.swap(gn);
        f = fn;
        if (improvement <= o.tol * std::max(std::abs(f), 1e-12)) {
            r.converged = true;
            ++r.iterations;
            break;
        }
    }
    r.x = std::move(x);
    r.f = f;
    return r;
}

// Product state minimising <v|G|v> by alternating single-party eigenvector updates
inline std::pair<double, std::vector<Vec>> min_product_expectation(const Mat& gm, int n, int starts) {
    double best = 1e300;
    std::vector<Vec> best_v;
    for (int s = 0; s < starts; ++s) {
        auto u = ree_start(2 * n, 1000 + s);
        std::vector<Vec> v(n);
        for (int j = 0; j < n; ++j) v[j] = bloch_vec(u[2 * j] * kPi, u[2 * j + 1] * 2 * kPi);
        double val = 1e300;
        for (int sweep = 0; sweep < 100; ++sweep) {
            for (int j = 0; j < n; ++j) {
                // effective 2x2 operator on party j
                Mat eff = Mat::Zero(2, 2);
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        Vec ea = Vec::Ones(1), eb = Vec::Ones(1);
                        for (int q = 0; q < n; ++q) {
                            Vec ba = Vec::Zero(2), bb = Vec::Zero(2);
                            ba(a) = 1.0;
                            bb(b) = 1.0;
                            ea = kron(ea, q == j ? ba : v[q]);
                            eb = kron(eb, q == j ? bb : v[q]);
                        }
                        eff(a, b) = ea.dot(gm * eb);
                    }
                Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (eff + eff.adjoint()));
                v[j] = es.eigenvectors().col(0);
            }
            Vec full = Vec::Ones(1);
            for (int q = 0; q < n; ++q) full = kron(full, v[q]);
            double nv = full.dot(gm * full).real();
            if (val - nv < 1e-15) {
                val = std::min(val, nv);
                break;
            }
            val = nv;
        }
        if (val < best) best = val, best_v = v;
    }
    return {best, best_v};
}

inline void set_term(SeparableAnsatz& a, int term, const std::vector<Vec>& v) {
    for (int j = 0; j < a.parties; ++j) {
        int idx = a.angle_index(term, j);
        a.params[idx] = 2 * std::atan2(std::abs(v[j](1)), std::abs(v[j](0)));
        a.params[idx + 1] = std::arg(v[j](1)) - std::arg(v[j](0));
    }
}

// Gap Tr(G rho) - min over product states; zero at the optimum of the convex problem
inline double fw_gap(const ReeObjective& obj, const std::vector<double>& x, std::vector<Vec>* vertex = nullptr) {
    Mat rho = obj.build(x);
    Mat gm = obj.grad_matrix(rho);
    auto [m, v] = min_product_expectation(gm, obj.parties(), 4);
    if (vertex) *vertex = v;
    return (gm * rho).trace().real() - m;
}

// Local search, then insert the most violating product state while the gap stays open
inline SearchRun ree_search(const ReeObjective& obj, std::vector<double> x, const ReeOptions& o) {
    SearchRun run = lbfgs(obj, std::move(x), o);
    for (int round = 0; round < 50; ++round) {
        std::vector<Vec> vertex;
        double gap = fw_gap(obj, run.x, &vertex);
        if (gap <= 1e-7) break;
        SeparableAnsatz a(obj.parties(), obj.terms());
        a.params = run.x;
        auto p = ansatz_probabilities(a);
        int weakest = int(std::min_element(p.begin(), p.end()) - p.begin());
        set_term(a, weakest, vertex);
        SearchRun best_try;
        best_try.f = run.f;
        for (double t = 0.5; t > 1e-6; t *= 0.5) {
            auto q = p;
            q[weakest] = 0.0;
            for (auto& w : q) w *= (1 - t);
            q[weakest] = t;
            auto ang = weight_angles(q);
            auto y = a.params;
            for (int i = 0; i + 1 < obj.terms(); ++i) y[i] = ang[i];
            double fy = obj.value(y);
            if (fy < best_try.f) {
                best_try.f = fy;
                best_try.x = y;
            }
        }
        if (best_try.x.empty()) break;
        SearchRun next = lbfgs(obj, best_try.x, o);
        next.iterations += run.iterations;
        if (!(next.f < run.f - 1e-15)) break;
        run = std::move(next);
    }
    return run;
}

}  // namespace detail

inline ReeResult ree(const DensityOp& sigma, ReeOptions o = {}) {
    validate(sigma);
    const int n = int(sigma.dims.size());
    for (int d : sigma.dims)
        if (d != 2) throw std::invalid_argument("ree: only qubit systems are supported");
    if (n != 2 && n != 3) throw std::invalid_argument("ree: system must be 2 or 3 qubits");
    if (o.restarts <= 0) o.restarts = n == 2 ? 8 : 4;
    if (o.terms <= 0) o.terms = n == 2 ? 4 : 64;

    detail::ReeObjective obj(sigma, o.terms);
    const int dim = obj.size();
    std::vector<detail::SearchRun> runs(o.restarts);
    parallel_for(
        std::size_t(o.restarts),
        [&](std::size_t r) {
            auto u = detail::ree_start(dim, int(r + o.seed));
            SeparableAnsatz a(n, o.terms);
            std::vector<double> w(o.terms);
            double tot = 0.0;
            for (int i = 0; i < o.terms; ++i) tot += (w[i] = 0.5 + u[i]);
            for (auto& v : w) v /= tot;
            auto ang = weight_angles(w);
            for (int i = 0; i + 1 < o.terms; ++i) a.params[i] = ang[i];
            for (int i = o.terms - 1; i < dim; ++i) {
                bool theta = (i - (o.terms - 1)) % 2 == 0;
                a.params[i] = u[i] * (theta ? kPi : 2 * kPi);
            }
            runs[r] = detail::ree_search(obj, a.params, o);
        },
        o.workers);

    ReeResult res;
    res.restarts = o.restarts;
    int best = 0;
    for (int r = 0; r < o.restarts; ++r) {
        res.restart_values.push_back(runs[r].f);
        res.iterations += runs[r].iterations;
        if (runs[r].f < runs[best].f) best = r;
    }
    res.witness = SeparableAnsatz(n, o.terms);
    res.witness.params = runs[best].x;
    res.closest = ansatz_to_density(res.witness);
    res.converged = runs[best].converged;
    auto exact = relative_entropy(sigma, res.closest);
    res.support_clipped = exact.infinite;
    if (exact.infinite) {
        res.value = std::max(runs[best].f, 0.0);
    } else {
        res.value = exact.value;
    }
    return res;
}

inline ReeResult ree(const Ket& psi, ReeOptions o = {}) { return ree(projector(psi), o); }

inline double ree_w3(ReeOptions o = {}) { return ree(w3(), o).value; }

inline double w3_ree_exact() { return std::log2(9.0 / 4.0); }

// Prediction for E(sigma_AB) of the W-class state forced by the corcond relations
inline double wclass_prediction(double f2) {
    if (!(f2 > 0.0 && f2 < 0.5)) throw std::invalid_argument("wclass_prediction: requires 0 < f^2 < 1/2");
    return (f2 - 1) * std::log2(1 - f2) - 2 * f2 * std::log2(2 * f2) + f2 * std::log2(f2);
}

inline double wclass_bc_closed(double f2) {
    if (!(f2 > 0.0 && f2 < 0.5)) throw std::invalid_argument("wclass_bc_closed: requires 0 < f^2 < 1/2");
    return 2 * (f2 - 1) * std::log2(1 - f2) + (1 - 2 * f2) * std::log2(1 - 2 * f2);
}

struct Corcond {
    double s_ab, s_ac, s_bc;
    double S_a, S_b, S_c;
    double g;
    std::array<double, 3> residuals;  // S_X minus its predicted value
};

inline Corcond corcond_from(double s_ab, double s_ac, double s_bc, double S_a, double S_b, double S_c) {
    Corcond c{s_ab, s_ac, s_bc, S_a, S_b, S_c, 0.0, {}};
    c.g = S_a - s_ab - s_ac;
    c.residuals = {S_a - (c.g + s_ab + s_ac), S_b - (c.g + s_ab + s_bc), S_c - (c.g + s_ac + s_bc)};
    return c;
}

inline Corcond corcond_residuals(const Ket& psi, const ReeOptions& o = {}) {
    if (psi.dims != Dims{2, 2, 2}) throw std::invalid_argument("corcond: requires a pure 3-qubit state");
    validate(psi);
    auto e = [&](int i, int j) { return ree(partial_trace(psi, {i, j}), o).value; };
    auto s = [&](int i) { return vn_entropy(partial_trace(psi, {i})); };
    return corcond_from(e(0, 1), e(0, 2), e(1, 2), s(0), s(1), s(2));
}

}  // namespace qal
