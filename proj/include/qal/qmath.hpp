#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qal {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Dims = std::vector<int>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEigClip = 1e-12;
inline constexpr cplx kI{0.0, 1.0};

struct Ket {
    Vec amps;
    Dims dims;
};

struct DensityOp {
    Mat m;
    Dims dims;
};

inline int dim_product(const Dims& d) {
    return std::accumulate(d.begin(), d.end(), 1, std::multiplies<int>());
}

inline void validate(const Ket& k, double tol = 1e-10) {
    if (k.dims.empty() || dim_product(k.dims) != k.amps.size())
        throw std::invalid_argument("ket: dims do not match amplitude count");
    if (std::abs(k.amps.squaredNorm() - 1.0) > tol)
        throw std::invalid_argument("ket: not normalized");
}

inline void validate(const DensityOp& r, double tol = 1e-10) {
    if (r.m.rows() != r.m.cols() || dim_product(r.dims) != r.m.rows())
        throw std::invalid_argument("density: dims do not match matrix size");
    if ((r.m - r.m.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("density: not Hermitian");
    if (std::abs(r.m.trace().real() - 1.0) > tol)
        throw std::invalid_argument("density: trace is not 1");
}

inline Ket make_ket(Vec amps, Dims dims) {
    double n = amps.norm();
    if (n == 0.0) throw std::invalid_argument("ket: zero vector");
    Ket k{amps / n, std::move(dims)};
    validate(k);
    return k;
}

inline Ket basis_ket(const Dims& dims, int index) {
    Vec v = Vec::Zero(dim_product(dims));
    v(index) = 1.0;
    return {v, dims};
}

inline DensityOp projector(const Ket& k) { return {k.amps * k.amps.adjoint(), k.dims}; }

inline DensityOp maximally_mixed(const Dims& dims) {
    int n = dim_product(dims);
    return {Mat::Identity(n, n) / double(n), dims};
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

inline Vec kron(const Vec& a, const Vec& b) {
    Vec r(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) r.segment(i * b.size(), b.size()) = a(i) * b;
    return r;
}

inline Dims concat(const Dims& a, const Dims& b) {
    Dims r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

inline Ket tensor(const Ket& a, const Ket& b) { return {kron(a.amps, b.amps), concat(a.dims, b.dims)}; }

inline DensityOp tensor(const DensityOp& a, const DensityOp& b) {
    return {kron(a.m, b.m), concat(a.dims, b.dims)};
}

inline Mat kron_all(const std::vector<Mat>& ops) {
    Mat r = Mat::Identity(1, 1);
    for (const auto& o : ops) r = kron(r, o);
    return r;
}

// Pauli matrices
inline Mat pauli(char which) {
    Mat p(2, 2);
    switch (which) {
        case 'I': p << 1, 0, 0, 1; break;
        case 'X': p << 0, 1, 1, 0; break;
        case 'Y': p << 0, -kI, kI, 0; break;
        case 'Z': p << 1, 0, 0, -1; break;
        default: throw std::invalid_argument(std::string("unknown Pauli ") + which);
    }
    return p;
}

inline Mat pauli_string(const std::string& s) {
    std::vector<Mat> ops;
    for (char c : s) ops.push_back(pauli(c));
    return kron_all(ops);
}

inline std::vector<int> digits(int index, const Dims& dims) {
    std::vector<int> d(dims.size());
    for (int s = int(dims.size()) - 1; s >= 0; --s) {
        d[s] = index % dims[s];
        index /= dims[s];
    }
    return d;
}

inline int from_digits(const std::vector<int>& d, const Dims& dims) {
    int index = 0;
    for (size_t s = 0; s < dims.size(); ++s) index = index * dims[s] + d[s];
    return index;
}

inline DensityOp partial_trace(const DensityOp& rho, std::vector<int> keep) {
    const int n = int(rho.dims.size());
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    for (int k : keep)
        if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: invalid subsystem index");

    std::vector<int> traced;
    for (int s = 0; s < n; ++s)
        if (!std::binary_search(keep.begin(), keep.end(), s)) traced.push_back(s);
    Dims kd, td;
    for (int s : keep) kd.push_back(rho.dims[s]);
    for (int s : traced) td.push_back(rho.dims[s]);
    const int nk = dim_product(kd), nt = td.empty() ? 1 : dim_product(td);

    Mat out = Mat::Zero(nk, nk);
    std::vector<int> full(n);
    auto compose = [&](const std::vector<int>& kdig, const std::vector<int>& tdig) {
        for (size_t i = 0; i < keep.size(); ++i) full[keep[i]] = kdig[i];
        for (size_t i = 0; i < traced.size(); ++i) full[traced[i]] = tdig[i];
        return from_digits(full, rho.dims);
    };
    for (int r = 0; r < nk; ++r) {
        auto rd = digits(r, kd);
        for (int c = 0; c < nk; ++c) {
            auto cd = digits(c, kd);
            cplx acc = 0.0;
            for (int t = 0; t < nt; ++t) {
                auto tdig = td.empty() ? std::vector<int>{} : digits(t, td);
                int fr = compose(rd, tdig);
                int fc = compose(cd, tdig);
                acc += rho.m(fr, fc);
            }
            out(r, c) = acc;
        }
    }
    return {out, kd};
}

inline DensityOp partial_trace(const Ket& psi, std::vector<int> keep) {
    return partial_trace(projector(psi), std::move(keep));
}

inline Mat partial_transpose(const DensityOp& rho, int subsystem) {
    const int n = int(rho.dims.size());
    if (subsystem < 0 || subsystem >= n) throw std::invalid_argument("partial_transpose: invalid subsystem");
    const int d = int(rho.m.rows());
    Mat out(d, d);
    for (int r = 0; r < d; ++r) {
        auto rd = digits(r, rho.dims);
        for (int c = 0; c < d; ++c) {
            auto cd = digits(c, rho.dims);
            std::swap(rd[subsystem], cd[subsystem]);
            out(r, c) = rho.m(from_digits(rd, rho.dims), from_digits(cd, rho.dims));
            std::swap(rd[subsystem], cd[subsystem]);
        }
    }
    return out;
}

struct EigResult {
    RVec values;  // descending
    Mat vectors;  // columns match values
};

inline EigResult herm_eig(const Mat& m, double herm_tol = 1e-8) {
    if (m.rows() != m.cols()) throw std::invalid_argument("herm_eig: matrix not square");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
        throw std::invalid_argument("herm_eig: matrix not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    const Eigen::Index n = m.rows();
    EigResult r{RVec(n), Mat(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        r.values(i) = es.eigenvalues()(n - 1 - i);
        r.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    return r;
}

inline double min_eig(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

inline double xlog2x(double x) { return x > kEigClip ? x * std::log2(x) : 0.0; }

inline double shannon(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p) h -= xlog2x(x);
    return h;
}

inline double vn_entropy(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) s -= xlog2x(es.eigenvalues()(i));
    return std::max(s, 0.0);
}

inline double vn_entropy(const DensityOp& rho) { return vn_entropy(rho.m); }

struct RelEntropy {
    double value = 0.0;
    bool infinite = false;
};

// D(sigma||rho) = Tr sigma (log sigma - log rho), base 2
inline RelEntropy relative_entropy(const DensityOp& sigma, const DensityOp& rho) {
    if (sigma.m.rows() != rho.m.rows() || sigma.dims != rho.dims)
        throw std::invalid_argument("relative_entropy: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.m);
    const auto& lam = es.eigenvalues();
    const Mat& u = es.eigenvectors();
    Mat s_rot = u.adjoint() * sigma.m * u;
    double cross = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        double w = s_rot(i, i).real();
        if (lam(i) <= kEigClip) {
            if (w > kEigClip) return {0.0, true};
            continue;
        }
        cross += w * std::log2(lam(i));
    }
    double d = -vn_entropy(sigma.m) - cross;
    return {std::max(d, 0.0), false};
}

inline double fidelity_pure(const Ket& psi, const DensityOp& rho) {
    if (psi.amps.size() != rho.m.rows()) throw std::invalid_argument("fidelity_pure: dimension mismatch");
    double f = (psi.amps.adjoint() * rho.m * psi.amps)(0, 0).real();
    return std::clamp(f, 0.0, 1.0);
}

inline double purity(const DensityOp& rho) { return (rho.m * rho.m).trace().real(); }

inline double expectation(const DensityOp& rho, const Mat& op) { return (rho.m * op).trace().real(); }

inline double expectation(const Ket& psi, const Mat& op) {
    return (psi.amps.adjoint() * op * psi.amps)(0, 0).real();
}

// Haar-random unitary via QR of a complex Ginibre matrix
template <class Rng>
Mat random_unitary(int d, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat z(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
        cplx ph = r(i, i) / std::abs(r(i, i));
        q.col(i) *= ph;
    }
    return q;
}

template <class Rng>
Ket random_ket(const Dims& dims, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(dim_product(dims));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
    return {v / v.norm(), dims};
}

// Mixed state from a Ginibre matrix of the given rank
template <class Rng>
DensityOp random_density(const Dims& dims, Rng& rng, int rank = -1) {
    std::normal_distribution<double> g(0.0, 1.0);
    int d = dim_product(dims);
    if (rank <= 0) rank = d;
    Mat z(d, rank);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < rank; ++j) z(i, j) = cplx(g(rng), g(rng));
    Mat m = z * z.adjoint();
    m /= m.trace().real();
    return {0.5 * (m + m.adjoint()), dims};
}

inline Mat local_unitary(const std::vector<Mat>& us) { return kron_all(us); }

inline DensityOp conjugate(const DensityOp& rho, const Mat& u) {
    Mat m = u * rho.m * u.adjoint();
    return {0.5 * (m + m.adjoint()), rho.dims};
}

}  // namespace qal
