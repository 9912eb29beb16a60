#pragma once

// Collective-spin matrices in the Dicke basis and the dense spectral
// machinery shared by the rest of the library.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "ttc/errors.hpp"

namespace ttc {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Maps an angle onto [-pi, pi).
inline double wrap_phase(double x) {
    double y = x - two_pi * std::floor((x + pi) / two_pi);
    if (y >= pi) y -= two_pi;
    if (y < -pi) y += two_pi;
    return y;
}

/// Symmetric sector of N two-level bosons: dimension N+1, S_z eigenvalues
/// m = -N/2, ..., N/2 in ascending order. Index k holds m = k - N/2.
class SpinBasisSpec {
public:
    explicit SpinBasisSpec(int n_particles) : n_(n_particles) {
        if (n_particles < 1)
            throw InvalidArgument("invalid basis: particle count N must be >= 1, got " +
                                  std::to_string(n_particles));
    }

    int particles() const noexcept { return n_; }
    Eigen::Index dim() const noexcept { return n_ + 1; }
    double spin() const noexcept { return 0.5 * n_; }
    double m_at(Eigen::Index k) const noexcept { return static_cast<double>(k) - spin(); }

    std::vector<double> m_values() const {
        std::vector<double> out(static_cast<std::size_t>(dim()));
        for (Eigen::Index k = 0; k < dim(); ++k) out[static_cast<std::size_t>(k)] = m_at(k);
        return out;
    }

    /// Index of the Fock state |m>, or -1 if m is not a valid label.
    Eigen::Index index_of(double m) const noexcept {
        const double k = m + spin();
        const double kr = std::round(k);
        if (std::abs(k - kr) > 1e-9 || kr < 0 || kr > n_) return -1;
        return static_cast<Eigen::Index>(kr);
    }

private:
    int n_;
};

struct HermitianEigenSystem {
    RealVector eigenvalues;     // ascending
    ComplexMatrix eigenvectors; // columns
};

struct UnitaryEigenSystem {
    RealVector eigenphases;     // ascending, in [-pi, pi)
    ComplexMatrix eigenvectors; // orthonormal columns
};

inline ComplexMatrix build_sz(const SpinBasisSpec& spec) {
    ComplexMatrix sz = ComplexMatrix::Zero(spec.dim(), spec.dim());
    for (Eigen::Index k = 0; k < spec.dim(); ++k) sz(k, k) = spec.m_at(k);
    return sz;
}

namespace detail {
// <m+1|S_+|m> = sqrt(S(S+1) - m(m+1))
inline double ladder(const SpinBasisSpec& spec, Eigen::Index k) {
    const double s = spec.spin();
    const double m = spec.m_at(k);
    return std::sqrt(std::max(0.0, s * (s + 1.0) - m * (m + 1.0)));
}
}  // namespace detail

inline ComplexMatrix build_sx(const SpinBasisSpec& spec) {
    ComplexMatrix sx = ComplexMatrix::Zero(spec.dim(), spec.dim());
    for (Eigen::Index k = 0; k + 1 < spec.dim(); ++k) {
        const double c = 0.5 * detail::ladder(spec, k);
        sx(k, k + 1) = c;
        sx(k + 1, k) = c;
    }
    return sx;
}

/// S_y = (S_+ - S_-)/(2i); lower-index row, upper-index column carries +i/2.
inline ComplexMatrix build_sy(const SpinBasisSpec& spec) {
    ComplexMatrix sy = ComplexMatrix::Zero(spec.dim(), spec.dim());
    for (Eigen::Index k = 0; k + 1 < spec.dim(); ++k) {
        const double c = 0.5 * detail::ladder(spec, k);
        sy(k, k + 1) = cplx(0.0, c);
        sy(k + 1, k) = cplx(0.0, -c);
    }
    return sy;
}

inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& h, double tol) {
    if (h.rows() != h.cols()) return false;
    return max_abs(h - h.adjoint()) <= tol * std::max(1.0, max_abs(h));
}

inline double unitarity_defect(const ComplexMatrix& u) {
    const auto id = ComplexMatrix::Identity(u.rows(), u.cols());
    return max_abs(u * u.adjoint() - id);
}

/// Rotates a vector so that its largest-magnitude entry is real and positive.
/// Ties go to the lowest index.
inline void fix_phase(Eigen::Ref<ComplexVector> v) {
    if (v.size() == 0) return;
    const double peak = v.cwiseAbs().maxCoeff();
    if (peak == 0.0) return;
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= peak * (1.0 - 1e-12)) {
            pivot = i;
            break;
        }
    }
    v *= std::conj(v(pivot)) / std::abs(v(pivot));
}

inline HermitianEigenSystem eig_hermitian(const ComplexMatrix& h) {
    if (!is_hermitian(h, 1e-10))
        throw ContractViolation("eig_hermitian: input is not Hermitian within 1e-10");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw ContractViolation("eig_hermitian: eigensolver did not converge");
    HermitianEigenSystem out{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) fix_phase(out.eigenvectors.col(j));
    return out;
}

/// V diag(exp(scale * lambda)) V^dagger for a Hermitian H.
inline ComplexMatrix expm_hermitian(const HermitianEigenSystem& es, cplx scale) {
    const ComplexVector factors = (es.eigenvalues.cast<cplx>() * scale).array().exp().matrix();
    return es.eigenvectors * factors.asDiagonal() * es.eigenvectors.adjoint();
}

inline ComplexMatrix expm_hermitian(const ComplexMatrix& h, cplx scale) {
    if (scale == cplx(0.0, 0.0)) {
        if (!is_hermitian(h, 1e-10))
            throw ContractViolation("expm_hermitian: input is not Hermitian within 1e-10");
        return ComplexMatrix::Identity(h.rows(), h.cols());
    }
    return expm_hermitian(eig_hermitian(h), scale);
}

namespace detail {
inline bool lexicographic_less(const ComplexVector& a, const ComplexVector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
        if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
    }
    return false;
}
}  // namespace detail

/// Eigenphases and orthonormal eigenvectors of a unitary matrix.
///
/// A unitary matrix is normal, so its complex Schur form is diagonal up to
/// round-off and the Schur vectors are an orthonormal eigenbasis even inside
/// degenerate subspaces. Eigenvalues are projected onto the unit circle.
inline UnitaryEigenSystem eig_unitary(const ComplexMatrix& u) {
    if (u.rows() != u.cols())
        throw ContractViolation("eig_unitary: matrix is not square");
    const double defect = unitarity_defect(u);
    if (!(defect <= 1e-8))
        throw ContractViolation("eig_unitary: matrix is not unitary within 1e-8 (defect " +
                                std::to_string(defect) + ")");

    const Eigen::Index d = u.rows();
    Eigen::ComplexSchur<ComplexMatrix> schur(u, true);
    if (schur.info() != Eigen::Success)
        throw ContractViolation("eig_unitary: Schur decomposition did not converge");
    const ComplexMatrix& t = schur.matrixT();
    const ComplexMatrix& q = schur.matrixU();

    std::vector<double> phases(static_cast<std::size_t>(d));
    std::vector<ComplexVector> vecs(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) {
        double theta = std::arg(t(j, j));
        if (theta >= pi) theta -= two_pi;
        phases[static_cast<std::size_t>(j)] = theta;
        ComplexVector v = q.col(j);
        fix_phase(v);
        vecs[static_cast<std::size_t>(j)] = std::move(v);
    }

    std::vector<std::size_t> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (phases[a] != phases[b]) return phases[a] < phases[b];
        return detail::lexicographic_less(vecs[a], vecs[b]);
    });

    UnitaryEigenSystem out{RealVector(d), ComplexMatrix(d, d)};
    for (Eigen::Index j = 0; j < d; ++j) {
        const std::size_t src = order[static_cast<std::size_t>(j)];
        out.eigenphases(j) = phases[src];
        out.eigenvectors.col(j) = vecs[src];
    }
    return out;
}

/// Rebuilds V diag(exp(i n theta)) V^dagger.
inline ComplexMatrix unitary_power(const UnitaryEigenSystem& es, int n) {
    const ComplexVector factors =
        (es.eigenphases.cast<cplx>() * cplx(0.0, static_cast<double>(n))).array().exp().matrix();
    return es.eigenvectors * factors.asDiagonal() * es.eigenvectors.adjoint();
}

/// Kronecker product a (x) b with b's index running fastest.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace ttc
