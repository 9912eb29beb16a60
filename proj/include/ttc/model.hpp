#pragma once

// Bosonic Josephson junction dispersively coupled to a two-level probe.
//
// Energies are in units of the hopping alpha_x; times are alpha_x * t.
// Composite boson (x) probe space is ordered boson-major, probe-minor:
// index = 2 * k + s, with s = 0 the sigma_z = +1 level and s = 1 the
// sigma_z = -1 level.

#include <cmath>
#include <string>

#include "ttc/errors.hpp"
#include "ttc/spin_algebra.hpp"

namespace ttc {

struct ModelParams {
    double k_z = 3.0;
    double alpha_x = 1.0;
    double alpha_z = 0.01;
    double delta = 0.0;
    double beta = 0.5;
    int N = 16;

    /// k_z = 3, alpha_z = 0.01, delta = 0, beta = alpha_x / 2.
    static ModelParams paper_default(int n_particles = 16) {
        ModelParams p;
        p.N = n_particles;
        return p;
    }

    void validate() const {
        if (N < 1) throw InvalidArgument("model: N must be >= 1, got " + std::to_string(N));
        if (!(alpha_x > 0.0) || !std::isfinite(alpha_x))
            throw InvalidArgument("model: alpha_x must be positive and finite");
        if (!std::isfinite(k_z) || !std::isfinite(alpha_z) || !std::isfinite(delta) ||
            !std::isfinite(beta))
            throw InvalidArgument("model: couplings must be finite");
    }

    SpinBasisSpec basis() const { return SpinBasisSpec(N); }
    Eigen::Index dim() const noexcept { return N + 1; }

    /// beta = alpha_x / 2 removes the hopping from the backward Hamiltonian.
    bool balanced_coupling() const noexcept { return beta == 0.5 * alpha_x; }
};

namespace detail {
inline ComplexMatrix bose_hubbard(const SpinBasisSpec& spec, double k_z, double alpha_x,
                                  double alpha_z, int n_particles) {
    const ComplexMatrix sz = build_sz(spec);
    return (k_z / (n_particles + 1.0)) * sz * sz - alpha_x * build_sx(spec) + alpha_z * sz;
}
}  // namespace detail

/// H_B = k_z S_z^2 / (N+1) - alpha_x S_x + alpha_z S_z
inline ComplexMatrix build_hb(const ModelParams& p) {
    p.validate();
    return detail::bose_hubbard(p.basis(), p.k_z, p.alpha_x, p.alpha_z, p.N);
}

/// Forward half of the shake: H_1 = -H_B.
inline ComplexMatrix build_h1(const ModelParams& p) { return -build_hb(p); }

/// Backward half of the shake. By default H_2 = H_B at alpha_x = 0 (the
/// balanced-coupling form). With `general_beta` the hopping survives with
/// coefficient alpha_x - 2 beta, which reduces to the default at beta = alpha_x/2.
inline ComplexMatrix build_h2(const ModelParams& p, bool general_beta = false) {
    p.validate();
    const double hop = general_beta ? p.alpha_x - 2.0 * p.beta : 0.0;
    return detail::bose_hubbard(p.basis(), p.k_z, hop, p.alpha_z, p.N);
}

/// Diagonal of the default H_2 in the S_z basis.
inline RealVector h2_diagonal(const ModelParams& p) {
    p.validate();
    const SpinBasisSpec spec = p.basis();
    RealVector d(spec.dim());
    for (Eigen::Index k = 0; k < spec.dim(); ++k) {
        const double m = spec.m_at(k);
        d(k) = p.k_z * m * m / (p.N + 1.0) + p.alpha_z * m;
    }
    return d;
}

inline ComplexMatrix pauli_x() {
    ComplexMatrix s(2, 2);
    s << 0.0, 1.0, 1.0, 0.0;
    return s;
}

inline ComplexMatrix pauli_y() {
    ComplexMatrix s(2, 2);
    s << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return s;
}

inline ComplexMatrix pauli_z() {
    ComplexMatrix s(2, 2);
    s << 1.0, 0.0, 0.0, -1.0;
    return s;
}

/// H = H_B (x) 1 - (delta/2) 1 (x) (1 + sigma_z) + beta S_x (x) (1 + sigma_z)
inline ComplexMatrix build_full_hamiltonian(const ModelParams& p) {
    p.validate();
    const SpinBasisSpec spec = p.basis();
    const ComplexMatrix id_b = ComplexMatrix::Identity(spec.dim(), spec.dim());
    const ComplexMatrix id_d = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix up_projector2 = id_d + pauli_z();  // 2 |up><up|
    return kron(build_hb(p), id_d) - (0.5 * p.delta) * kron(id_b, up_projector2) +
           p.beta * kron(build_sx(spec), up_projector2);
}

/// 1 (x) sigma_x on the composite space.
inline ComplexMatrix build_dot_sigma_x(const ModelParams& p) {
    p.validate();
    return kron(ComplexMatrix::Identity(p.dim(), p.dim()), pauli_x());
}

/// 1 (x) sigma_z on the composite space.
inline ComplexMatrix build_dot_sigma_z(const ModelParams& p) {
    p.validate();
    return kron(ComplexMatrix::Identity(p.dim(), p.dim()), pauli_z());
}

}  // namespace ttc
