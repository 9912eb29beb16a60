#pragma once

// n-fold two-time-correlator amplitudes, survival probabilities, participation
// ratios and the random-matrix saturation values they are compared against.

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ttc/errors.hpp"
#include "ttc/floquet.hpp"
#include "ttc/model.hpp"
#include "ttc/parallel.hpp"
#include "ttc/spin_algebra.hpp"

namespace ttc {

/// Normalized amplitude vector in the S_z (Fock) basis.
class QuantumState {
public:
    /// Requires ||amplitudes|| = 1 within 1e-12.
    explicit QuantumState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.size() == 0) throw InvalidArgument("QuantumState: empty amplitude vector");
        if (std::abs(amps_.norm() - 1.0) > 1e-12)
            throw ContractViolation("QuantumState: amplitudes are not normalized");
    }

    static QuantumState normalized(ComplexVector amplitudes) {
        const double norm = amplitudes.norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw InvalidArgument("QuantumState: amplitudes have zero or non-finite norm");
        return QuantumState(amplitudes / norm);
    }

    const ComplexVector& amplitudes() const noexcept { return amps_; }
    Eigen::Index dim() const noexcept { return amps_.size(); }

private:
    ComplexVector amps_;
};

enum class BasisKind { sz_fock, sx_eigen, random_haar };

inline std::string to_string(BasisKind k) {
    switch (k) {
        case BasisKind::sz_fock: return "sz_fock";
        case BasisKind::sx_eigen: return "sx_eigen";
        case BasisKind::random_haar: return "random_haar";
    }
    return "unknown";
}

/// Orthonormal collection of states stored as the columns of `states`.
struct StateBasis {
    ComplexMatrix states;
    BasisKind kind = BasisKind::sz_fock;
    std::uint64_t seed = 0;  // meaningful for random_haar only

    std::string label() const {
        return kind == BasisKind::random_haar ? "random_haar(" + std::to_string(seed) + ")"
                                              : to_string(kind);
    }
};

inline double orthonormality_defect(const ComplexMatrix& columns) {
    return max_abs(columns.adjoint() * columns -
                   ComplexMatrix::Identity(columns.cols(), columns.cols()));
}

// ---------------------------------------------------------------------------
// RMT references

struct RmtSaturation {
    double ipr_cue;   // 2D/(D+1), basis-summed
    double ipr_coe;   // 3D/(D+2), basis-summed
    double p_cue;     // 2/(D+1), single state
    double p_coe;     // 3/(D+2), single state
    double t_th_cue;  // (3/2pi)^(1/4)
    double t_th_coe;  // (3/pi)^(1/4)
};

inline RmtSaturation rmt_saturation(Eigen::Index dim) {
    if (dim < 1) throw InvalidArgument("rmt_saturation: dimension must be >= 1");
    const double d = static_cast<double>(dim);
    return {2.0 * d / (d + 1.0),
            3.0 * d / (d + 2.0),
            2.0 / (d + 1.0),
            3.0 / (d + 2.0),
            std::pow(3.0 / two_pi, 0.25),
            std::pow(3.0 / pi, 0.25)};
}

// ---------------------------------------------------------------------------
// States and bases

struct FockState {
    double m;
};
struct XPolarized {};
struct GaussianState {};
struct CustomAmplitudes {
    ComplexVector amplitudes;
};

using StateSpec = std::variant<FockState, XPolarized, GaussianState, CustomAmplitudes>;

inline QuantumState make_state(const StateSpec& spec, const SpinBasisSpec& basis) {
    const Eigen::Index d = basis.dim();
    return std::visit(
        [&](const auto& s) -> QuantumState {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, FockState>) {
                const Eigen::Index k = basis.index_of(s.m);
                if (k < 0)
                    throw InvalidArgument("make_state: m = " + std::to_string(s.m) +
                                          " is not an S_z eigenvalue for N = " +
                                          std::to_string(basis.particles()));
                return QuantumState(ComplexVector::Unit(d, k));
            } else if constexpr (std::is_same_v<S, XPolarized>) {
                // |N/2>_x = exp(-i S_y pi/2) |N/2>
                const ComplexMatrix rot = expm_hermitian(build_sy(basis), cplx(0.0, -0.5 * pi));
                return QuantumState::normalized(rot.col(d - 1));
            } else if constexpr (std::is_same_v<S, GaussianState>) {
                ComplexVector v(d);
                const double n = basis.particles();
                for (Eigen::Index k = 0; k < d; ++k) {
                    const double m = basis.m_at(k);
                    v(k) = std::exp(-m * m / (4.0 * n));
                }
                return QuantumState::normalized(std::move(v));
            } else {
                if (s.amplitudes.size() != d)
                    throw InvalidArgument("make_state: custom amplitudes have length " +
                                          std::to_string(s.amplitudes.size()) + ", expected " +
                                          std::to_string(d));
                return QuantumState::normalized(s.amplitudes);
            }
        },
        spec);
}

inline StateBasis make_sz_basis(const SpinBasisSpec& spec) {
    return {ComplexMatrix::Identity(spec.dim(), spec.dim()), BasisKind::sz_fock, 0};
}

inline StateBasis make_sx_basis(const SpinBasisSpec& spec) {
    return {eig_hermitian(build_sx(spec)).eigenvectors, BasisKind::sx_eigen, 0};
}

/// Haar-distributed orthonormal basis: QR of an i.i.d. complex Gaussian
/// matrix with the phases of diag(R) pushed back into Q.
inline StateBasis make_random_basis(Eigen::Index dim, std::uint64_t seed) {
    if (dim < 1) throw InvalidArgument("make_random_basis: dimension must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexMatrix g(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            g(i, j) = cplx(re, im) * std::sqrt(0.5);
        }
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
    const ComplexMatrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < dim; ++j) {
        const cplx rjj = r(j, j);
        if (std::abs(rjj) > 0.0) q.col(j) *= rjj / std::abs(rjj);
    }
    return {std::move(q), BasisKind::random_haar, seed};
}

// ---------------------------------------------------------------------------
// Participation ratios

/// IPR = sum_a |<v_a|psi>|^4 over the columns of `reference` (1 / PR).
inline double ipr_of_state(const QuantumState& state, const ComplexMatrix& reference) {
    if (reference.rows() != state.dim() || reference.cols() != state.dim())
        throw InvalidArgument("ipr_of_state: reference basis has the wrong shape");
    if (unitarity_defect(reference) > 1e-8)
        throw ContractViolation("ipr_of_state: reference basis is not unitary");
    const RealVector w = (reference.adjoint() * state.amplitudes()).cwiseAbs2();
    return w.cwiseAbs2().sum();
}

/// sum_{i,j} |<v_j|psi_i>|^4 for basis states psi_i and reference vectors v_j.
inline double basis_ipr(const ComplexMatrix& basis, const ComplexMatrix& reference) {
    const Eigen::MatrixXd w = (reference.adjoint() * basis).cwiseAbs2();
    return w.cwiseAbs2().sum();
}

// ---------------------------------------------------------------------------
// Correlator amplitudes and survival

struct AverageWindow {
    double t_lo;
    double t_hi;
};

inline constexpr double default_t_max = 20.0;
inline constexpr std::size_t default_t_samples = 2000;

/// [max(2 t_Th, 2), t_max]. Both Thouless times are below 1, so the lower
/// edge is 2 unless the caller's t_max is smaller.
inline AverageWindow default_window(double t_max = default_t_max) {
    const RmtSaturation refs = rmt_saturation(1);
    const double t_th = std::max(refs.t_th_cue, refs.t_th_coe);
    return {std::max(2.0 * t_th, 2.0), t_max};
}

/// t_max/samples, 2 t_max/samples, ..., t_max.
inline std::vector<double> default_survival_grid(double t_max = default_t_max,
                                                 std::size_t samples = default_t_samples) {
    return linear_grid(t_max / static_cast<double>(samples), t_max, samples);
}

struct SurvivalSeries {
    std::vector<double> t_grid;
    std::vector<double> values;
    int n = 0;
    double long_time_avg = 0.0;
    AverageWindow window{0.0, 0.0};
};

inline double window_average(const std::vector<double>& t_grid, const std::vector<double>& values,
                             const AverageWindow& w) {
    std::vector<double> picked;
    for (std::size_t i = 0; i < t_grid.size(); ++i)
        if (t_grid[i] >= w.t_lo && t_grid[i] <= w.t_hi) picked.push_back(values[i]);
    if (picked.empty()) return std::nan("");
    return pairwise_sum(picked) / static_cast<double>(picked.size());
}

namespace detail {
// <psi_i| F^n |psi_i> for every column psi_i of `states`.
inline ComplexVector diagonal_amplitudes(const UnitaryEigenSystem& es, const ComplexMatrix& states,
                                         int n) {
    const ComplexVector phases =
        (es.eigenphases.cast<cplx>() * cplx(0.0, static_cast<double>(n))).array().exp().matrix();
    const Eigen::MatrixXd weights = (es.eigenvectors.adjoint() * states).cwiseAbs2();
    return weights.cast<cplx>().transpose() * phases;
}

inline void check_order(int n, const char* who) {
    if (n < 1) throw InvalidArgument(std::string(who) + ": TTC order n must be >= 1");
}
}  // namespace detail

/// F_n(t) = <psi| F(t)^n |psi>
inline cplx ttc_amplitude(const ModelParams& p, const QuantumState& state, double t, int n) {
    detail::check_order(n, "ttc_amplitude");
    if (state.dim() != p.dim()) throw InvalidArgument("ttc_amplitude: state dimension mismatch");
    if (t == 0.0) return cplx(1.0, 0.0);
    const auto fd = build_floquet(p, t);
    return detail::diagonal_amplitudes(fd.eigen, state.amplitudes(), n)(0);
}

inline SurvivalSeries survival_probability(const ModelParams& p, const QuantumState& state,
                                           const std::vector<double>& t_grid, int n,
                                           AverageWindow window = default_window(),
                                           unsigned threads = 0) {
    detail::check_order(n, "survival_probability");
    require_ascending_grid(t_grid, "survival_probability");
    if (state.dim() != p.dim())
        throw InvalidArgument("survival_probability: state dimension mismatch");
    const FloquetFactory factory(p);
    SurvivalSeries out{t_grid, std::vector<double>(t_grid.size()), n, 0.0, window};
    parallel_for(t_grid.size(), threads, [&](std::size_t i) {
        const double t = t_grid[i];
        if (t == 0.0) {
            out.values[i] = 1.0;
            return;
        }
        const auto fd = factory.decompose(t);
        out.values[i] = std::norm(detail::diagonal_amplitudes(fd.eigen, state.amplitudes(), n)(0));
    });
    out.long_time_avg = window_average(out.t_grid, out.values, window);
    return out;
}

/// Sum (not mean) over the basis of the per-state survival probabilities,
/// so identity evolution gives D and RMT saturation is ~2 (CUE) or ~3 (COE).
inline SurvivalSeries basis_averaged_survival(const ModelParams& p, const StateBasis& basis,
                                              const std::vector<double>& t_grid, int n,
                                              AverageWindow window = default_window(),
                                              unsigned threads = 0) {
    detail::check_order(n, "basis_averaged_survival");
    require_ascending_grid(t_grid, "basis_averaged_survival");
    if (basis.states.rows() != p.dim() || basis.states.cols() != p.dim())
        throw InvalidArgument("basis_averaged_survival: basis dimension mismatch");
    if (orthonormality_defect(basis.states) > 1e-10)
        throw ContractViolation("basis_averaged_survival: basis is not orthonormal within 1e-10");
    const FloquetFactory factory(p);
    SurvivalSeries out{t_grid, std::vector<double>(t_grid.size()), n, 0.0, window};
    parallel_for(t_grid.size(), threads, [&](std::size_t i) {
        const double t = t_grid[i];
        if (t == 0.0) {
            out.values[i] = static_cast<double>(p.dim());
            return;
        }
        const auto fd = factory.decompose(t);
        const ComplexVector amps = detail::diagonal_amplitudes(fd.eigen, basis.states, n);
        std::vector<double> probs(static_cast<std::size_t>(amps.size()));
        for (Eigen::Index k = 0; k < amps.size(); ++k) probs[static_cast<std::size_t>(k)] = std::norm(amps(k));
        out.values[i] = pairwise_sum(probs);
    });
    out.long_time_avg = window_average(out.t_grid, out.values, window);
    return out;
}

/// Basis-summed IPR over the Floquet eigenvectors at each grid time: the
/// diagonal-approximation prediction for basis_averaged_survival.
inline std::vector<double> basis_ipr_series(const ModelParams& p, const StateBasis& basis,
                                            const std::vector<double>& t_grid,
                                            unsigned threads = 0) {
    require_ascending_grid(t_grid, "basis_ipr_series");
    const FloquetFactory factory(p);
    std::vector<double> out(t_grid.size());
    parallel_for(t_grid.size(), threads, [&](std::size_t i) {
        out[i] = basis_ipr(basis.states, factory.decompose(t_grid[i]).eigen.eigenvectors);
    });
    return out;
}

// ---------------------------------------------------------------------------
// Brute-force check of the reduction to the boson-only Floquet form

inline constexpr int max_reduction_particles = 64;

struct ReductionRow {
    double t;
    cplx full;
    cplx reduced;
    double discrepancy;
};

/// Evaluates <Psi| [exp(iHt) sigma_x exp(-iHt) sigma_x]^n |Psi> on the full
/// boson (x) probe space with |Psi> = |psi> (x) |sigma_z = -1>, the probe level
/// annihilated by (1 + sigma_z), and compares it with <psi|F^n|psi>.
///
/// With beta != alpha_x/2 the reduced side uses the hopping-carrying H_2.
/// With delta != 0 the two sides differ by the phase exp(i n delta t), so only
/// the moduli are compared.
inline std::vector<ReductionRow> verify_reduction(const ModelParams& p, const QuantumState& state,
                                                  const std::vector<double>& t_grid, int n,
                                                  unsigned threads = 0) {
    p.validate();
    if (p.N > max_reduction_particles)
        throw InvalidArgument("verify_reduction: N = " + std::to_string(p.N) +
                              " exceeds the brute-force limit of " +
                              std::to_string(max_reduction_particles));
    if (n < 0) throw InvalidArgument("verify_reduction: order n must be >= 0");
    if (state.dim() != p.dim()) throw InvalidArgument("verify_reduction: state dimension mismatch");
    require_ascending_grid(t_grid, "verify_reduction");

    const Eigen::Index d = p.dim();
    ComplexVector psi_full = ComplexVector::Zero(2 * d);
    for (Eigen::Index k = 0; k < d; ++k) psi_full(2 * k + 1) = state.amplitudes()(k);

    const HermitianEigenSystem h_full = eig_hermitian(build_full_hamiltonian(p));
    const ComplexMatrix sigma_x = build_dot_sigma_x(p);
    const FloquetFactory factory(p, /*general_beta=*/true);
    const bool phase_free = p.delta != 0.0;

    std::vector<ReductionRow> rows(t_grid.size());
    parallel_for(t_grid.size(), threads, [&](std::size_t i) {
        const double t = t_grid[i];
        const ComplexMatrix u = expm_hermitian(h_full, cplx(0.0, -t));
        const ComplexMatrix step = u.adjoint() * sigma_x * u * sigma_x;
        ComplexVector v = psi_full;
        for (int k = 0; k < n; ++k) v = step * v;
        const cplx full = psi_full.dot(v);

        cplx reduced(1.0, 0.0);
        if (n > 0) {
            const auto fd = factory.decompose(t);
            reduced = detail::diagonal_amplitudes(fd.eigen, state.amplitudes(), n)(0);
        }
        const double disc =
            phase_free ? std::abs(std::abs(full) - std::abs(reduced)) : std::abs(full - reduced);
        rows[i] = {t, full, reduced, disc};
    });
    return rows;
}

}  // namespace ttc
