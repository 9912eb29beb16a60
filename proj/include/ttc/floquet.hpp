#pragma once

// Floquet operator F(t) = exp(-i H_1 t) exp(-i H_2 t) of the n-fold
// two-time correlator, its powers, and eigenphase sweeps.

#include <Eigen/SVD>

#include <string>
#include <vector>

#include "ttc/errors.hpp"
#include "ttc/model.hpp"
#include "ttc/parallel.hpp"
#include "ttc/spin_algebra.hpp"

namespace ttc {

struct FloquetDecomposition {
    double t = 0.0;
    ComplexMatrix F;
    UnitaryEigenSystem eigen;
};

/// Caches the spectral data of H_1 (and H_2) so that F(t) costs two
/// products and one Schur decomposition per time point.
class FloquetFactory {
public:
    explicit FloquetFactory(const ModelParams& p, bool general_beta = false)
        : params_(p), general_beta_(general_beta && !p.balanced_coupling()) {
        p.validate();
        h1_ = eig_hermitian(build_h1(p));
        if (general_beta_) {
            h2_general_ = eig_hermitian(build_h2(p, true));
        } else {
            h2_diag_ = h2_diagonal(p);
        }
    }

    const ModelParams& params() const noexcept { return params_; }

    ComplexMatrix forward(double t) const { return expm_hermitian(h1_, cplx(0.0, -t)); }

    /// exp(sign * i H_2 t)
    ComplexMatrix backward(double t, double sign = -1.0) const {
        if (general_beta_) return expm_hermitian(h2_general_, cplx(0.0, sign * t));
        const ComplexVector phases =
            (h2_diag_.cast<cplx>() * cplx(0.0, sign * t)).array().exp().matrix();
        return phases.asDiagonal();
    }

    ComplexMatrix floquet(double t) const {
        if (general_beta_) return forward(t) * backward(t);
        const ComplexVector phases =
            (h2_diag_.cast<cplx>() * cplx(0.0, -t)).array().exp().matrix();
        return forward(t) * phases.asDiagonal();
    }

    FloquetDecomposition decompose(double t) const {
        if (!(t >= 0.0))
            throw InvalidArgument("build_floquet: t must be >= 0, got " + std::to_string(t));
        FloquetDecomposition fd;
        fd.t = t;
        fd.F = floquet(t);
        fd.eigen = eig_unitary(fd.F);
        return fd;
    }

private:
    ModelParams params_;
    bool general_beta_;
    HermitianEigenSystem h1_;
    HermitianEigenSystem h2_general_;
    RealVector h2_diag_;
};

inline FloquetDecomposition build_floquet(const ModelParams& p, double t,
                                          bool general_beta = false) {
    return FloquetFactory(p, general_beta).decompose(t);
}

inline ComplexMatrix floquet_power(const FloquetDecomposition& fd, int n) {
    if (n < 0) throw InvalidArgument("floquet_power: order n must be >= 0");
    if (n == 0) return ComplexMatrix::Identity(fd.F.rows(), fd.F.cols());
    return unitary_power(fd.eigen, n);
}

/// U_t = F^n exp(+i H_2 t); transpose-symmetric when S_x and S_z are real.
inline ComplexMatrix build_ut(const ModelParams& p, double t, int n) {
    if (n < 1) throw InvalidArgument("build_ut: order n must be >= 1");
    const FloquetFactory factory(p);
    return floquet_power(factory.decompose(t), n) * factory.backward(t, +1.0);
}

/// Spectral-norm distance between F(t) and exp(-i (H_1 + H_2) t). The first
/// neglected term is the commutator, so this scales as t^2.
inline double bch_short_time_residual(const ModelParams& p, double t) {
    if (t == 0.0) return 0.0;
    const FloquetFactory factory(p);
    const ComplexMatrix sum = build_h1(p) + build_h2(p);
    const ComplexMatrix diff = factory.floquet(t) - expm_hermitian(sum, cplx(0.0, -t));
    Eigen::JacobiSVD<ComplexMatrix> svd(diff);
    return svd.singularValues()(0);
}

inline void require_ascending_grid(const std::vector<double>& t_grid, const char* who) {
    if (t_grid.empty()) throw InvalidArgument(std::string(who) + ": time grid is empty");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] >= t_grid[i - 1]))
            throw InvalidArgument(std::string(who) + ": time grid must be ascending");
    if (!(t_grid.front() >= 0.0))
        throw InvalidArgument(std::string(who) + ": times must be >= 0");
}

struct EigenphaseRow {
    double t;
    RealVector phases;
};

/// One row of sorted eigenphases per grid time, in grid order.
inline std::vector<EigenphaseRow> eigenphase_sweep(const ModelParams& p,
                                                   const std::vector<double>& t_grid,
                                                   unsigned threads = 0) {
    require_ascending_grid(t_grid, "eigenphase_sweep");
    const FloquetFactory factory(p);
    std::vector<EigenphaseRow> rows(t_grid.size());
    parallel_for(t_grid.size(), threads, [&](std::size_t i) {
        rows[i] = {t_grid[i], factory.decompose(t_grid[i]).eigen.eigenphases};
    });
    return rows;
}

/// Uniform grid with `steps` points from t_min to t_max inclusive
/// (a single point at t_min when steps == 1).
inline std::vector<double> linear_grid(double t_min, double t_max, std::size_t steps) {
    std::vector<double> out(steps);
    if (steps == 1) {
        out[0] = t_min;
        return out;
    }
    for (std::size_t i = 0; i < steps; ++i)
        out[i] = t_min + (t_max - t_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
    return out;
}

}  // namespace ttc
