#include <catch_amalgamated.hpp>

#include "ttc/survival.hpp"

using namespace ttc;
using Catch::Approx;

TEST_CASE("quantum states") {
    CHECK_THROWS_AS(QuantumState(ComplexVector::Constant(3, 1.0)), ContractViolation);
    CHECK_THROWS_AS(QuantumState::normalized(ComplexVector::Zero(3)), InvalidArgument);
    CHECK(QuantumState::normalized(ComplexVector::Constant(4, 2.0)).amplitudes().norm() ==
          Approx(1.0).epsilon(1e-15));

    const SpinBasisSpec b1(1);
    const auto x1 = make_state(XPolarized{}, b1);
    CHECK(std::abs(x1.amplitudes()(0) - cplx(1 / std::sqrt(2.0), 0)) < 1e-14);
    CHECK(std::abs(x1.amplitudes()(1) - cplx(1 / std::sqrt(2.0), 0)) < 1e-14);

    const SpinBasisSpec b40(40);
    const auto x40 = make_state(XPolarized{}, b40);
    const cplx sx = x40.amplitudes().dot(build_sx(b40) * x40.amplitudes());
    CHECK(std::abs(sx - cplx(20.0, 0.0)) < 1e-9);

    const auto g = make_state(GaussianState{}, SpinBasisSpec(200));
    CHECK(std::abs(g.amplitudes().norm() - 1.0) < 1e-14);
    CHECK(g.amplitudes()(100).real() > g.amplitudes()(0).real());

    const auto f = make_state(FockState{1.0}, SpinBasisSpec(4));
    CHECK(f.amplitudes()(3) == cplx(1, 0));
    CHECK_THROWS_AS(make_state(FockState{0.5}, SpinBasisSpec(4)), InvalidArgument);
    CHECK_THROWS_AS(make_state(FockState{3.0}, SpinBasisSpec(4)), InvalidArgument);
    CHECK_THROWS_AS(make_state(CustomAmplitudes{ComplexVector::Ones(3)}, SpinBasisSpec(4)),
                    InvalidArgument);
}

TEST_CASE("RMT saturation references") {
    const auto r61 = rmt_saturation(61);
    CHECK(std::abs(r61.ipr_cue - 122.0 / 62.0) < 1e-12);
    CHECK(std::abs(r61.ipr_coe - 183.0 / 63.0) < 1e-12);
    CHECK(std::abs(rmt_saturation(201).p_cue - 2.0 / 202.0) < 1e-12);
    CHECK(std::abs(r61.t_th_cue - std::pow(3.0 / (2.0 * pi), 0.25)) < 1e-12);
    CHECK(std::abs(r61.t_th_coe - std::pow(3.0 / pi, 0.25)) < 1e-12);
    CHECK(r61.t_th_cue == Approx(0.8313).margin(1e-4));
    CHECK(r61.t_th_coe == Approx(0.9885).margin(1e-4));
    double prev_cue = 0.0, prev_coe = 0.0;
    for (int d = 1; d < 2000; d += 37) {
        const auto r = rmt_saturation(d);
        CHECK(r.ipr_cue > prev_cue);
        CHECK(r.ipr_coe > prev_coe);
        CHECK(r.ipr_cue < 2.0);
        CHECK(r.ipr_coe < 3.0);
        prev_cue = r.ipr_cue;
        prev_coe = r.ipr_coe;
    }
    CHECK_THROWS_AS(rmt_saturation(0), InvalidArgument);
}

TEST_CASE("random basis") {
    const auto a = make_random_basis(20, 1);
    const auto b = make_random_basis(20, 1);
    const auto c = make_random_basis(20, 2);
    CHECK(orthonormality_defect(a.states) < 1e-10);
    CHECK(a.states == b.states);
    CHECK((a.states - c.states).norm() > 0.0);
    CHECK(a.label().find("random_haar") != std::string::npos);

    SECTION("Haar moment of the first column") {
        const int d = 16, seeds = 1000;
        std::vector<double> w;
        for (int s = 0; s < seeds; ++s) w.push_back(std::norm(make_random_basis(d, s).states(0, 0)));
        const double mean = pairwise_sum(w) / seeds;
        const double var = (d - 1.0) / (d * d * (d + 1.0));
        CHECK(std::abs(mean - 1.0 / d) < 3.0 * std::sqrt(var / seeds));
    }
}

TEST_CASE("inverse participation ratio") {
    const auto ref = make_random_basis(12, 3).states;
    CHECK(ipr_of_state(QuantumState(ref.col(4)), ref) == Approx(1.0).epsilon(1e-12));
    const ComplexVector uniform = ref * ComplexVector::Ones(12) / std::sqrt(12.0);
    CHECK(ipr_of_state(QuantumState::normalized(uniform), ref) == Approx(1.0 / 12).epsilon(1e-12));
    CHECK_THROWS_AS(ipr_of_state(QuantumState(ref.col(0)), 2.0 * ref), ContractViolation);

    SECTION("Haar states") {
        const int d = 61;
        const ComplexMatrix id = ComplexMatrix::Identity(d, d);
        std::vector<double> v;
        for (int s = 0; s < 1000; ++s)
            v.push_back(ipr_of_state(QuantumState(make_random_basis(d, 1000 + s).states.col(0)), id));
        const double mean = pairwise_sum(v) / v.size();
        CHECK(std::abs(mean / (2.0 / (d + 1)) - 1.0) < 0.05);
    }
}

TEST_CASE("correlator amplitudes") {
    const auto p = ModelParams::paper_default(8);
    const auto psi = make_state(XPolarized{}, p.basis());
    CHECK(ttc_amplitude(p, psi, 0.0, 3) == cplx(1.0, 0.0));
    CHECK_THROWS_AS(ttc_amplitude(p, psi, 1.0, 0), InvalidArgument);

    const double t = 1.4;
    const ComplexMatrix f = build_floquet(p, t).F;
    ComplexVector v = psi.amplitudes();
    for (int k = 0; k < 7; ++k) v = f * v;
    CHECK(std::abs(ttc_amplitude(p, psi, t, 7) - psi.amplitudes().dot(v)) < 1e-10);

    const auto fd = build_floquet(p, t);
    const QuantumState eig(fd.eigen.eigenvectors.col(3));
    for (int n : {1, 5, 40}) CHECK(std::abs(ttc_amplitude(p, eig, t, n)) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("survival probability series") {
    const auto p = ModelParams::paper_default(12);
    const auto psi = make_state(GaussianState{}, p.basis());
    const auto grid = linear_grid(0.0, 6.0, 61);
    const auto s = survival_probability(p, psi, grid, 5, {2.0, 6.0}, 2);
    CHECK(s.values[0] == 1.0);
    for (double v : s.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-9);
    }
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] >= 2.0 && grid[i] <= 6.0) sum += s.values[i], ++count;
    CHECK(s.long_time_avg == Approx(sum / count).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); i += 10)
        CHECK(s.values[i] == Approx(std::norm(ttc_amplitude(p, psi, grid[i], 5))).epsilon(1e-10));

    const auto serial = survival_probability(p, psi, grid, 5, {2.0, 6.0}, 1);
    CHECK(serial.values == s.values);

    CHECK_THROWS_AS(survival_probability(p, make_state(XPolarized{}, SpinBasisSpec(3)), grid, 5),
                    InvalidArgument);
    CHECK_THROWS_AS(survival_probability(p, psi, {1.0, 0.0}, 5), InvalidArgument);
}

TEST_CASE("default window and grid") {
    const auto w = default_window();
    CHECK(w.t_lo == 2.0);
    CHECK(w.t_hi == 20.0);
    const auto g = default_survival_grid();
    CHECK(g.size() == 2000);
    CHECK(g.front() == Approx(0.01));
    CHECK(g.back() == 20.0);
}

TEST_CASE("basis-summed survival") {
    const auto p = ModelParams::paper_default(10);
    const auto grid = linear_grid(0.0, 8.0, 41);
    const auto basis = make_random_basis(p.dim(), 9);
    const auto s = basis_averaged_survival(p, basis, grid, 4, {2.0, 8.0}, 2);
    CHECK(s.values[0] == 11.0);
    for (double v : s.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 11.0 + 1e-9);
    }
    CHECK(s.long_time_avg >= 1.0);

    SECTION("permutation invariance") {
        StateBasis shuffled = basis;
        for (Eigen::Index k = 0; k < 11; ++k) shuffled.states.col(k) = basis.states.col((k * 4) % 11);
        const auto s2 = basis_averaged_survival(p, shuffled, grid, 4, {2.0, 8.0}, 2);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(s2.values[i] == Approx(s.values[i]).epsilon(1e-12));
    }

    SECTION("equals the sum of single-state probabilities") {
        const auto sz = make_sz_basis(p.basis());
        const auto total = basis_averaged_survival(p, sz, grid, 4, {2.0, 8.0}, 1);
        for (std::size_t i = 5; i < grid.size(); i += 9) {
            double acc = 0.0;
            for (double m : p.basis().m_values())
                acc += std::norm(ttc_amplitude(p, make_state(FockState{m}, p.basis()), grid[i], 4));
            CHECK(total.values[i] == Approx(acc).epsilon(1e-10));
        }
    }

    SECTION("non-orthonormal basis rejected") {
        StateBasis bad = basis;
        bad.states.col(1) = bad.states.col(0);
        CHECK_THROWS_AS(basis_averaged_survival(p, bad, grid, 4), ContractViolation);
    }
}

TEST_CASE("diagonal approximation") {
    const auto p = ModelParams::paper_default(30);
    const auto grid = default_survival_grid(20.0, 400);
    const auto basis = make_random_basis(p.dim(), 0);
    const AverageWindow w = default_window();
    const auto exact = basis_averaged_survival(p, basis, grid, 50, w);
    const auto ipr = basis_ipr_series(p, basis, grid);
    const double diag = window_average(grid, ipr, w);
    CHECK(std::abs(exact.long_time_avg / diag - 1.0) < 0.05);
}

TEST_CASE("sigma_x conjugation flips sigma_y and sigma_z") {
    const ComplexMatrix x = pauli_x(), y = pauli_y(), z = pauli_z();
    CHECK(max_abs(x * y * x + y) == 0.0);
    CHECK(max_abs(x * z * x + z) == 0.0);
    CHECK(max_abs(x * (y * z) * x - y * z) == 0.0);
}

TEST_CASE("reduction to the boson-only Floquet form") {
    const auto p = ModelParams::paper_default(4);
    const auto psi = make_state(XPolarized{}, p.basis());
    const std::vector<double> grid{0.3, 1.0, 4.0};

    for (const auto& row : verify_reduction(p, psi, grid, 3)) CHECK(row.discrepancy < 1e-10);

    for (const auto& row : verify_reduction(p, psi, grid, 0)) {
        CHECK(row.full == cplx(1.0, 0.0));
        CHECK(row.reduced == cplx(1.0, 0.0));
        CHECK(row.discrepancy == 0.0);
    }

    SECTION("probe splitting only adds a phase") {
        auto q = p;
        q.delta = 0.7;
        for (const auto& row : verify_reduction(q, psi, grid, 3)) CHECK(row.discrepancy < 1e-10);
    }

    SECTION("unbalanced coupling uses the hopping-carrying backward Hamiltonian") {
        auto q = p;
        q.beta = 0.2;
        const auto g = make_state(GaussianState{}, q.basis());
        for (const auto& row : verify_reduction(q, g, grid, 3)) CHECK(row.discrepancy < 1e-10);
    }

    SECTION("several sizes and orders") {
        for (int n_particles : {2, 8})
            for (int order : {1, 5}) {
                const auto q = ModelParams::paper_default(n_particles);
                const auto s = make_state(GaussianState{}, q.basis());
                for (const auto& row : verify_reduction(q, s, linear_grid(0.0, 5.0, 11), order))
                    CHECK(row.discrepancy < 1e-10);
            }
    }

    SECTION("size limit") {
        const auto big = ModelParams::paper_default(65);
        CHECK_THROWS_AS(verify_reduction(big, make_state(GaussianState{}, big.basis()), grid, 1),
                        InvalidArgument);
    }
}
