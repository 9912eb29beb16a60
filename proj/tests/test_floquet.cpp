#include <catch_amalgamated.hpp>

#include "ttc/floquet.hpp"

using namespace ttc;

namespace {
ComplexMatrix parity(Eigen::Index d) {
    ComplexMatrix p = ComplexMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) p(k, d - 1 - k) = 1.0;
    return p;
}
}  // namespace

TEST_CASE("Floquet operator basics") {
    const auto p = ModelParams::paper_default(8);
    const auto f0 = build_floquet(p, 0.0);
    CHECK(max_abs(f0.F - ComplexMatrix::Identity(9, 9)) < 1e-15);
    CHECK(f0.eigen.eigenphases.cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(build_floquet(p, -0.1), InvalidArgument);

    SECTION("definition") {
        const double t = 0.8;
        const ComplexMatrix expect =
            expm_hermitian(build_h1(p), cplx(0, -t)) * expm_hermitian(build_h2(p), cplx(0, -t));
        CHECK(max_abs(build_floquet(p, t).F - expect) < 1e-12);
    }

    SECTION("commuting limit") {
        auto q = ModelParams::paper_default(6);
        q.k_z = 0.0;
        q.alpha_z = 0.0;
        const double t = 1.3;
        const auto fd = build_floquet(q, t);
        CHECK(max_abs(fd.F - expm_hermitian(build_sx(q.basis()), cplx(0, -t))) < 1e-12);
        std::vector<double> expect;
        for (double m : q.basis().m_values()) expect.push_back(wrap_phase(q.alpha_x * m * t));
        std::sort(expect.begin(), expect.end());
        for (int k = 0; k < 7; ++k) CHECK(std::abs(fd.eigen.eigenphases(k) - expect[k]) < 1e-10);
    }
}

TEST_CASE("unitarity and determinant") {
    for (int n : {1, 5, 12, 30})
        for (double t : {0.01, 0.4, 1.0, 2.7, 7.5}) {
            const auto fd = build_floquet(ModelParams::paper_default(n), t);
            CHECK(unitarity_defect(fd.F) < 1e-10);
            CHECK(std::abs(std::abs(fd.F.determinant()) - 1.0) < 1e-9);
            const cplx from_phases = std::exp(cplx(0, fd.eigen.eigenphases.sum()));
            CHECK(std::abs(fd.F.determinant() - from_phases) < 1e-9);
            for (Eigen::Index k = 0; k < fd.eigen.eigenphases.size(); ++k) {
                CHECK(fd.eigen.eigenphases(k) >= -pi);
                CHECK(fd.eigen.eigenphases(k) < pi);
            }
        }
}

TEST_CASE("powers") {
    const auto fd = build_floquet(ModelParams::paper_default(8), 1.1);
    CHECK(max_abs(floquet_power(fd, 0) - ComplexMatrix::Identity(9, 9)) == 0.0);
    CHECK(max_abs(floquet_power(fd, 1) - fd.F) < 1e-10);
    CHECK(max_abs(floquet_power(fd, 4) - fd.F * fd.F * fd.F * fd.F) < 1e-9);
    CHECK(unitarity_defect(floquet_power(fd, 50)) < 1e-9);
    CHECK_THROWS_AS(floquet_power(fd, -1), InvalidArgument);
}

TEST_CASE("symmetrized operator") {
    const auto p = ModelParams::paper_default(20);
    CHECK(max_abs(build_ut(p, 0.0, 1) - ComplexMatrix::Identity(21, 21)) < 1e-14);
    const ComplexMatrix u = build_ut(p, 2.7, 5);
    CHECK(max_abs(u - u.transpose()) < 1e-9);
    CHECK(unitarity_defect(u) < 1e-9);
    CHECK_THROWS_AS(build_ut(p, 1.0, 0), InvalidArgument);
}

TEST_CASE("parity symmetry at zero tilt") {
    auto p = ModelParams::paper_default(9);
    p.alpha_z = 0.0;
    const ComplexMatrix pi_op = parity(p.dim());
    for (double t : {0.3, 1.7, 4.0}) {
        const ComplexMatrix f = build_floquet(p, t).F;
        CHECK(max_abs(f * pi_op - pi_op * f) < 1e-10);
    }
    p.alpha_z = 0.01;
    const ComplexMatrix f = build_floquet(p, 1.7).F;
    CHECK(max_abs(f * pi_op - pi_op * f) > 1e-4);
}

TEST_CASE("short-time BCH residual is quadratic") {
    const auto p = ModelParams::paper_default(10);
    CHECK(bch_short_time_residual(p, 0.0) == 0.0);
    const double ratio = bch_short_time_residual(p, 0.02) / bch_short_time_residual(p, 0.01);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);

    auto q = p;
    q.k_z = 0.0;
    q.alpha_z = 0.0;
    for (double t : {0.1, 1.0, 5.0}) CHECK(bch_short_time_residual(q, t) < 1e-12);
}

TEST_CASE("eigenphase sweep") {
    const auto p = ModelParams::paper_default(16);
    const auto zero = eigenphase_sweep(p, {0.0});
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].phases.cwiseAbs().maxCoeff() < 1e-12);

    const auto grid = linear_grid(0.0, 2.5, 26);
    const auto rows = eigenphase_sweep(p, grid, 3);
    REQUIRE(rows.size() == grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].t == grid[i]);
        CHECK(rows[i].phases.size() == 17);
    }
    // thread count does not change the output
    const auto serial = eigenphase_sweep(p, grid, 1);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].phases == serial[i].phases);

    SECTION("regular then winding") {
        // Before the onset every eigenphase is still close to -epsilon t for a
        // quasi-energy epsilon of H_1 + H_2, so nothing has wrapped through -pi.
        const ComplexMatrix hsum = build_h1(p) + build_h2(p);
        const double spread = eig_hermitian(hsum).eigenvalues.cwiseAbs().maxCoeff();
        CHECK(spread * 0.3 < pi);
        CHECK(spread * 1.0 > pi);
    }

    CHECK_THROWS_AS(eigenphase_sweep(p, {}), InvalidArgument);
    CHECK_THROWS_AS(eigenphase_sweep(p, {1.0, 0.5}), InvalidArgument);
}

TEST_CASE("linear grid") {
    const auto g = linear_grid(0.0, 1.0, 11);
    REQUIRE(g.size() == 11);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 1.0);
    CHECK(g[5] == Catch::Approx(0.5));
    CHECK(linear_grid(2.0, 3.0, 1) == std::vector<double>{2.0});
}
