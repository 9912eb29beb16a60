#pragma once

// Mean-field (N -> infinity) dynamics on the Bloch sphere in canonical
// coordinates z = (n_L - n_R)/N and phi = phi_L - phi_R, with
// dz/dt = -dH/dphi and dphi/dt = dH/dz.

#include <array>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ttc/errors.hpp"
#include "ttc/model.hpp"
#include "ttc/parallel.hpp"
#include "ttc/spin_algebra.hpp"

namespace ttc {

struct ClassicalState {
    double z = 0.0;
    double phi = 0.0;
};

/// Boson coordinates plus the probe's population difference y (conserved)
/// and its phase varphi.
struct FullClassicalState {
    double z = 0.0;
    double phi = 0.0;
    double y = 0.0;
    double varphi = 0.0;
};

inline constexpr double pole_guard = 1e-12;
inline constexpr double default_dt = 1e-3;

namespace detail {
inline void check_pole(double z, double phi, const char* who) {
    if (!(std::abs(z) < 1.0 - pole_guard))
        throw PoleError(std::string(who) + ": trajectory reached the coordinate pole |z| = 1 (z = " +
                            std::to_string(z) + ", phi = " + std::to_string(phi) + ")",
                        z, phi);
}

inline std::size_t step_count(double duration, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("integration step dt must be positive");
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::abs(duration) / dt - 1e-9)));
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Energies

/// H_1 = -(k_z/4) z^2 + (alpha_x/2) sqrt(1-z^2) cos(phi) - (alpha_z/2) z
inline double h1_energy(const ModelParams& p, const ClassicalState& s) {
    return -0.25 * p.k_z * s.z * s.z + 0.5 * p.alpha_x * std::sqrt(1.0 - s.z * s.z) * std::cos(s.phi) -
           0.5 * p.alpha_z * s.z;
}

/// H_2 = (k_z/4) z^2 + (alpha_z/2) z
inline double h2_energy(const ModelParams& p, const ClassicalState& s) {
    return 0.25 * p.k_z * s.z * s.z + 0.5 * p.alpha_z * s.z;
}

/// Mean-field energy per particle of the full boson + probe Hamiltonian.
inline double full_energy(const ModelParams& p, const FullClassicalState& s) {
    const double root = std::sqrt(1.0 - s.z * s.z);
    const double probe = 1.0 + 0.5 * s.y;
    return 0.25 * p.k_z * s.z * s.z - 0.5 * p.alpha_x * root * std::cos(s.phi) +
           0.5 * p.alpha_z * s.z - p.delta / (2.0 * p.N) * probe +
           0.5 * p.beta * root * std::cos(s.phi) * probe;
}

// ---------------------------------------------------------------------------
// Flows

/// Exact H_2 flow: z is frozen, phi advances at k_z z/2 + alpha_z/2.
inline ClassicalState evolve_h2(const ModelParams& p, const ClassicalState& s, double duration) {
    return {s.z, wrap_phase(s.phi + (0.5 * p.k_z * s.z + 0.5 * p.alpha_z) * duration)};
}

namespace detail {
// Both flows are integrated on Cartesian Bloch vectors, ds/dt = grad(H) x s,
// which is smooth through the poles where the (z, phi) chart is not.
using Bloch = std::array<double, 3>;

inline Bloch to_bloch(double z, double phi) {
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

inline Bloch axpy(const Bloch& s, double a, const Bloch& k) {
    return {s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2]};
}

// Rotation rate for a Hamiltonian linear in x plus quadratic in z:
// H = gx * x + (cz / 2) * z^2 + gz * z, so grad(H) = (gx, 0, cz * z + gz).
inline Bloch bloch_rate(double gx, double cz, double gz, const Bloch& s) {
    const double hz = cz * s[2] + gz;
    return {-hz * s[1], hz * s[0] - gx * s[2], gx * s[1]};
}

inline Bloch rk4_bloch(double gx, double cz, double gz, const Bloch& s, double h) {
    const Bloch k1 = bloch_rate(gx, cz, gz, s);
    const Bloch k2 = bloch_rate(gx, cz, gz, axpy(s, 0.5 * h, k1));
    const Bloch k3 = bloch_rate(gx, cz, gz, axpy(s, 0.5 * h, k2));
    const Bloch k4 = bloch_rate(gx, cz, gz, axpy(s, h, k3));
    Bloch out;
    for (int i = 0; i < 3; ++i) out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    const double n = std::sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2]);
    for (auto& v : out) v /= n;
    return out;
}
}  // namespace detail

/// Fixed-step RK4 integration of the H_1 flow (step no larger than dt).
/// Negative durations integrate backwards.
inline ClassicalState evolve_h1(const ModelParams& p, const ClassicalState& s, double duration,
                                double dt = default_dt) {
    detail::check_pole(s.z, s.phi, "evolve_h1");
    if (duration == 0.0) return s;
    const std::size_t steps = detail::step_count(duration, dt);
    const double h = duration / static_cast<double>(steps);
    detail::Bloch b = detail::to_bloch(s.z, s.phi);
    for (std::size_t k = 0; k < steps; ++k) b = detail::rk4_bloch(0.5 * p.alpha_x, -0.5 * p.k_z, -0.5 * p.alpha_z, b, h);
    const ClassicalState out{b[2], std::atan2(b[1], b[0])};
    detail::check_pole(out.z, out.phi, "evolve_h1");
    return out;
}

/// RK4 integration of the full four-variable mean-field system. y is carried
/// through unchanged since its rate vanishes identically; varphi follows the
/// boson x coordinate.
inline FullClassicalState evolve_full_model(const ModelParams& p, const FullClassicalState& s,
                                            double duration, double dt = default_dt) {
    detail::check_pole(s.z, s.phi, "evolve_full_model");
    if (duration == 0.0) return s;
    const std::size_t steps = detail::step_count(duration, dt);
    const double h = duration / static_cast<double>(steps);
    // Effective hopping: the probe's sigma_z renormalizes alpha_x.
    const double hop = p.alpha_x - p.beta * (1.0 + 0.5 * s.y);
    const double gx = -0.5 * hop;
    const double shift = -p.delta / (4.0 * p.N);
    auto varphi_rate = [&](const detail::Bloch& b) { return 0.25 * p.beta * b[0] + shift; };
    detail::Bloch b = detail::to_bloch(s.z, s.phi);
    double varphi = s.varphi;
    for (std::size_t k = 0; k < steps; ++k) {
        // varphi is slaved to x, so its RK4 stages reuse the Bloch stages.
        const detail::Bloch k1 = detail::bloch_rate(gx, 0.5 * p.k_z, 0.5 * p.alpha_z, b);
        const detail::Bloch b2 = detail::axpy(b, 0.5 * h, k1);
        const detail::Bloch k2 = detail::bloch_rate(gx, 0.5 * p.k_z, 0.5 * p.alpha_z, b2);
        const detail::Bloch b3 = detail::axpy(b, 0.5 * h, k2);
        const detail::Bloch k3 = detail::bloch_rate(gx, 0.5 * p.k_z, 0.5 * p.alpha_z, b3);
        const detail::Bloch b4 = detail::axpy(b, h, k3);
        varphi += h / 6.0 * (varphi_rate(b) + 2.0 * varphi_rate(b2) + 2.0 * varphi_rate(b3) + varphi_rate(b4));
        b = detail::rk4_bloch(gx, 0.5 * p.k_z, 0.5 * p.alpha_z, b, h);
    }
    FullClassicalState out{b[2], std::atan2(b[1], b[0]), s.y, wrap_phase(varphi)};
    detail::check_pole(out.z, out.phi, "evolve_full_model");
    return out;
}

// ---------------------------------------------------------------------------
// Stroboscopic orbits

struct OrbitPoint {
    int cycle;  // 0 for the starting point
    int half;   // 1 after the H_2 leg, 2 after the H_1 leg
    ClassicalState state;
};

/// Alternates the H_2 and H_1 flows for time T each. Returns 2 * n_cycles
/// points, one after every half-kick; the start is not included.
inline std::vector<OrbitPoint> stroboscopic_orbit(const ModelParams& p, const ClassicalState& initial,
                                                  double T, int n_cycles, double dt = default_dt) {
    if (n_cycles < 1) throw InvalidArgument("stroboscopic_orbit: n_cycles must be >= 1");
    if (!(T >= 0.0)) throw InvalidArgument("stroboscopic_orbit: T must be >= 0");
    std::vector<OrbitPoint> out;
    out.reserve(static_cast<std::size_t>(2 * n_cycles));
    ClassicalState s = initial;
    for (int c = 1; c <= n_cycles; ++c) {
        s = evolve_h2(p, s, T);
        out.push_back({c, 1, s});
        s = evolve_h1(p, s, T, dt);
        out.push_back({c, 2, s});
    }
    return out;
}

/// One cycle of the shake: H_2 for T, then H_1 for T.
inline ClassicalState stroboscopic_step(const ModelParams& p, const ClassicalState& s, double T,
                                        double dt = default_dt) {
    return evolve_h1(p, evolve_h2(p, s, T), T, dt);
}

struct PortraitInitial {
    std::string label;
    ClassicalState state;
};

struct PortraitOrbit {
    std::string label;
    std::vector<OrbitPoint> points;  // start first, then 2 * n_cycles half-kicks
};

/// The three reference starts: all spins along S_z (regularized off the
/// pole), all spins along S_x, and a seeded random point.
inline std::vector<PortraitInitial> standard_portrait_initials(std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uz(-1.0, 1.0);
    std::uniform_real_distribution<double> uphi(-pi, pi);
    const double z = uz(rng);
    const double phi = uphi(rng);
    return {{"sz_up", {1.0 - 1e-6, 0.0}}, {"sx_up", {0.0, 0.0}}, {"random", {z, phi}}};
}

inline std::vector<PortraitOrbit> phase_portrait(const ModelParams& p, double T, int n_cycles,
                                                 const std::vector<PortraitInitial>& initials,
                                                 double dt = default_dt) {
    std::vector<PortraitOrbit> out;
    out.reserve(initials.size());
    for (const auto& init : initials) {
        PortraitOrbit orbit{init.label, {{0, 0, init.state}}};
        const auto pts = stroboscopic_orbit(p, init.state, T, n_cycles, dt);
        orbit.points.insert(orbit.points.end(), pts.begin(), pts.end());
        out.push_back(std::move(orbit));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lyapunov exponents

/// Great-circle distance between two points of the Bloch sphere. Evaluated
/// as atan2(|a x b|, a . b), which equals
/// arccos[z_a z_b + sqrt((1-z_a^2)(1-z_b^2)) cos(phi_a - phi_b)] but keeps
/// full relative precision for nearby points.
inline double great_circle_distance(const ClassicalState& a, const ClassicalState& b) {
    const double ra = std::sqrt(std::max(0.0, 1.0 - a.z * a.z));
    const double rb = std::sqrt(std::max(0.0, 1.0 - b.z * b.z));
    const double ax = ra * std::cos(a.phi), ay = ra * std::sin(a.phi), az = a.z;
    const double bx = rb * std::cos(b.phi), by = rb * std::sin(b.phi), bz = b.z;
    const double cx = ay * bz - az * by;
    const double cy = az * bx - ax * bz;
    const double cz = ax * by - ay * bx;
    return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), ax * bx + ay * by + az * bz);
}

enum class LyapunovMode { stroboscopic, full_continuous };

inline std::string to_string(LyapunovMode m) {
    return m == LyapunovMode::stroboscopic ? "stroboscopic" : "full_continuous";
}

struct LyapunovOptions {
    double dt = default_dt;
    double d0 = 1e-8;
    unsigned threads = 0;
};

struct LyapunovResult {
    double lambda_max = 0.0;  // mean over kept samples
    double lambda_std = 0.0;
    int n_cycles = 0;
    int n_samples = 0;  // samples kept
    int n_discarded = 0;
    double kick_period = 0.0;
};

namespace detail {
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

// Moves `companion` back to distance d0 from `base` along the current
// separation direction.
inline ClassicalState renormalize(const ClassicalState& base, const ClassicalState& companion,
                                  double d, double d0) {
    const double scale = d0 / d;
    return {base.z + (companion.z - base.z) * scale,
            wrap_phase(base.phi + wrap_phase(companion.phi - base.phi) * scale)};
}

// Benettin estimate for one initial condition; throws PoleError on a pole hit.
inline double lyapunov_sample(const ModelParams& p, double T, int n_cycles, LyapunovMode mode,
                              std::mt19937_64& rng, const LyapunovOptions& opt) {
    std::uniform_real_distribution<double> uz(-1.0, 1.0);
    std::uniform_real_distribution<double> uphi(-pi, pi);
    std::uniform_real_distribution<double> uangle(0.0, two_pi);

    FullClassicalState base;
    base.z = uz(rng);
    base.phi = uphi(rng);
    if (mode == LyapunovMode::full_continuous) {
        base.y = uz(rng);
        base.varphi = uphi(rng);
    }
    const double a = uangle(rng);
    const double root = std::sqrt(1.0 - base.z * base.z);
    FullClassicalState comp = base;
    comp.z = base.z + opt.d0 * std::cos(a) * root;
    comp.phi = wrap_phase(base.phi + opt.d0 * std::sin(a) / root);
    check_pole(comp.z, comp.phi, "lyapunov_max");

    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(n_cycles));
    for (int k = 0; k < n_cycles; ++k) {
        if (mode == LyapunovMode::stroboscopic) {
            const ClassicalState b = stroboscopic_step(p, {base.z, base.phi}, T, opt.dt);
            const ClassicalState c = stroboscopic_step(p, {comp.z, comp.phi}, T, opt.dt);
            base.z = b.z, base.phi = b.phi;
            comp.z = c.z, comp.phi = c.phi;
        } else {
            base = evolve_full_model(p, base, 2.0 * T, opt.dt);
            comp = evolve_full_model(p, comp, 2.0 * T, opt.dt);
        }
        const ClassicalState b{base.z, base.phi};
        const ClassicalState c{comp.z, comp.phi};
        double d = great_circle_distance(b, c);
        if (!(d > 0.0)) d = std::numeric_limits<double>::min();
        logs.push_back(std::log(d / opt.d0));
        const ClassicalState r = renormalize(b, c, d, opt.d0);
        check_pole(r.z, r.phi, "lyapunov_max");
        comp.z = r.z;
        comp.phi = r.phi;
    }
    return pairwise_sum(logs) / (2.0 * T * n_cycles);
}
}  // namespace detail

/// Maximal Lyapunov exponent averaged over random initial states drawn
/// uniformly in z in (-1, 1), phi in [-pi, pi) (and, for the full model, the
/// probe coordinates y in (-1, 1), varphi in [-pi, pi)).
///
/// One cycle lasts 2T: H_2 then H_1 for T each in stroboscopic mode, or the
/// full Hamiltonian for 2T in continuous mode. The companion trajectory is
/// rescaled to d0 after every cycle and the exponent is the summed log
/// growth over the total elapsed time 2 T n_cycles. Samples that hit the
/// coordinate pole are discarded and counted.
inline LyapunovResult lyapunov_max(const ModelParams& p, double T, int n_cycles, int n_samples,
                                   std::uint64_t seed, LyapunovMode mode,
                                   const LyapunovOptions& opt = {}) {
    p.validate();
    if (n_samples < 1) throw InvalidArgument("lyapunov_max: n_samples must be >= 1");
    if (n_cycles < 1) throw InvalidArgument("lyapunov_max: n_cycles must be >= 1");
    if (!(T > 0.0)) throw InvalidArgument("lyapunov_max: kick period T must be > 0");

    std::vector<double> lambdas(static_cast<std::size_t>(n_samples));
    std::vector<char> kept(static_cast<std::size_t>(n_samples), 0);
    parallel_for(static_cast<std::size_t>(n_samples), opt.threads, [&](std::size_t i) {
        auto rng = detail::sample_rng(seed, i);
        try {
            lambdas[i] = detail::lyapunov_sample(p, T, n_cycles, mode, rng, opt);
            kept[i] = std::isfinite(lambdas[i]) ? 1 : 0;
        } catch (const PoleError&) {
            kept[i] = 0;
        }
    });

    std::vector<double> good;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        if (kept[i]) good.push_back(lambdas[i]);
    if (good.empty())
        throw ContractViolation("lyapunov_max: every sample hit the coordinate pole");

    LyapunovResult out;
    out.n_cycles = n_cycles;
    out.n_samples = static_cast<int>(good.size());
    out.n_discarded = n_samples - out.n_samples;
    out.kick_period = T;
    const double mean = pairwise_sum(good) / static_cast<double>(good.size());
    std::vector<double> sq(good.size());
    for (std::size_t i = 0; i < good.size(); ++i) sq[i] = (good[i] - mean) * (good[i] - mean);
    out.lambda_max = mean;
    out.lambda_std = good.size() > 1 ? std::sqrt(pairwise_sum(sq) / static_cast<double>(good.size() - 1)) : 0.0;
    return out;
}

}  // namespace ttc
