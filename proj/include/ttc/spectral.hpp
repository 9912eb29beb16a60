#pragma once

// Spacing-ratio statistics of eigenphase spectra on the unit circle.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ttc/errors.hpp"
#include "ttc/floquet.hpp"
#include "ttc/parallel.hpp"

namespace ttc {

struct RmtReference {
    static constexpr double r_coe = 0.53589838486224541294;  // 4 - 2 sqrt(3)
    static constexpr double r_poisson = 0.38629436111989061883;  // 2 ln 2 - 1
};

struct SpacingRatioResult {
    std::vector<double> ratios;
    double mean_r = 0.0;
    std::size_t n_spacings = 0;
};

inline constexpr double min_spacing = 1e-12;

/// Ratios of adjacent eigenphase gaps.
///
/// Circular mode (default) uses all D gaps including the wrap-around gap
/// theta_1 + 2 pi - theta_D and forms D ratios over cyclically adjacent pairs.
/// Open mode uses the D-1 interior gaps and D-2 ratios. Gaps below 1e-12 are
/// clamped so that degenerate spectra yield finite ratios.
inline SpacingRatioResult spacing_ratios(std::span<const double> phases,
                                         bool open_spectrum = false) {
    const std::size_t d = phases.size();
    if (d < 3) throw InvalidArgument("spacing_ratios: need at least 3 eigenphases");
    for (std::size_t i = 1; i < d; ++i)
        if (phases[i] < phases[i - 1])
            throw InvalidArgument("spacing_ratios: eigenphases must be sorted ascending");

    std::vector<double> gaps;
    gaps.reserve(d);
    for (std::size_t i = 0; i + 1 < d; ++i) gaps.push_back(phases[i + 1] - phases[i]);
    if (!open_spectrum) gaps.push_back(phases[0] + two_pi - phases[d - 1]);
    for (double& g : gaps) g = std::max(g, min_spacing);

    SpacingRatioResult out;
    out.n_spacings = gaps.size();
    const std::size_t n_ratios = open_spectrum ? gaps.size() - 1 : gaps.size();
    out.ratios.reserve(n_ratios);
    for (std::size_t i = 0; i < n_ratios; ++i) {
        const double a = gaps[i];
        const double b = gaps[(i + 1) % gaps.size()];
        out.ratios.push_back(std::min(a, b) / std::max(a, b));
    }
    out.mean_r = pairwise_sum(out.ratios) / static_cast<double>(out.ratios.size());
    return out;
}

inline SpacingRatioResult spacing_ratios(const RealVector& phases, bool open_spectrum = false) {
    return spacing_ratios(std::span<const double>(phases.data(), static_cast<std::size_t>(phases.size())),
                          open_spectrum);
}

struct MeanRRow {
    double t;
    double mean_r;
};

inline std::vector<MeanRRow> mean_r_sweep(const ModelParams& p, const std::vector<double>& t_grid,
                                          unsigned threads = 0, bool open_spectrum = false) {
    require_ascending_grid(t_grid, "mean_r_sweep");
    if (p.dim() < 3) throw InvalidArgument("mean_r_sweep: need N >= 2 for three eigenphases");
    const FloquetFactory factory(p);
    std::vector<MeanRRow> rows(t_grid.size());
    parallel_for(t_grid.size(), threads, [&](std::size_t i) {
        const auto fd = factory.decompose(t_grid[i]);
        rows[i] = {t_grid[i], spacing_ratios(fd.eigen.eigenphases, open_spectrum).mean_r};
    });
    return rows;
}

}  // namespace ttc
