#pragma once

// Run configuration for the ttc_lab front end: flag / config-file parsing,
// validation and figure presets.

#include <CLI11.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttc/meanfield.hpp"
#include "ttc/model.hpp"
#include "ttc/survival.hpp"

namespace ttc::cli {

enum class ExitCode : int { ok = 0, io = 1, usage = 2, contract = 3 };

/// Parsing or validation failure. `code` is the process exit status; help
/// requests carry code 0 and the help text as the message.
class UsageError : public std::runtime_error {
public:
    UsageError(const std::string& what, int code = static_cast<int>(ExitCode::usage))
        : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

enum class Experiment {
    eigenphases,
    spacing_ratio,
    survival,
    basis_survival,
    lyapunov,
    phase_portrait,
    verify_reduction,
    rmt_refs
};

inline const std::vector<std::pair<std::string, Experiment>>& experiment_names() {
    static const std::vector<std::pair<std::string, Experiment>> names{
        {"eigenphases", Experiment::eigenphases},
        {"spacing-ratio", Experiment::spacing_ratio},
        {"survival", Experiment::survival},
        {"basis-survival", Experiment::basis_survival},
        {"lyapunov", Experiment::lyapunov},
        {"phase-portrait", Experiment::phase_portrait},
        {"verify-reduction", Experiment::verify_reduction},
        {"rmt-refs", Experiment::rmt_refs}};
    return names;
}

inline std::string to_string(Experiment e) {
    for (const auto& [name, value] : experiment_names())
        if (value == e) return name;
    return "unknown";
}

/// lo:hi:count, inclusive on both ends.
struct SweepSpec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;

    std::vector<double> values() const {
        return linear_grid(lo, hi, static_cast<std::size_t>(count));
    }
};

inline SweepSpec parse_sweep(const std::string& text, const std::string& key) {
    SweepSpec s;
    const auto first = text.find(':');
    const auto second = text.find(':', first == std::string::npos ? first : first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw UsageError(key + ": expected lo:hi:count, got '" + text + "'");
    try {
        std::size_t used = 0;
        const std::string a = text.substr(0, first);
        const std::string b = text.substr(first + 1, second - first - 1);
        const std::string c = text.substr(second + 1);
        s.lo = std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument(a);
        s.hi = std::stod(b, &used);
        if (used != b.size()) throw std::invalid_argument(b);
        s.count = std::stoi(c, &used);
        if (used != c.size()) throw std::invalid_argument(c);
    } catch (const std::logic_error&) {
        throw UsageError(key + ": malformed sweep '" + text + "'");
    }
    if (s.count < 1) throw UsageError(key + ": count must be >= 1");
    if (s.lo > s.hi) throw UsageError(key + ": lo must not exceed hi");
    return s;
}

struct RunConfig {
    ModelParams params = ModelParams::paper_default(16);
    Experiment experiment = Experiment::rmt_refs;

    // Time grid; unset fields fall back to per-experiment defaults.
    std::optional<double> t_min;
    std::optional<double> t_max;
    std::optional<int> t_steps;

    int n = 50;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    std::string tag;  // appended to output file names when set

    BasisKind basis = BasisKind::random_haar;
    std::string state = "x_polarized";  // fock[:m] | x_polarized | gaussian
    std::optional<double> window_lo;
    std::optional<double> window_hi;

    std::vector<double> kick_periods{1.0};
    std::optional<SweepSpec> kz_sweep;
    std::optional<int> n_cycles;
    int n_samples = 500;
    LyapunovMode mode = LyapunovMode::stroboscopic;
    std::optional<double> dt;
    std::vector<ClassicalState> extra_initials;

    bool open_spectrum = false;
    bool general_beta = false;
    bool desk_scale = false;
    unsigned threads = 0;
    std::string preset;
    std::vector<std::string> substitutions;  // desk-scale changes, recorded in meta.json

    std::string stem() const {
        return tag.empty() ? to_string(experiment) : to_string(experiment) + "-" + tag;
    }

    /// Kick-count default: 20 stroboscopic cycles; 50 for the continuous
    /// model so that the finite-time exponent of regular orbits settles.
    int resolved_cycles() const {
        if (n_cycles) return *n_cycles;
        if (experiment == Experiment::phase_portrait) return 50;
        return mode == LyapunovMode::full_continuous ? 50 : 20;
    }

    double resolved_dt() const {
        if (dt) return *dt;
        return (experiment == Experiment::lyapunov && mode == LyapunovMode::full_continuous) ? 1e-2
                                                                                            : default_dt;
    }

    std::vector<double> resolved_grid() const {
        double lo = 0.0, hi = 1.0;
        int steps = 2;
        switch (experiment) {
            case Experiment::eigenphases: lo = 0.0, hi = 2.5, steps = 251; break;
            case Experiment::spacing_ratio: lo = 0.01, hi = 5.0, steps = 500; break;
            case Experiment::survival:
            case Experiment::basis_survival:
                lo = default_t_max / default_t_samples, hi = default_t_max,
                steps = static_cast<int>(default_t_samples);
                break;
            case Experiment::verify_reduction: lo = 0.0, hi = 5.0, steps = 50; break;
            default: break;
        }
        return linear_grid(t_min.value_or(lo), t_max.value_or(hi),
                           static_cast<std::size_t>(t_steps.value_or(steps)));
    }

    AverageWindow resolved_window() const {
        const auto grid = resolved_grid();
        const AverageWindow def = default_window(grid.back());
        return {window_lo.value_or(def.t_lo), window_hi.value_or(def.t_hi)};
    }

    StateSpec state_spec() const {
        if (state == "x_polarized") return XPolarized{};
        if (state == "gaussian") return GaussianState{};
        if (state == "fock") return FockState{0.5 * params.N};
        if (state.rfind("fock:", 0) == 0) {
            try {
                std::size_t used = 0;
                const std::string v = state.substr(5);
                const double m = std::stod(v, &used);
                if (used != v.size()) throw std::invalid_argument(v);
                return FockState{m};
            } catch (const std::logic_error&) {
            }
        }
        throw UsageError("state: expected fock[:m], x_polarized or gaussian, got '" + state + "'");
    }

    void validate() const {
        auto fail = [](const std::string& m) { throw UsageError(m); };
        try {
            params.validate();
        } catch (const InvalidArgument& e) {
            fail(e.what());
        }
        if (t_min && t_max && *t_min > *t_max) fail("t-min: must not exceed t-max");
        if (t_min && *t_min < 0.0) fail("t-min: must be >= 0");
        if (t_steps && *t_steps < 1) fail("t-steps: must be >= 1");
        const auto grid = resolved_grid();
        if (grid.front() > grid.back()) fail("t-min: must not exceed t-max");
        if (experiment == Experiment::verify_reduction ? n < 0 : n < 1)
            fail("n: TTC order out of range");
        if (n_samples < 1) fail("n-samples: must be >= 1");
        if (n_cycles && *n_cycles < 1) fail("n-cycles: must be >= 1");
        if (dt && !(*dt > 0.0)) fail("dt: must be > 0");
        if (kick_periods.empty()) fail("T: no kick period given");
        for (double T : kick_periods)
            if (!(T > 0.0) && experiment == Experiment::lyapunov) fail("T: must be > 0");
            else if (!(T >= 0.0)) fail("T: must be >= 0");
        if (window_lo && window_hi && *window_lo > *window_hi)
            fail("window-lo: must not exceed window-hi");
        if (experiment == Experiment::survival) {
            const StateSpec s = state_spec();
            if (const auto* f = std::get_if<FockState>(&s); f && params.basis().index_of(f->m) < 0)
                fail("state: m = " + std::to_string(f->m) + " is not a valid S_z label for N = " +
                     std::to_string(params.N));
        }
        if (experiment == Experiment::verify_reduction && params.N > max_reduction_particles)
            fail("N: verify-reduction supports N <= " + std::to_string(max_reduction_particles));
        if ((experiment == Experiment::spacing_ratio) && params.N < 2)
            fail("N: spacing ratios need N >= 2");
    }
};

// ---------------------------------------------------------------------------
// Presets

namespace detail {
inline RunConfig figure_base(const std::string& name) {
    RunConfig c;
    c.params = ModelParams::paper_default();
    c.preset = name;
    return c;
}

inline void halve(RunConfig& c) {
    const int n_particles = std::max(2, c.params.N / 2);
    const int order = std::max(1, c.n / 2);
    c.substitutions.push_back("desk-scale: N " + std::to_string(c.params.N) + " -> " +
                              std::to_string(n_particles) + ", n " + std::to_string(c.n) + " -> " +
                              std::to_string(order));
    c.params.N = n_particles;
    c.n = order;
    c.desk_scale = true;
}
}  // namespace detail

/// Configurations reproducing the parameter lists of the six result figures,
/// one per panel family. With desk_scale, the slow quantum presets (fig4
/// panel b, fig5, fig7) run at half N and half n.
inline std::vector<RunConfig> preset(const std::string& name, bool desk_scale = false) {
    std::vector<RunConfig> out;
    if (name == "fig2") {
        RunConfig c = detail::figure_base(name);
        c.experiment = Experiment::phase_portrait;
        c.kick_periods = {1.0, 5.0};
        c.n_cycles = 50;
        out.push_back(c);
    } else if (name == "fig3") {
        RunConfig c = detail::figure_base(name);
        c.experiment = Experiment::lyapunov;
        c.mode = LyapunovMode::stroboscopic;
        c.kick_periods = SweepSpec{0.25, 5.0, 20}.values();
        c.n_cycles = 20;
        c.n_samples = 1500;
        out.push_back(c);
    } else if (name == "fig4") {
        RunConfig a = detail::figure_base(name);
        a.experiment = Experiment::eigenphases;
        a.params.N = 16;
        a.tag = "a";
        RunConfig b = detail::figure_base(name);
        b.experiment = Experiment::spacing_ratio;
        b.params.N = 100;
        b.tag = "b";
        if (desk_scale) detail::halve(b);
        out.push_back(a);
        out.push_back(b);
    } else if (name == "fig5") {
        const std::vector<std::pair<BasisKind, std::string>> panels{
            {BasisKind::sx_eigen, "a"}, {BasisKind::random_haar, "b"}, {BasisKind::sz_fock, "c"}};
        for (const auto& [basis, tag] : panels) {
            RunConfig c = detail::figure_base(name);
            c.experiment = Experiment::basis_survival;
            c.params.N = 60;
            c.n = 50;
            c.basis = basis;
            c.tag = tag;
            if (desk_scale) detail::halve(c);
            out.push_back(c);
        }
    } else if (name == "fig6") {
        for (const auto mode : {LyapunovMode::full_continuous, LyapunovMode::stroboscopic}) {
            RunConfig c = detail::figure_base(name);
            c.experiment = Experiment::lyapunov;
            c.mode = mode;
            c.kz_sweep = SweepSpec{0.0, 6.0, 13};
            c.kick_periods = {5.0};
            c.n_samples = 1500;
            c.tag = mode == LyapunovMode::full_continuous ? "full" : "stroboscopic";
            out.push_back(c);
        }
    } else if (name == "fig7") {
        const std::vector<std::pair<std::string, std::string>> panels{
            {"x_polarized", "a"}, {"gaussian", "b"}, {"fock", "c"}};
        for (const auto& [state, tag] : panels) {
            RunConfig c = detail::figure_base(name);
            c.experiment = Experiment::survival;
            c.params.N = 200;
            c.n = 50;
            c.state = state;
            c.tag = tag;
            if (desk_scale) detail::halve(c);
            out.push_back(c);
        }
    } else {
        throw UsageError("preset: unknown preset '" + name + "' (expected fig2..fig7)");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

struct ParsedArgs {
    std::vector<RunConfig> runs;
};

inline std::string usage_text() {
    return "usage: ttc_lab <experiment> [options]\n"
           "       ttc_lab --preset fig2|fig3|fig4|fig5|fig6|fig7 [--desk-scale] [--output-dir DIR]\n"
           "experiments: eigenphases spacing-ratio survival basis-survival lyapunov\n"
           "             phase-portrait verify-reduction rmt-refs\n"
           "run 'ttc_lab --help' for the full option list\n";
}

/// Parses flags (optionally layered over a `--config` file of `key = value`
/// lines whose keys are the long flag names) into one or more validated runs.
inline ParsedArgs parse_config(const std::vector<std::string>& args) {
    if (args.empty()) throw UsageError(usage_text());

    CLI::App app{"Floquet-dynamics laboratory for n-fold two-time correlators", "ttc_lab"};
    app.set_config("--config", "", "Read options from a key = value file; flags take precedence");
    app.allow_config_extras(false);

    RunConfig cfg;
    std::string experiment_pos, experiment_flag, basis = "random_haar", mode = "stroboscopic";
    std::string preset_name, t_sweep, kz_sweep;
    double t_single = 1.0, t_min = 0, t_max = 0, window_lo = 0, window_hi = 0, dt = 0;
    int t_steps = 0, n_cycles = 0;
    std::vector<std::string> initials;

    app.add_option("command", experiment_pos, "Experiment to run (same as --experiment)");
    app.add_option("--experiment", experiment_flag, "Experiment to run");
    app.add_option("--preset", preset_name, "Figure preset: fig2..fig7");
    app.add_flag("--desk-scale", cfg.desk_scale, "Halve N and n for the slow presets");

    app.add_option("--N", cfg.params.N, "Boson number");
    app.add_option("--kz", cfg.params.k_z, "Interaction k_z (units of alpha_x)");
    app.add_option("--alpha-x", cfg.params.alpha_x, "Hopping alpha_x (energy unit)");
    app.add_option("--alpha-z", cfg.params.alpha_z, "Tilt alpha_z");
    app.add_option("--delta", cfg.params.delta, "Probe splitting Delta");
    app.add_option("--beta", cfg.params.beta, "Boson-probe coupling beta");
    app.add_flag("--general-beta", cfg.general_beta,
                 "Keep the alpha_x - 2 beta hopping in the backward Hamiltonian");

    app.add_option("--t-min", t_min, "First grid time (alpha_x t)");
    app.add_option("--t-max", t_max, "Last grid time (alpha_x t)");
    app.add_option("--t-steps", t_steps, "Number of grid points");
    app.add_option("--n", cfg.n, "TTC order");
    app.add_option("--seed", cfg.seed, "Random seed");
    app.add_option("--output-dir", cfg.output_dir, "Output directory");
    app.add_option("--tag", cfg.tag, "Suffix for output file names");
    app.add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");

    app.add_option("--basis", basis, "sz_fock | sx_eigen | random_haar");
    app.add_option("--state", cfg.state, "fock[:m] | x_polarized | gaussian");
    app.add_option("--window-lo", window_lo, "Start of the long-time average window");
    app.add_option("--window-hi", window_hi, "End of the long-time average window");
    app.add_flag("--open-spectrum", cfg.open_spectrum, "Use D-1 open spacings instead of circular");

    app.add_option("--T", t_single, "Kick period alpha_x T");
    app.add_option("--T-sweep", t_sweep, "Kick periods lo:hi:count");
    app.add_option("--kz-sweep", kz_sweep, "k_z values lo:hi:count");
    app.add_option("--n-cycles", n_cycles, "Kick cycles per trajectory");
    app.add_option("--n-samples", cfg.n_samples, "Random initial states");
    app.add_option("--mode", mode, "stroboscopic | full_continuous");
    app.add_option("--dt", dt, "Integrator step");
    app.add_option("--initial", initials, "Extra portrait start z,phi (repeatable)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw UsageError(app.help(), 0);
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.get_name()) + ": " + e.what());
    }

    auto given = [&](const char* flag) { return app.count(flag) > 0; };

    if (!preset_name.empty()) {
        ParsedArgs out{preset(preset_name, cfg.desk_scale)};
        for (auto& run : out.runs) {
            if (given("--output-dir")) run.output_dir = cfg.output_dir;
            if (given("--threads")) run.threads = cfg.threads;
            if (given("--seed")) run.seed = cfg.seed;
            if (given("--n-samples")) run.n_samples = cfg.n_samples;
            run.validate();
        }
        return out;
    }

    const std::string exp_name = !experiment_flag.empty() ? experiment_flag : experiment_pos;
    if (exp_name.empty()) throw UsageError("experiment: none given\n" + usage_text());
    if (!experiment_flag.empty() && !experiment_pos.empty() && experiment_flag != experiment_pos)
        throw UsageError("experiment: positional and --experiment disagree");
    bool found = false;
    for (const auto& [name, value] : experiment_names())
        if (name == exp_name) {
            cfg.experiment = value;
            found = true;
        }
    if (!found) throw UsageError("experiment: unknown experiment '" + exp_name + "'");

    if (given("--t-min")) cfg.t_min = t_min;
    if (given("--t-max")) cfg.t_max = t_max;
    if (given("--t-steps")) cfg.t_steps = t_steps;
    if (given("--window-lo")) cfg.window_lo = window_lo;
    if (given("--window-hi")) cfg.window_hi = window_hi;
    if (given("--n-cycles")) cfg.n_cycles = n_cycles;
    if (given("--dt")) cfg.dt = dt;

    if (basis == "sz_fock") cfg.basis = BasisKind::sz_fock;
    else if (basis == "sx_eigen") cfg.basis = BasisKind::sx_eigen;
    else if (basis == "random_haar") cfg.basis = BasisKind::random_haar;
    else throw UsageError("basis: unknown basis '" + basis + "'");

    if (mode == "stroboscopic") cfg.mode = LyapunovMode::stroboscopic;
    else if (mode == "full_continuous") cfg.mode = LyapunovMode::full_continuous;
    else throw UsageError("mode: unknown mode '" + mode + "'");

    if (given("--T") && given("--T-sweep")) throw UsageError("T-sweep: conflicts with --T");
    cfg.kick_periods = given("--T-sweep") ? parse_sweep(t_sweep, "T-sweep").values()
                                          : std::vector<double>{t_single};
    if (given("--kz-sweep")) {
        cfg.kz_sweep = parse_sweep(kz_sweep, "kz-sweep");
        // k_z sweeps default to the chaotic kick period
        if (!given("--T") && !given("--T-sweep")) cfg.kick_periods = {5.0};
    }

    for (const auto& text : initials) {
        const auto comma = text.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument(text);
            const ClassicalState s{std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
            if (!(std::abs(s.z) < 1.0)) throw UsageError("initial: |z| must be < 1");
            cfg.extra_initials.push_back(s);
        } catch (const std::logic_error&) {
            throw UsageError("initial: expected z,phi, got '" + text + "'");
        }
    }

    cfg.validate();
    return {{cfg}};
}

inline ParsedArgs parse_config(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return parse_config(args);
}

}  // namespace ttc::cli
