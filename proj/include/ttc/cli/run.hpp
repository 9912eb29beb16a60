#pragma once

// Executes a RunConfig and writes <output_dir>/<stem>.csv plus
// <stem>.meta.json.

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ttc/cli/config.hpp"
#include "ttc/floquet.hpp"
#include "ttc/meanfield.hpp"
#include "ttc/spectral.hpp"
#include "ttc/survival.hpp"
#include "ttc/version.hpp"

namespace ttc::cli {

/// Output could not be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOutput {
    std::filesystem::path csv;
    std::filesystem::path meta;
    std::size_t rows = 0;
    nlohmann::json summary;  // headline numbers, also stored in meta.json
};

namespace detail {

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) { os_ << std::setprecision(17); }

    template <typename... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((os_ << (first ? "" : ",") << fields, first = false), ...);
        os_ << '\n';
        ++rows_;
    }

    void header(const std::string& h) { os_ << h << '\n'; }
    std::ostream& stream() { return os_; }
    std::size_t rows() const { return rows_; }
    void count_row() { ++rows_; }

private:
    std::ostream& os_;
    std::size_t rows_ = 0;
};

inline nlohmann::json params_json(const ModelParams& p) {
    return {{"N", p.N},         {"k_z", p.k_z},   {"alpha_x", p.alpha_x}, {"alpha_z", p.alpha_z},
            {"delta", p.delta}, {"beta", p.beta}, {"dim", p.dim()}};
}

inline nlohmann::json rmt_json(const ModelParams& p) {
    const auto s = rmt_saturation(p.dim());
    return {{"r_coe", RmtReference::r_coe},   {"r_poisson", RmtReference::r_poisson},
            {"ipr_cue", s.ipr_cue},           {"ipr_coe", s.ipr_coe},
            {"p_cue", s.p_cue},               {"p_coe", s.p_coe},
            {"t_th_cue", s.t_th_cue},         {"t_th_coe", s.t_th_coe}};
}

inline nlohmann::json config_json(const RunConfig& c) {
    const auto grid = c.resolved_grid();
    nlohmann::json j{{"experiment", to_string(c.experiment)},
                     {"n", c.n},
                     {"seed", c.seed},
                     {"threads", c.threads},
                     {"general_beta", c.general_beta},
                     {"open_spectrum", c.open_spectrum},
                     {"t_min", grid.front()},
                     {"t_max", grid.back()},
                     {"t_steps", grid.size()},
                     {"preset", c.preset},
                     {"desk_scale", c.desk_scale},
                     {"tag", c.tag}};
    switch (c.experiment) {
        case Experiment::survival: j["state"] = c.state; [[fallthrough]];
        case Experiment::basis_survival: {
            const auto w = c.resolved_window();
            j["window"] = {w.t_lo, w.t_hi};
            if (c.experiment == Experiment::basis_survival) j["basis"] = to_string(c.basis);
            break;
        }
        case Experiment::verify_reduction: j["state"] = c.state; break;
        case Experiment::lyapunov:
            j["mode"] = to_string(c.mode);
            j["kick_periods"] = c.kick_periods;
            j["n_cycles"] = c.resolved_cycles();
            j["n_samples"] = c.n_samples;
            j["dt"] = c.resolved_dt();
            if (c.kz_sweep) j["kz_sweep"] = {c.kz_sweep->lo, c.kz_sweep->hi, c.kz_sweep->count};
            break;
        case Experiment::phase_portrait:
            j["kick_periods"] = c.kick_periods;
            j["n_cycles"] = c.resolved_cycles();
            j["dt"] = c.resolved_dt();
            break;
        default: break;
    }
    return j;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

inline nlohmann::json run_eigenphases(const RunConfig& c, CsvWriter& w) {
    const auto grid = c.resolved_grid();
    std::vector<EigenphaseRow> rows;
    if (c.general_beta) {
        const FloquetFactory factory(c.params, true);
        rows.resize(grid.size());
        parallel_for(grid.size(), c.threads, [&](std::size_t i) {
            rows[i] = {grid[i], factory.decompose(grid[i]).eigen.eigenphases};
        });
    } else {
        rows = eigenphase_sweep(c.params, grid, c.threads);
    }
    std::string h = "t";
    for (Eigen::Index k = 1; k <= c.params.dim(); ++k) h += ",theta_" + std::to_string(k);
    w.header(h);
    for (const auto& r : rows) {
        w.stream() << r.t;
        for (double th : r.phases) w.stream() << ',' << th;
        w.stream() << '\n';
        w.count_row();
    }
    return {};
}

inline nlohmann::json run_spacing_ratio(const RunConfig& c, CsvWriter& w) {
    const auto grid = c.resolved_grid();
    std::vector<MeanRRow> rows;
    if (c.general_beta) {
        const FloquetFactory factory(c.params, true);
        rows.resize(grid.size());
        parallel_for(grid.size(), c.threads, [&](std::size_t i) {
            rows[i] = {grid[i],
                       spacing_ratios(factory.decompose(grid[i]).eigen.eigenphases, c.open_spectrum).mean_r};
        });
    } else {
        rows = mean_r_sweep(c.params, grid, c.threads, c.open_spectrum);
    }
    w.header("t,mean_r");
    std::vector<double> vals;
    for (const auto& r : rows) {
        w.row(r.t, r.mean_r);
        vals.push_back(r.mean_r);
    }
    const auto lo = std::min_element(vals.begin(), vals.end());
    return {{"min_mean_r", *lo}, {"t_at_min", rows[lo - vals.begin()].t}};
}

inline nlohmann::json write_series(const SurvivalSeries& s, const char* header, CsvWriter& w) {
    w.header(header);
    for (std::size_t i = 0; i < s.t_grid.size(); ++i) w.row(s.t_grid[i], s.values[i]);
    return {{"long_time_avg", s.long_time_avg}, {"window", {s.window.t_lo, s.window.t_hi}}};
}

inline nlohmann::json run_survival(const RunConfig& c, CsvWriter& w) {
    const auto state = make_state(c.state_spec(), c.params.basis());
    const auto s = survival_probability(c.params, state, c.resolved_grid(), c.n, c.resolved_window(),
                                        c.threads);
    return write_series(s, "t,P", w);
}

inline nlohmann::json run_basis_survival(const RunConfig& c, CsvWriter& w) {
    StateBasis basis;
    switch (c.basis) {
        case BasisKind::sz_fock: basis = make_sz_basis(c.params.basis()); break;
        case BasisKind::sx_eigen: basis = make_sx_basis(c.params.basis()); break;
        case BasisKind::random_haar: basis = make_random_basis(c.params.dim(), c.seed); break;
    }
    const auto s = basis_averaged_survival(c.params, basis, c.resolved_grid(), c.n,
                                           c.resolved_window(), c.threads);
    return write_series(s, "t,P_bar", w);
}

inline nlohmann::json run_lyapunov(const RunConfig& c, CsvWriter& w) {
    const LyapunovOptions opt{c.resolved_dt(), 1e-8, c.threads};
    const int cycles = c.resolved_cycles();
    nlohmann::json summary = nlohmann::json::array();
    if (c.kz_sweep) {
        w.header("k_z,T,lambda_mean,lambda_std,n_discarded");
        for (double kz : c.kz_sweep->values()) {
            ModelParams p = c.params;
            p.k_z = kz;
            for (double T : c.kick_periods) {
                const auto r = lyapunov_max(p, T, cycles, c.n_samples, c.seed, c.mode, opt);
                w.row(kz, T, r.lambda_max, r.lambda_std, r.n_discarded);
                summary.push_back({{"k_z", kz}, {"T", T}, {"lambda", r.lambda_max}});
            }
        }
    } else {
        w.header("T,lambda_mean,lambda_std,n_discarded");
        for (double T : c.kick_periods) {
            const auto r = lyapunov_max(c.params, T, cycles, c.n_samples, c.seed, c.mode, opt);
            w.row(T, r.lambda_max, r.lambda_std, r.n_discarded);
            summary.push_back({{"T", T}, {"lambda", r.lambda_max}});
        }
    }
    return {{"lambda", summary}};
}

inline nlohmann::json run_phase_portrait(const RunConfig& c, CsvWriter& w) {
    auto initials = standard_portrait_initials(c.seed);
    for (std::size_t i = 0; i < c.extra_initials.size(); ++i)
        initials.push_back({"custom" + std::to_string(i + 1), c.extra_initials[i]});
    w.header("T,orbit,cycle,half,z,phi");
    for (double T : c.kick_periods) {
        for (const auto& orbit : phase_portrait(c.params, T, c.resolved_cycles(), initials, c.resolved_dt()))
            for (const auto& pt : orbit.points)
                w.row(T, orbit.label, pt.cycle, pt.half, pt.state.z, pt.state.phi);
    }
    return {};
}

inline nlohmann::json run_verify_reduction(const RunConfig& c, CsvWriter& w) {
    const auto state = make_state(c.state_spec(), c.params.basis());
    const auto rows = verify_reduction(c.params, state, c.resolved_grid(), c.n, c.threads);
    w.header("t,full_re,full_im,reduced_re,reduced_im,discrepancy");
    double worst = 0.0;
    for (const auto& r : rows) {
        w.row(r.t, r.full.real(), r.full.imag(), r.reduced.real(), r.reduced.imag(), r.discrepancy);
        worst = std::max(worst, r.discrepancy);
    }
    return {{"max_discrepancy", worst}, {"moduli_only", c.params.delta != 0.0}};
}

inline nlohmann::json run_rmt_refs(const RunConfig& c, CsvWriter& w) {
    w.header("quantity,value");
    const auto refs = rmt_json(c.params);
    for (const char* key : {"r_coe", "r_poisson", "ipr_cue", "ipr_coe", "p_cue", "p_coe", "t_th_cue", "t_th_coe"})
        w.row(key, refs[key].get<double>());
    return {};
}

}  // namespace detail

inline RunOutput run_experiment(const RunConfig& c) {
    namespace fs = std::filesystem;
    c.validate();
    std::error_code ec;
    fs::create_directories(c.output_dir, ec);
    if (ec) throw IoError("output-dir: cannot create '" + c.output_dir + "': " + ec.message());

    RunOutput out;
    out.csv = fs::path(c.output_dir) / (c.stem() + ".csv");
    out.meta = fs::path(c.output_dir) / (c.stem() + ".meta.json");

    // Compute into memory first so a failed run leaves no partial file.
    std::ostringstream buffer;
    detail::CsvWriter w(buffer);
    const auto start = std::chrono::steady_clock::now();
    switch (c.experiment) {
        case Experiment::eigenphases: out.summary = detail::run_eigenphases(c, w); break;
        case Experiment::spacing_ratio: out.summary = detail::run_spacing_ratio(c, w); break;
        case Experiment::survival: out.summary = detail::run_survival(c, w); break;
        case Experiment::basis_survival: out.summary = detail::run_basis_survival(c, w); break;
        case Experiment::lyapunov: out.summary = detail::run_lyapunov(c, w); break;
        case Experiment::phase_portrait: out.summary = detail::run_phase_portrait(c, w); break;
        case Experiment::verify_reduction: out.summary = detail::run_verify_reduction(c, w); break;
        case Experiment::rmt_refs: out.summary = detail::run_rmt_refs(c, w); break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.rows = w.rows();
    if (out.summary.is_null()) out.summary = nlohmann::json::object();

    nlohmann::json meta{{"version", version},
                        {"experiment", to_string(c.experiment)},
                        {"params", detail::params_json(c.params)},
                        {"seed", c.seed},
                        {"wall_time_s", wall},
                        {"timestamp", detail::utc_timestamp()},
                        {"rmt_reference", detail::rmt_json(c.params)},
                        {"config", detail::config_json(c)},
                        {"substitutions", c.substitutions},
                        {"summary", out.summary},
                        {"rows", out.rows}};

    auto write = [](const fs::path& path, const std::string& text) {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
        f << text;
        f.flush();
        if (!f) throw IoError("write to '" + path.string() + "' failed");
    };
    write(out.csv, buffer.str());
    write(out.meta, meta.dump(2) + "\n");
    return out;
}

/// Full front end: parse, run, report. Returns the process exit status.
inline int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        const auto parsed = parse_config(args);
        for (const auto& run : parsed.runs) {
            const auto result = run_experiment(run);
            out << result.csv.string() << " (" << result.rows << " rows)";
            if (!result.summary.empty()) out << ' ' << result.summary.dump();
            out << '\n';
        }
        return static_cast<int>(ExitCode::ok);
    } catch (const UsageError& e) {
        (e.code() == 0 ? out : err) << e.what() << (e.code() == 0 ? "" : "\n");
        return e.code();
    } catch (const InvalidArgument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return static_cast<int>(ExitCode::usage);
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::io);
    } catch (const ContractViolation& e) {
        err << "contract violation: " << e.what() << '\n';
        return static_cast<int>(ExitCode::contract);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::contract);
    }
}

}  // namespace ttc::cli
