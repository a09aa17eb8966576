#include "ed/cli_app.hpp"

#include "ed/config.hpp"
#include "ed/montecarlo.hpp"
#include "ed/optimizer.hpp"
#include "ed/presets.hpp"
#include "ed/special_math.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace ed {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

class CsvFile {
public:
    CsvFile(const fs::path& path, std::vector<std::string>& outputs) : path_(path) {
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
        outputs.push_back(path.filename().string());
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    fs::path path_;
    std::ofstream out_;
};

struct RunContext {
    RunConfig rc;
    std::string config_text;
    std::string preset;       // empty when loaded from a file
    std::string config_path;  // empty when loaded from a preset
    fs::path out_dir;
    int threads = 1;
    std::optional<long long> trials_override;
    std::optional<long long> seed_override;
    std::vector<std::string> outputs;
};

// Confidence bounds clipped into [0, 1]; analytic rows carry ser twice.
std::pair<double, double> ci_bounds(const SerReport& r) {
    if (!r.confidence) return {r.average.value, r.average.value};
    const double hw = r.confidence->half_width;
    return {std::max(0.0, r.average.value - hw), std::min(1.0, r.average.value + hw)};
}

std::string profile_name(PathProfile p) {
    return p == PathProfile::Equal ? "equal" : "exponential";
}

// Shared row emitters; sparse channels append paths and profile columns.
void curve_row(CsvFile& csv, bool sparse, const Scenario& s, const std::string& method,
               const PointSpec& pt, double ser, double lo, double hi) {
    std::vector<std::string> cells = {method, std::to_string(pt.antennas), num(pt.snr_db),
                                      num(ser), num(lo), num(hi)};
    if (sparse) {
        cells.push_back(std::to_string(pt.paths));
        cells.push_back(profile_name(s.channel.profile));
    }
    csv.row(cells);
}

void symbol_rows(CsvFile& csv, bool sparse, const Scenario& s, const std::string& method,
                 const PointSpec& pt, const SerReport& r) {
    for (std::size_t p = 0; p < r.per_symbol.size(); ++p) {
        std::vector<std::string> cells = {method, std::to_string(pt.antennas), num(pt.snr_db),
                                          std::to_string(p), num(r.per_symbol[p].value)};
        if (sparse) {
            cells.push_back(std::to_string(pt.paths));
            cells.push_back(profile_name(s.channel.profile));
        }
        csv.row(cells);
    }
}

std::vector<std::string> curve_header(bool sparse) {
    std::vector<std::string> h = {"method", "M", "snr_db", "ser", "ci_lo", "ci_hi"};
    if (sparse) {
        h.push_back("paths");
        h.push_back("profile");
    }
    return h;
}

std::vector<std::string> symbol_header(bool sparse) {
    std::vector<std::string> h = {"method", "M", "snr_db", "symbol", "ser"};
    if (sparse) {
        h.push_back("paths");
        h.push_back("profile");
    }
    return h;
}

void run_sweep_task(RunContext& ctx) {
    const RunConfig& rc = ctx.rc;
    const bool sparse = rc.scenario.channel.sparse;
    CsvFile curves(ctx.out_dir / (rc.prefix + "_curves.csv"), ctx.outputs);
    curves.row(curve_header(sparse));
    CsvFile symbols(ctx.out_dir / (rc.prefix + "_symbols.csv"), ctx.outputs);
    symbols.row(symbol_header(sparse));

    for (int o = 0; o < outer_count(rc); ++o) {
        const Scenario s = outer_scenario(rc, o);
        const SweepResult sw = run_sweep(s, ctx.threads);
        for (std::size_t i = 0; i < sw.points.size(); ++i) {
            const PointSpec& pt = sw.points[i].point;
            for (std::size_t d = 0; d < s.detectors.size(); ++d) {
                const std::string name = detector_name(s.detectors[d]);
                const SerReport& mc = sw.points[i].reports[d];
                auto [lo, hi] = ci_bounds(mc);
                curve_row(curves, sparse, s, name, pt, mc.average.value, lo, hi);
                symbol_rows(symbols, sparse, s, name, pt, mc);

                const SerReport& an = sw.analytic[d][i];
                curve_row(curves, sparse, s, name + "_analytic", pt, an.average.value,
                          an.average.value, an.average.value);
                symbol_rows(symbols, sparse, s, name + "_analytic", pt, an);
            }
            if (rc.chernoff_overlay) {
                const SerReport bound = aed_chernoff_ser(
                    s.channel.avg_energy, pt.noise_var, s.constellation, pt.antennas,
                    aed_gaussian_thresholds(s.channel.avg_energy, pt.noise_var,
                                            s.constellation, pt.antennas));
                curve_row(curves, sparse, s, "aed_chernoff_bound", pt, bound.average.value,
                          bound.average.value, bound.average.value);
                symbol_rows(symbols, sparse, s, "aed_chernoff_bound", pt, bound);
            }
            if (rc.floor_reference) {
                const Probability f = pam_floor(s.constellation, pt.antennas);
                curve_row(curves, sparse, s, "pam_floor", pt, f.value, f.value, f.value);
            }
        }
    }
}

// Conditional densities of the energy statistic at the average channel
// energy: exact noncentral chi-square law against the gaussian moments.
void run_pdf_task(RunContext& ctx) {
    const RunConfig& rc = ctx.rc;
    CsvFile pdf(ctx.out_dir / (rc.prefix + "_pdf.csv"), ctx.outputs);
    pdf.row({"method", "M", "symbol", "z", "log_pdf"});

    const Scenario& s = rc.scenario;
    const Constellation& c = s.constellation;
    const double channel_energy = s.channel.avg_energy;
    constexpr int kGrid = 400;

    for (std::size_t i = 0; i < s.sweep.size(); ++i) {
        const PointSpec pt = point_spec(s, static_cast<int>(i));
        const int m = pt.antennas;
        const double nv = pt.noise_var;
        const double top = (channel_energy * c.energy(c.size() - 1) + nv) *
                           (1.0 + 12.0 / std::sqrt(static_cast<double>(m)));
        const GaussianMoments moments = energy_statistic_moments(channel_energy, nv, c, m);
        for (int p = 0; p < c.size(); ++p) {
            const double dof = 2.0 * m;
            const double lambda = dof * channel_energy * c.energy(p) / nv;
            const double scale = dof / nv;  // 2Mz/nv follows the noncentral law
            for (int k = 1; k <= kGrid; ++k) {
                const double z = top * k / kGrid;
                const double lp = std::log(scale) + noncentral_chi2_log_pdf(scale * z, dof, lambda);
                pdf.row({"exact", std::to_string(m), std::to_string(p), num(z), num(lp)});
            }
            const double mu = moments.mean[p];
            const double var = moments.variance[p];
            for (int k = 1; k <= kGrid; ++k) {
                const double z = top * k / kGrid;
                const double lp = -0.5 * std::log(2.0 * M_PI * var) -
                                  (z - mu) * (z - mu) / (2.0 * var);
                pdf.row({"gaussian", std::to_string(m), std::to_string(p), num(z), num(lp)});
            }
        }
    }
}

OptimizationProblem design_problem(const Scenario& s, const PointSpec& pt) {
    OptimizationProblem pr;
    pr.channel_energy = s.channel.avg_energy;
    pr.noise_var = pt.noise_var;
    pr.antennas = pt.antennas;
    pr.levels = s.constellation.size();
    pr.priors = s.constellation.priors();
    pr.restarts = 3;
    pr.seed = s.seed;
    return pr;
}

void level_rows(CsvFile& csv, const std::string& method, const PointSpec& pt,
                const Constellation& c) {
    for (int p = 0; p < c.size(); ++p)
        csv.row({method, std::to_string(pt.antennas), num(pt.snr_db), std::to_string(p),
                 num(c.energy(p))});
}

// Optimized energy levels per sweep point, for both design objectives,
// with the conventional spacing as the reference rows.
void run_constellation_opt_task(RunContext& ctx) {
    const RunConfig& rc = ctx.rc;
    CsvFile levels(ctx.out_dir / (rc.prefix + "_levels.csv"), ctx.outputs);
    levels.row({"method", "M", "snr_db", "symbol", "energy"});

    const Scenario& s = rc.scenario;
    const Constellation conventional = make_conventional_pam(s.constellation.size(),
                                                             s.constellation.priors());
    for (std::size_t i = 0; i < s.sweep.size(); ++i) {
        const PointSpec pt = point_spec(s, static_cast<int>(i));
        const OptimizationProblem pr = design_problem(s, pt);
        level_rows(levels, "ied_opt", pt, optimize_ied(pr).constellation);
        level_rows(levels, "aed_opt", pt, optimize_aed(pr).constellation);
        level_rows(levels, "conventional", pt, conventional);
    }
}

bool is_ied(DetectorVariant v) {
    return v == DetectorVariant::IedGaussian || v == DetectorVariant::IedExactMap;
}

bool is_aed(DetectorVariant v) {
    return v == DetectorVariant::AedGaussian || v == DetectorVariant::AedBayesian;
}

// Conventional vs optimized constellations under the same draws: the
// design step runs per point (the optimum depends on noise and array
// size), then each constellation is simulated with identical streams.
void run_opt_ser_task(RunContext& ctx) {
    const RunConfig& rc = ctx.rc;
    const bool sparse = rc.scenario.channel.sparse;
    CsvFile curves(ctx.out_dir / (rc.prefix + "_curves.csv"), ctx.outputs);
    curves.row(curve_header(sparse));
    CsvFile levels(ctx.out_dir / (rc.prefix + "_levels.csv"), ctx.outputs);
    levels.row({"method", "M", "snr_db", "symbol", "energy"});

    for (int o = 0; o < outer_count(rc); ++o) {
        const Scenario s = outer_scenario(rc, o);
        for (std::size_t i = 0; i < s.sweep.size(); ++i) {
            const PointSpec pt = point_spec(s, static_cast<int>(i));
            const OptimizationProblem pr = design_problem(s, pt);
            std::optional<Constellation> ied_design, aed_design;
            for (DetectorVariant d : s.detectors) {
                if (is_ied(d) && !ied_design) ied_design = optimize_ied(pr).constellation;
                if (is_aed(d) && !aed_design) aed_design = optimize_aed(pr).constellation;
            }
            if (ied_design) level_rows(levels, "ied_opt", pt, *ied_design);
            if (aed_design) level_rows(levels, "aed_opt", pt, *aed_design);

            const PointResult conv = run_point(s, static_cast<int>(i), ctx.threads);
            for (std::size_t d = 0; d < s.detectors.size(); ++d) {
                const std::string name = detector_name(s.detectors[d]);
                auto [lo, hi] = ci_bounds(conv.reports[d]);
                curve_row(curves, sparse, s, name, pt, conv.reports[d].average.value, lo, hi);
                const SerReport an = analytic_reference(s.detectors[d], s.constellation,
                                                        pt.antennas, pt.noise_var,
                                                        s.channel.avg_energy);
                curve_row(curves, sparse, s, name + "_analytic", pt, an.average.value,
                          an.average.value, an.average.value);
            }
            for (std::size_t d = 0; d < s.detectors.size(); ++d) {
                const DetectorVariant det = s.detectors[d];
                const Constellation& designed = is_ied(det) ? *ied_design : *aed_design;
                Scenario opt = s;
                opt.constellation = designed;
                opt.detectors = {det};
                const PointResult r = run_point(opt, static_cast<int>(i), ctx.threads);
                const std::string name = std::string(detector_name(det)) + "_opt";
                auto [lo, hi] = ci_bounds(r.reports[0]);
                curve_row(curves, sparse, s, name, pt, r.reports[0].average.value, lo, hi);
                const SerReport an = analytic_reference(det, designed, pt.antennas,
                                                        pt.noise_var, s.channel.avg_energy);
                curve_row(curves, sparse, s, name + "_analytic", pt, an.average.value,
                          an.average.value, an.average.value);
            }
        }
    }
}

void write_manifest(const RunContext& ctx, double wall_seconds) {
    nlohmann::json m;
    m["version"] = "0.1.0";
    m["task"] = ctx.rc.task;
    if (!ctx.preset.empty()) m["preset"] = ctx.preset;
    if (!ctx.config_path.empty()) m["config_path"] = ctx.config_path;
    m["prefix"] = ctx.rc.prefix;
    m["seed"] = ctx.rc.scenario.seed;
    m["trials"] = ctx.rc.scenario.trials;
    m["threads"] = ctx.threads;
    nlohmann::json overrides = nlohmann::json::object();
    if (ctx.trials_override) overrides["trials"] = *ctx.trials_override;
    if (ctx.seed_override) overrides["seed"] = *ctx.seed_override;
    m["overrides"] = overrides;
    m["outputs"] = ctx.outputs;
    m["wall_clock_seconds"] = wall_seconds;
    m["config_text"] = ctx.config_text;

    const fs::path path = ctx.out_dir / (ctx.rc.prefix + "_manifest.json");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << m.dump(2) << '\n';
}

int run_task(RunContext& ctx) {
    const auto start = std::chrono::steady_clock::now();
    if (ctx.rc.task == "sweep")
        run_sweep_task(ctx);
    else if (ctx.rc.task == "pdf_compare")
        run_pdf_task(ctx);
    else if (ctx.rc.task == "constellation_opt")
        run_constellation_opt_task(ctx);
    else
        run_opt_ser_task(ctx);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    write_manifest(ctx, elapsed.count());
    return 0;
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("ED_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end && *end == '\0' && n > 0 && n <= 1024) return static_cast<int>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"non-coherent energy-detection experiment runner"};
    std::string preset, config_path, out_dir = ".", format = "csv";
    long long trials = 0, seed = -1;
    int threads = 0;
    bool list = false, validate = false;

    app.add_flag("--list-presets", list, "print the bundled preset names and exit");
    app.add_option("--preset", preset, "run a bundled experiment preset");
    app.add_option("--config", config_path, "run a scenario config file");
    app.add_option("--out", out_dir, "output directory, created if missing")
        ->capture_default_str();
    app.add_option("--trials", trials, "override the trial count")
        ->check(CLI::Range(1ll, 4294967295ll));
    app.add_option("--seed", seed, "override the random seed")->check(CLI::NonNegativeNumber);
    app.add_option("--threads", threads, "worker threads (fallback: ED_THREADS, then hardware)")
        ->check(CLI::PositiveNumber);
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv"}));
    app.add_flag("--validate", validate, "check the scenario and exit without running");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (list) {
        for (const std::string& name : preset_names()) std::cout << name << '\n';
        return 0;
    }
    if (preset.empty() == config_path.empty()) {
        std::cerr << "choose exactly one of --preset or --config (see --list-presets)\n";
        return 2;
    }

    RunContext ctx;
    ctx.preset = preset;
    ctx.config_path = config_path;
    if (!preset.empty()) {
        ctx.config_text = preset_config(preset);
        if (ctx.config_text.empty()) {
            std::cerr << "unknown preset '" << preset << "'; available:\n";
            for (const std::string& name : preset_names()) std::cerr << "  " << name << '\n';
            return 2;
        }
    } else {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot read '" << config_path << "'\n";
            return 2;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        ctx.config_text = buf.str();
    }

    std::vector<Diagnostic> diags;
    ctx.rc = parse_config(ctx.config_text, diags);
    if (!diags.empty()) {
        for (const Diagnostic& d : diags) {
            if (d.line > 0)
                std::cerr << "line " << d.line << ": " << d.message << '\n';
            else
                std::cerr << d.message << '\n';
        }
        return 2;
    }
    if (validate) {
        std::cout << (preset.empty() ? config_path : preset) << ": ok\n";
        return 0;
    }

    if (trials > 0) {
        ctx.trials_override = trials;
        ctx.rc.scenario.trials = trials;
    }
    if (seed >= 0) {
        ctx.seed_override = seed;
        ctx.rc.scenario.seed = static_cast<std::uint64_t>(seed);
    }
    ctx.threads = resolve_threads(threads);
    ctx.out_dir = out_dir;

    try {
        fs::create_directories(ctx.out_dir);
        return run_task(ctx);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace ed
