#include "soclimit/cli/commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>

#include "soclimit/cli/csv.hpp"
#include "soclimit/diagnostics.hpp"
#include "soclimit/errors.hpp"
#include "soclimit/ladder.hpp"
#include "soclimit/parallel.hpp"
#include "soclimit/particle.hpp"
#include "soclimit/scheme.hpp"

#ifndef SOCLIMIT_VERSION
#define SOCLIMIT_VERSION "unknown"
#endif

namespace soclimit::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kKnownKeys = {
    "command", "scheme", "check", "study", "threads",
    "Z", "Z0", "T", "N", "gamma", "c", "levels", "stride",
    "mu", "noise", "seed", "level", "replicas",
    "initial", "initial.a", "initial.k", "initial.l", "initial.r",
    "vi.curve",
    "dimension", "D", "drive", "steps",
};

// Keys that never influence output; kept out of the manifest body.
const std::set<std::string> kVolatileKeys = {"threads"};

using Comments = std::vector<std::pair<std::string, std::string>>;

unsigned threads_of(const Config& cfg) {
    if (!cfg.has("threads")) return default_thread_count();
    const auto t = cfg.get_size("threads");
    if (t == 0) throw ConfigError("threads must be >= 1");
    return static_cast<unsigned>(t);
}

GridSpec grid_from(const Config& cfg, const std::string& key) {
    const auto z = cfg.get_size(key);
    if (z < 2) throw ConfigError("key '" + key + "' must be >= 2");
    return GridSpec(z);
}

double positive(Config& cfg, const std::string& key, double fallback) {
    const double v = cfg.get_double(key, fallback);
    if (!(v > 0.0)) throw ConfigError("key '" + key + "' must be > 0");
    return v;
}

// N given directly, or from the target tau = c h^{2+gamma}.
TimeGrid time_from(Config& cfg, const GridSpec& grid) {
    const double horizon = positive(cfg, "T", 1.0);
    if (!cfg.has("N")) {
        const double gamma = positive(cfg, "gamma", 1.0);
        const double c = positive(cfg, "c", 1.0);
        const double target = c * std::pow(grid.h(), 2.0 + gamma);
        cfg.set("N", std::to_string(static_cast<std::size_t>(std::ceil(horizon / target))));
    }
    const auto steps = cfg.get_size("N");
    if (steps < 1) throw ConfigError("key 'N' must be >= 1");
    return TimeGrid(horizon, steps);
}

InitialCondition initial_from(Config& cfg) {
    const auto shape = parse_initial_shape(cfg.get_string("initial", "sine"));
    switch (shape) {
        case InitialCondition::Shape::Zero:
            return InitialCondition::zero();
        case InitialCondition::Shape::Sine:
            return InitialCondition::sine(cfg.get_double("initial.a", 2.0),
                                          cfg.get_double("initial.k", 1.0));
        case InitialCondition::Shape::Plateau:
            return InitialCondition::plateau(cfg.get_double("initial.a", 3.0),
                                             cfg.get_double("initial.l", 0.25),
                                             cfg.get_double("initial.r", 0.75));
    }
    throw ConfigError("unknown initial shape");
}

NoiseDistribution distribution_from(Config& cfg) {
    return parse_noise_distribution(cfg.get_string("noise", "gaussian"));
}

std::size_t replicas_from(Config& cfg, std::size_t fallback) {
    const auto r = cfg.get_size("replicas", fallback);
    if (r < 2) throw ConfigError("replicas must be >= 2");
    return r;
}

SchemeConfig btw_config(Config& cfg) {
    SchemeConfig sc;
    sc.grid = grid_from(cfg, "Z");
    sc.time = time_from(cfg, sc.grid);
    sc.kind = NonlinearityKind::Btw;
    sc.initial = initial_from(cfg);
    return sc;
}

SchemeConfig zhang_config(Config& cfg, std::optional<GridSpec> grid = std::nullopt,
                          std::optional<TimeGrid> time = std::nullopt) {
    SchemeConfig sc;
    sc.grid = grid ? *grid : grid_from(cfg, "Z");
    sc.time = time ? *time : time_from(cfg, sc.grid);
    sc.kind = NonlinearityKind::Zhang;
    sc.mu = cfg.get_double("mu", 0.0);
    const auto noise = cfg.get_string("noise", "gaussian");
    if (noise != "none") {
        sc.noise = NoiseSpec{parse_noise_distribution(noise),
                             SeedSpec{cfg.get_u64("seed", 0), cfg.get_u64("level", 0), 0}};
    }
    sc.initial = initial_from(cfg);
    return sc;
}

RefinementLadder ladder_from(Config& cfg, std::size_t z0_default, double horizon_default) {
    const auto z0 = cfg.get_size("Z0", z0_default);
    const auto levels = cfg.get_size("levels", 3);
    return build_ladder(z0, levels, positive(cfg, "T", horizon_default),
                        positive(cfg, "gamma", 1.0), positive(cfg, "c", 1.0));
}

void write_manifest(const fs::path& out_dir, const Config& cfg, double seconds,
                    const std::vector<std::string>& outputs, const Comments& extra) {
    std::ofstream out(out_dir / "manifest.txt", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (out_dir / "manifest.txt").string());
    out << "# soclimit run manifest; feed back with --config to reproduce\n";
    out << "# version=" << SOCLIMIT_VERSION << '\n';
    out << "# wall_clock_seconds=" << format_double(seconds) << '\n';
    for (const auto& name : outputs) out << "# output=" << (out_dir / name).string() << '\n';
    for (const auto& [k, v] : extra) out << "# " << k << '=' << v << '\n';
    if (cfg.has("threads")) out << "# threads=" << cfg.get_string("threads") << '\n';
    out << cfg.to_text(kVolatileKeys);
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_report(const fs::path& path, const EstimateReport& report) {
    CsvWriter csv(path, {"name", "step_or_level", "lhs", "rhs", "slack", "pass"});
    for (const auto& r : report.rows) csv.row(report.name, r.index, r.lhs, r.rhs, r.slack, r.pass);
    csv.close();
}

int simulate_particle(Config& cfg, const fs::path& out_dir, const Stopwatch& clock) {
    ParticleConfig pc;
    pc.dimension = static_cast<int>(cfg.get_size("dimension", 1));
    pc.side = cfg.get_size("Z", 64);
    pc.diffusion = cfg.get_double("D", 0.5);
    pc.drive_amount = cfg.get_double("drive", 0.5);
    pc.steps = cfg.get_size("steps", 1000);
    pc.seed = cfg.get_u64("seed", 0);
    pc.validate();
    const auto stride = cfg.get_size("stride", pc.steps);
    if (stride < 1) throw ConfigError("stride must be >= 1");

    CsvWriter csv(out_dir / "trajectory.csv", {"step", "time", "node_index", "value"});
    auto emit = [&](std::size_t step, const ParticleLattice& x) {
        for (std::size_t k = 0; k < x.interior_count(); ++k) {
            const auto idx = x.interior_index(k);
            csv.row(step, static_cast<double>(step), idx, x.values()[idx]);
        }
    };
    emit(0, pc.initial_lattice());
    const auto run = run_particle_with_avalanches(
        pc, [&](std::size_t n, const ParticleLattice&, const ParticleLattice& after,
                const ParticleStep&) {
            const auto step = n + 1;
            if (step % stride == 0 || step == pc.steps) emit(step, after);
        });
    csv.close();
    write_manifest(out_dir, cfg, clock.seconds(), {"trajectory.csv"},
                   {{"total_topplings", std::to_string(run.total_topplings)},
                    {"drive_steps", std::to_string(run.drive_steps)}});
    return kExitOk;
}

int check_zhang_trend(Config& cfg, const fs::path& out_dir, const std::string& name,
                      const Stopwatch& clock) {
    const auto ladder = ladder_from(cfg, 8, 0.25);
    const auto replicas = replicas_from(cfg, 64);
    const auto threads = threads_of(cfg);
    std::vector<McEstimate> per_level;
    for (std::size_t m = 0; m < ladder.levels.size(); ++m) {
        auto sc = zhang_config(cfg, ladder.levels[m].grid, ladder.levels[m].time);
        if (sc.noise) sc.noise->seed.level = m;
        const auto ensemble = run_zhang_ensemble(sc, replicas, threads);
        per_level.push_back(name == "zhang-continuity" ? zhang_continuity_ratio(ensemble)
                                                       : interpolation_gap_ratio(ensemble));
    }
    const auto report = check_ratio_trend(name, per_level);
    write_report(out_dir / "report.csv", report);
    write_manifest(out_dir, cfg, clock.seconds(), {"report.csv"},
                   {{"pass", report.pass ? "true" : "false"}});
    return report.pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int cmd_simulate(Config& cfg, const fs::path& out_dir) {
    const Stopwatch clock;
    const auto scheme = cfg.get_string("scheme", "zhang");
    if (scheme == "btw-particle") return simulate_particle(cfg, out_dir, clock);

    SchemeConfig sc;
    if (scheme == "zhang") {
        sc = zhang_config(cfg);
    } else if (scheme == "btw-pde") {
        sc = btw_config(cfg);
    } else {
        throw ConfigError("unknown scheme '" + scheme + "' (zhang, btw-pde, btw-particle)");
    }
    const auto stride = cfg.get_size("stride", 1);
    if (stride < 1) throw ConfigError("stride must be >= 1");
    const auto steps = sc.time.steps();
    sc.stride = steps;  // rows are streamed by the observer

    CsvWriter csv(out_dir / "trajectory.csv", {"step", "time", "node_index", "value"});
    auto observer = [&](std::size_t n, const StateVector& u) {
        if (n % stride != 0 && n != steps) return;
        const double t = sc.time.time(n);
        for (std::size_t i = 0; i < u.size(); ++i) csv.row(n, t, i + 1, u[i]);
    };
    if (scheme == "zhang") {
        run_zhang(sc, observer);
    } else {
        run_btw_pde(sc, observer);
    }
    csv.close();
    write_manifest(out_dir, cfg, clock.seconds(), {"trajectory.csv"},
                   {{"cfl_ratio", format_double(sc.cfl_ratio())}});
    return kExitOk;
}

int cmd_check(Config& cfg, const fs::path& out_dir) {
    const Stopwatch clock;
    const auto name = cfg.get_string("check");

    EstimateReport report;
    if (name == "btw-energy" || name == "btw-continuity" || name == "vi" ||
        (name == "interp-gap" && cfg.get_string("scheme", "btw-pde") == "btw-pde")) {
        if (cfg.has("scheme") && cfg.get_string("scheme") != "btw-pde") {
            throw ConfigError("check '" + name + "' needs scheme=btw-pde");
        }
        const auto sc = btw_config(cfg);
        if (name == "btw-energy" && sc.cfl_ratio() > kBtwCflLimit) {
            throw HypothesisViolation("btw-energy needs tau/h^2 <= 1/4, got " +
                                      format_double(sc.cfl_ratio()));
        }
        const auto traj = run_btw_pde(sc);
        if (name == "btw-energy") {
            report = check_btw_energy(traj);
        } else if (name == "btw-continuity") {
            report = check_btw_continuity(traj);
        } else if (name == "interp-gap") {
            report = check_interpolation_gap(traj);
        } else {
            const auto curve = cfg.get_string("vi.curve", "self");
            if (curve == "self") {
                report = vi_residual(traj, traj.states);
            } else if (curve == "zero") {
                const std::vector<StateVector> zeros(traj.states.size(), StateVector(sc.grid));
                report = vi_residual(traj, zeros);
            } else {
                throw ConfigError("vi.curve must be self or zero");
            }
        }
    } else if (name == "interp-gap" || name == "zhang-continuity") {
        if (name == "interp-gap" && cfg.get_string("scheme") != "zhang") {
            throw ConfigError("interp-gap supports scheme=btw-pde or scheme=zhang");
        }
        return check_zhang_trend(cfg, out_dir, name, clock);
    } else if (name == "zhang-energy-mu0") {
        if (!cfg.has("Z")) cfg.set("Z", "16");
        const auto sc = zhang_config(cfg);
        if (!sc.noise) throw ConfigError("zhang-energy-mu0 needs noise");
        const auto ensemble = run_zhang_ensemble(sc, replicas_from(cfg, 64), threads_of(cfg));
        report = check_zhang_energy_mu0(ensemble);
    } else if (name == "noise-trace") {
        const auto grid = GridSpec(cfg.get_size("Z", 16));
        report = check_noise_trace(grid, distribution_from(cfg), cfg.get_u64("seed", 0),
                                   replicas_from(cfg, 10000), threads_of(cfg));
    } else {
        throw ConfigError("unknown check '" + name +
                          "' (btw-energy, btw-continuity, interp-gap, vi, zhang-energy-mu0, "
                          "zhang-continuity, noise-trace)");
    }
    write_report(out_dir / "report.csv", report);
    write_manifest(out_dir, cfg, clock.seconds(), {"report.csv"},
                   {{"pass", report.pass ? "true" : "false"},
                    {"min_slack", format_double(report.min_slack())}});
    return report.pass ? kExitOk : kExitCheckFailed;
}

int cmd_study(Config& cfg, const fs::path& out_dir) {
    const Stopwatch clock;
    const auto kind = cfg.get_string("study");
    StudyTable table;
    if (kind == "btw") {
        const auto ladder = ladder_from(cfg, 16, 0.25);
        table = study_btw_convergence(ladder, initial_from(cfg), threads_of(cfg));
    } else if (kind == "zhang") {
        const auto ladder = ladder_from(cfg, 8, 0.25);
        ZhangStudySpec spec;
        spec.mu = cfg.get_double("mu", 0.0);
        spec.distribution = distribution_from(cfg);
        spec.base_seed = cfg.get_u64("seed", 0);
        spec.initial = initial_from(cfg);
        table = study_zhang_distribution(ladder, spec, replicas_from(cfg, 128), threads_of(cfg));
    } else {
        throw ConfigError("unknown study '" + kind + "' (btw, zhang)");
    }
    CsvWriter csv(out_dir / "study.csv",
                  {"level", "Z", "tau", "statistic", "value", "stderr", "cross_level_distance"});
    for (const auto& r : table.rows) {
        csv.row(r.level, r.cells, r.tau, r.statistic, r.value, r.std_error,
                r.cross_level_distance);
    }
    csv.close();
    write_manifest(out_dir, cfg, clock.seconds(), {"study.csv"},
                   {{"pass", table.pass ? "true" : "false"}});
    return kExitOk;
}

int cmd_avalanche(Config& cfg, const fs::path& out_dir) {
    const Stopwatch clock;
    ParticleConfig pc;
    pc.dimension = static_cast<int>(cfg.get_size("dimension", 1));
    pc.side = cfg.get_size("Z", 64);
    pc.diffusion = cfg.get_double("D", 0.5);
    pc.drive_amount = cfg.get_double("drive", 0.5);
    pc.steps = cfg.get_size("steps", 100000);
    pc.seed = cfg.get_u64("seed", 0);
    pc.validate();

    const auto run = run_particle_with_avalanches(pc);

    CsvWriter av(out_dir / "avalanches.csv", {"index", "start_step", "duration", "size"});
    std::vector<std::size_t> bins;  // bins[k] counts sizes in [2^k, 2^{k+1})
    std::size_t truncated = 0;
    for (std::size_t i = 0; i < run.avalanches.size(); ++i) {
        const auto& a = run.avalanches[i];
        av.row(i, a.start_step, a.duration, a.size);
        if (a.truncated) ++truncated;
        if (a.size == 0) continue;
        std::size_t k = 0;
        while ((a.size >> (k + 1)) != 0) ++k;
        if (bins.size() <= k) bins.resize(k + 1, 0);
        ++bins[k];
    }
    av.close();

    CsvWriter hist(out_dir / "hist.csv", {"bin_lo", "bin_hi", "count"});
    for (std::size_t k = 0; k < bins.size(); ++k) {
        hist.row(std::size_t{1} << k, std::size_t{1} << (k + 1), bins[k]);
    }
    hist.close();

    write_manifest(out_dir, cfg, clock.seconds(), {"avalanches.csv", "hist.csv"},
                   {{"total_topplings", std::to_string(run.total_topplings)},
                    {"drive_steps", std::to_string(run.drive_steps)},
                    {"avalanches", std::to_string(run.avalanches.size())},
                    {"truncated_avalanches", std::to_string(truncated)}});
    return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sandpile scheme simulator and estimate checker", "soclimit"};
    app.set_version_flag("--version", SOCLIMIT_VERSION);
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::size_t replicas = 0;
    std::size_t levels = 0;
    std::vector<std::string> overrides;
    std::string positional;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Flat key=value config file");
        sub->add_option("--out-dir", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Base seed");
        sub->add_option("--replicas", replicas, "Monte Carlo replicas");
        sub->add_option("--levels", levels, "Refinement levels");
        sub->add_option("--set", overrides, "Override key=value (repeatable)");
    };
    auto* simulate = app.add_subcommand("simulate", "Run a scheme and write trajectory.csv");
    auto* check = app.add_subcommand("check", "Run an estimate check and write report.csv");
    auto* study = app.add_subcommand("study", "Run a refinement study and write study.csv");
    auto* avalanche = app.add_subcommand("avalanche", "Collect particle-model avalanche statistics");
    for (auto* sub : {simulate, check, study, avalanche}) add_common(sub);
    check->add_option("name", positional, "Check name");
    study->add_option("kind", positional, "btw or zhang");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    try {
        Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
        if (sub->count("--seed")) cfg.set("seed", std::to_string(seed));
        if (sub->count("--replicas")) cfg.set("replicas", std::to_string(replicas));
        if (sub->count("--levels")) cfg.set("levels", std::to_string(levels));
        for (const auto& o : overrides) cfg.set_assignment(o);
        if (!positional.empty()) cfg.set(command == "check" ? "check" : "study", positional);
        if (cfg.has("command") && cfg.get_string("command") != command) {
            throw ConfigError("config is for command '" + cfg.get_string("command") + "', not '" +
                              command + "'");
        }
        cfg.set("command", command);
        cfg.require_known(kKnownKeys);

        fs::create_directories(out_dir);
        int code = kExitOk;
        if (command == "simulate") code = cmd_simulate(cfg, out_dir);
        if (command == "check") code = cmd_check(cfg, out_dir);
        if (command == "study") code = cmd_study(cfg, out_dir);
        if (command == "avalanche") code = cmd_avalanche(cfg, out_dir);
        if (code == kExitCheckFailed) err << "check failed; see " << out_dir << "/report.csv\n";
        return code;
    } catch (const NumericalFailure& e) {
        err << "numerical failure at step " << e.step() << ": " << e.what() << '\n';
        return kExitNumerical;
    } catch (const HypothesisViolation& e) {
        err << "hypothesis violated: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::out_of_range& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const fs::filesystem_error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, out, err);
}

}  // namespace soclimit::cli
