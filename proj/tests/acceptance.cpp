// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "soclimit/cli/commands.hpp"
#include "soclimit/diagnostics.hpp"
#include "soclimit/ladder.hpp"
#include "soclimit/lattice.hpp"
#include "soclimit/particle.hpp"
#include "soclimit/prolongation.hpp"
#include "soclimit/scheme.hpp"

namespace fs = std::filesystem;
using namespace soclimit;

namespace {

// Pinned tolerances.
constexpr double kTraceOracleTol = 1e-10;
constexpr double kTraceClosedTol = 1e-12;
constexpr double kSpectrumRelTol = 1e-10;
constexpr double kSandwichSlack = 1e-12;
constexpr double kBtwSlack = 1e-10;
constexpr double kNoiseSigmas = 4.0;
constexpr double kViSlack = 1e-9;
constexpr double kMassTol = 1e-12;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome trace_limit() {
    double worst_oracle = 0.0, worst_closed = 0.0;
    bool pass = true;
    for (std::size_t z = 2; z <= 256; ++z) {
        GridSpec g(z);
        const double h = g.h();
        const double tr = trace_inv_neg_laplacian(g);
        const double dense = oracle::trace(oracle::inverse(oracle::dense_neg_laplacian(z)));
        worst_oracle = std::max(worst_oracle, std::abs(tr - dense));
        worst_closed = std::max(worst_closed, std::abs(tr - (1.0 - h * h) / 6.0));
        pass = pass && std::abs(tr - 1.0 / 6.0) <= h * h * (1.0 / 6.0 + 1e-12);
    }
    pass = pass && worst_oracle <= kTraceOracleTol && worst_closed <= kTraceClosedTol;
    return {pass, fmt("max|Tr-dense|=%.2e max|Tr-(1-h^2)/6|=%.2e", worst_oracle, worst_closed)};
}

Outcome spectrum() {
    double worst = 0.0, worst_power = 0.0;
    std::mt19937_64 rng(2);
    for (std::size_t z = 2; z <= 128; ++z) {
        GridSpec g(z);
        const double h = g.h();
        for (std::size_t j = 1; j < z; ++j) {
            StateVector s(g);
            for (std::size_t i = 0; i < s.size(); ++i) {
                s[i] = std::sin(static_cast<double>(j) * std::numbers::pi * g.node(i + 1));
            }
            const double lambda = (2.0 / (h * h)) * (1.0 - std::cos(static_cast<double>(j) * std::numbers::pi * h));
            const auto r = apply_neg_laplacian(s);
            double err = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) err = std::max(err, std::abs(r[i] - lambda * s[i]));
            worst = std::max(worst, err / lambda);
        }
        StateVector v(g, oracle::random_vector(rng, g.interior_count()));
        double rayleigh = 0.0;
        for (int it = 0; it < 500; ++it) {
            auto w = apply_neg_laplacian(v);
            rayleigh = inner0(w, v) / inner0(v, v);
            v = (1.0 / norm0(w)) * w;
        }
        worst_power = std::max(worst_power, rayleigh * h * h / 4.0);
    }
    return {worst <= kSpectrumRelTol && worst_power < 1.0,
            fmt("max rel err=%.2e max lambda_power*h^2/4=%.6f", worst, worst_power)};
}

Outcome sandwich() {
    std::mt19937_64 rng(3);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t z = 2; z <= 128; z *= 2) {
        GridSpec g(z);
        for (int k = 0; k < 1000; ++k) {
            StateVector u(g, oracle::random_vector(rng, g.interior_count(), 1.0 + k % 7));
            const double cont = hminus1_norm(pcx(u));
            const double disc = norm_minus1(u);
            worst = std::min({worst, disc - cont, 3.0 * cont - disc});
        }
    }
    return {worst >= -kSandwichSlack, fmt("min slack=%.3e", worst)};
}

Outcome btw_estimates() {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<std::size_t> zdist(4, 64);
    std::uniform_real_distribution<double> cfl(0.01, 0.25);
    double worst_energy = std::numeric_limits<double>::infinity(), worst_cont = worst_energy;
    bool pass = true;
    for (int k = 0; k < 10; ++k) {
        const std::size_t z = zdist(rng);
        SchemeConfig c;
        c.grid = GridSpec(z);
        const double tau = cfl(rng) * c.grid.h() * c.grid.h();
        c.time = TimeGrid(tau * 2000, 2000);
        c.kind = NonlinearityKind::Btw;
        c.initial_state = StateVector(c.grid, oracle::random_vector(rng, c.grid.interior_count(), 4.0));
        const auto traj = run_btw_pde(c);
        const auto e = check_btw_energy(traj);
        const auto d = check_btw_continuity(traj);
        worst_energy = std::min(worst_energy, e.min_slack());
        worst_cont = std::min(worst_cont, d.min_slack());
        pass = pass && e.pass && d.pass;
    }
    pass = pass && worst_energy >= -kBtwSlack && worst_cont >= -kBtwSlack;
    return {pass, fmt("min energy slack=%.3e min continuity slack=%.3e", worst_energy, worst_cont)};
}

Outcome zhang_energy() {
    SchemeConfig c;
    c.grid = GridSpec(16);
    const double h = c.grid.h();
    const std::size_t steps = 1024;
    c.time = TimeGrid(steps * h * h * h, steps);
    c.noise = NoiseSpec{NoiseDistribution::Gaussian, {5, 0, 0}};
    c.initial = InitialCondition::sine(2.0, 1.0);
    const auto ens = run_zhang_ensemble(c, 64, 1);
    const auto r = check_zhang_energy_mu0(ens);
    return {r.pass, fmt("T=%.4f N=%zu rows=%zu min slack=%.3e", c.time.horizon(), steps, r.rows.size(),
                        r.min_slack())};
}

Outcome noise_trace() {
    bool pass = true;
    std::string detail;
    for (std::size_t z : {4u, 16u, 64u}) {
        GridSpec g(z);
        const auto est = noise_trace_estimate(g, NoiseDistribution::Gaussian, 6, 10000, 1);
        const double tr = trace_inv_neg_laplacian(g);
        const double sig = std::abs(est.mean - tr) / est.std_error;
        pass = pass && sig <= kNoiseSigmas;
        detail += fmt("Z=%zu dev=%.2fse ", z, sig);
    }
    return {pass, detail};
}

Outcome vi() {
    double worst = std::numeric_limits<double>::infinity();
    bool pass = true;
    for (std::size_t z : {4u, 16u}) {
        GridSpec g(z);
        const double h = g.h();
        auto cfg = [&](std::optional<StateVector> init, InitialCondition ic, std::size_t steps) {
            SchemeConfig c;
            c.grid = g;
            c.time = TimeGrid(steps * h * h / 8.0, steps);
            c.kind = NonlinearityKind::Btw;
            c.initial = ic;
            c.initial_state = std::move(init);
            return c;
        };
        // Own trajectory as the test curve.
        const auto own = run_btw_pde(cfg(std::nullopt, InitialCondition::sine(2.0, 1.0), 400));
        // Zero curve against the zero trajectory.
        const auto zero = run_btw_pde(cfg(std::nullopt, InitialCondition::zero(), 400));
        // Zero curve against a single supercritical spike.
        StateVector spike(g);
        spike[0] = 2.0;
        const auto peak = run_btw_pde(cfg(spike, InitialCondition::zero(), 400));
        const std::vector<StateVector> zeros(401, StateVector(g));
        for (const auto& r : {vi_residual(own, own.states), vi_residual(zero, zeros),
                              vi_residual(peak, zeros)}) {
            pass = pass && r.pass;
            worst = std::min(worst, r.min_slack());
        }
    }
    pass = pass && worst >= -kViSlack;
    return {pass, fmt("min slack=%.3e", worst)};
}

Outcome btw_study() {
    const auto ladder = build_ladder(16, 4, 0.25, 1.0, 1.0);
    bool pass = true;
    std::string detail;
    for (const auto& ic : {InitialCondition::sine(2.0, 1.0), InitialCondition::plateau(3.0, 0.25, 0.75)}) {
        const auto t = study_btw_convergence(ladder, ic, 1);
        pass = pass && t.pass;
        detail += ic.name() + ":";
        for (const auto& r : t.rows) {
            if (!std::isnan(r.cross_level_distance)) detail += fmt(" %.3e", r.cross_level_distance);
        }
        detail += " ";
    }
    return {pass, detail};
}

Outcome zhang_study() {
    const auto ladder = build_ladder(8, 3, 0.25, 1.0, 1.0);
    ZhangStudySpec g;
    g.base_seed = 9;
    ZhangStudySpec r = g;
    r.distribution = NoiseDistribution::Rademacher;
    r.base_seed = 10;
    const auto tg = study_zhang_distribution(ladder, g, 128, 1);
    const auto tr = study_zhang_distribution(ladder, r, 128, 1);
    bool pass = tg.pass && tr.pass;
    std::string detail = fmt("gaussian study %s, rademacher study %s;", tg.pass ? "ok" : "fails",
                             tr.pass ? "ok" : "fails");
    for (const char* stat : {"spacetime_l2_sq", "sup_hminus1_sq"}) {
        const auto cmp = compare_finest_level(tg, tr, stat);
        pass = pass && cmp.pass;
        detail += fmt(" %s |diff|=%.3e bound=%.3e", stat, cmp.rows[0].lhs, cmp.rows[0].rhs);
    }
    return {pass, detail};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "soclimit");
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "soclimit_acceptance_determinism";
    fs::remove_all(root);
    struct Case {
        std::string name;
        std::vector<std::string> args;
        std::string csv;
    };
    const std::vector<Case> cases{
        {"simulate", {"simulate", "--seed", "11", "--set", "Z=16", "--set", "N=2000", "--set", "T=0.004"},
         "trajectory.csv"},
        {"check", {"check", "zhang-energy-mu0", "--replicas", "16", "--set", "Z=8", "--set", "N=200",
                   "--set", "T=0.02"}, "report.csv"},
        {"study", {"study", "zhang", "--replicas", "16", "--levels", "3", "--set", "Z0=4", "--set",
                   "T=0.05"}, "study.csv"},
        {"avalanche", {"avalanche", "--set", "steps=20000", "--set", "Z=32"}, "avalanches.csv"},
    };
    bool pass = true;
    std::string detail;
    for (const auto& c : cases) {
        const fs::path a = root / (c.name + "_a"), b = root / (c.name + "_b");
        auto first = c.args;
        first.insert(first.end(), {"--out-dir", a.string(), "--set", "threads=1"});
        const int ca = cli(first);
        const int cb = cli({c.args[0], "--config", (a / "manifest.txt").string(), "--out-dir",
                            b.string(), "--set", "threads=4"});
        const bool same = ca == cb && fs::exists(a / c.csv) && slurp(a / c.csv) == slurp(b / c.csv);
        pass = pass && same && (ca == 0 || ca == 3);
        detail += c.name + (same ? ":identical " : ":DIFFERS ");
    }
    fs::remove_all(root);
    return {pass, detail};
}

Outcome particle() {
    ParticleConfig cfg;
    cfg.dimension = 1;
    cfg.side = 64;
    cfg.diffusion = 0.5;
    cfg.drive_amount = 0.5;
    cfg.steps = 100000;
    cfg.seed = 12;
    double worst = 0.0;
    const auto run = run_particle_with_avalanches(
        cfg, [&](std::size_t, const ParticleLattice& before, const ParticleLattice& after,
                 const ParticleStep& s) {
            const double change = after.interior_sum() - before.interior_sum();
            const double scale = std::max(1.0, std::abs(before.interior_sum()));
            worst = std::max(worst, std::abs(change - (s.drive - s.boundary_flux)) / scale);
        });
    std::size_t sizes = 0;
    for (const auto& a : run.avalanches) sizes += a.size;
    const bool pass = worst <= kMassTol && sizes == run.total_topplings && run.total_topplings > 0;
    return {pass, fmt("max mass residual=%.2e sum sizes=%zu total topplings=%zu avalanches=%zu", worst,
                      sizes, run.total_topplings, run.avalanches.size())};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"trace-limit", trace_limit},
        {"spectrum", spectrum},
        {"norm-sandwich", sandwich},
        {"btw-estimates", btw_estimates},
        {"zhang-energy-mu0", zhang_energy},
        {"noise-trace", noise_trace},
        {"discrete-vi", vi},
        {"btw-convergence-study", btw_study},
        {"zhang-distribution-study", zhang_study},
        {"determinism", determinism},
        {"particle-accounting", particle},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("%s %2zu %-26s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
