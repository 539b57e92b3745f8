#include "soclimit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "soclimit/errors.hpp"
#include "soclimit/nonlinearity.hpp"
#include "soclimit/parallel.hpp"
#include "soclimit/prolongation.hpp"

namespace soclimit {

void EstimateReport::add(std::size_t index, double lhs, double rhs, double tolerance) {
    const double slack = rhs - lhs;
    const bool ok = slack >= -tolerance;
    rows.push_back({index, lhs, rhs, slack, tolerance, ok});
    pass = pass && ok;
}

double EstimateReport::min_slack() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) m = std::min(m, r.slack);
    return m;
}

McEstimate summarize(std::string statistic, std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("Monte Carlo estimate needs R >= 2");
    const double r = static_cast<double>(samples.size());
    const double mean = pairwise_sum(samples) / r;
    std::vector<double> dev(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = (samples[i] - mean) * (samples[i] - mean);
    const double var = pairwise_sum(dev) / (r - 1.0);
    return {std::move(statistic), samples.size(), mean, std::sqrt(var / r)};
}

namespace {

void require_complete(const Trajectory& traj, const char* check) {
    if (!traj.complete()) {
        throw HypothesisViolation(std::string(check) + " needs every frame (stride 1)");
    }
}

void require_btw(const Trajectory& traj, const char* check) {
    require_complete(traj, check);
    if (traj.config.kind != NonlinearityKind::Btw) {
        throw HypothesisViolation(std::string(check) + " needs a btw trajectory");
    }
}

double norm_minus1_sq(const StateVector& u) { return inner_minus1(u, u); }

void require_same_ensemble(std::span<const Trajectory> ensemble, const char* check) {
    if (ensemble.size() < 2) throw HypothesisViolation(std::string(check) + " needs R >= 2");
    const auto& first = ensemble.front().config;
    for (const auto& traj : ensemble) {
        require_complete(traj, check);
        const auto& cfg = traj.config;
        if (!(cfg.grid == first.grid) || !(cfg.time == first.time) || cfg.kind != first.kind ||
            cfg.mu != first.mu || !(cfg.initial_vector() == first.initial_vector())) {
            throw HypothesisViolation(std::string(check) +
                                      " needs replicas of a single configuration");
        }
    }
}

}  // namespace

EstimateReport check_btw_energy(const Trajectory& traj) {
    require_btw(traj, "btw-energy");
    if (traj.config.cfl_ratio() > kBtwCflLimit) {
        throw HypothesisViolation("btw-energy needs tau/h^2 <= 1/4, got " +
                                  std::to_string(traj.config.cfl_ratio()));
    }
    EstimateReport report{"btw-energy", {}, true};
    const double bound = norm_minus1_sq(traj.states.front());
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        report.add(n, norm_minus1_sq(traj.states[n]), bound, kDeterministicTolerance);
    }
    return report;
}

EstimateReport check_btw_continuity(const Trajectory& traj) {
    require_btw(traj, "btw-continuity");
    const double h = traj.config.grid.h();
    const double tau = traj.config.time.tau();
    const double bound = 4.0 * tau * tau / (h * h);
    EstimateReport report{"btw-continuity", {}, true};
    for (std::size_t n = 0; n + 1 < traj.states.size(); ++n) {
        report.add(n, norm_minus1_sq(traj.states[n + 1] - traj.states[n]), bound,
                   kDeterministicTolerance);
    }
    return report;
}

std::vector<double> interpolation_gaps(const Trajectory& traj) {
    require_complete(traj, "interp-gap");
    const double h = traj.config.grid.h();
    std::vector<double> gaps;
    gaps.reserve(traj.states.size());
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        const StateVector diff = traj.states[k + 1] - traj.states[k];
        gaps.push_back(hminus1_norm_sq_pcx(diff.values(), h));
    }
    return gaps;
}

EstimateReport check_interpolation_gap(const Trajectory& traj) {
    require_btw(traj, "interp-gap");
    const double h = traj.config.grid.h();
    const double tau = traj.config.time.tau();
    const double bound = 4.0 * tau * tau / (h * h);
    EstimateReport report{"interp-gap", {}, true};
    const auto gaps = interpolation_gaps(traj);
    for (std::size_t k = 0; k < gaps.size(); ++k) report.add(k, gaps[k], bound, kDeterministicTolerance);
    return report;
}

std::vector<ViTerms> vi_terms(const Trajectory& traj, std::span<const StateVector> test_nodes) {
    require_btw(traj, "vi");
    const std::size_t frames = traj.states.size();
    if (test_nodes.size() != frames) {
        throw std::invalid_argument("test curve needs one node per grid time");
    }
    const GridSpec& grid = traj.config.grid;
    const double h = grid.h();
    const double tau = traj.config.time.tau();
    const auto& u = traj.states;

    std::vector<ViTerms> terms(frames);
    ViTerms acc;
    acc.initial = norm_minus1_sq(test_nodes[0] - u[0]);
    terms[0] = acc;
    for (std::size_t k = 0; k + 1 < frames; ++k) {
        const StateVector& v0 = test_nodes[k];
        const StateVector& v1 = test_nodes[k + 1];

        // int varphi_h(v): v is affine in time on the step, psi integrated exactly.
        double varphi_v = 0.0;
        for (std::size_t i = 0; i < v0.size(); ++i) varphi_v += psi_segment_mean(v0[i], v1[i]);
        acc.varphi_test += 2.0 * tau * h * varphi_v;

        acc.varphi_scheme += 2.0 * tau * varphi_h(u[k]);

        // v - lin u is affine in time and dv/dt = (v1 - v0)/tau is constant.
        const StateVector mid = 0.5 * ((v0 - u[k]) + (v1 - u[k + 1]));
        acc.transport += 2.0 * inner_minus1(mid, v1 - v0);

        // left u - lin u = -s (u^{k+1} - u^k), s in [0, 1): int_0^1 s ds = 1/2.
        const StateVector drive = apply_neg_laplacian(phi(NonlinearityKind::Btw, u[k]));
        acc.interpolation += 2.0 * tau * (-0.5) * inner_minus1(u[k + 1] - u[k], drive);

        terms[k + 1] = acc;
    }
    return terms;
}

EstimateReport vi_residual(const Trajectory& traj, std::span<const StateVector> test_nodes) {
    const auto terms = vi_terms(traj, test_nodes);
    EstimateReport report{"vi", {}, true};
    for (std::size_t n = 0; n < terms.size(); ++n) {
        const double lhs = norm_minus1_sq(test_nodes[n] - traj.states[n]);
        report.add(n, lhs, terms[n].rhs(), kViTolerance);
    }
    return report;
}

EstimateReport check_zhang_energy_mu0(std::span<const Trajectory> ensemble) {
    require_same_ensemble(ensemble, "zhang-energy-mu0");
    const SchemeConfig& cfg = ensemble.front().config;
    if (cfg.kind != NonlinearityKind::Zhang) throw HypothesisViolation("zhang-energy-mu0 needs zhang");
    if (cfg.mu != 0.0) throw HypothesisViolation("zhang-energy-mu0 needs mu = 0");
    if (!(cfg.time.tau() < 1.0)) throw HypothesisViolation("zhang-energy-mu0 needs tau < 1");
    if (cfg.cfl_ratio() > kZhangCflLimit) {
        throw HypothesisViolation("zhang-energy-mu0 needs tau/h^2 <= 1/12, got " +
                                  std::to_string(cfg.cfl_ratio()));
    }

    const std::size_t frames = cfg.time.steps() + 1;
    const std::size_t replicas = ensemble.size();
    const double tau = cfg.time.tau();
    const double trace = trace_inv_neg_laplacian(cfg.grid);

    // lhs[n][r] = ||X^n||_{-1}^2 + tau sum_{k<n} ||phi(X^k)||_0^2
    std::vector<std::vector<double>> lhs(frames, std::vector<double>(replicas));
    std::vector<double> initial(replicas);
    for (std::size_t r = 0; r < replicas; ++r) {
        const auto& states = ensemble[r].states;
        initial[r] = norm_minus1_sq(states.front());
        double dissipation = 0.0;
        for (std::size_t n = 0; n < frames; ++n) {
            lhs[n][r] = norm_minus1_sq(states[n]) + dissipation;
            const StateVector flux = phi(NonlinearityKind::Zhang, states[n]);
            dissipation += tau * inner0(flux, flux);
        }
    }
    const double initial_mean = pairwise_sum(initial) / static_cast<double>(replicas);

    EstimateReport report{"zhang-energy-mu0", {}, true};
    for (std::size_t n = 0; n < frames; ++n) {
        const McEstimate est = summarize("lhs", lhs[n]);
        const double rhs = initial_mean + static_cast<double>(n) * tau * trace;
        report.add(n, est.mean, rhs, kMcSigmas * est.std_error);
    }
    return report;
}

namespace {

// max over steps of the replica mean of f(k, r), scaled by 1/(tau/h^2).
McEstimate max_step_mean_ratio(std::span<const Trajectory> ensemble, const std::string& name,
                               const std::function<double(const StateVector&)>& f) {
    require_same_ensemble(ensemble, name.c_str());
    const SchemeConfig& cfg = ensemble.front().config;
    const std::size_t steps = cfg.time.steps();
    const std::size_t replicas = ensemble.size();
    const double ratio = cfg.cfl_ratio();

    McEstimate best{name, replicas, -1.0, 0.0};
    std::vector<double> samples(replicas);
    for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t r = 0; r < replicas; ++r) {
            const auto& states = ensemble[r].states;
            samples[r] = f(states[k + 1] - states[k]);
        }
        const McEstimate est = summarize(name, samples);
        if (est.mean > best.mean) best = est;
    }
    best.mean /= ratio;
    best.std_error /= ratio;
    return best;
}

}  // namespace

McEstimate zhang_continuity_ratio(std::span<const Trajectory> ensemble) {
    return max_step_mean_ratio(ensemble, "zhang-continuity-ratio",
                               [](const StateVector& d) { return inner_minus1(d, d); });
}

McEstimate interpolation_gap_ratio(std::span<const Trajectory> ensemble) {
    return max_step_mean_ratio(ensemble, "interp-gap-ratio", [](const StateVector& d) {
        return hminus1_norm_sq_pcx(d.values(), d.grid().h());
    });
}

EstimateReport check_ratio_trend(std::string name, std::span<const McEstimate> per_level) {
    if (per_level.empty()) throw std::invalid_argument("trend check needs at least one level");
    EstimateReport report{std::move(name), {}, true};
    report.add(0, per_level[0].mean, per_level[0].mean, 0.0);
    for (std::size_t m = 1; m < per_level.size(); ++m) {
        const double se = std::hypot(per_level[m].std_error, per_level[m - 1].std_error);
        report.add(m, per_level[m].mean, per_level[m - 1].mean, kMcSigmas * se);
    }
    return report;
}

std::string to_string(Statistic s) {
    switch (s) {
        case Statistic::FinalNormMinus1Sq: return "final_norm_minus1_sq";
        case Statistic::SpacetimeL2Sq: return "spacetime_l2_sq";
        case Statistic::MaxNormMinus1Sq: return "max_norm_minus1_sq";
        case Statistic::SupHminus1Sq: return "sup_hminus1_sq";
    }
    return "unknown";
}

SchemeConfig replica_config(const SchemeConfig& cfg, std::size_t replica) {
    SchemeConfig out = cfg;
    if (out.noise) out.noise->seed.replica = replica;
    return out;
}

std::vector<double> replica_statistics(const SchemeConfig& cfg, std::span<const Statistic> stats) {
    const double h = cfg.grid.h();
    const double tau = cfg.time.tau();
    std::vector<double> scratch(cfg.grid.interior_count());
    std::vector<double> previous(cfg.grid.interior_count());

    double spacetime = 0.0;
    double max_minus1 = 0.0;
    double max_hminus1 = 0.0;
    double final_minus1 = 0.0;
    double prev_sq = 0.0;

    const bool want_minus1 = std::any_of(stats.begin(), stats.end(), [](Statistic s) {
        return s == Statistic::MaxNormMinus1Sq || s == Statistic::FinalNormMinus1Sq;
    });
    const bool want_hminus1 =
        std::find(stats.begin(), stats.end(), Statistic::SupHminus1Sq) != stats.end();

    SchemeConfig run_cfg = cfg;
    run_cfg.stride = cfg.time.steps();
    run_zhang(run_cfg, [&](std::size_t n, const StateVector& state) {
        const auto values = state.values();
        const double sq = inner0(values, values, h);
        if (n > 0) {
            // int over the step of ||(1-s)a + s b||^2 = tau/3 (|a|^2 + <a,b> + |b|^2)
            spacetime += tau / 3.0 * (prev_sq + inner0(previous, values, h) + sq);
        }
        std::copy(values.begin(), values.end(), previous.begin());
        prev_sq = sq;
        if (want_minus1) {
            final_minus1 = norm_minus1_sq(values, h, scratch);
            max_minus1 = std::max(max_minus1, final_minus1);
        }
        if (want_hminus1) max_hminus1 = std::max(max_hminus1, hminus1_norm_sq_pcx(values, h));
    });

    std::vector<double> out;
    out.reserve(stats.size());
    for (Statistic s : stats) {
        switch (s) {
            case Statistic::FinalNormMinus1Sq: out.push_back(final_minus1); break;
            case Statistic::SpacetimeL2Sq: out.push_back(spacetime); break;
            case Statistic::MaxNormMinus1Sq: out.push_back(max_minus1); break;
            case Statistic::SupHminus1Sq: out.push_back(max_hminus1); break;
        }
    }
    return out;
}

McEstimate mc_run(std::string name, std::size_t replicas, unsigned threads,
                  const std::function<double(std::size_t replica)>& sample) {
    if (replicas < 2) throw std::invalid_argument("Monte Carlo run needs R >= 2");
    const auto samples = parallel_map(replicas, threads, sample);
    return summarize(std::move(name), samples);
}

McEstimate mc_run(Statistic statistic, const SchemeConfig& cfg, std::size_t replicas,
                  unsigned threads) {
    const Statistic stats[] = {statistic};
    return mc_run(to_string(statistic), replicas, threads, [&](std::size_t r) {
        return replica_statistics(replica_config(cfg, r), stats).front();
    });
}

std::vector<Trajectory> run_zhang_ensemble(const SchemeConfig& cfg, std::size_t replicas,
                                           unsigned threads) {
    return parallel_map(replicas, threads,
                        [&](std::size_t r) { return run_zhang(replica_config(cfg, r)); });
}

McEstimate noise_trace_estimate(const GridSpec& grid, NoiseDistribution distribution,
                                std::uint64_t base_seed, std::size_t draws, unsigned threads) {
    const NoiseStream stream(distribution, SeedSpec{base_seed, grid.cells(), 0});
    const double h = grid.h();
    return mc_run("noise_trace", draws, threads, [&](std::size_t n) {
        std::vector<double> xi(grid.interior_count());
        std::vector<double> scratch(grid.interior_count());
        stream.fill_row(n, xi);
        return norm_minus1_sq(xi, h, scratch) / h;
    });
}

EstimateReport check_noise_trace(const GridSpec& grid, NoiseDistribution distribution,
                                 std::uint64_t base_seed, std::size_t draws, unsigned threads) {
    const McEstimate est = noise_trace_estimate(grid, distribution, base_seed, draws, threads);
    EstimateReport report{"noise-trace", {}, true};
    report.add(grid.cells(), std::abs(est.mean - trace_inv_neg_laplacian(grid)), 4.0 * est.std_error,
               0.0);
    return report;
}

std::vector<StudyRow> StudyTable::rows_for(const std::string& statistic) const {
    std::vector<StudyRow> out;
    for (const auto& row : rows) {
        if (row.statistic == statistic) out.push_back(row);
    }
    return out;
}

}  // namespace soclimit
