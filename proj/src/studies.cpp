#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

#include "soclimit/diagnostics.hpp"
#include "soclimit/parallel.hpp"
#include "soclimit/prolongation.hpp"

namespace soclimit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct BtwLevelResult {
    std::vector<StateVector> samples;  // linear prolongation at the sample times
    double sup_hminus1_sq = 0.0;
};

BtwLevelResult run_btw_level(const LadderLevel& level, const InitialCondition& initial,
                             std::span<const double> times) {
    const TimeGrid& time = level.time;
    // Frames needed for lin(t): floor(t/tau) and the one after it.
    std::map<std::size_t, std::optional<StateVector>> wanted;
    std::vector<std::pair<std::size_t, double>> located;
    for (double t : times) {
        const double scaled = t / time.tau();
        auto k = static_cast<std::size_t>(std::floor(scaled));
        double frac = scaled - static_cast<double>(k);
        if (k >= time.steps()) {
            k = time.steps();
            frac = 0.0;
        }
        located.emplace_back(k, frac);
        wanted[k];
        if (frac > 0.0) wanted[k + 1];
    }

    SchemeConfig cfg;
    cfg.grid = level.grid;
    cfg.time = time;
    cfg.kind = NonlinearityKind::Btw;
    cfg.initial = initial;
    cfg.stride = time.steps();

    BtwLevelResult result;
    const double h = level.grid.h();
    run_btw_pde(cfg, [&](std::size_t n, const StateVector& state) {
        result.sup_hminus1_sq = std::max(result.sup_hminus1_sq, hminus1_norm_sq_pcx(state.values(), h));
        if (auto it = wanted.find(n); it != wanted.end()) it->second = state;
    });

    for (const auto& [k, frac] : located) {
        const StateVector& a = *wanted.at(k);
        if (frac == 0.0) {
            result.samples.push_back(a);
        } else {
            result.samples.push_back((1.0 - frac) * a + frac * *wanted.at(k + 1));
        }
    }
    return result;
}

}  // namespace

StudyTable study_btw_convergence(const RefinementLadder& ladder, const InitialCondition& initial,
                                 unsigned threads, std::size_t time_samples) {
    if (ladder.levels.size() < 3) throw std::invalid_argument("btw study needs >= 3 levels");
    if (time_samples < 1) throw std::invalid_argument("btw study needs >= 1 time sample");

    std::vector<double> times(time_samples + 1);
    for (std::size_t j = 0; j <= time_samples; ++j) {
        times[j] = ladder.horizon * static_cast<double>(j) / static_cast<double>(time_samples);
    }

    const auto levels = parallel_map(ladder.levels.size(), threads, [&](std::size_t m) {
        return run_btw_level(ladder.levels[m], initial, times);
    });

    StudyTable table;
    table.pass = true;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < levels.size(); ++m) {
        double distance = kNaN;
        if (m + 1 < levels.size()) {
            distance = 0.0;
            for (std::size_t j = 0; j < times.size(); ++j) {
                distance = std::max(distance, hminus1_distance_cross_grid(
                                                  pcx(levels[m].samples[j]), pcx(levels[m + 1].samples[j])));
            }
            table.pass = table.pass && distance < previous;
            previous = distance;
        }
        const LadderLevel& level = ladder.levels[m];
        table.rows.push_back({m, level.grid.cells(), level.time.tau(), "sup_hminus1_sq",
                              levels[m].sup_hminus1_sq, 0.0, distance});
    }
    return table;
}

StudyTable study_zhang_distribution(const RefinementLadder& ladder, const ZhangStudySpec& spec,
                                    std::size_t replicas, unsigned threads) {
    if (ladder.levels.size() < 3) throw std::invalid_argument("zhang study needs >= 3 levels");
    if (replicas < 2) throw std::invalid_argument("zhang study needs R >= 2");

    const Statistic stats[] = {Statistic::SpacetimeL2Sq, Statistic::SupHminus1Sq};
    const std::size_t levels = ladder.levels.size();

    // One task per (level, replica), so every replica's value is scheduling independent.
    const auto samples = parallel_map(levels * replicas, threads, [&](std::size_t task) {
        const std::size_t m = task / replicas;
        const std::size_t r = task % replicas;
        SchemeConfig cfg;
        cfg.grid = ladder.levels[m].grid;
        cfg.time = ladder.levels[m].time;
        cfg.kind = NonlinearityKind::Zhang;
        cfg.mu = spec.mu;
        if (spec.noisy) cfg.noise = NoiseSpec{spec.distribution, SeedSpec{spec.base_seed, m, r}};
        cfg.initial = spec.initial;
        return replica_statistics(cfg, stats);
    });

    StudyTable table;
    table.pass = true;
    for (std::size_t s = 0; s < std::size(stats); ++s) {
        std::vector<McEstimate> per_level;
        for (std::size_t m = 0; m < levels; ++m) {
            std::vector<double> values(replicas);
            for (std::size_t r = 0; r < replicas; ++r) values[r] = samples[m * replicas + r][s];
            per_level.push_back(summarize(to_string(stats[s]), values));
        }
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < levels; ++m) {
            double distance = kNaN;
            if (m + 1 < levels) {
                distance = std::abs(per_level[m + 1].mean - per_level[m].mean);
                table.pass = table.pass && distance < previous;
                previous = distance;
            }
            table.rows.push_back({m, ladder.levels[m].grid.cells(), ladder.levels[m].time.tau(),
                                  per_level[m].statistic, per_level[m].mean, per_level[m].std_error,
                                  distance});
        }
        const double finest_se =
            std::hypot(per_level[levels - 1].std_error, per_level[levels - 2].std_error);
        table.pass = table.pass && previous <= kMcSigmas * finest_se;
    }
    return table;
}

EstimateReport compare_finest_level(const StudyTable& a, const StudyTable& b,
                                    const std::string& statistic) {
    const auto ra = a.rows_for(statistic);
    const auto rb = b.rows_for(statistic);
    if (ra.empty() || rb.empty()) throw std::invalid_argument("statistic missing from study");
    const StudyRow& fa = ra.back();
    const StudyRow& fb = rb.back();
    if (fa.cells != fb.cells) throw std::invalid_argument("studies end on different levels");
    EstimateReport report{"finest-level-agreement:" + statistic, {}, true};
    report.add(fa.level, std::abs(fa.value - fb.value),
               kMcSigmas * std::hypot(fa.std_error, fb.std_error), 0.0);
    return report;
}

}  // namespace soclimit
