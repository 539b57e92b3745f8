#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "soclimit/ladder.hpp"
#include "soclimit/lattice.hpp"
#include "soclimit/noise.hpp"
#include "soclimit/scheme.hpp"

namespace soclimit {

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct EstimateRow {
    std::size_t index = 0;  // step or level
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;      // rhs - lhs
    double tolerance = 0.0;  // row passes iff slack >= -tolerance
    bool pass = true;
};

struct EstimateReport {
    std::string name;
    std::vector<EstimateRow> rows;
    bool pass = true;

    void add(std::size_t index, double lhs, double rhs, double tolerance);
    double min_slack() const noexcept;
};

/// Monte Carlo mean with standard error (sample stdev / sqrt(R)).
struct McEstimate {
    std::string statistic;
    std::size_t replicas = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

/// Order-independent summary of per-replica samples (R >= 2).
McEstimate summarize(std::string statistic, std::span<const double> samples);

// ---------------------------------------------------------------------------
// Explicit-constant inequalities (sharp checks)
// ---------------------------------------------------------------------------

inline constexpr double kBtwCflLimit = 0.25;
inline constexpr double kZhangCflLimit = 1.0 / 12.0;
inline constexpr double kDeterministicTolerance = 1e-10;
inline constexpr double kViTolerance = 1e-9;
inline constexpr double kMcSigmas = 3.0;

/// max_n ||u^n||_{-1}^2 <= ||u*||_{-1}^2; needs tau/h^2 <= 1/4.
EstimateReport check_btw_energy(const Trajectory& traj);

/// ||u^{n+1} - u^n||_{-1}^2 <= 4 tau^2 / h^2.
EstimateReport check_btw_continuity(const Trajectory& traj);

/// sup_t ||lin(t) - left(t)||_{H^{-1}}^2 <= 4 tau^2 / h^2 for a BTW trajectory.
EstimateReport check_interpolation_gap(const Trajectory& traj);

/// Per-step gaps ||pcx(u^{k+1} - u^k)||_{H^{-1}}^2; their max is the sup over t
/// of ||lin(t) - left(t)||_{H^{-1}}^2.
std::vector<double> interpolation_gaps(const Trajectory& traj);

/**
 * Residual of the discrete variational inequality for a BTW trajectory and a
 * test curve v, linear in time between its nodes v^0..v^N.  Row n holds
 * lhs = ||v(t_n) - u^n||_{-1}^2 and rhs = the sum of the remaining terms.
 */
EstimateReport vi_residual(const Trajectory& traj, std::span<const StateVector> test_nodes);

/// The five right-hand terms of the variational inequality, accumulated to t_n.
struct ViTerms {
    double initial = 0.0;         // ||v(0) - u*||_{-1}^2
    double varphi_test = 0.0;     // 2 int varphi_h(v)
    double varphi_scheme = 0.0;   // 2 int varphi_h(left u)
    double transport = 0.0;       // 2 int <v - lin u, dv/dt>_{-1}
    double interpolation = 0.0;   // 2 int <left u - lin u, -Delta_h phi(left u)>_{-1}

    double rhs() const noexcept {
        return initial + varphi_test - varphi_scheme + transport + interpolation;
    }
};
std::vector<ViTerms> vi_terms(const Trajectory& traj, std::span<const StateVector> test_nodes);

// ---------------------------------------------------------------------------
// Ensemble checks
// ---------------------------------------------------------------------------

/**
 * E||X^n||_{-1}^2 + tau sum_{k<n} E||phi(X^k)||_0^2 <= E||x^0||_{-1}^2 + n tau Tr((-Delta_h)^{-1})
 * for mu = 0, tau < 1, tau/h^2 <= 1/12.  Row tolerance: 3 standard errors.
 */
EstimateReport check_zhang_energy_mu0(std::span<const Trajectory> ensemble);

/// max_n E||X^{n+1} - X^n||_{-1}^2 / (tau/h^2).
McEstimate zhang_continuity_ratio(std::span<const Trajectory> ensemble);

/// max_k E||pcx(X^{k+1} - X^k)||_{H^{-1}}^2 / (tau/h^2).
McEstimate interpolation_gap_ratio(std::span<const Trajectory> ensemble);

/// Bounded-ratio trend across a ladder: ratio_m <= ratio_{m-1} within 3
/// combined standard errors.
EstimateReport check_ratio_trend(std::string name, std::span<const McEstimate> per_level);

inline EstimateReport check_zhang_continuity(std::span<const McEstimate> per_level) {
    return check_ratio_trend("zhang-continuity", per_level);
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

enum class Statistic {
    FinalNormMinus1Sq,  // ||X^N||_{-1}^2
    SpacetimeL2Sq,      // int_0^T ||lin X||_{L^2}^2 dt
    MaxNormMinus1Sq,    // max_n ||X^n||_{-1}^2
    SupHminus1Sq,       // max_n ||pcx X^n||_{H^{-1}}^2 = sup_t ||lin X(t)||_{H^{-1}}^2
};

std::string to_string(Statistic s);

/// cfg with its noise seed's replica replaced by r.
SchemeConfig replica_config(const SchemeConfig& cfg, std::size_t replica);

/// Runs one replica of the weakly driven scheme and evaluates the statistics online.
std::vector<double> replica_statistics(const SchemeConfig& cfg, std::span<const Statistic> stats);

/// Replica r uses SeedSpec(base, level, r); the result does not depend on `threads`.
McEstimate mc_run(Statistic statistic, const SchemeConfig& cfg, std::size_t replicas,
                  unsigned threads = 1);

McEstimate mc_run(std::string name, std::size_t replicas, unsigned threads,
                  const std::function<double(std::size_t replica)>& sample);

/// Runs R replicas of the weakly driven scheme in parallel, keeping full trajectories.
std::vector<Trajectory> run_zhang_ensemble(const SchemeConfig& cfg, std::size_t replicas,
                                           unsigned threads = 1);

/// (1/h) ||xi||_{-1}^2 over `draws` independent noise rows.
McEstimate noise_trace_estimate(const GridSpec& grid, NoiseDistribution distribution,
                                std::uint64_t base_seed, std::size_t draws, unsigned threads = 1);

/// |MC mean - Tr((-Delta_h)^{-1})| <= 4 standard errors.
EstimateReport check_noise_trace(const GridSpec& grid, NoiseDistribution distribution,
                                 std::uint64_t base_seed, std::size_t draws, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Refinement studies
// ---------------------------------------------------------------------------

struct StudyRow {
    std::size_t level = 0;
    std::size_t cells = 0;
    double tau = 0.0;
    std::string statistic;
    double value = 0.0;
    double std_error = 0.0;
    /// Distance to the next finer level; NaN on the finest level.
    double cross_level_distance = 0.0;
};

struct StudyTable {
    std::vector<StudyRow> rows;
    bool pass = false;

    std::vector<StudyRow> rows_for(const std::string& statistic) const;
};

/**
 * BTW Cauchy study: d_m = max over t in {jT/samples} of the H^{-1} distance
 * between the linear-in-time prolongations on levels m and m+1.
 * Pass iff d_m is strictly decreasing.
 */
StudyTable study_btw_convergence(const RefinementLadder& ladder, const InitialCondition& initial,
                                 unsigned threads = 1, std::size_t time_samples = 16);

struct ZhangStudySpec {
    double mu = 0.0;
    NoiseDistribution distribution = NoiseDistribution::Gaussian;
    bool noisy = true;  // false: deterministic replicas
    std::uint64_t base_seed = 0;
    InitialCondition initial = InitialCondition::sine(2.0, 1.0);
};

/**
 * Per-level Monte Carlo means of E int ||lin X||_{L^2}^2 and
 * E sup_t ||lin X||_{H^{-1}}^2.  Pass iff, for both statistics, successive
 * level differences shrink and the finest pair agrees within 3 combined
 * standard errors.
 */
StudyTable study_zhang_distribution(const RefinementLadder& ladder, const ZhangStudySpec& spec,
                                    std::size_t replicas, unsigned threads = 1);

/// Finest-level agreement of one statistic across two Zhang studies.
EstimateReport compare_finest_level(const StudyTable& a, const StudyTable& b,
                                    const std::string& statistic);

}  // namespace soclimit
