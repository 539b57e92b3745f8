#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "soclimit/lattice.hpp"
#include "soclimit/noise.hpp"
#include "soclimit/nonlinearity.hpp"

namespace soclimit {

/**
 * Named initial data sampled at the interior nodes:
 *   zero                 -> 0
 *   sine(a, k)           -> a sin(k pi x_i)
 *   plateau(a, l, r)     -> a on l <= x_i <= r, 0 elsewhere
 */
struct InitialCondition {
    enum class Shape { Zero, Sine, Plateau };

    Shape shape = Shape::Zero;
    double amplitude = 0.0;
    double wavenumber = 1.0;
    double left = 0.0;
    double right = 1.0;

    static InitialCondition zero() { return {}; }
    static InitialCondition sine(double a, double k) { return {Shape::Sine, a, k, 0.0, 1.0}; }
    static InitialCondition plateau(double a, double l, double r) {
        return {Shape::Plateau, a, 1.0, l, r};
    }

    StateVector sample(const GridSpec& grid) const;
    std::string name() const;
};

InitialCondition::Shape parse_initial_shape(std::string_view name);

struct NoiseSpec {
    NoiseDistribution distribution = NoiseDistribution::Gaussian;
    SeedSpec seed;
};

struct SchemeConfig {
    GridSpec grid{2};
    TimeGrid time{1.0, 1};
    NonlinearityKind kind = NonlinearityKind::Zhang;
    double mu = 0.0;
    std::optional<NoiseSpec> noise;  // absent: deterministic run
    InitialCondition initial;
    /// Explicit initial vector; overrides `initial` when set.
    std::optional<StateVector> initial_state;
    /// Store every `stride`-th state (the last state is always stored).
    std::size_t stride = 1;

    StateVector initial_vector() const;
    double cfl_ratio() const noexcept { return time.tau() / (grid.h() * grid.h()); }
};

struct Trajectory {
    SchemeConfig config;
    std::vector<StateVector> states;
    std::vector<std::size_t> steps;  // time index of each stored state

    bool complete() const noexcept { return steps.size() == config.time.steps() + 1; }
};

/// Called with every state n = 0..N as it is produced.
using StateObserver = std::function<void(std::size_t n, const StateVector& state)>;

// ---------------------------------------------------------------------------
// Single steps.  All share one kernel, so replay is bit-exact.
// ---------------------------------------------------------------------------

/// out = u - tau (-Delta_h) phi(u); phi_scratch has the length of u.
void diffusion_step(NonlinearityKind kind, std::span<const double> u, double tau, double h,
                    std::span<double> phi_scratch, std::span<double> out) noexcept;

/// u + tau Delta_h phi_Zhang(u) + increment.
StateVector step_zhang(const StateVector& u, double tau, const StateVector& increment);

/// u + tau Delta_h phi_BTW(u).
StateVector step_btw_pde(const StateVector& u, double tau);

// ---------------------------------------------------------------------------
// Runs.  A non-finite state raises NumericalFailure with its step index.
// ---------------------------------------------------------------------------

/// Weakly driven scheme with cfg.kind (normally Zhang), drift mu and the optional noise.
Trajectory run_zhang(const SchemeConfig& cfg, const StateObserver& observer = {});

/// Noise-free, drift-free scheme with cfg.kind.
Trajectory run_pure_diffusion(const SchemeConfig& cfg, const StateObserver& observer = {});

/// Deterministic BTW diffusion (cfg.kind must be Btw).
Trajectory run_btw_pde(const SchemeConfig& cfg, const StateObserver& observer = {});

}  // namespace soclimit
