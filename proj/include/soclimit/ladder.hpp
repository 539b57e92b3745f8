#pragma once

#include <cstddef>
#include <vector>

#include "soclimit/lattice.hpp"

namespace soclimit {

struct LadderLevel {
    GridSpec grid;
    TimeGrid time;

    double cfl_ratio() const noexcept { return time.tau() / (grid.h() * grid.h()); }
};

/// Refinement sequence h_m -> 0 with tau_m / h_m^2 -> 0.
struct RefinementLadder {
    std::vector<LadderLevel> levels;
    double horizon = 1.0;
    double gamma = 1.0;
    double c = 1.0;
};

/// Largest admissible tau/h^2 on a ladder level.
inline constexpr double kLadderCflCap = 1.0 / 12.0;

/**
 * Z_m = Z0 2^m, target tau_m* = c_eff h_m^{2+gamma} with
 * c_eff = min(c, h_0^{-gamma} / 12), N_m = ceil(T / tau_m*), tau_m = T / N_m.
 *
 * Every level satisfies tau_m <= c h_m^{2+gamma} and tau_m / h_m^2 <= 1/12, and
 * the ratios tau_m / h_m^2 are strictly decreasing.
 */
RefinementLadder build_ladder(std::size_t z0, std::size_t levels, double horizon, double gamma,
                              double c);

}  // namespace soclimit
