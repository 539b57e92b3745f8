#include "soclimit/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace soclimit {

RefinementLadder build_ladder(std::size_t z0, std::size_t levels, double horizon, double gamma,
                              double c) {
    if (levels < 1) throw std::invalid_argument("ladder needs at least one level");
    if (z0 < 2) throw std::invalid_argument("ladder needs Z0 >= 2");
    if (!(gamma > 0.0) || !(c > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("ladder needs gamma > 0, c > 0 and T > 0");
    }

    const double h0 = 1.0 / static_cast<double>(z0);
    // Capping the constant instead of each level keeps the ratios geometric.
    const double c_eff = std::min(c, kLadderCflCap / std::pow(h0, gamma));

    RefinementLadder ladder;
    ladder.horizon = horizon;
    ladder.gamma = gamma;
    ladder.c = c;
    double previous_ratio = kLadderCflCap * 2.0;
    for (std::size_t m = 0; m < levels; ++m) {
        const GridSpec grid(z0 << m);
        const double h = grid.h();
        const double target = c_eff * std::pow(h, 2.0 + gamma);
        auto steps = static_cast<std::size_t>(std::ceil(horizon / target));
        steps = std::max<std::size_t>(steps, 1);
        TimeGrid time(horizon, steps);
        while (time.tau() > target || time.tau() / (h * h) > kLadderCflCap ||
               !(time.tau() / (h * h) < previous_ratio)) {
            time = TimeGrid(horizon, time.steps() + 1);
        }
        previous_ratio = time.tau() / (h * h);
        ladder.levels.push_back({grid, time});
    }
    return ladder;
}

}  // namespace soclimit
