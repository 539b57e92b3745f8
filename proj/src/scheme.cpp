#include "soclimit/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "soclimit/errors.hpp"

namespace soclimit {

InitialCondition::Shape parse_initial_shape(std::string_view name) {
    if (name == "zero") return InitialCondition::Shape::Zero;
    if (name == "sine") return InitialCondition::Shape::Sine;
    if (name == "plateau") return InitialCondition::Shape::Plateau;
    throw std::invalid_argument("unknown initial condition '" + std::string(name) +
                                "' (expected zero, sine or plateau)");
}

StateVector InitialCondition::sample(const GridSpec& grid) const {
    StateVector u(grid);
    for (std::size_t i = 1; i < grid.cells(); ++i) {
        const double x = grid.node(i);
        switch (shape) {
            case Shape::Zero:
                break;
            case Shape::Sine:
                u[i - 1] = amplitude * std::sin(wavenumber * std::numbers::pi * x);
                break;
            case Shape::Plateau:
                u[i - 1] = (x >= left && x <= right) ? amplitude : 0.0;
                break;
        }
    }
    return u;
}

std::string InitialCondition::name() const {
    std::ostringstream os;
    os.precision(17);
    switch (shape) {
        case Shape::Zero: return "zero";
        case Shape::Sine: os << "sine(" << amplitude << "," << wavenumber << ")"; break;
        case Shape::Plateau: os << "plateau(" << amplitude << "," << left << "," << right << ")"; break;
    }
    return os.str();
}

StateVector SchemeConfig::initial_vector() const {
    if (initial_state) {
        if (!(initial_state->grid() == grid)) {
            throw std::invalid_argument("initial state does not match the configured grid");
        }
        return *initial_state;
    }
    return initial.sample(grid);
}

void diffusion_step(NonlinearityKind kind, std::span<const double> u, double tau, double h,
                    std::span<double> phi_scratch, std::span<double> out) noexcept {
    phi(kind, u, phi_scratch);
    const std::size_t n = u.size();
    const double factor = tau / (h * h);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? phi_scratch[i - 1] : 0.0;
        const double right = i + 1 < n ? phi_scratch[i + 1] : 0.0;
        out[i] = u[i] - factor * (2.0 * phi_scratch[i] - left - right);
    }
}

StateVector step_zhang(const StateVector& u, double tau, const StateVector& increment) {
    if (!(u.grid() == increment.grid())) throw std::invalid_argument("increment grid mismatch");
    StateVector scratch(u.grid());
    StateVector out(u.grid());
    diffusion_step(NonlinearityKind::Zhang, u.values(), tau, u.grid().h(), scratch.values(),
                   out.values());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += increment[i];
    return out;
}

StateVector step_btw_pde(const StateVector& u, double tau) {
    StateVector scratch(u.grid());
    StateVector out(u.grid());
    diffusion_step(NonlinearityKind::Btw, u.values(), tau, u.grid().h(), scratch.values(),
                   out.values());
    return out;
}

namespace {

// Shared driver: increments are added after the diffusion kernel, exactly as
// step_zhang does, so stored trajectories replay bit-exactly.
Trajectory run_scheme(const SchemeConfig& cfg, bool driven, const StateObserver& observer) {
    if (cfg.stride < 1) throw std::invalid_argument("stride must be >= 1");
    const GridSpec grid = cfg.grid;
    const std::size_t steps = cfg.time.steps();
    const double tau = cfg.time.tau();
    const double h = grid.h();

    Trajectory traj{cfg, {}, {}};
    traj.states.reserve(steps / cfg.stride + 2);

    StateVector current = cfg.initial_vector();
    StateVector next(grid);
    StateVector scratch(grid);
    StateVector increment(grid);
    std::vector<double> xi(grid.interior_count());
    std::optional<NoiseStream> stream;
    if (driven && cfg.noise) stream.emplace(cfg.noise->distribution, cfg.noise->seed);

    auto record = [&](std::size_t n) {
        if (observer) observer(n, current);
        if (n % cfg.stride == 0 || n == steps) {
            traj.states.push_back(current);
            traj.steps.push_back(n);
        }
    };

    record(0);
    for (std::size_t n = 0; n < steps; ++n) {
        diffusion_step(cfg.kind, current.values(), tau, h, scratch.values(), next.values());
        if (driven) {
            if (stream) {
                stream->fill_row(n, xi);
            } else {
                std::fill(xi.begin(), xi.end(), 0.0);
            }
            scaled_increment(xi, cfg.mu, tau, h, increment.values());
            for (std::size_t i = 0; i < next.size(); ++i) next[i] += increment[i];
        }
        if (!next.all_finite()) {
            std::string what = "non-finite state";
            if (cfg.noise) {
                const SeedSpec& seed = cfg.noise->seed;
                what += "; noise seed base=" + std::to_string(seed.base_seed) +
                        " level=" + std::to_string(seed.level) +
                        " replica=" + std::to_string(seed.replica);
            }
            throw NumericalFailure(n + 1, what);
        }
        std::swap(current, next);
        record(n + 1);
    }
    return traj;
}

}  // namespace

Trajectory run_zhang(const SchemeConfig& cfg, const StateObserver& observer) {
    return run_scheme(cfg, true, observer);
}

Trajectory run_pure_diffusion(const SchemeConfig& cfg, const StateObserver& observer) {
    return run_scheme(cfg, false, observer);
}

Trajectory run_btw_pde(const SchemeConfig& cfg, const StateObserver& observer) {
    if (cfg.kind != NonlinearityKind::Btw) {
        throw std::invalid_argument("run_btw_pde needs the btw nonlinearity");
    }
    return run_scheme(cfg, false, observer);
}

}  // namespace soclimit
