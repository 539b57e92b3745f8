#include "soclimit/particle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "soclimit/noise.hpp"
#include "soclimit/nonlinearity.hpp"

namespace soclimit {

ParticleLattice::ParticleLattice(int dimension, std::size_t side)
    : dimension_(dimension), side_(side) {
    if (dimension != 1 && dimension != 2) throw std::invalid_argument("dimension must be 1 or 2");
    if (side < 2) throw std::invalid_argument("lattice side Z must be >= 2");
    const std::size_t width = side + 1;
    values_.assign(dimension == 1 ? width : width * width, 0.0);
}

std::size_t ParticleLattice::interior_count() const noexcept {
    return dimension_ == 1 ? side_ - 1 : (side_ - 1) * (side_ - 1);
}

bool ParticleLattice::is_boundary(std::size_t index) const noexcept {
    const std::size_t width = side_ + 1;
    if (dimension_ == 1) return index == 0 || index == side_;
    const std::size_t r = index / width;
    const std::size_t c = index % width;
    return r == 0 || c == 0 || r == side_ || c == side_;
}

std::size_t ParticleLattice::interior_index(std::size_t k) const noexcept {
    if (dimension_ == 1) return k + 1;
    const std::size_t inner = side_ - 1;
    return (k / inner + 1) * (side_ + 1) + (k % inner + 1);
}

double ParticleLattice::interior_sum() const noexcept {
    double sum = 0.0;
    for (std::size_t k = 0; k < interior_count(); ++k) sum += values_[interior_index(k)];
    return sum;
}

double ParticleLattice::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void ParticleConfig::validate() const {
    if (dimension != 1 && dimension != 2) throw std::invalid_argument("dimension must be 1 or 2");
    if (side < 2) throw std::invalid_argument("Z must be >= 2");
    const double max_d = 1.0 / (2.0 * dimension);
    if (!(diffusion > 0.0 && diffusion <= max_d)) {
        throw std::invalid_argument("D must lie in (0, 1/(2d)] = (0, " + std::to_string(max_d) + "]");
    }
    if (!(drive_amount > 0.0) || !std::isfinite(drive_amount)) {
        throw std::invalid_argument("drive_amount must be positive");
    }
}

ParticleLattice ParticleConfig::initial_lattice() const {
    ParticleLattice lattice(dimension, side);
    if (initial) {
        if (initial->size() != lattice.interior_count()) {
            throw std::invalid_argument("initial heights: expected " +
                                        std::to_string(lattice.interior_count()) + " values");
        }
        for (std::size_t k = 0; k < initial->size(); ++k) {
            lattice.values()[lattice.interior_index(k)] = (*initial)[k];
        }
    }
    return lattice;
}

std::size_t drive_site(std::uint64_t seed, std::uint64_t n, std::size_t interior_count) noexcept {
    const std::uint64_t bits = mix64(mix64(seed ^ 0xd1b54a32d192ed03ULL) + n * 0x9e3779b97f4a7c15ULL);
    const auto site =
        static_cast<std::size_t>(bits_to_open_unit(bits) * static_cast<double>(interior_count));
    return std::min(site, interior_count - 1);
}

ParticleStep step_particle(const ParticleConfig& cfg, const ParticleLattice& x, std::uint64_t n,
                           ParticleLattice& out) {
    const std::size_t side = x.side();
    const std::size_t width = side + 1;
    const double d = cfg.diffusion;
    const auto in = x.values();
    auto next = out.values();

    ParticleStep result;
    result.drove = x.max_abs() <= 1.0;

    for (std::size_t j = 0; j < in.size(); ++j) next[j] = 0.0;

    auto neighbours = [&](std::size_t j, auto&& fn) {
        fn(j - 1);
        fn(j + 1);
        if (x.dimension() == 2) {
            fn(j - width);
            fn(j + width);
        }
    };

    for (std::size_t k = 0; k < x.interior_count(); ++k) {
        const std::size_t j = x.interior_index(k);
        const double own = phi(NonlinearityKind::Btw, in[j]);
        if (std::abs(in[j]) > 1.0) ++result.topplings;
        double exchange = 0.0;
        std::size_t boundary_neighbours = 0;
        neighbours(j, [&](std::size_t nb) {
            exchange += phi(NonlinearityKind::Btw, in[nb]) - own;
            if (x.is_boundary(nb)) ++boundary_neighbours;
        });
        next[j] = in[j] + d * exchange;
        result.boundary_flux += d * own * static_cast<double>(boundary_neighbours);
    }

    if (result.drove) {
        const std::size_t site = x.interior_index(drive_site(cfg.seed, n, x.interior_count()));
        next[site] += cfg.drive_amount;
        result.drive_site = site;
        result.drive = cfg.drive_amount;
    }
    return result;
}

ParticleRun run_particle_with_avalanches(const ParticleConfig& cfg,
                                         const ParticleObserver& observer) {
    cfg.validate();
    ParticleLattice current = cfg.initial_lattice();
    ParticleLattice next(cfg.dimension, cfg.side);
    ParticleRun run{current, {}, 0, 0};

    std::optional<AvalancheRecord> open;
    for (std::size_t n = 0; n < cfg.steps; ++n) {
        const ParticleStep step = step_particle(cfg, current, n, next);
        if (observer) observer(n, current, next, step);
        run.total_topplings += step.topplings;
        if (step.drove) {
            ++run.drive_steps;
            if (open) {
                run.avalanches.push_back(*open);
                open.reset();
            }
        } else {
            if (!open) open = AvalancheRecord{n, 0, 0, false};
            ++open->duration;
            open->size += step.topplings;
        }
        std::swap(current, next);
    }
    if (open) {
        open->truncated = true;
        run.avalanches.push_back(*open);
    }
    run.final_state = std::move(current);
    return run;
}

}  // namespace soclimit
