#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace soclimit {

/**
 * Heights on the lattice {0..Z}^d, d in {1, 2}, stored row-major with
 * (Z+1)^d entries.  Boundary sites are pinned to 0.
 */
class ParticleLattice {
public:
    ParticleLattice(int dimension, std::size_t side);

    int dimension() const noexcept { return dimension_; }
    std::size_t side() const noexcept { return side_; }
    std::size_t interior_count() const noexcept;

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool is_boundary(std::size_t index) const noexcept;
    /// Linear index of the k-th interior site (row-major over {1..Z-1}^d).
    std::size_t interior_index(std::size_t k) const noexcept;

    double interior_sum() const noexcept;
    double max_abs() const noexcept;

    friend bool operator==(const ParticleLattice&, const ParticleLattice&) = default;

private:
    int dimension_;
    std::size_t side_;
    std::vector<double> values_;
};

struct ParticleConfig {
    int dimension = 1;
    std::size_t side = 64;       // Z
    double diffusion = 0.5;      // D in (0, 1/(2d)]
    double drive_amount = 0.5;   // mu-tilde > 0
    std::size_t steps = 1000;
    std::uint64_t seed = 0;
    /// Interior heights in row-major order; zero when absent.
    std::optional<std::vector<double>> initial;

    void validate() const;
    ParticleLattice initial_lattice() const;
};

struct ParticleStep {
    std::size_t topplings = 0;   // interior sites with |X_j| > 1 before the update
    bool drove = false;          // gate ||X||_inf <= 1 held
    std::size_t drive_site = 0;  // linear index of s_n when drove
    double drive = 0.0;          // mass added by the drive
    double boundary_flux = 0.0;  // D * sum over boundary-adjacent phi(X_j) * #boundary neighbours
};

/// Uniform interior site s_n for step n, a pure function of (seed, n).
std::size_t drive_site(std::uint64_t seed, std::uint64_t n, std::size_t interior_count) noexcept;

/// Synchronous BTW update from X^n into `out` (same shape as `x`).
ParticleStep step_particle(const ParticleConfig& cfg, const ParticleLattice& x, std::uint64_t n,
                           ParticleLattice& out);

struct AvalancheRecord {
    std::size_t start_step = 0;
    std::size_t duration = 0;
    std::size_t size = 0;
    bool truncated = false;  // still running when the simulation stopped
};

struct ParticleRun {
    ParticleLattice final_state;
    std::vector<AvalancheRecord> avalanches;
    std::size_t total_topplings = 0;
    std::size_t drive_steps = 0;
};

using ParticleObserver = std::function<void(std::size_t n, const ParticleLattice& before,
                                            const ParticleLattice& after, const ParticleStep& step)>;

/// An avalanche is a maximal run of steps without drive; its size is the sum
/// of their toppling counts and its duration their number.
ParticleRun run_particle_with_avalanches(const ParticleConfig& cfg,
                                         const ParticleObserver& observer = {});

}  // namespace soclimit
