#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "soclimit/lattice.hpp"

namespace soclimit {

/// Unit-variance, mean-zero noise laws with finite sixth moment.
enum class NoiseDistribution { Gaussian, Rademacher, Uniform };

NoiseDistribution parse_noise_distribution(std::string_view name);
std::string_view to_string(NoiseDistribution d) noexcept;

/// E xi^6 for each law: 15, 1, 27/7.
double sixth_moment(NoiseDistribution d) noexcept;

struct SeedSpec {
    std::uint64_t base_seed = 0;
    std::uint64_t level = 0;
    std::uint64_t replica = 0;

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform double in (0, 1) from 64 random bits.
constexpr double bits_to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/**
 * Counter-based noise source.
 *
 * Entry (n, i) is a pure function of (base_seed, level, replica, n, i): each
 * row n owns a SplitMix64 stream keyed by a hash of the full tuple, and entry i
 * reads fixed counters of that stream.  Generation order and thread layout
 * therefore never change the values.
 */
class NoiseStream {
public:
    NoiseStream(NoiseDistribution distribution, SeedSpec seed) noexcept
        : distribution_(distribution), seed_(seed) {}

    NoiseDistribution distribution() const noexcept { return distribution_; }
    const SeedSpec& seed() const noexcept { return seed_; }

    /// xi^{n, i+1} for i = 0..out.size()-1.
    void fill_row(std::uint64_t n, std::span<double> out) const noexcept;

    double entry(std::uint64_t n, std::uint64_t i) const noexcept;

private:
    std::uint64_t row_key(std::uint64_t n) const noexcept;
    double draw(std::uint64_t key, std::uint64_t i) const noexcept;

    NoiseDistribution distribution_;
    SeedSpec seed_;
};

/// Materialized array xi^{n,i}, n = 0..N, i = 1..Z-1.
class NoiseField {
public:
    NoiseField(NoiseDistribution distribution, SeedSpec seed, const TimeGrid& time,
               const GridSpec& grid);

    const GridSpec& grid() const noexcept { return grid_; }
    const TimeGrid& time() const noexcept { return time_; }
    const SeedSpec& seed() const noexcept { return seed_; }
    NoiseDistribution distribution() const noexcept { return distribution_; }

    std::span<const double> row(std::size_t n) const;

    friend bool operator==(const NoiseField&, const NoiseField&) = default;

private:
    NoiseDistribution distribution_;
    SeedSpec seed_;
    TimeGrid time_;
    GridSpec grid_;
    std::vector<double> data_;
};

NoiseField sample_field(NoiseDistribution distribution, SeedSpec seed, const TimeGrid& time,
                        const GridSpec& grid);

/// mu*tau*1 + sqrt(tau/h) xi^n.
StateVector scaled_increment(const NoiseField& field, std::size_t n, double mu);
void scaled_increment(std::span<const double> xi_row, double mu, double tau, double h,
                      std::span<double> out) noexcept;

/// W^n = sum_{k<n} sqrt(tau/h) xi^k, n = 0..N+1.
StateVector partial_sum_W(const NoiseField& field, std::size_t n);

/// F(t, x) = int_0^x of the (linear in time, pcx in space) prolongation of W.
double antiderivative_F(const NoiseField& field, double t, double x);

}  // namespace soclimit
