#include "soclimit/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace soclimit {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

NoiseDistribution parse_noise_distribution(std::string_view name) {
    if (name == "gaussian") return NoiseDistribution::Gaussian;
    if (name == "rademacher") return NoiseDistribution::Rademacher;
    if (name == "uniform") return NoiseDistribution::Uniform;
    throw std::invalid_argument("unknown noise distribution '" + std::string(name) +
                                "' (expected gaussian, rademacher or uniform)");
}

std::string_view to_string(NoiseDistribution d) noexcept {
    switch (d) {
        case NoiseDistribution::Gaussian: return "gaussian";
        case NoiseDistribution::Rademacher: return "rademacher";
        case NoiseDistribution::Uniform: return "uniform";
    }
    return "gaussian";
}

double sixth_moment(NoiseDistribution d) noexcept {
    switch (d) {
        case NoiseDistribution::Gaussian: return 15.0;
        case NoiseDistribution::Rademacher: return 1.0;
        case NoiseDistribution::Uniform: return 27.0 / 7.0;  // (sqrt 3)^6 / 7
    }
    return 0.0;
}

std::uint64_t NoiseStream::row_key(std::uint64_t n) const noexcept {
    std::uint64_t k = mix64(seed_.base_seed + kGolden);
    k = mix64(k ^ (seed_.level + 0x5851f42d4c957f2dULL));
    k = mix64(k ^ (seed_.replica + 0x14057b7ef767814fULL));
    return mix64(k ^ (n + 0x2545f4914f6cdd1dULL));
}

double NoiseStream::draw(std::uint64_t key, std::uint64_t i) const noexcept {
    const std::uint64_t first = mix64(key + (2 * i + 1) * kGolden);
    switch (distribution_) {
        case NoiseDistribution::Rademacher:
            return (first >> 63) != 0 ? 1.0 : -1.0;
        case NoiseDistribution::Uniform:
            return std::numbers::sqrt3 * (2.0 * bits_to_open_unit(first) - 1.0);
        case NoiseDistribution::Gaussian:
            break;
    }
    // Box-Muller, cosine branch only, so every entry uses its own two counters.
    const std::uint64_t second = mix64(key + (2 * i + 2) * kGolden);
    const double radius = std::sqrt(-2.0 * std::log(bits_to_open_unit(first)));
    return radius * std::cos(2.0 * std::numbers::pi * bits_to_open_unit(second));
}

void NoiseStream::fill_row(std::uint64_t n, std::span<double> out) const noexcept {
    const std::uint64_t key = row_key(n);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = draw(key, i);
}

double NoiseStream::entry(std::uint64_t n, std::uint64_t i) const noexcept {
    return draw(row_key(n), i);
}

NoiseField::NoiseField(NoiseDistribution distribution, SeedSpec seed, const TimeGrid& time,
                       const GridSpec& grid)
    : distribution_(distribution),
      seed_(seed),
      time_(time),
      grid_(grid),
      data_((time.steps() + 1) * grid.interior_count()) {
    const NoiseStream stream(distribution, seed);
    const std::size_t width = grid.interior_count();
    for (std::size_t n = 0; n <= time.steps(); ++n) {
        stream.fill_row(n, std::span<double>(data_).subspan(n * width, width));
    }
}

std::span<const double> NoiseField::row(std::size_t n) const {
    if (n > time_.steps()) throw std::out_of_range("noise row beyond N");
    const std::size_t width = grid_.interior_count();
    return std::span<const double>(data_).subspan(n * width, width);
}

NoiseField sample_field(NoiseDistribution distribution, SeedSpec seed, const TimeGrid& time,
                        const GridSpec& grid) {
    return NoiseField(distribution, seed, time, grid);
}

void scaled_increment(std::span<const double> xi_row, double mu, double tau, double h,
                      std::span<double> out) noexcept {
    const double scale = std::sqrt(tau / h);
    const double drift = mu * tau;
    for (std::size_t i = 0; i < xi_row.size(); ++i) out[i] = drift + scale * xi_row[i];
}

StateVector scaled_increment(const NoiseField& field, std::size_t n, double mu) {
    StateVector out(field.grid());
    scaled_increment(field.row(n), mu, field.time().tau(), field.grid().h(), out.values());
    return out;
}

StateVector partial_sum_W(const NoiseField& field, std::size_t n) {
    if (n > field.time().steps() + 1) throw std::out_of_range("partial sum index beyond N+1");
    StateVector w(field.grid());
    const double scale = std::sqrt(field.time().tau() / field.grid().h());
    for (std::size_t k = 0; k < n; ++k) {
        const auto xi = field.row(k);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += scale * xi[i];
    }
    return w;
}

double antiderivative_F(const NoiseField& field, double t, double x) {
    const TimeGrid& time = field.time();
    const GridSpec& grid = field.grid();
    if (!(t >= 0.0 && t <= time.horizon())) throw std::out_of_range("t outside [0, T]");
    if (!(x >= 0.0 && x <= 1.0)) throw std::out_of_range("x outside [0, 1]");

    const double scaled = t / time.tau();
    auto n = static_cast<std::size_t>(std::floor(scaled));
    double frac = scaled - static_cast<double>(n);
    if (n >= time.steps()) {
        n = time.steps();
        frac = 0.0;
    }
    StateVector w = partial_sum_W(field, n);
    if (frac > 0.0) {
        const double scale = std::sqrt(time.tau() / grid.h());
        const auto xi = field.row(n);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += frac * scale * xi[i];
    }

    // Integrate pcx(w) over [0, x]: w_i lives on [y_{i-1}, y_i).
    double sum = 0.0;
    for (std::size_t i = 1; i < grid.cells(); ++i) {
        const double lo = grid.midpoint(i - 1);
        const double hi = grid.midpoint(i);
        if (x <= lo) break;
        sum += w[i - 1] * (std::min(x, hi) - lo);
    }
    return sum;
}

}  // namespace soclimit
