#include "soclimit/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace soclimit {

namespace {

void require_same_grid(const StateVector& u, const StateVector& v) {
    if (!(u.grid() == v.grid())) {
        throw std::invalid_argument("grid functions live on different grids (Z=" +
                                    std::to_string(u.grid().cells()) + " vs Z=" +
                                    std::to_string(v.grid().cells()) + ")");
    }
}

}  // namespace

GridSpec::GridSpec(std::size_t cells) : cells_(cells) {
    if (cells < 2) {
        throw std::invalid_argument("grid needs at least 2 cells, got " + std::to_string(cells));
    }
}

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
    if (steps < 1) {
        throw std::invalid_argument("time grid needs at least one step");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("time horizon must be positive and finite");
    }
}

StateVector::StateVector(const GridSpec& grid) : grid_(grid), values_(grid.interior_count(), 0.0) {}

StateVector::StateVector(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.interior_count()) {
        throw std::invalid_argument("state vector has " + std::to_string(values_.size()) +
                                    " entries, grid expects " +
                                    std::to_string(grid_.interior_count()));
    }
    if (!all_finite()) {
        throw std::invalid_argument("state vector has non-finite entries");
    }
}

bool StateVector::all_finite() const noexcept {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

StateVector& StateVector::operator+=(const StateVector& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

StateVector& StateVector::operator*=(double factor) noexcept {
    for (double& v : values_) v *= factor;
    return *this;
}

void apply_neg_laplacian(std::span<const double> u, double h, std::span<double> out) noexcept {
    const std::size_t n = u.size();
    const double inv_h2 = 1.0 / (h * h);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? u[i - 1] : 0.0;
        const double right = i + 1 < n ? u[i + 1] : 0.0;
        out[i] = (-left + 2.0 * u[i] - right) * inv_h2;
    }
}

// Thomas elimination for tridiag(-1, 2, -1).  The modified super-diagonal of
// the forward sweep is c'_i = -(i+1)/(i+2), so no workspace is needed.
void solve_neg_laplacian(std::span<const double> f, double h, std::span<double> out) noexcept {
    const std::size_t n = f.size();
    if (n == 0) return;
    const double h2 = h * h;
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ratio = static_cast<double>(i + 1) / static_cast<double>(i + 2);
        prev = (h2 * f[i] + prev) * ratio;
        out[i] = prev;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        const double ratio = static_cast<double>(i + 1) / static_cast<double>(i + 2);
        out[i] += ratio * out[i + 1];
    }
}

StateVector apply_neg_laplacian(const StateVector& u) {
    StateVector out(u.grid());
    apply_neg_laplacian(u.values(), u.grid().h(), out.values());
    return out;
}

StateVector solve_neg_laplacian(const StateVector& f) {
    StateVector out(f.grid());
    solve_neg_laplacian(f.values(), f.grid().h(), out.values());
    return out;
}

double eigenvalue(std::size_t j, const GridSpec& grid) {
    if (j < 1 || j > grid.interior_count()) {
        throw std::out_of_range("eigenvalue index " + std::to_string(j) + " outside 1.." +
                                std::to_string(grid.interior_count()));
    }
    const double h = grid.h();
    return 2.0 / (h * h) * (1.0 - std::cos(static_cast<double>(j) * std::numbers::pi * h));
}

double trace_inv_neg_laplacian(const GridSpec& grid) {
    const double h = grid.h();
    return (1.0 - h * h) / 6.0;
}

double inner0(std::span<const double> u, std::span<const double> v, double h) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * v[i];
    return h * sum;
}

double norm_minus1_sq(std::span<const double> u, double h, std::span<double> scratch) noexcept {
    solve_neg_laplacian(u, h, scratch);
    return inner0(scratch, u, h);
}

double inner0(const StateVector& u, const StateVector& v) {
    require_same_grid(u, v);
    return inner0(u.values(), v.values(), u.grid().h());
}

double inner1(const StateVector& u, const StateVector& v) {
    require_same_grid(u, v);
    return inner0(apply_neg_laplacian(u), v);
}

double inner_minus1(const StateVector& u, const StateVector& v) {
    require_same_grid(u, v);
    return inner0(solve_neg_laplacian(u), v);
}

double norm0(const StateVector& u) { return std::sqrt(inner0(u, u)); }

double norm1(const StateVector& u) { return std::sqrt(std::max(0.0, inner1(u, u))); }

double norm_minus1(const StateVector& u) { return std::sqrt(std::max(0.0, inner_minus1(u, u))); }

}  // namespace soclimit
