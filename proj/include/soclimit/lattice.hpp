#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace soclimit {

/**
 * Uniform grid on [0, 1] with nodes x_i = i*h, i = 0..Z, h = 1/Z.
 *
 * The cell count Z is the source of truth; h is always derived from it.
 * Grid functions live on the Z-1 interior nodes, boundary values are 0.
 */
class GridSpec {
public:
    explicit GridSpec(std::size_t cells);

    std::size_t cells() const noexcept { return cells_; }
    std::size_t interior_count() const noexcept { return cells_ - 1; }
    double h() const noexcept { return 1.0 / static_cast<double>(cells_); }

    /// Node x_i = i/Z.
    double node(std::size_t i) const noexcept {
        return static_cast<double>(i) / static_cast<double>(cells_);
    }

    /// Staggered point y_i = (i + 1/2) h, i = 0..Z-1.
    double midpoint(std::size_t i) const noexcept {
        return static_cast<double>(2 * i + 1) / static_cast<double>(2 * cells_);
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    std::size_t cells_;
};

/// Equidistant time lattice 0, tau, ..., N tau = T.  T and N are stored, tau is derived.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t steps);

    double horizon() const noexcept { return horizon_; }
    std::size_t steps() const noexcept { return steps_; }
    double tau() const noexcept { return horizon_ / static_cast<double>(steps_); }
    double time(std::size_t n) const noexcept {
        if (n == steps_) return horizon_;
        return horizon_ * static_cast<double>(n) / static_cast<double>(steps_);
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double horizon_;
    std::size_t steps_;
};

/// Interior values of a zero-boundary grid function.
class StateVector {
public:
    explicit StateVector(const GridSpec& grid);
    StateVector(const GridSpec& grid, std::vector<double> values);

    const GridSpec& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }

    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    /// Value at node i = 0..Z with the zero-boundary convention.
    double at_node(std::size_t i) const noexcept {
        return (i == 0 || i == grid_.cells()) ? 0.0 : values_[i - 1];
    }

    bool all_finite() const noexcept;

    StateVector& operator+=(const StateVector& other);
    StateVector& operator-=(const StateVector& other);
    StateVector& operator*=(double factor) noexcept;

    friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
    friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
    friend StateVector operator*(double s, StateVector a) { return a *= s; }
    friend StateVector operator-(StateVector a) { return a *= -1.0; }

    friend bool operator==(const StateVector&, const StateVector&) = default;

private:
    GridSpec grid_;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Discrete Dirichlet Laplacian (-Delta_h = tridiag(-1, 2, -1) / h^2)
// ---------------------------------------------------------------------------

/// out = (-Delta_h) u.  u and out must not alias.
void apply_neg_laplacian(std::span<const double> u, double h, std::span<double> out) noexcept;

/// Solves (-Delta_h) out = f in linear time.  f and out may alias.
void solve_neg_laplacian(std::span<const double> f, double h, std::span<double> out) noexcept;

StateVector apply_neg_laplacian(const StateVector& u);
StateVector solve_neg_laplacian(const StateVector& f);

/// j-th eigenvalue (2/h^2)(1 - cos(j pi h)), j = 1..Z-1.
double eigenvalue(std::size_t j, const GridSpec& grid);

/// Tr((-Delta_h)^{-1}) = (1 - h^2)/6.
double trace_inv_neg_laplacian(const GridSpec& grid);

// ---------------------------------------------------------------------------
// Discrete inner products: <u,v>_0 = h sum u_i v_i, <u,v>_1 = <-Delta_h u, v>_0,
// <u,v>_{-1} = <(-Delta_h)^{-1} u, v>_0.
// ---------------------------------------------------------------------------

double inner0(std::span<const double> u, std::span<const double> v, double h) noexcept;

/// ||u||_{-1}^2 using caller-provided scratch of the same length.
double norm_minus1_sq(std::span<const double> u, double h, std::span<double> scratch) noexcept;

double inner0(const StateVector& u, const StateVector& v);
double inner1(const StateVector& u, const StateVector& v);
double inner_minus1(const StateVector& u, const StateVector& v);

double norm0(const StateVector& u);
double norm1(const StateVector& u);
double norm_minus1(const StateVector& u);

}  // namespace soclimit
