#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "soclimit/lattice.hpp"

namespace soclimit {

/**
 * Piecewise polynomial of degree <= 1 on [0, 1].
 *
 * Piece k covers [b_k, b_{k+1}) (the last piece also contains x = 1) and
 * evaluates to c0 + c1 * (x - b_k).  Constant functions keep c1 = 0.
 */
class PiecewiseFn {
public:
    enum class Kind { Constant, Affine };

    struct Piece {
        double left;
        double right;
        double value;  // value at `left`
        double slope;
    };

    /// Constant pieces: values.size() == breakpoints.size() - 1.
    static PiecewiseFn constant(std::vector<double> breakpoints, std::vector<double> values);

    /// Affine pieces given the value at the left end and the slope of each piece.
    static PiecewiseFn affine(std::vector<double> breakpoints, std::vector<double> left_values,
                              std::vector<double> slopes);

    static PiecewiseFn zero();

    Kind kind() const noexcept { return kind_; }
    std::size_t piece_count() const noexcept { return values_.size(); }
    std::span<const double> breakpoints() const noexcept { return breaks_; }
    Piece piece(std::size_t k) const noexcept {
        return {breaks_[k], breaks_[k + 1], values_[k], slopes_[k]};
    }

    /// Right-continuous evaluation; x = 1 belongs to the last piece.
    double operator()(double x) const;

    /// Piecewise-constant derivative of an affine function.
    PiecewiseFn derivative() const;

    PiecewiseFn& operator*=(double factor) noexcept;

private:
    PiecewiseFn(Kind kind, std::vector<double> breaks, std::vector<double> values,
                std::vector<double> slopes);

    Kind kind_;
    std::vector<double> breaks_;
    std::vector<double> values_;
    std::vector<double> slopes_;
};

/// Pointwise linear combination a*f + b*g on the merged breakpoint set.
PiecewiseFn combine(double a, const PiecewiseFn& f, double b, const PiecewiseFn& g);

inline PiecewiseFn operator-(const PiecewiseFn& f, const PiecewiseFn& g) {
    return combine(1.0, f, -1.0, g);
}
inline PiecewiseFn operator+(const PiecewiseFn& f, const PiecewiseFn& g) {
    return combine(1.0, f, 1.0, g);
}

/// f + a pointwise.
PiecewiseFn shifted(const PiecewiseFn& f, double a);

// ---------------------------------------------------------------------------
// Prolongations of grid functions.
//
// Cells: K_0 = [0, y_0), K_i = [y_{i-1}, y_i), K_Z = [y_{Z-1}, 1] with
// y_i = (i + 1/2) h; J_i = [x_i, x_{i+1}).
// ---------------------------------------------------------------------------

/// u_i on K_i, zero on K_0 and K_Z.
PiecewiseFn pcx(const StateVector& u);

/// Nodal interpolant on the x-grid, vanishing at 0 and 1.
PiecewiseFn plx(const StateVector& u);

/// v_i on J_i; v has Z entries.
PiecewiseFn pcy(const GridSpec& grid, std::span<const double> v);

/// Interpolant through (y_i, v_i), constant on K_0 and K_Z; v has Z entries.
PiecewiseFn ply(const GridSpec& grid, std::span<const double> v);

// ---------------------------------------------------------------------------
// Exact continuum norms.
// ---------------------------------------------------------------------------

double integral(const PiecewiseFn& f);
double l2_inner(const PiecewiseFn& f, const PiecewiseFn& g);
double l2_norm(const PiecewiseFn& f);

/// H^{-1} norm dual to H^1_0(0,1): ||F - mean(F)||_{L^2} with F(x) = int_0^x f.
double hminus1_norm(const PiecewiseFn& f);

/// ||f - g||_{H^{-1}} for functions on unrelated partitions.
double hminus1_distance_cross_grid(const PiecewiseFn& f, const PiecewiseFn& g);

/// ||pcx u||_{H^{-1}}^2 without building the piecewise function.
double hminus1_norm_sq_pcx(std::span<const double> u, double h) noexcept;

// ---------------------------------------------------------------------------
// Time prolongation.
// ---------------------------------------------------------------------------

enum class TimeMode { Linear, LeftConstant, RightConstant };

TimeMode parse_time_mode(std::string_view name);

/**
 * Space-time prolongation of a trajectory: piecewise constant in space (pcx)
 * and, in time, linear / left-constant / right-constant on the tau-lattice
 * with t_tau = tau * floor(t / tau).
 *
 * At t = T the right-constant and linear rules refer to a frame N+1 that does
 * not exist; frame N is used there.
 */
class TimeProlongedTrajectory {
public:
    TimeProlongedTrajectory(TimeGrid time, std::vector<StateVector> frames, TimeMode mode);

    const TimeGrid& time() const noexcept { return time_; }
    TimeMode mode() const noexcept { return mode_; }
    std::span<const StateVector> frames() const noexcept { return frames_; }

    /// Grid function at time t (space prolongation not applied).
    StateVector state_at(double t) const;

    /// Space-time prolongation at time t.
    PiecewiseFn evaluate(double t) const;

    /// (int_0^T ||.||_{L^2}^2 dt)^{1/2}, exact.
    double spacetime_l2() const;

    /// ess sup over t of ||.(t)||_{H^{-1}}.
    double sup_time_hminus1() const;

private:
    // step index floor(t / tau) clamped to 0..N, and the fractional part.
    std::pair<std::size_t, double> locate(double t) const;

    TimeGrid time_;
    std::vector<StateVector> frames_;
    TimeMode mode_;
};

TimeProlongedTrajectory prolong_time(const TimeGrid& time, std::vector<StateVector> frames,
                                     TimeMode mode);

}  // namespace soclimit
