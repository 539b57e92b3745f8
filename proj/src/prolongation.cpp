#include "soclimit/prolongation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace soclimit {

namespace {

// Merged, strictly increasing breakpoint set of two partitions of [0, 1].
std::vector<double> merge_breaks(std::span<const double> a, std::span<const double> b) {
    std::vector<double> merged;
    merged.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return merged;
}

// Walks the pieces of f in step with an increasing sequence of sub-intervals.
class PieceCursor {
public:
    explicit PieceCursor(const PiecewiseFn& f) : f_(f) {}

    // Value at `left` and slope of f on the sub-interval starting at `left`.
    std::pair<double, double> local(double left) {
        const auto breaks = f_.breakpoints();
        while (k_ + 1 < f_.piece_count() && breaks[k_ + 1] <= left) ++k_;
        const auto p = f_.piece(k_);
        return {p.value + p.slope * (left - p.left), p.slope};
    }

private:
    const PiecewiseFn& f_;
    std::size_t k_ = 0;
};

void validate_breaks(const std::vector<double>& breaks) {
    if (breaks.size() < 2) throw std::invalid_argument("piecewise function needs >= 1 piece");
    if (breaks.front() != 0.0 || breaks.back() != 1.0) {
        throw std::invalid_argument("breakpoints must start at 0 and end at 1");
    }
    for (std::size_t k = 1; k < breaks.size(); ++k) {
        if (!(breaks[k] > breaks[k - 1])) {
            throw std::invalid_argument("breakpoints must be strictly increasing");
        }
    }
}

// int_0^L (a + b s + c s^2)^2 ds
double square_integral(double a, double b, double c, double len) noexcept {
    const double l2 = len * len;
    const double l3 = l2 * len;
    return a * a * len + a * b * l2 + (b * b + 2.0 * a * c) * l3 / 3.0 + b * c * l2 * l2 / 2.0 +
           c * c * l3 * l2 / 5.0;
}

std::vector<double> pcx_breaks(const GridSpec& grid) {
    std::vector<double> breaks;
    breaks.reserve(grid.cells() + 2);
    breaks.push_back(0.0);
    for (std::size_t i = 0; i < grid.cells(); ++i) breaks.push_back(grid.midpoint(i));
    breaks.push_back(1.0);
    return breaks;
}

std::vector<double> node_breaks(const GridSpec& grid) {
    std::vector<double> breaks(grid.cells() + 1);
    for (std::size_t i = 0; i <= grid.cells(); ++i) breaks[i] = grid.node(i);
    return breaks;
}

void require_length(std::span<const double> v, std::size_t expected, const char* what) {
    if (v.size() != expected) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                    " values, got " + std::to_string(v.size()));
    }
}

}  // namespace

PiecewiseFn::PiecewiseFn(Kind kind, std::vector<double> breaks, std::vector<double> values,
                         std::vector<double> slopes)
    : kind_(kind), breaks_(std::move(breaks)), values_(std::move(values)), slopes_(std::move(slopes)) {
    validate_breaks(breaks_);
    if (values_.size() + 1 != breaks_.size() || slopes_.size() != values_.size()) {
        throw std::invalid_argument("piece count does not match breakpoints");
    }
}

PiecewiseFn PiecewiseFn::constant(std::vector<double> breakpoints, std::vector<double> values) {
    std::vector<double> slopes(values.size(), 0.0);
    return PiecewiseFn(Kind::Constant, std::move(breakpoints), std::move(values), std::move(slopes));
}

PiecewiseFn PiecewiseFn::affine(std::vector<double> breakpoints, std::vector<double> left_values,
                                std::vector<double> slopes) {
    return PiecewiseFn(Kind::Affine, std::move(breakpoints), std::move(left_values),
                       std::move(slopes));
}

PiecewiseFn PiecewiseFn::zero() { return constant({0.0, 1.0}, {0.0}); }

double PiecewiseFn::operator()(double x) const {
    if (x < 0.0 || x > 1.0) throw std::out_of_range("evaluation point outside [0, 1]");
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - breaks_.begin());
    k = k == 0 ? 0 : k - 1;
    if (k >= values_.size()) k = values_.size() - 1;
    return values_[k] + slopes_[k] * (x - breaks_[k]);
}

PiecewiseFn PiecewiseFn::derivative() const { return constant(breaks_, slopes_); }

PiecewiseFn& PiecewiseFn::operator*=(double factor) noexcept {
    for (double& v : values_) v *= factor;
    for (double& s : slopes_) s *= factor;
    return *this;
}

PiecewiseFn combine(double a, const PiecewiseFn& f, double b, const PiecewiseFn& g) {
    auto breaks = merge_breaks(f.breakpoints(), g.breakpoints());
    const std::size_t pieces = breaks.size() - 1;
    std::vector<double> values(pieces);
    std::vector<double> slopes(pieces);
    PieceCursor fc(f);
    PieceCursor gc(g);
    for (std::size_t k = 0; k < pieces; ++k) {
        const auto [fv, fs] = fc.local(breaks[k]);
        const auto [gv, gs] = gc.local(breaks[k]);
        values[k] = a * fv + b * gv;
        slopes[k] = a * fs + b * gs;
    }
    if (f.kind() == PiecewiseFn::Kind::Constant && g.kind() == PiecewiseFn::Kind::Constant) {
        return PiecewiseFn::constant(std::move(breaks), std::move(values));
    }
    return PiecewiseFn::affine(std::move(breaks), std::move(values), std::move(slopes));
}

PiecewiseFn shifted(const PiecewiseFn& f, double a) {
    std::vector<double> breaks(f.breakpoints().begin(), f.breakpoints().end());
    std::vector<double> values(f.piece_count());
    std::vector<double> slopes(f.piece_count());
    for (std::size_t k = 0; k < f.piece_count(); ++k) {
        values[k] = f.piece(k).value + a;
        slopes[k] = f.piece(k).slope;
    }
    if (f.kind() == PiecewiseFn::Kind::Constant) {
        return PiecewiseFn::constant(std::move(breaks), std::move(values));
    }
    return PiecewiseFn::affine(std::move(breaks), std::move(values), std::move(slopes));
}

PiecewiseFn pcx(const StateVector& u) {
    const GridSpec& grid = u.grid();
    std::vector<double> values(grid.cells() + 1, 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) values[i + 1] = u[i];
    return PiecewiseFn::constant(pcx_breaks(grid), std::move(values));
}

PiecewiseFn plx(const StateVector& u) {
    const GridSpec& grid = u.grid();
    const double h = grid.h();
    std::vector<double> values(grid.cells());
    std::vector<double> slopes(grid.cells());
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        values[i] = u.at_node(i);
        slopes[i] = (u.at_node(i + 1) - u.at_node(i)) / h;
    }
    return PiecewiseFn::affine(node_breaks(grid), std::move(values), std::move(slopes));
}

PiecewiseFn pcy(const GridSpec& grid, std::span<const double> v) {
    require_length(v, grid.cells(), "pcy");
    return PiecewiseFn::constant(node_breaks(grid), std::vector<double>(v.begin(), v.end()));
}

PiecewiseFn ply(const GridSpec& grid, std::span<const double> v) {
    require_length(v, grid.cells(), "ply");
    const std::size_t z = grid.cells();
    const double h = grid.h();
    std::vector<double> values(z + 1);
    std::vector<double> slopes(z + 1, 0.0);
    values[0] = v[0];
    for (std::size_t i = 1; i < z; ++i) {
        values[i] = v[i - 1];
        slopes[i] = (v[i] - v[i - 1]) / h;
    }
    values[z] = v[z - 1];
    return PiecewiseFn::affine(pcx_breaks(grid), std::move(values), std::move(slopes));
}

double integral(const PiecewiseFn& f) {
    double sum = 0.0;
    for (std::size_t k = 0; k < f.piece_count(); ++k) {
        const auto p = f.piece(k);
        const double len = p.right - p.left;
        sum += p.value * len + 0.5 * p.slope * len * len;
    }
    return sum;
}

double l2_inner(const PiecewiseFn& f, const PiecewiseFn& g) {
    const auto breaks = merge_breaks(f.breakpoints(), g.breakpoints());
    PieceCursor fc(f);
    PieceCursor gc(g);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        const double len = breaks[k + 1] - breaks[k];
        const auto [fv, fs] = fc.local(breaks[k]);
        const auto [gv, gs] = gc.local(breaks[k]);
        sum += fv * gv * len + (fv * gs + fs * gv) * len * len / 2.0 + fs * gs * len * len * len / 3.0;
    }
    return sum;
}

double l2_norm(const PiecewiseFn& f) {
    double sum = 0.0;
    for (std::size_t k = 0; k < f.piece_count(); ++k) {
        const auto p = f.piece(k);
        sum += square_integral(p.value, p.slope, 0.0, p.right - p.left);
    }
    return std::sqrt(sum);
}

double hminus1_norm(const PiecewiseFn& f) {
    // F(x) = int_0^x f is piecewise quadratic: on piece k with local s,
    // F = F_k + value*s + slope*s^2/2.
    const std::size_t pieces = f.piece_count();
    std::vector<double> left_antiderivative(pieces);
    double running = 0.0;
    double mean = 0.0;
    for (std::size_t k = 0; k < pieces; ++k) {
        const auto p = f.piece(k);
        const double len = p.right - p.left;
        left_antiderivative[k] = running;
        mean += running * len + p.value * len * len / 2.0 + p.slope * len * len * len / 6.0;
        running += p.value * len + p.slope * len * len / 2.0;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < pieces; ++k) {
        const auto p = f.piece(k);
        sum += square_integral(left_antiderivative[k] - mean, p.value, p.slope / 2.0,
                               p.right - p.left);
    }
    return std::sqrt(std::max(0.0, sum));
}

double hminus1_distance_cross_grid(const PiecewiseFn& f, const PiecewiseFn& g) {
    return hminus1_norm(f - g);
}

double hminus1_norm_sq_pcx(std::span<const double> u, double h) noexcept {
    // The antiderivative of pcx u is ply of the cumulative sums v_i = h sum_{j<=i} u_j,
    // with v_0 = 0, and its mean equals h sum v_i.
    const std::size_t z = u.size() + 1;
    double v = 0.0;
    double mean = 0.0;
    for (std::size_t i = 1; i < z; ++i) {
        v += h * u[i - 1];
        mean += h * v;
    }
    double sum = 0.5 * h * mean * mean;
    double prev = -mean;
    v = 0.0;
    for (std::size_t i = 1; i < z; ++i) {
        v += h * u[i - 1];
        const double cur = v - mean;
        sum += h * (prev * prev + prev * cur + cur * cur) / 3.0;
        prev = cur;
    }
    sum += 0.5 * h * prev * prev;
    return std::max(0.0, sum);
}

TimeMode parse_time_mode(std::string_view name) {
    if (name == "linear") return TimeMode::Linear;
    if (name == "left-constant") return TimeMode::LeftConstant;
    if (name == "right-constant") return TimeMode::RightConstant;
    throw std::invalid_argument("unknown time prolongation mode '" + std::string(name) + "'");
}

TimeProlongedTrajectory::TimeProlongedTrajectory(TimeGrid time, std::vector<StateVector> frames,
                                                 TimeMode mode)
    : time_(time), frames_(std::move(frames)), mode_(mode) {
    if (frames_.size() != time_.steps() + 1) {
        throw std::invalid_argument("time prolongation needs N+1 = " +
                                    std::to_string(time_.steps() + 1) + " frames, got " +
                                    std::to_string(frames_.size()));
    }
    for (const auto& frame : frames_) {
        if (!(frame.grid() == frames_.front().grid())) {
            throw std::invalid_argument("frames live on different grids");
        }
    }
}

std::pair<std::size_t, double> TimeProlongedTrajectory::locate(double t) const {
    if (!(t >= 0.0 && t <= time_.horizon())) {
        throw std::out_of_range("time " + std::to_string(t) + " outside [0, T]");
    }
    const double scaled = t / time_.tau();
    auto k = static_cast<std::size_t>(std::floor(scaled));
    if (k >= time_.steps()) return {time_.steps(), 0.0};
    return {k, scaled - static_cast<double>(k)};
}

StateVector TimeProlongedTrajectory::state_at(double t) const {
    const auto [k, frac] = locate(t);
    const std::size_t next = std::min(k + 1, time_.steps());
    switch (mode_) {
        case TimeMode::LeftConstant:
            return frames_[k];
        case TimeMode::RightConstant:
            return frames_[next];
        case TimeMode::Linear:
            break;
    }
    if (frac == 0.0) return frames_[k];
    return (1.0 - frac) * frames_[k] + frac * frames_[next];
}

PiecewiseFn TimeProlongedTrajectory::evaluate(double t) const { return pcx(state_at(t)); }

double TimeProlongedTrajectory::spacetime_l2() const {
    const double tau = time_.tau();
    const std::size_t n = time_.steps();
    std::vector<PiecewiseFn> spatial;
    spatial.reserve(frames_.size());
    for (const auto& frame : frames_) spatial.push_back(pcx(frame));

    double sum = 0.0;
    switch (mode_) {
        case TimeMode::LeftConstant:
            for (std::size_t k = 0; k < n; ++k) sum += tau * l2_inner(spatial[k], spatial[k]);
            break;
        case TimeMode::RightConstant:
            for (std::size_t k = 1; k <= n; ++k) sum += tau * l2_inner(spatial[k], spatial[k]);
            break;
        case TimeMode::Linear:
            // The integrand is quadratic in t on each step, so Simpson's rule is exact.
            for (std::size_t k = 0; k < n; ++k) {
                const double aa = l2_inner(spatial[k], spatial[k]);
                const double ab = l2_inner(spatial[k], spatial[k + 1]);
                const double bb = l2_inner(spatial[k + 1], spatial[k + 1]);
                sum += tau / 3.0 * (aa + ab + bb);
            }
            break;
    }
    return std::sqrt(sum);
}

double TimeProlongedTrajectory::sup_time_hminus1() const {
    // Constant modes attain frame N (left) or frame 0 (right) only on a null set.
    // The linear mode is continuous in t and the norm is convex, so the sup is a frame value.
    std::size_t first = 0;
    std::size_t last = time_.steps();
    if (mode_ == TimeMode::LeftConstant) last = time_.steps() - 1;
    if (mode_ == TimeMode::RightConstant) first = 1;
    double best = 0.0;
    for (std::size_t k = first; k <= last; ++k) best = std::max(best, hminus1_norm(pcx(frames_[k])));
    return best;
}

TimeProlongedTrajectory prolong_time(const TimeGrid& time, std::vector<StateVector> frames,
                                     TimeMode mode) {
    return TimeProlongedTrajectory(time, std::move(frames), mode);
}

}  // namespace soclimit
