#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string_view>

#include "soclimit/lattice.hpp"

namespace soclimit {

/// Single-valued diffusion nonlinearities of the sandpile models.
enum class NonlinearityKind { Btw, Zhang };

/// "btw" | "zhang"
NonlinearityKind parse_nonlinearity(std::string_view name);
std::string_view to_string(NonlinearityKind kind) noexcept;

/// BTW: sign(x) 1_{|x|>1}.  Zhang: x 1_{|x|>1}.  Both vanish at |x| = 1.
inline double phi(NonlinearityKind kind, double x) noexcept {
    if (std::abs(x) <= 1.0) return 0.0;
    if (kind == NonlinearityKind::Zhang) return x;
    return x > 0.0 ? 1.0 : -1.0;
}

void phi(NonlinearityKind kind, std::span<const double> in, std::span<double> out) noexcept;
StateVector phi(NonlinearityKind kind, const StateVector& u);

/// Potential of the BTW nonlinearity, max(|x| - 1, 0).
inline double psi_btw(double x) noexcept { return std::max(std::abs(x) - 1.0, 0.0); }

/// h * sum psi(w_i).
double varphi_h(const StateVector& w);
double varphi_h(std::span<const double> w, double h) noexcept;

/// int_0^1 psi(a + (b - a) s) ds, exact (splits at the kinks s with |.| = 1).
double psi_segment_mean(double a, double b) noexcept;

}  // namespace soclimit
