#include "soclimit/nonlinearity.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <string>

namespace soclimit {

NonlinearityKind parse_nonlinearity(std::string_view name) {
    if (name == "btw") return NonlinearityKind::Btw;
    if (name == "zhang") return NonlinearityKind::Zhang;
    throw std::invalid_argument("unknown nonlinearity '" + std::string(name) +
                                "' (expected btw or zhang)");
}

std::string_view to_string(NonlinearityKind kind) noexcept {
    return kind == NonlinearityKind::Btw ? "btw" : "zhang";
}

void phi(NonlinearityKind kind, std::span<const double> in, std::span<double> out) noexcept {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = phi(kind, in[i]);
}

StateVector phi(NonlinearityKind kind, const StateVector& u) {
    StateVector out(u.grid());
    phi(kind, u.values(), out.values());
    return out;
}

double varphi_h(std::span<const double> w, double h) noexcept {
    double sum = 0.0;
    for (double x : w) sum += psi_btw(x);
    return h * sum;
}

double varphi_h(const StateVector& w) { return varphi_h(w.values(), w.grid().h()); }

double psi_segment_mean(double a, double b) noexcept {
    // psi is affine between consecutive kinks, so the trapezoid rule is exact there.
    std::array<double, 4> cuts{0.0, 1.0, 1.0, 1.0};
    std::size_t count = 1;
    const double d = b - a;
    if (d != 0.0) {
        for (double level : {-1.0, 1.0}) {
            const double s = (level - a) / d;
            if (s > 0.0 && s < 1.0) cuts[count++] = s;
        }
    }
    std::sort(cuts.begin(), cuts.begin() + count);
    cuts[count] = 1.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const double s0 = cuts[k];
        const double s1 = cuts[k + 1];
        sum += 0.5 * (s1 - s0) * (psi_btw(a + d * s0) + psi_btw(a + d * s1));
    }
    return sum;
}

}  // namespace soclimit
