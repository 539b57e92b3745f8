#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "soclimit/lattice.hpp"

using namespace soclimit;

namespace {

StateVector random_state(std::mt19937_64& rng, std::size_t z) {
    GridSpec g(z);
    return StateVector(g, oracle::random_vector(rng, g.interior_count()));
}

}  // namespace

TEST(GridSpec, DerivedQuantities) {
    GridSpec g(8);
    EXPECT_EQ(g.interior_count(), 7u);
    EXPECT_EQ(g.h() * 8.0, 1.0);
    EXPECT_DOUBLE_EQ(g.node(3), 3.0 / 8.0);
    EXPECT_DOUBLE_EQ(g.midpoint(0), 1.0 / 16.0);
    EXPECT_THROW(GridSpec(1), std::invalid_argument);
}

TEST(TimeGrid, StepTimesEndpoint) {
    TimeGrid t(1.0, 3);
    EXPECT_EQ(t.time(3), 1.0);
    EXPECT_DOUBLE_EQ(t.tau(), 1.0 / 3.0);
    EXPECT_THROW(TimeGrid(1.0, 0), std::invalid_argument);
    EXPECT_THROW(TimeGrid(0.0, 4), std::invalid_argument);
}

TEST(StateVector, RejectsWrongLengthAndNonFinite) {
    GridSpec g(4);
    EXPECT_THROW(StateVector(g, {1.0, 2.0}), std::invalid_argument);
    EXPECT_THROW(StateVector(g, {1.0, NAN, 0.0}), std::invalid_argument);
    StateVector u(g, {1.0, 2.0, 3.0});
    EXPECT_EQ(u.at_node(0), 0.0);
    EXPECT_EQ(u.at_node(2), 2.0);
    EXPECT_EQ(u.at_node(4), 0.0);
    EXPECT_THROW(u + StateVector(GridSpec(5)), std::invalid_argument);
}

TEST(ApplyNegLaplacian, UnitVectorStencil) {
    const auto r = apply_neg_laplacian(StateVector(GridSpec(4), {0.0, 1.0, 0.0}));
    EXPECT_EQ(r[0], -16.0);
    EXPECT_EQ(r[1], 32.0);
    EXPECT_EQ(r[2], -16.0);
}

TEST(ApplyNegLaplacian, ZeroMapsToZero) {
    GridSpec g(7);
    EXPECT_EQ(apply_neg_laplacian(StateVector(g)), StateVector(g));
}

TEST(ApplyNegLaplacian, FirstSineModeAtZ8) {
    GridSpec g(8);
    StateVector u(g);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(std::numbers::pi * g.node(i + 1));
    const double lambda = 2.0 / (g.h() * g.h()) * (1.0 - std::cos(std::numbers::pi * g.h()));
    const auto r = apply_neg_laplacian(u);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(r[i], lambda * u[i], 1e-12 * lambda);
}

TEST(ApplyNegLaplacian, MatchesDenseMatrix) {
    std::mt19937_64 rng(1);
    for (std::size_t z : {2u, 3u, 5u, 16u}) {
        const auto u = random_state(rng, z);
        const auto dense = oracle::matvec(oracle::dense_neg_laplacian(z),
                                          std::vector<double>(u.values().begin(), u.values().end()));
        const auto r = apply_neg_laplacian(u);
        for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(r[i], dense[i], 1e-9 * z * z);
    }
}

TEST(SolveNegLaplacian, Examples) {
    EXPECT_EQ(solve_neg_laplacian(StateVector(GridSpec(5))), StateVector(GridSpec(5)));
    const auto a = solve_neg_laplacian(StateVector(GridSpec(2), {1.0}));
    EXPECT_NEAR(a[0], 1.0 / 8.0, 1e-15);
    const auto b = solve_neg_laplacian(StateVector(GridSpec(3), {1.0, 0.0}));
    EXPECT_NEAR(b[0], 2.0 / 27.0, 1e-15);
    EXPECT_NEAR(b[1], 1.0 / 27.0, 1e-15);
}

TEST(SolveNegLaplacian, MatchesDenseInverse) {
    std::mt19937_64 rng(2);
    for (std::size_t z : {2u, 4u, 9u, 33u, 100u}) {
        const auto f = random_state(rng, z);
        const auto dense = oracle::matvec(oracle::inverse(oracle::dense_neg_laplacian(z)),
                                          std::vector<double>(f.values().begin(), f.values().end()));
        const auto r = solve_neg_laplacian(f);
        for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(r[i], dense[i], 1e-12);
    }
}

TEST(SolveNegLaplacian, InPlaceAliasing) {
    std::mt19937_64 rng(3);
    const auto f = random_state(rng, 12);
    auto buf = std::vector<double>(f.values().begin(), f.values().end());
    solve_neg_laplacian(buf, f.grid().h(), buf);
    const auto r = solve_neg_laplacian(f);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(buf[i], r[i]);
}

TEST(Norms, Z2Example) {
    StateVector u(GridSpec(2), {1.0});
    EXPECT_DOUBLE_EQ(norm0(u) * norm0(u), 0.5);
    EXPECT_DOUBLE_EQ(norm1(u) * norm1(u), 4.0);
    EXPECT_DOUBLE_EQ(norm_minus1(u) * norm_minus1(u), 1.0 / 16.0);
}

TEST(Norms, ZeroAndHomogeneity) {
    GridSpec g(6);
    StateVector zero(g);
    EXPECT_EQ(norm0(zero), 0.0);
    EXPECT_EQ(norm1(zero), 0.0);
    EXPECT_EQ(norm_minus1(zero), 0.0);
    std::mt19937_64 rng(4);
    const auto u = random_state(rng, 6);
    EXPECT_NEAR(norm0(2.0 * u), 2.0 * norm0(u), 1e-14);
    EXPECT_NEAR(norm1(2.0 * u), 2.0 * norm1(u), 1e-12);
    EXPECT_NEAR(norm_minus1(2.0 * u), 2.0 * norm_minus1(u), 1e-14);
}

TEST(Norms, MinusOneMatchesDenseOracle) {
    std::mt19937_64 rng(5);
    for (std::size_t z : {2u, 3u, 8u, 31u}) {
        const auto u = random_state(rng, z);
        const double expect =
            oracle::dense_norm_minus1_sq(std::vector<double>(u.values().begin(), u.values().end()));
        EXPECT_NEAR(norm_minus1(u) * norm_minus1(u), expect, 1e-13);
    }
}

TEST(Norms, GridMismatchThrows) {
    EXPECT_THROW(inner0(StateVector(GridSpec(3)), StateVector(GridSpec(4))), std::invalid_argument);
    EXPECT_THROW(inner_minus1(StateVector(GridSpec(3)), StateVector(GridSpec(4))),
                 std::invalid_argument);
}

TEST(Trace, SmallCasesAgainstDenseInverse) {
    EXPECT_NEAR(trace_inv_neg_laplacian(GridSpec(2)), 1.0 / 8.0, 1e-15);
    EXPECT_NEAR(trace_inv_neg_laplacian(GridSpec(3)), 4.0 / 27.0, 1e-15);
    EXPECT_NEAR(oracle::trace(oracle::inverse(oracle::dense_neg_laplacian(2))), 1.0 / 8.0, 1e-15);
    EXPECT_NEAR(oracle::trace(oracle::inverse(oracle::dense_neg_laplacian(3))), 4.0 / 27.0, 1e-15);
}

TEST(Trace, ApproachesOneSixth) {
    const double t = trace_inv_neg_laplacian(GridSpec(4096));
    EXPECT_NEAR(t, 1.0 / 6.0, 1e-7);
    EXPECT_LT(t, 1.0 / 6.0);
}

TEST(Trace, ClosedFormEqualsColumnSolvesUpTo1024) {
    // Sum of e_i^T A^{-1} e_i via Z-1 independent solves.
    for (std::size_t z : {2u, 5u, 64u, 257u, 1024u}) {
        GridSpec g(z);
        double tr = 0.0;
        std::vector<double> e(g.interior_count(), 0.0), x(g.interior_count());
        for (std::size_t i = 0; i < e.size(); ++i) {
            e[i] = 1.0;
            solve_neg_laplacian(e, g.h(), x);
            tr += x[i];
            e[i] = 0.0;
        }
        EXPECT_NEAR(trace_inv_neg_laplacian(g), tr, 1e-10) << "Z=" << z;
    }
}

TEST(Eigenvalue, ExamplesAndBounds) {
    EXPECT_NEAR(eigenvalue(1, GridSpec(2)), 8.0, 1e-12);
    for (std::size_t z : {2u, 7u, 64u}) {
        GridSpec g(z);
        for (std::size_t j = 1; j < z; ++j) {
            EXPECT_GT(eigenvalue(j, g), 0.0);
            EXPECT_LT(eigenvalue(j, g), 4.0 / (g.h() * g.h()));
        }
    }
    EXPECT_THROW(eigenvalue(0, GridSpec(4)), std::out_of_range);
    EXPECT_THROW(eigenvalue(4, GridSpec(4)), std::out_of_range);
}

TEST(Eigenvalue, FirstTendsToPiSquared) {
    for (std::size_t z : {64u, 256u}) {
        GridSpec g(z);
        const double err = std::abs(eigenvalue(1, g) - std::numbers::pi * std::numbers::pi);
        // pi^4 h^2 / 12 is the leading Taylor term.
        EXPECT_LT(err, std::pow(std::numbers::pi, 4) * g.h() * g.h() / 12.0 * 1.01);
    }
}
