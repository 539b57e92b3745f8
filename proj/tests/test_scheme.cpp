#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "soclimit/errors.hpp"
#include "soclimit/ladder.hpp"
#include "soclimit/noise.hpp"
#include "soclimit/scheme.hpp"

using namespace soclimit;

namespace {

// Straight-line evaluation of one weakly driven step:
// X' = X - tau (-Delta_h) phi(X) + mu tau + sqrt(tau/h) xi.
std::vector<double> naive_zhang_step(const std::vector<double>& x, const std::vector<double>& xi,
                                     double tau, double h, double mu) {
    const std::size_t n = x.size();
    std::vector<double> p(n + 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) p[i + 1] = std::abs(x[i]) > 1.0 ? x[i] : 0.0;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lap = (p[i] - 2.0 * p[i + 1] + p[i + 2]) / (h * h);
        out[i] = x[i] + tau * lap + mu * tau + std::sqrt(tau / h) * xi[i];
    }
    return out;
}

SchemeConfig zhang_cfg(std::size_t z, double horizon, std::size_t steps) {
    SchemeConfig c;
    c.grid = GridSpec(z);
    c.time = TimeGrid(horizon, steps);
    c.kind = NonlinearityKind::Zhang;
    return c;
}

}  // namespace

TEST(InitialCondition, Shapes) {
    GridSpec g(4);
    EXPECT_EQ(InitialCondition::zero().sample(g), StateVector(g));
    const auto s = InitialCondition::sine(2.0, 1.0).sample(g);
    EXPECT_NEAR(s[1], 2.0, 1e-15);
    EXPECT_NEAR(s[0], 2.0 * std::sin(M_PI / 4.0), 1e-15);
    const auto p = InitialCondition::plateau(3.0, 0.25, 0.5).sample(g);
    EXPECT_EQ(p, StateVector(g, {3.0, 3.0, 0.0}));
    EXPECT_EQ(parse_initial_shape("plateau"), InitialCondition::Shape::Plateau);
    EXPECT_THROW(parse_initial_shape("gauss"), std::invalid_argument);
}

TEST(StepZhang, SubcriticalFixedPoint) {
    GridSpec g(6);
    StateVector u(g, {0.5, -1.0, 1.0, 0.0, 0.9});
    EXPECT_EQ(step_zhang(u, 0.01, StateVector(g)), u);
}

TEST(StepZhang, HandExample) {
    GridSpec g(4);
    const double tau = 1.0 / 1000.0;
    const auto r = step_zhang(StateVector(g, {2.0, 0.0, 0.0}), tau, StateVector(g));
    // phi = (2,0,0); Delta_h phi = 16 * (-4, 2, 0) = (-64, 32, 0).
    EXPECT_NEAR(r[0], 2.0 - 64.0 * tau, 1e-15);
    EXPECT_NEAR(r[1], 32.0 * tau, 1e-15);
    EXPECT_EQ(r[2], 0.0);
}

TEST(StepZhang, LinearInIncrement) {
    std::mt19937_64 rng(40);
    GridSpec g(9);
    StateVector u(g, oracle::random_vector(rng, 8, 2.0));
    StateVector a(g, oracle::random_vector(rng, 8, 0.1));
    StateVector b(g, oracle::random_vector(rng, 8, 0.1));
    const auto lhs = step_zhang(u, 0.001, a + b);
    const auto rhs = step_zhang(u, 0.001, a) + b;
    for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-14);
}

TEST(StepZhang, MatchesNaiveReimplementation) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t z = 3 + trial % 20;
        GridSpec g(z);
        const double tau = g.h() * g.h() / 16.0;
        const double mu = 0.25 * (trial % 3);
        const auto x = oracle::random_vector(rng, z - 1, 2.0);
        const auto xi = oracle::random_vector(rng, z - 1);
        StateVector inc(g);
        scaled_increment(xi, mu, tau, g.h(), inc.values());
        const auto got = step_zhang(StateVector(g, x), tau, inc);
        const auto expect = naive_zhang_step(x, xi, tau, g.h(), mu);
        for (std::size_t i = 0; i + 1 < z; ++i) {
            EXPECT_NEAR(got[i], expect[i], 1e-14 * std::max(1.0, std::abs(expect[i])));
        }
    }
}

TEST(StepBtw, Examples) {
    GridSpec g(4);
    const double tau = 1.0 / 256.0;
    const auto r = step_btw_pde(StateVector(g, {2.0, 0.0, 0.0}), tau);
    EXPECT_NEAR(r[0], 2.0 - 32.0 * tau, 1e-15);
    EXPECT_NEAR(r[1], 16.0 * tau, 1e-15);
    EXPECT_EQ(r[2], 0.0);
    StateVector fixed(g, {1.0, -0.2, -1.0});
    EXPECT_EQ(step_btw_pde(fixed, tau), fixed);
}

TEST(RunZhang, ZeroEverythingStaysZero) {
    auto c = zhang_cfg(8, 1.0, 100);
    const auto traj = run_zhang(c);
    ASSERT_TRUE(traj.complete());
    for (const auto& s : traj.states) EXPECT_EQ(s, StateVector(c.grid));
}

TEST(RunZhang, DeterministicAndReplayable) {
    auto c = zhang_cfg(16, 0.05, 200);
    c.mu = 0.3;
    c.noise = NoiseSpec{NoiseDistribution::Gaussian, {11, 2, 5}};
    c.initial = InitialCondition::sine(2.0, 1.0);
    const auto a = run_zhang(c);
    const auto b = run_zhang(c);
    ASSERT_EQ(a.states.size(), 201u);
    EXPECT_EQ(a.states, b.states);
    // Each state follows from the previous through the step operation.
    const auto field = sample_field(NoiseDistribution::Gaussian, {11, 2, 5}, c.time, c.grid);
    for (std::size_t n = 0; n < 200; ++n) {
        const auto next = step_zhang(a.states[n], c.time.tau(), scaled_increment(field, n, c.mu));
        EXPECT_EQ(next, a.states[n + 1]) << "n=" << n;
    }
}

TEST(RunZhang, StrideKeepsLastState) {
    auto c = zhang_cfg(8, 0.1, 10);
    c.initial = InitialCondition::sine(3.0, 1.0);
    c.stride = 4;
    const auto t = run_zhang(c);
    EXPECT_EQ(t.steps, (std::vector<std::size_t>{0, 4, 8, 10}));
    c.stride = 1;
    const auto full = run_zhang(c);
    EXPECT_EQ(t.states.back(), full.states.back());
    EXPECT_EQ(t.states[1], full.states[4]);
}

TEST(RunZhang, ObserverSeesEveryStep) {
    auto c = zhang_cfg(8, 0.1, 10);
    c.stride = 10;
    std::vector<std::size_t> seen;
    run_zhang(c, [&](std::size_t n, const StateVector&) { seen.push_back(n); });
    EXPECT_EQ(seen.size(), 11u);
    EXPECT_EQ(seen.back(), 10u);
}

TEST(RunZhang, BlowUpRaisesNumericalFailure) {
    auto c = zhang_cfg(8, 1.0, 4);  // tau/h^2 = 16, wildly unstable
    c.initial = InitialCondition::sine(1e305, 7.0);  // highest mode
    try {
        run_zhang(c);
        FAIL() << "expected NumericalFailure";
    } catch (const NumericalFailure& e) {
        EXPECT_GE(e.step(), 1u);
        EXPECT_LE(e.step(), 4u);
    }
}

TEST(RunZhang, NoiselessZhangEqualsPureDiffusion) {
    auto c = zhang_cfg(12, 0.02, 50);
    c.initial = InitialCondition::plateau(3.0, 0.2, 0.6);
    const auto a = run_zhang(c);
    const auto b = run_pure_diffusion(c);
    EXPECT_EQ(a.states, b.states);
}

TEST(RunBtw, SignSymmetryAndKindCheck) {
    SchemeConfig c;
    c.grid = GridSpec(16);
    c.time = TimeGrid(0.1, 200);
    c.kind = NonlinearityKind::Btw;
    c.initial = InitialCondition::sine(2.5, 2.0);
    const auto a = run_btw_pde(c);
    c.initial = InitialCondition::sine(-2.5, 2.0);
    const auto b = run_btw_pde(c);
    for (std::size_t n = 0; n < a.states.size(); ++n) EXPECT_EQ(a.states[n], -b.states[n]);
    c.kind = NonlinearityKind::Zhang;
    EXPECT_THROW(run_btw_pde(c), std::invalid_argument);
}

TEST(Ladder, FirstLevelExample) {
    const auto l = build_ladder(16, 1, 1.0, 1.0, 1.0);
    ASSERT_EQ(l.levels.size(), 1u);
    EXPECT_EQ(l.levels[0].grid.cells(), 16u);
    EXPECT_EQ(l.levels[0].time.steps(), 4096u);
}

TEST(Ladder, MonotoneCflAndExactHorizon) {
    for (auto [z0, gamma, c] : std::vector<std::tuple<std::size_t, double, double>>{
             {4, 1.0, 1.0}, {8, 0.5, 3.0}, {2, 2.0, 0.1}, {16, 1.0, 100.0}, {3, 0.25, 1.0}}) {
        const auto l = build_ladder(z0, 4, 0.7, gamma, c);
        double prev_h = 2.0, prev_ratio = 1.0;
        for (std::size_t m = 0; m < l.levels.size(); ++m) {
            const auto& lv = l.levels[m];
            const double h = lv.grid.h();
            EXPECT_EQ(lv.grid.cells(), z0 << m);
            EXPECT_LT(h, prev_h);
            EXPECT_LE(lv.cfl_ratio(), 1.0 / 12.0);
            EXPECT_LT(lv.cfl_ratio(), prev_ratio);
            EXPECT_LE(lv.time.tau(), c * std::pow(h, 2.0 + gamma) * (1.0 + 1e-12));
            EXPECT_EQ(lv.time.time(lv.time.steps()), 0.7);
            // Target ratios c h^gamma halve exactly; rounding N up moves the realized
            // ratio of the coarser level down by at most a factor N/(N+1).
            if (gamma == 1.0 && m > 0) {
                const double n_prev = static_cast<double>(l.levels[m - 1].time.steps());
                EXPECT_LE(lv.cfl_ratio(), prev_ratio / 2.0 * (n_prev + 1.0) / n_prev);
            }
            prev_h = h;
            prev_ratio = lv.cfl_ratio();
        }
    }
    EXPECT_THROW(build_ladder(16, 0, 1.0, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(build_ladder(16, 2, 1.0, 0.0, 1.0), std::invalid_argument);
}
