#include <gtest/gtest.h>

#include <cmath>

#include "levyfilter/errors.hpp"
#include "levyfilter/fp_solver.hpp"
#include "oracles.hpp"

using namespace levyfilter;

namespace {

const Grid1D kExampleGrid(-2.5, 2.5, 101);
const StableParams kExample{1.5, std::sqrt(0.24)};

}  // namespace

TEST(InitDensity, UniformOnTheExampleInterval) {
    const auto p = init_density(kExampleGrid, UniformInit{-1.25, -0.75});
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double x = kExampleGrid.node(i);
        if (x > -1.25 + 1e-9 && x < -0.75 - 1e-9) {
            EXPECT_NEAR(p[i], 2.0, 1e-12) << x;
        } else if (x < -1.25 - 1e-9 || x > -0.75 + 1e-9) {
            EXPECT_EQ(p[i], 0.0) << x;
        }
    }
    EXPECT_NEAR(p.mass(), 1.0, 1e-12);
    EXPECT_TRUE(p.normalized());
}

TEST(InitDensity, GaussianIsNormalizedAfterTruncation) {
    for (double sigma : {0.05, 0.1, 1.0, 3.0}) {
        EXPECT_NEAR(init_density(kExampleGrid, GaussianInit{-1.0, sigma}).mass(), 1.0, 1e-9) << sigma;
    }
}

TEST(InitDensity, PointMassIsOneOverDx) {
    const auto p = init_density(kExampleGrid, PointMassInit{0.0});
    EXPECT_DOUBLE_EQ(p[50], 1.0 / kExampleGrid.dx());
    EXPECT_NEAR(p.mass(), 1.0, 1e-12);
}

TEST(InitDensity, EmptySupportIsAnError) {
    EXPECT_THROW(init_density(kExampleGrid, UniformInit{3.0, 4.0}), EmptySupportError);
    EXPECT_THROW(init_density(kExampleGrid, PointMassInit{7.0}), EmptySupportError);
    EXPECT_THROW(init_density(kExampleGrid, GaussianInit{40.0, 0.1}), EmptySupportError);
}

TEST(DensityField, MomentsOfAGaussian) {
    const Grid1D g(-10.0, 10.0, 2001);
    const auto p = init_density(g, GaussianInit{0.5, 1.2});
    EXPECT_NEAR(p.mean(), 0.5, 1e-9);
    EXPECT_NEAR(p.variance(), 1.44, 1e-6);
}

TEST(StepFp, ZeroStepIsIdentity) {
    const auto op = assemble_adjoint(kExampleGrid, kExample, double_well_drift(), 0.0);
    const auto p = init_density(kExampleGrid, GaussianInit{});
    EXPECT_EQ(step_fp(p, op, 0.0).values(), p.values());
}

TEST(StepFp, RejectsStepsAboveTheStabilityLimit) {
    const auto op = assemble_adjoint(kExampleGrid, kExample, double_well_drift(), 0.0);
    const auto p = init_density(kExampleGrid, GaussianInit{});
    EXPECT_THROW(step_fp(p, op, 1.01 * stability_limit(op)), InstabilityError);
}

TEST(StepFp, BlowUpGuard) {
    std::vector<double> next = {0.0, 11.0, 1.0};
    EXPECT_THROW(clip_and_guard(next, 1.0, 0.1, nullptr), InstabilityError);
    std::vector<double> bad = {0.0, std::nan(""), 1.0};
    EXPECT_THROW(clip_and_guard(bad, 1.0, 0.1, nullptr), InstabilityError);
    std::vector<double> neg = {-0.5, 2.0, 1.0};
    StepDiagnostics d;
    clip_and_guard(neg, 2.0, 0.1, &d);
    EXPECT_EQ(neg[0], 0.0);
    EXPECT_NEAR(d.clipped_mass, 0.05, 1e-15);
}

TEST(StepFp, MassNeverIncreases) {
    const auto op = assemble_adjoint(kExampleGrid, kExample, double_well_drift(), 0.0);
    auto p = init_density(kExampleGrid, GaussianInit{-1.0, 0.1});
    double m = p.mass();
    for (int k = 0; k < 3000; ++k) {
        p = step_fp(p, op, 1e-3);
        const double next = p.mass();
        ASSERT_LE(next, m + 1e-15) << "step " << k;
        m = next;
    }
}

TEST(StepFp, MassLossPerStepIsBoundedByTheTailRate) {
    // Without drift the loss per step is at most the exterior rate of the
    // operator: dt * max_i |sum of row i| * mass.
    const auto op = assemble_nonlocal(kExampleGrid, kExample);
    const double tail = 2.0 * levy_constant(1.5) * kExample.intensity() * std::pow(5.0, -1.5) / 1.5;
    auto p = init_density(kExampleGrid, GaussianInit{0.0, 0.1});
    const double dt = 1e-3;
    for (int k = 0; k < 500; ++k) {
        const double before = p.mass();
        p = step_fp(p, op, dt);
        const double loss = before - p.mass();
        EXPECT_GE(loss, 0.0);
        EXPECT_LE(loss, dt * (tail * before + 2.0 * kExampleGrid.dx())) << k;
    }
}

TEST(StepFp, PositivityWithinTheBound) {
    StepDiagnostics d;
    FpOptions o;
    o.diagnostics = &d;
    solve_fp(init_density(kExampleGrid, GaussianInit{-1.0, 0.1}), double_well_drift(), kExample, 0.0,
             2.0, 1e-3, 10, o);
    EXPECT_EQ(d.steps, 2000u);
    EXPECT_LT(d.max_relative_clip, 1e-8);
}

TEST(SolveFp, EvenDataStaysEvenUnderOddDrift) {
    const auto p0 = init_density(kExampleGrid, GaussianInit{0.0, 0.3});
    const auto evo = solve_fp(p0, double_well_drift(), kExample, 0.0, 2.0, 1e-3, 100);
    for (const auto& s : evo.snapshots()) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            ASSERT_NEAR(s[i], s[s.size() - 1 - i], 1e-8);
        }
    }
}

TEST(SolveFp, EqualTimesGiveTheInitialDensity) {
    const auto p0 = init_density(kExampleGrid, GaussianInit{});
    const auto evo = solve_fp(p0, double_well_drift(), kExample, 1.0, 1.0, 1e-3, 10);
    ASSERT_EQ(evo.size(), 1u);
    EXPECT_EQ(evo.times()[0], 1.0);
    EXPECT_EQ(evo.back().values(), p0.values());
}

TEST(SolveFp, SnapshotsAndPartialFinalStep) {
    const auto p0 = init_density(kExampleGrid, GaussianInit{});
    const auto evo = solve_fp(p0, double_well_drift(), kExample, 0.0, 0.0255, 1e-3, 10);
    ASSERT_EQ(evo.size(), 4u);  // 0, 0.01, 0.02, 0.0255
    EXPECT_NEAR(evo.times()[1], 0.01, 1e-15);
    EXPECT_NEAR(evo.times()[2], 0.02, 1e-15);
    EXPECT_EQ(evo.times().back(), 0.0255);
    EXPECT_EQ(step_count(0.0, 0.0255, 1e-3), 26u);
    EXPECT_EQ(step_count(0.0, 1.0, 1e-3), 1000u);
    EXPECT_THROW(solve_fp(p0, double_well_drift(), kExample, 1.0, 0.5, 1e-3, 10), DomainError);
}

TEST(SolveFp, ExampleOneBecomesBimodal) {
    const auto evo = solve_fp(init_density(kExampleGrid, GaussianInit{-1.0, 0.1}), double_well_drift(),
                              kExample, 0.0, 10.0, 1e-3, 1000);
    const auto& p = evo.back();
    std::vector<double> maxima;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (p[i] > p[i - 1] && p[i] >= p[i + 1] && p[i] > 0.05 * p[kExampleGrid.nearest_index(-1.0)]) {
            maxima.push_back(kExampleGrid.node(i));
        }
    }
    ASSERT_EQ(maxima.size(), 2u);
    EXPECT_NEAR(maxima[0], -1.0, 2.0 * kExampleGrid.dx());
    EXPECT_NEAR(maxima[1], 1.0, 2.0 * kExampleGrid.dx());
}

TEST(SolveFp, CauchyOnACoarseGrid) {
    // Quick version of the free 1-stable check: grid (-20, 20), dx = 0.05.
    const Grid1D g = Grid1D::from_spacing(-20.0, 20.0, 0.05);
    const auto evo = solve_fp(init_density(g, PointMassInit{0.0}), zero_function(), {1.0, 1.0}, 0.0, 0.5,
                              5e-4, 1000);
    double l1 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        l1 += std::abs(evo.back()[i] - oracle::cauchy_density(g.node(i), 0.5)) * g.dx();
    }
    EXPECT_LT(l1, 0.05);
}

TEST(DensityEvolution, RejectsForeignGridsAndNonIncreasingTimes) {
    DensityEvolution evo(kExampleGrid, 1);
    const auto p = init_density(kExampleGrid, GaussianInit{});
    evo.push(0.0, p);
    EXPECT_THROW(evo.push(0.0, p), AxisMismatchError);
    EXPECT_THROW(evo.push(1.0, init_density(Grid1D(-2.0, 2.0, 41), GaussianInit{})), AxisMismatchError);
    EXPECT_THROW(evo.push(1.0, p, 0.5), AxisMismatchError);  // log_norm on some snapshots only
    EXPECT_TRUE(evo.find_time(0.0).has_value());
    EXPECT_FALSE(evo.find_time(0.5).has_value());
}

TEST(DensityField, L1AndNormalization) {
    auto p = init_density(kExampleGrid, GaussianInit{});
    const auto q = p;
    EXPECT_EQ(l1_distance(p, q), 0.0);
    for (double& v : p.values()) v *= 3.0;
    EXPECT_NEAR(p.normalize(), 3.0, 1e-12);
    EXPECT_NEAR(l1_distance(p, q), 0.0, 1e-12);
    DensityField zero(kExampleGrid, std::vector<double>(101, 0.0));
    EXPECT_THROW(zero.normalize(), ZeroDensityError);
    EXPECT_THROW(l1_distance(p, init_density(Grid1D(-2.0, 2.0, 41), GaussianInit{})), AxisMismatchError);
}
