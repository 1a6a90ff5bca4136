#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "levyfilter/errors.hpp"
#include "levyfilter/fp_solver.hpp"
#include "levyfilter/nonlocal_operator.hpp"
#include "oracles.hpp"

using namespace levyfilter;

namespace {

Eigen::VectorXd sample(const Grid1D& g, const std::function<double(double)>& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(g.node(i));
    return v;
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// C_alpha int_0^inf [p(y) + p(-y) - 2 p(0)] y^-(1+alpha) dy for the standard
// normal p, by double-exponential quadrature split at y = 1.
double bump_quadrature(double alpha) {
    auto integrand = [alpha](double y) {
        // (e^{-y^2/2} - 1) / y^2, with its series where y^2 underflows
        const double q = y < 1e-6 ? -0.5 + y * y / 8.0 : std::expm1(-0.5 * y * y) / (y * y);
        return 2.0 * normal_pdf(0.0) * q * std::pow(y, 1.0 - alpha);
    };
    boost::math::quadrature::tanh_sinh<double> near;
    boost::math::quadrature::exp_sinh<double> far;
    return levy_constant(alpha) * (near.integrate(integrand, 0.0, 1.0) + far.integrate(integrand, 1.0,
                                                                                       std::numeric_limits<double>::infinity()));
}

double bump_error(double alpha, double dx) {
    const Grid1D g = Grid1D::from_spacing(-20.0, 20.0, dx);
    const auto op = assemble_nonlocal(g, {alpha, 1.0});
    const Eigen::VectorXd out = op.nonlocal_part() * sample(g, normal_pdf);
    return std::abs(out[static_cast<Eigen::Index>(g.nearest_index(0.0))] - bump_quadrature(alpha));
}

}  // namespace

TEST(Grid, Geometry) {
    const Grid1D g(-2.5, 2.5, 101);
    EXPECT_DOUBLE_EQ(g.dx(), 0.05);
    EXPECT_DOUBLE_EQ(g.node(0), -2.5);
    EXPECT_NEAR(g.node(100), 2.5, 1e-15);
    EXPECT_EQ(g.nearest_index(0.0), 50u);
    EXPECT_EQ(g.nearest_index(-99.0), 0u);
    EXPECT_EQ(g.nearest_index(99.0), 100u);
    EXPECT_EQ(Grid1D::from_spacing(-2.5, 2.5, 0.05).size(), 101u);
}

TEST(Grid, Invalid) {
    EXPECT_THROW(Grid1D(0.0, 1.0, 4), DomainError);
    EXPECT_THROW(Grid1D(1.0, 1.0, 10), DomainError);
    EXPECT_THROW(Grid1D::from_spacing(0.0, 1.0, 0.3), DomainError);
}

TEST(Grid, TrapezoidIsExactForLinear) {
    const Grid1D g(0.0, 2.0, 21);
    std::vector<double> v;
    for (double x : g.nodes()) v.push_back(3.0 * x + 1.0);
    EXPECT_NEAR(trapezoid(g, v), 8.0, 1e-13);
}

TEST(Nonlocal, ConstantExtendedToInfinityIsAnnihilated) {
    const Grid1D g(-2.5, 2.5, 101);
    for (double alpha : {0.5, 1.0, 1.5, 1.9}) {
        const auto op = assemble_nonlocal(g, {alpha, 0.7});
        const double c = 3.25;
        const Eigen::VectorXd p = Eigen::VectorXd::Constant(101, c);
        const Eigen::VectorXd out = op.nonlocal_part() * p + c * op.exterior_weights();
        EXPECT_LT(out.cwiseAbs().maxCoeff(), 1e-12) << alpha;
    }
}

TEST(Nonlocal, GaussianBumpMatchesQuadrature) {
    // The quadrature oracle agrees with the closed form.
    EXPECT_NEAR(bump_quadrature(1.5), oracle::kGaussianBumpAt0_alpha15, 1e-10);
    EXPECT_NEAR(bump_quadrature(1.0), oracle::kGaussianBumpAt0_alpha10, 1e-10);
    const double rel = bump_error(1.5, 0.05) / std::abs(bump_quadrature(1.5));
    EXPECT_LT(rel, 0.02);
}

TEST(Nonlocal, HalvingSpacingRoughlyQuartersTheError) {
    for (double alpha : {0.75, 1.5}) {
        const double e1 = bump_error(alpha, 0.1);
        const double e2 = bump_error(alpha, 0.05);
        const double e3 = bump_error(alpha, 0.025);
        EXPECT_GT(e1 / e2, 3.0) << alpha;
        EXPECT_GT(e2 / e3, 3.0) << alpha;
        EXPECT_GE(std::log2(e2 / e3), 1.5) << alpha;
    }
}

TEST(Nonlocal, SignPattern) {
    const Grid1D g(-2.5, 2.5, 101);
    const auto op = assemble_nonlocal(g, {1.5, std::sqrt(0.24)});
    const Eigen::MatrixXd& m = op.nonlocal_part();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        EXPECT_LE(m(i, i), 0.0);
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j) EXPECT_GE(m(i, j), 0.0);
        }
    }
    const Eigen::VectorXd ones = m * Eigen::VectorXd::Ones(101);
    EXPECT_LE(ones.maxCoeff(), 0.0);
}

TEST(Nonlocal, Symmetric) {
    const Grid1D g(-2.5, 2.5, 101);
    const auto op = assemble_nonlocal(g, {1.2, 1.0});
    EXPECT_EQ((op.nonlocal_part() - op.nonlocal_part().transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Nonlocal, EpsilonScalingIsExact) {
    const Grid1D g(-2.5, 2.5, 101);
    for (double alpha : {0.75, 1.5}) {
        const auto unit = assemble_nonlocal(g, {alpha, 1.0});
        const StableParams p{alpha, std::sqrt(0.24)};
        const auto scaled = assemble_nonlocal(g, p);
        const Eigen::MatrixXd expect = p.intensity() * unit.nonlocal_part();
        EXPECT_TRUE(scaled.nonlocal_part() == expect) << alpha;
    }
}

TEST(Nonlocal, OddFunctionVanishesAtTheCentre) {
    const Grid1D g(-10.0, 10.0, 401);
    const auto op = assemble_nonlocal(g, {1.5, 1.0});
    const Eigen::VectorXd out = op.nonlocal_part() * sample(g, [](double x) { return x; });
    EXPECT_NEAR(out[200], 0.0, 1e-12);
    for (Eigen::Index i = 0; i < 200; ++i) EXPECT_NEAR(out[i], -out[400 - i], 1e-11);
}

TEST(Drift, ZeroDriftGivesZeroMatrix) {
    const Grid1D g(-2.5, 2.5, 101);
    for (auto s : {DriftScheme::Central, DriftScheme::Upwind, DriftScheme::Hybrid}) {
        const auto op = assemble_drift_divergence(g, zero_function(), 0.0, s, 1.0);
        EXPECT_EQ(op.drift_part().cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Drift, ConstantDriftCentralIsSecondOrder) {
    const double c = 1.7;
    double prev = 0.0;
    for (double dx : {0.1, 0.05, 0.025}) {
        const Grid1D g = Grid1D::from_spacing(-3.0, 3.0, dx);
        const auto op = assemble_drift_divergence(g, constant_function(c), 0.0, DriftScheme::Central);
        const Eigen::VectorXd out = op.drift_part() * sample(g, [](double x) { return std::sin(x); });
        double err = 0.0;
        for (std::size_t i = 1; i + 1 < g.size(); ++i) {
            err = std::max(err, std::abs(out[static_cast<Eigen::Index>(i)] + c * std::cos(g.node(i))));
        }
        EXPECT_LT(err, 0.5 * c * dx * dx);
        if (prev > 0.0) EXPECT_GT(prev / err, 3.5);
        prev = err;
    }
}

TEST(Drift, DoubleWellStencilAtTheRightWell) {
    const Grid1D g(-2.5, 2.5, 101);
    const auto f = double_well_drift();
    const auto op = assemble_drift_divergence(g, f, 0.0, DriftScheme::Central);
    const auto i = static_cast<Eigen::Index>(g.nearest_index(1.0));
    const double dx = g.dx();
    const Eigen::MatrixXd& m = op.drift_part();
    EXPECT_NEAR(f(g.node(static_cast<std::size_t>(i)), 0.0), 0.0, 1e-13);
    EXPECT_NEAR(m(i, i + 1), -f(g.node(static_cast<std::size_t>(i + 1)), 0.0) / (2.0 * dx), 1e-12);
    EXPECT_NEAR(m(i, i - 1), f(g.node(static_cast<std::size_t>(i - 1)), 0.0) / (2.0 * dx), 1e-12);
    EXPECT_NEAR(m(i, i), 0.0, 1e-12);
}

TEST(Drift, SchemesKeepMatrixSignPatternExceptCentral) {
    const Grid1D g(-2.5, 2.5, 101);
    const StableParams p{1.5, std::sqrt(0.24)};
    for (auto s : {DriftScheme::Hybrid, DriftScheme::Upwind}) {
        const Eigen::MatrixXd m = assemble_adjoint(g, p, double_well_drift(), 0.0, s).matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (i != j) EXPECT_GE(m(i, j), 0.0) << i << "," << j;
            }
        }
    }
}

TEST(Drift, ConservativeInTheInterior) {
    // Column sums vanish except where flux leaves through the two boundary faces.
    const Grid1D g(-2.5, 2.5, 101);
    const auto op = assemble_drift_divergence(g, double_well_drift(), 0.0, DriftScheme::Hybrid, 5.0);
    const Eigen::RowVectorXd sums = op.drift_part().colwise().sum();
    for (Eigen::Index j = 2; j + 2 < sums.size(); ++j) EXPECT_NEAR(sums[j], 0.0, 1e-10);
    EXPECT_LE(sums.maxCoeff(), 1e-10);  // never creates mass
}

TEST(Generator, ConstantIsAnnihilatedInFreeSpace) {
    const Grid1D g(-2.5, 2.5, 101);
    const StableParams p{1.5, std::sqrt(0.24)};
    const double c = 2.0;
    const Eigen::VectorXd phi = Eigen::VectorXd::Constant(101, c);
    const auto op = assemble_adjoint(g, p, zero_function(), 0.0);
    const Eigen::VectorXd out =
        apply_generator(g, p, zero_function(), 0.0, phi) + c * op.exterior_weights();
    EXPECT_LT(out.cwiseAbs().maxCoeff(), 1e-12);
    // With the double-well drift the drift term f phi' vanishes away from the
    // boundary faces.
    const Eigen::VectorXd with_drift =
        apply_generator(g, p, double_well_drift(), 0.0, phi) + c * op.exterior_weights();
    for (Eigen::Index i = 1; i + 1 < with_drift.size(); ++i) EXPECT_NEAR(with_drift[i], 0.0, 1e-10);
}

TEST(Generator, DiscreteAdjointness) {
    const Grid1D g(-6.0, 6.0, 241);
    const StableParams p{1.5, std::sqrt(0.24)};
    const auto f = double_well_drift();
    // Supports well inside the domain.
    const Eigen::VectorXd phi = sample(g, [](double x) {
        return std::abs(x) < 1.5 ? std::pow(std::cos(x * std::numbers::pi / 3.0), 4) : 0.0;
    });
    const Eigen::VectorXd pdens = sample(g, [](double x) { return std::exp(-8.0 * (x + 0.5) * (x + 0.5)); });
    const auto op = assemble_adjoint(g, p, f, 0.0);
    const double lhs = apply_generator(g, p, f, 0.0, phi).dot(pdens) * g.dx();
    const double rhs = phi.dot(op.apply(pdens)) * g.dx();
    EXPECT_NEAR(lhs, rhs, 1e-8);
}

TEST(Generator, DriftEntersAsFTimesDerivative) {
    const Grid1D g = Grid1D::from_spacing(-3.0, 3.0, 0.01);
    const StableParams p{1.5, 0.0};
    const auto f = double_well_drift();
    const Eigen::VectorXd out =
        apply_generator(g, p, f, 0.0, sample(g, [](double x) { return std::sin(x); }), DriftScheme::Central);
    for (std::size_t i = 100; i + 100 < g.size(); i += 37) {
        const double x = g.node(i);
        EXPECT_NEAR(out[static_cast<Eigen::Index>(i)], f(x, 0.0) * std::cos(x), 5e-3) << x;
    }
}

TEST(Stability, ZeroOperatorIsUnbounded) {
    const Grid1D g(-1.0, 1.0, 11);
    EXPECT_TRUE(std::isinf(stability_limit(OperatorMatrix(g))));
}

TEST(Stability, ExampleOneAdmitsTheMillisecondStep) {
    const Grid1D g(-2.5, 2.5, 101);
    const auto op = assemble_adjoint(g, {1.5, std::sqrt(0.24)}, double_well_drift(), 0.0);
    EXPECT_GT(stability_limit(op), 0.001);
    EXPECT_NEAR(stability_limit(op), 0.00187565235637, 1e-12);  // regression value
}

TEST(Stability, ScalesAsEpsilonToMinusAlpha) {
    const Grid1D g(-2.5, 2.5, 101);
    const double a = 1.5;
    const double l1 = stability_limit(assemble_nonlocal(g, {a, 1.0}));
    const double l2 = stability_limit(assemble_nonlocal(g, {a, 0.3}));
    EXPECT_NEAR(l2 / l1, std::pow(0.3, -a), 1e-12 * std::pow(0.3, -a));
}

TEST(Operator, WithDriftReusesTheNonlocalPart) {
    const Grid1D g(-2.5, 2.5, 101);
    const StableParams p{1.5, 0.5};
    const auto op = assemble_adjoint(g, p, double_well_drift(), 0.0);
    const auto op2 = reassemble_drift(op, constant_function(0.5), 1.0);
    EXPECT_EQ(&op.nonlocal_part(), &op2.nonlocal_part());
    EXPECT_EQ(op2.metadata().drift_time, 1.0);
    EXPECT_EQ(op2.metadata().drift_name, constant_function(0.5).name);
}

TEST(Operator, CsvDump) {
    const Grid1D g(0.0, 1.0, 5);
    std::ostringstream out;
    write_operator_csv(out, assemble_nonlocal(g, {1.0, 1.0}));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "row,col,value");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 25);
}

TEST(Operator, SchemeNames) {
    for (auto s : {DriftScheme::Central, DriftScheme::Upwind, DriftScheme::Hybrid}) {
        EXPECT_EQ(drift_scheme_from_string(to_string(s)), s);
    }
    EXPECT_THROW(drift_scheme_from_string("spectral"), DomainError);
}
