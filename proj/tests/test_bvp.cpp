#include <gtest/gtest.h>

#include <cmath>

#include "rootspan/bvp.hpp"
#include "rootspan/linalg.hpp"

using namespace rootspan;

namespace {

const ExponentContext kHilbert(2.0);

BvpProblem neumann(double a)
{
    BvpProblem pr = BvpProblem::scalar_dirichlet(1.0);
    pr.a = ScalarCoefficient::constant(a);
    pr.L1 = {1, {0.0, 1.0}, {0.0, 0.0}, {}};
    pr.L2 = {1, {0.0, 0.0}, {0.0, 1.0}, {}};
    pr.validate();
    return pr;
}

Vector sorted_real(const Vector& v)
{
    std::vector<double> re;
    for (Index i = 0; i < v.size(); ++i)
        re.push_back(v(i).real());
    std::sort(re.begin(), re.end());
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i)
        out(i) = re[static_cast<std::size_t>(i)];
    return out;
}

}  // namespace

TEST(Characteristic, RootsForMinusOne)
{
    const auto c = characteristic_data(BvpProblem::scalar_dirichlet(1.0), 0.3);
    EXPECT_NEAR(std::abs(c.omega1 - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.omega2 + 1.0), 0.0, 1e-15);
}

TEST(Characteristic, DirichletDeterminant)
{
    const auto c = characteristic_data(BvpProblem::scalar_dirichlet(1.0), 0.5);
    EXPECT_NEAR(std::abs(c.eta - 1.0), 0.0, 1e-15);
}

TEST(Characteristic, NeumannDeterminant)
{
    // (−ω1)·α·β·ω2 − 0 with ω1 = 1, ω2 = −1
    const auto c = characteristic_data(neumann(-1.0), 0.5);
    EXPECT_NEAR(std::abs(c.eta - 1.0), 0.0, 1e-15);
}

TEST(Characteristic, RootsAreOppositeAndEtaHomogeneous)
{
    for (const Complex a : {Complex(-1.0), Complex(-2.0, 0.5), Complex(-0.3, -0.1)}) {
        BvpProblem pr = neumann(-1.0);
        pr.a = ScalarCoefficient::constant(a);
        const auto c = characteristic_data(pr, 0.2);
        EXPECT_LE(std::abs(c.omega1 + c.omega2), 1e-15);
        const double t = 1.7;
        pr.a = ScalarCoefficient::constant(t * t * a);
        const auto ct = characteristic_data(pr, 0.2);
        EXPECT_LE(std::abs(ct.eta - c.eta * std::pow(t, -2.0)), 1e-10);
    }
}

TEST(Characteristic, VanishingLeadingCoefficientThrows)
{
    BvpProblem pr = BvpProblem::scalar_dirichlet(1.0);
    pr.a = ScalarCoefficient::constant(0.0);
    EXPECT_THROW(characteristic_data(pr, 0.5), DomainError);
}

TEST(Discretize, DirichletStencilSpectrum)
{
    const double c = 2.5;
    const Index n = 40;
    const auto op = discretize(BvpProblem::scalar_dirichlet(c), n);
    const Vector ev = sorted_real(eigenvalues(op.Q.entries()));
    for (Index k = 1; k <= n; ++k) {
        const double s = std::sin(k * kPi / (2.0 * (n + 1)));
        const double exact = 4.0 * (n + 1) * (n + 1) * s * s + c;
        EXPECT_NEAR(ev(k - 1).real(), exact, 1e-10 * exact);
    }
}

TEST(Discretize, SecondOrderConvergence)
{
    const double c = 1.0;
    for (int k = 1; k <= 3; ++k) {
        std::vector<double> errs;
        for (const Index n : {16, 32, 64, 128}) {
            const Vector ev = sorted_real(eigenvalues(discretize(BvpProblem::scalar_dirichlet(c), n).Q.entries()));
            errs.push_back(std::abs(ev(k - 1).real() - (k * k * kPi * kPi + c)));
        }
        // least-squares slope of log error against log n, n doubling
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < 4; ++i) {
            const double x = i * std::log(2.0), y = std::log(errs[static_cast<std::size_t>(i)]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double order = -(4 * sxy - sx * sy) / (4 * sxx - sx * sx);
        EXPECT_NEAR(order, 2.0, 0.2) << "k=" << k;
    }
}

TEST(Discretize, NonlocalPerturbationIsContinuous)
{
    const Index n = 32;
    const Vector base = sorted_real(eigenvalues(discretize(BvpProblem::scalar_dirichlet(1.0), n).Q.entries()));
    double previous = std::numeric_limits<double>::infinity();
    for (const double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
        BvpProblem pr = BvpProblem::scalar_dirichlet(1.0);
        pr.L1.interior.push_back({0.5, -delta, 0});
        const Vector ev = sorted_real(eigenvalues(discretize(pr, n).Q.entries()));
        const double shift = ((ev - base).cwiseAbs().array() / base.cwiseAbs().array()).maxCoeff();
        EXPECT_LT(shift, previous);
        previous = shift;
    }
    EXPECT_LT(previous, 1e-3);
}

TEST(Discretize, WeightedNormConsistency)
{
    BvpProblem pr = BvpProblem::scalar_dirichlet(1.0);
    pr.weight.exponent = 0.5;
    // continuous (∫ x^{1/2} sin²(πx) dx)^{1/2} by a fine midpoint rule
    const int m = 400000;
    double ref = 0.0;
    for (int i = 0; i < m; ++i) {
        const double x = (i + 0.5) / m;
        ref += std::sqrt(x) * std::pow(std::sin(kPi * x), 2) / m;
    }
    ref = std::sqrt(ref);
    std::vector<double> errs;
    for (const Index n : {16, 32, 64, 128}) {
        const auto op = discretize(pr, n);
        Vector u(n);
        for (Index i = 0; i < n; ++i)
            u(i) = std::sin(kPi * op.nodes(i));
        errs.push_back(std::abs(op.weighted_norm(u) - ref));
    }
    for (std::size_t i = 1; i < errs.size(); ++i)
        EXPECT_LE(errs[i], 0.55 * errs[i - 1]);
}

TEST(Discretize, RejectsCoarseGrid)
{
    EXPECT_THROW(discretize(BvpProblem::scalar_dirichlet(1.0), 4), DomainError);
}

TEST(StructuralHypotheses, ScalarCoefficientHasUnitConstants)
{
    Condition1Options opt;
    opt.phi = 0.0;
    const auto r = condition1_check(BvpProblem::scalar_dirichlet(1.0), 4, 8, opt);
    EXPECT_DOUBLE_EQ(r.positivity_M, 1.0);
    EXPECT_NEAR(r.r_bound, 1.0, 0.02);
}

TEST(StructuralHypotheses, ConstantDiagonalPasses)
{
    BvpProblem pr = BvpProblem::diagonal_model(4, 1.0, 1.0);
    pr.A = MatrixCoefficient::from_json({{"kind", "constant"}, {"value", 1.0}, {"diag", {1, 2, 3, 4}}}, 4);
    const auto r = condition1_check(pr, 4, 6);
    EXPECT_TRUE(r.continuity_holds);
    EXPECT_TRUE(r.fractional_holds);
    EXPECT_TRUE(r.a_in_sector);
    EXPECT_TRUE(r.eta_nonzero);
    EXPECT_TRUE(r.weight_in_ap);
    EXPECT_TRUE(r.holds);
}

TEST(StructuralHypotheses, VariableDiagonalMatchesClosedForm)
{
    const Index d = 3;
    BvpProblem pr = BvpProblem::diagonal_model(d, 1.0, 1.0);
    pr.A = MatrixCoefficient::from_json({{"kind", "affine"}, {"c0", 1.0}, {"c1", 1.0}, {"diag", {1, 2, 3}}}, d);
    const int xs = 5, xis = 6;
    const auto r = condition1_check(pr, xs, xis);
    EXPECT_TRUE(r.continuity_holds);
    EXPECT_TRUE(std::isfinite(r.positivity_M));

    double expected = 0.0;
    for (int i = 0; i < xs; ++i) {
        const double x = (i + 0.5) / xs;
        for (const Complex l : sector_samples(Condition1Options{}.phi, xis))
            for (Index j = 1; j <= d; ++j)
                expected = std::max(expected, (1.0 + std::abs(l)) / std::abs(l + (1.0 + x) * static_cast<double>(j)));
    }
    EXPECT_NEAR(r.positivity_M, expected, 1e-12 * expected);
}

TEST(Coercive, FiniteAtUnitLambda)
{
    const auto op = discretize(BvpProblem::scalar_dirichlet(1.0), 32);
    const auto r = coercive_estimate_report(op, {Complex(1.0)});
    EXPECT_TRUE(std::isfinite(r.M_observed));
    EXPECT_GT(r.M_observed, 0.0);
}

TEST(Coercive, StableOverTopTwoDecades)
{
    const auto op = discretize(BvpProblem::scalar_dirichlet(1.0), 64);
    std::vector<Complex> lambdas;
    for (int k = 0; k <= 16; ++k)
        lambdas.emplace_back(std::pow(10.0, k / 4.0), 0.0);
    const auto r = coercive_estimate_report(op, lambdas);
    EXPECT_TRUE(r.stable_top_two_decades) << r.top_decade_max << " " << r.previous_decade_max;
    EXPECT_TRUE(r.bounded);
}

TEST(Coercive, LargeFirstOrderTermIsReported)
{
    const auto op = discretize(BvpProblem::scalar_dirichlet(1.0, kHilbert, 200.0), 64);
    std::vector<Complex> lambdas;
    for (int k = 0; k <= 16; ++k)
        lambdas.emplace_back(std::pow(10.0, k / 4.0), 0.0);
    const auto r = coercive_estimate_report(op, lambdas);
    EXPECT_EQ(r.ratios.size(), lambdas.size());
    EXPECT_TRUE(std::isfinite(r.M_observed));
}

TEST(Coercive, SingularShiftThrows)
{
    const auto op = discretize(BvpProblem::scalar_dirichlet(0.0), 16);
    const Vector ev = eigenvalues(op.Q.entries());
    EXPECT_THROW(coercive_estimate_report(op, {-ev(0)}), SpectrumError);
}

TEST(Embedding, NuOne)
{
    EmbeddingOptions opt;
    opt.n = 128;
    const auto fit = embedding_snumbers(128, 1.0, kHilbert, opt);
    EXPECT_TRUE(fit.asserted);
    EXPECT_NEAR(fit.fitted_exponent, -2.0 / 3.0, 0.1);
    EXPECT_TRUE(fit.holds);
    for (std::size_t j = 1; j < fit.s.size(); ++j)
        EXPECT_LE(fit.s[j], fit.s[j - 1]);
}

TEST(Embedding, NuTwo)
{
    EmbeddingOptions opt;
    opt.n = 128;
    const auto fit = embedding_snumbers(128, 2.0, kHilbert, opt);
    EXPECT_NEAR(fit.fitted_exponent, -0.4, 0.1);
}

TEST(Embedding, LargeNuApproachesZeroExponent)
{
    EmbeddingOptions opt;
    opt.n = 64;
    const auto fit = embedding_snumbers(64, 50.0, kHilbert, opt);
    EXPECT_NEAR(fit.target, -2.0 / 101.0, 1e-15);
    EXPECT_GT(fit.fitted_exponent, -0.5);
}

TEST(Embedding, SmallDimensionThrows)
{
    EXPECT_THROW(embedding_snumbers(32, 1.0, kHilbert), DomainError);
}

TEST(BvpSpectral, ScalarSelfAdjointModel)
{
    const auto arcs = ArcConfiguration::equally_spaced(5, kHilbert, 0.1);
    for (const Index n : {16, 32, 64}) {
        const auto op = discretize(BvpProblem::scalar_dirichlet(1.0), n);
        const auto r = bvp_spectral_report(op, arcs, 2.0);
        EXPECT_LE(r.max_abs_imag, 1e-10);
        EXPECT_GT(r.min_separation, 0.0);
        EXPECT_LE(r.root_distance, 1e-8);
        EXPECT_TRUE(r.q_holds);
        EXPECT_TRUE(r.phi_holds);
    }
}

TEST(BvpSpectral, SmallFirstOrderTerm)
{
    const auto arcs = ArcConfiguration::equally_spaced(5, kHilbert, 0.1);
    const auto op = discretize(BvpProblem::scalar_dirichlet(1.0, kHilbert, 2.0), 48);
    const auto r = bvp_spectral_report(op, arcs, 2.0);
    for (Index i = 0; i < r.spectrum.size(); ++i)
        EXPECT_LT(std::abs(std::arg(r.spectrum(i))), kPi / 4.0);
    EXPECT_LE(r.root_distance, 1e-6);
}

TEST(BvpSpectral, VectorModelResolventSlope)
{
    const auto arcs = ArcConfiguration::equally_spaced(5, kHilbert, 0.1);
    const auto op = discretize(BvpProblem::diagonal_model(12, 30.0, 1.0), 12);
    BvpSpectralOptions opt;
    opt.sample_count = 2;
    const auto r = bvp_spectral_report(op, arcs, 2.0, opt);
    EXPECT_NEAR(r.resolvent_fit.target, -2.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.resolvent_fit.fitted_exponent, -2.0 / 3.0, 0.1);
    EXPECT_LE(r.root_distance, 1e-8);
}

TEST(Degenerate, NearZeroGammaIsIdentity)
{
    const auto t = degenerate_transform(BvpProblem::scalar_dirichlet(1.0), 1e-10);
    EXPECT_NEAR(t.b, 1.0, 1e-9);
    for (const double x : {0.1, 0.5, 0.9})
        EXPECT_NEAR(t.y_of_x(x), x, 1e-8);
}

TEST(Degenerate, HalfGammaClosedForm)
{
    const auto t = degenerate_transform(BvpProblem::scalar_dirichlet(1.0), 0.5);
    EXPECT_DOUBLE_EQ(t.b, 2.0);
    for (const double x : {0.04, 0.25, 0.81})
        EXPECT_NEAR(t.y_of_x(x), 2.0 * std::sqrt(x), 1e-15);
    EXPECT_DOUBLE_EQ(t.regular.length, 2.0);
}

TEST(Degenerate, ChainRuleOnSquare)
{
    const auto t = degenerate_transform(BvpProblem::scalar_dirichlet(1.0), 0.5);
    EXPECT_LE(chain_rule_residual(t, {0.0, 0.0, 1.0}), 1e-8);
}

TEST(Degenerate, ChainRuleAndRoundTripForSeveralGammas)
{
    for (const double g : {0.25, 0.5, 0.75}) {
        const auto t = degenerate_transform(BvpProblem::scalar_dirichlet(1.0), g);
        EXPECT_LE(chain_rule_residual(t, {1.0, -2.0, 0.0, 1.0}), 1e-8);
        EXPECT_LE(chain_rule_residual(t, {0.0, 1.0, 0.5, 0.0, -0.25}), 1e-8);
        EXPECT_LE(round_trip_error(t), 1e-9);
    }
}

TEST(Degenerate, WeightReadings)
{
    BvpProblem pr = BvpProblem::scalar_dirichlet(1.0);
    pr.weight.exponent = 0.2;
    const double g = 0.5;
    const auto chain = degenerate_transform(pr, g, WeightReading::chain_rule);
    const auto printed = degenerate_transform(pr, g, WeightReading::printed);
    EXPECT_NEAR(chain.regular.weight.exponent, (0.2 + g) / (1.0 - g), 1e-15);
    EXPECT_NEAR(printed.regular.weight.exponent, (0.2 + 1.0) / (1.0 - g), 1e-15);
    // the weight equals x(y)^{0.2 + γ} at the mapped point
    const double y = 0.7;
    EXPECT_NEAR(chain.regular.weight(y), std::pow(chain.x_of_y(y), 0.2 + g), 1e-12);
}

TEST(Degenerate, InteriorPointsAreMapped)
{
    BvpProblem pr = BvpProblem::scalar_dirichlet(1.0);
    pr.L1.interior.push_back({0.25, 0.1, 0});
    const auto t = degenerate_transform(pr, 0.5);
    EXPECT_NEAR(t.regular.L1.interior[0].point, 1.0, 1e-15);
}

TEST(Degenerate, RejectsGammaOutsideUnitInterval)
{
    EXPECT_THROW(degenerate_transform(BvpProblem::scalar_dirichlet(1.0), 0.0), DomainError);
    EXPECT_THROW(degenerate_transform(BvpProblem::scalar_dirichlet(1.0), 1.0), DomainError);
}

TEST(Problem, JsonRoundTrip)
{
    const Json doc = {{"dim", 2},
                      {"length", 1.0},
                      {"p", 2.0},
                      {"a", {{"kind", "constant"}, {"value", -1.0}}},
                      {"A", {{"kind", "diag_power"}, {"scale", 3.0}, {"nu", 1.0}}},
                      {"B", {{"kind", "zero"}}},
                      {"boundary",
                       {{{"order", 0}, {"alpha", {1.0}}, {"beta", {0.0}}, {"interior", {{{"point", 0.5}, {"delta", -0.1}}}}},
                        {{"order", 1}, {"alpha", {0.0, 0.0}}, {"beta", {0.0, 1.0}}}}},
                      {"weight", {{"coefficient", 1.0}, {"exponent", 0.5}}}};
    const auto pr = BvpProblem::from_json(doc);
    EXPECT_EQ(pr.dim, 2);
    EXPECT_EQ(pr.L2.order, 1);
    ASSERT_EQ(pr.L1.interior.size(), 1u);
    const Matrix A = pr.A(0.3);
    EXPECT_NEAR(A(1, 1).real(), 6.0, 1e-15);
    const auto again = BvpProblem::from_json(pr.to_json());
    EXPECT_EQ(again.to_json(), pr.to_json());
}

TEST(Problem, ValidationErrors)
{
    Json bad_order = {{"boundary", {{{"order", 2}, {"alpha", {1, 0, 0}}, {"beta", {0, 0, 0}}},
                                    {{"order", 0}, {"alpha", {0}}, {"beta", {1}}}}}};
    EXPECT_THROW(BvpProblem::from_json(bad_order), DomainError);
    Json bad_point = {{"boundary", {{{"order", 0}, {"alpha", {1}}, {"beta", {0}}, {"interior", {{{"point", 1.5}, {"delta", 1}}}}},
                                    {{"order", 0}, {"alpha", {0}}, {"beta", {1}}}}}};
    EXPECT_THROW(BvpProblem::from_json(bad_point), DomainError);
    EXPECT_THROW(BvpProblem::from_json({{"weight", {{"exponent", -1.0}}}}), DomainError);
    EXPECT_THROW(BvpProblem::from_json({{"A", {{"kind", "mystery"}}}}), DomainError);
}

TEST(Problem, TabulatedCoefficientInterpolates)
{
    const auto f = ScalarCoefficient::from_json({{"kind", "tabulated"}, {"x", {0.0, 1.0}}, {"values", {1.0, 3.0}}});
    EXPECT_NEAR(f(0.25).real(), 1.5, 1e-15);
}
