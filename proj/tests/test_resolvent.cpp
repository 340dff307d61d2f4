#include <gtest/gtest.h>

#include <cmath>

#include "rootspan/linalg.hpp"
#include "rootspan/resolvent.hpp"

using namespace rootspan;

namespace {

const ExponentContext kHilbert(2.0);

Matrix jordan_zero_plus_one()
{
    Matrix A = Matrix::Zero(3, 3);
    A(0, 1) = 1.0;
    A(2, 2) = 1.0;
    return A;
}

}  // namespace

TEST(Resolvent, ZeroOperator)
{
    const auto R = resolvent(OperatorMatrix(Matrix::Zero(3, 3), kHilbert), 1.0);
    EXPECT_LE((R.entries() - Matrix::Identity(3, 3)).norm(), 1e-15);
}

TEST(Resolvent, Diagonal)
{
    Vector d(3);
    d << 1.0, Complex(0.0, 2.0), -3.0;
    const Complex lambda(0.5, 0.5);
    const auto R = resolvent(OperatorMatrix(d.asDiagonal(), kHilbert), lambda);
    for (Index i = 0; i < 3; ++i)
        EXPECT_LE(std::abs(R.entries()(i, i) - 1.0 / (lambda - d(i))), 1e-14);
}

TEST(Resolvent, MultiplyBackResidual)
{
    Rng rng(1);
    const Matrix A = random_matrix(8, 8, rng);
    const Complex lambda(3.7, -1.1);
    const Matrix R = resolvent(OperatorMatrix(A, kHilbert), lambda).entries();
    Matrix shifted = -A;
    shifted.diagonal().array() += lambda;
    EXPECT_LE((shifted * R - Matrix::Identity(8, 8)).norm(), 1e-9);
}

TEST(Resolvent, ResolventIdentity)
{
    Rng rng(2);
    const OperatorMatrix A(random_matrix(6, 6, rng), kHilbert);
    const Complex l(4.0, 1.0), m(-3.0, 2.5);
    const Matrix Rl = resolvent(A, l).entries(), Rm = resolvent(A, m).entries();
    EXPECT_LE((Rl - Rm - (m - l) * Rl * Rm).norm(), 1e-8);
}

TEST(Resolvent, SpectrumErrorReportsNearestEigenvalue)
{
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = 2.0;
    D(1, 1) = 5.0;
    try {
        resolvent(OperatorMatrix(D, kHilbert), 5.0);
        FAIL() << "expected SpectrumError";
    } catch (const SpectrumError& e) {
        EXPECT_NEAR(std::abs(e.nearest_eigenvalue() - Complex(5.0)), 0.0, 1e-12);
    }
}

TEST(RegularizedDeterminant, NilpotentIsOne)
{
    Matrix N = Matrix::Zero(3, 3);
    N(0, 1) = 1.0;
    N(1, 2) = 4.0;
    for (const Complex l : {Complex(1.0), Complex(0.0, -3.0), Complex(0.01)})
        EXPECT_LE(std::abs(regularized_determinant(OperatorMatrix(N, kHilbert), l) - 1.0), 1e-14);
}

TEST(RegularizedDeterminant, SingleFactor)
{
    const Complex mu(1.5, -0.5);
    Matrix A(1, 1);
    A(0, 0) = mu;
    const Complex v = regularized_determinant(OperatorMatrix(A, kHilbert), 2.0 * mu);
    EXPECT_LE(std::abs(v - 0.5 * std::exp(0.5)), 1e-14);
}

TEST(RegularizedDeterminant, FactorByFactorOracle)
{
    Rng rng(3);
    const Matrix A = random_matrix(6, 6, rng);
    const Vector ev = eigenvalues(A);
    const Complex lambda(2.0, 7.0);
    Complex expected = 1.0;
    for (Index i = 0; i < ev.size(); ++i)
        expected *= (1.0 - ev(i) / lambda) * std::exp(ev(i) / lambda);
    const Complex got = regularized_determinant(OperatorMatrix(A, kHilbert), lambda);
    EXPECT_LE(std::abs(got - expected) / std::abs(expected), 1e-10);
    EXPECT_NEAR(log_abs_regularized_determinant(ev, lambda), std::log(std::abs(expected)), 1e-10);
}

TEST(RegularizedDeterminant, SimilarityInvariance)
{
    Rng rng(4);
    const Matrix A = random_matrix(6, 6, rng);
    const Matrix S = random_unitary(6, rng) * (Matrix::Identity(6, 6) * 1.5);
    const Complex l(5.0, 2.0);
    const Complex a = regularized_determinant(OperatorMatrix(A, kHilbert), l);
    const Complex b = regularized_determinant(OperatorMatrix(S * A * S.inverse(), kHilbert), l);
    EXPECT_LE(std::abs(a - b) / std::abs(a), 1e-9);
}

TEST(Carleman, ZeroOperator)
{
    const auto sys = BiorthogonalSystem::canonical(3, kHilbert);
    for (const double r : {1.0, 2.0, 10.0}) {
        const auto c = carleman_report(OperatorMatrix(Matrix::Zero(3, 3), kHilbert), sys, Complex(0.0, r));
        EXPECT_NEAR(c.lhs.lower, 1.0 / r, 1e-14);
        EXPECT_NEAR(c.lhs.upper, 1.0 / r, 1e-14);
        EXPECT_NEAR(c.rhs, r * std::exp(0.5), 1e-12 * r);
        EXPECT_TRUE(c.satisfied_at_bracket);
        EXPECT_TRUE(c.asserted);
    }
}

TEST(Carleman, SingleFactorClosedForm)
{
    Matrix A(1, 1);
    A(0, 0) = 1.0;
    const auto c = carleman_report(OperatorMatrix(A, kHilbert), BiorthogonalSystem::canonical(1, kHilbert), 2.0);
    EXPECT_NEAR(c.lhs.upper, 0.5 * std::exp(0.5), 1e-14);
    EXPECT_NEAR(c.lhs.lower, 0.5 * std::exp(0.5), 1e-14);
    EXPECT_NEAR(c.rhs, 2.0 * std::exp((1.0 + 0.25) / 2.0), 1e-13);
    EXPECT_TRUE(c.satisfied_at_bracket);
}

TEST(Carleman, RandomHilbertInstancesOnLogGrid)
{
    Rng rng(5);
    const auto sys = BiorthogonalSystem::canonical(6, kHilbert);
    for (int t = 0; t < 100; ++t) {
        const OperatorMatrix A(random_matrix(6, 6, rng), kHilbert);
        const Vector ev = eigenvalues(A.entries());
        for (int k = 0; k < 20; ++k) {
            const double r = std::pow(10.0, -0.5 + 2.5 * k / 19.0);
            Complex l = std::polar(r, 0.37 * k + 0.1 * t);
            for (int s = 1; distance_to_spectrum(ev, l) < 0.1 && s < 64; ++s)
                l = std::polar(r, 0.37 * k + 0.1 * t + 0.1 * s);
            if (distance_to_spectrum(ev, l) < 0.1)
                continue;
            const auto c = carleman_report(A, sys, l);
            EXPECT_TRUE(c.asserted);
            EXPECT_TRUE(c.satisfied_at_bracket) << "t=" << t << " k=" << k;
        }
    }
}

TEST(Carleman, NonHilbertIsReportOnly)
{
    Rng rng(6);
    const ExponentContext ctx(3.0);
    const auto c = carleman_report(OperatorMatrix(random_matrix(4, 4, rng), ctx), BiorthogonalSystem::canonical(4, ctx),
                                   Complex(10.0, 1.0));
    EXPECT_FALSE(c.asserted);
    EXPECT_LE(c.lhs.lower, c.lhs.upper);
}

TEST(QuasinilpotentResolvent, ZeroOperator)
{
    const auto sys = BiorthogonalSystem::canonical(3, kHilbert);
    for (const double r : {1.0, 3.0}) {
        const auto q = quasinilpotent_resolvent_report(OperatorMatrix(Matrix::Zero(3, 3), kHilbert), sys, r);
        EXPECT_NEAR(q.lhs.upper, 1.0 / r, 1e-14);
        EXPECT_TRUE(q.satisfied);
    }
}

TEST(QuasinilpotentResolvent, JordanBlockClosedForm)
{
    Matrix J = Matrix::Zero(2, 2);
    J(0, 1) = 1.0;
    const auto q = quasinilpotent_resolvent_report(OperatorMatrix(J, kHilbert), BiorthogonalSystem::canonical(2, kHilbert),
                                                   1.0);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;  // ‖[[1,1],[0,1]]‖₂
    EXPECT_NEAR(q.lhs.upper, golden, 1e-12);
    EXPECT_NEAR(q.rhs, std::exp(2.0), 1e-12);
    EXPECT_TRUE(q.satisfied);
}

TEST(QuasinilpotentResolvent, RejectsInvertible)
{
    EXPECT_THROW(quasinilpotent_resolvent_report(OperatorMatrix(Matrix::Identity(2, 2), kHilbert),
                                                 BiorthogonalSystem::canonical(2, kHilbert), 1.0),
                 DomainError);
}

TEST(RayScan, InvertibleHasOrderZero)
{
    Matrix A = Matrix::Identity(3, 3);
    A(0, 2) = 0.5;
    A(1, 1) = 2.0;
    const auto s = ray_scan(OperatorMatrix(A, kHilbert), kPi, 1e-5, 1e-1, 31);
    EXPECT_NEAR(s.fitted_order, 0.0, 0.1);
}

TEST(RayScan, SimpleZeroHasOrderOne)
{
    Matrix A = Matrix::Zero(3, 3);
    A(1, 1) = 1.0;
    A(2, 2) = 2.0;
    const auto s = ray_scan(OperatorMatrix(A, kHilbert), kPi, 1e-5, 1e-1, 31);
    EXPECT_NEAR(s.fitted_order, 1.0, 0.05);
    EXPECT_TRUE(s.confident);
}

TEST(RayScan, JordanZeroHasOrderTwo)
{
    const auto s = ray_scan(OperatorMatrix(jordan_zero_plus_one(), kHilbert), kPi, 1e-5, 1e-1, 31);
    EXPECT_NEAR(s.fitted_order, 2.0, 0.05);
    ASSERT_EQ(s.radii.size(), 31u);
    for (std::size_t i = 1; i < s.radii.size(); ++i)
        EXPECT_LT(s.radii[i], s.radii[i - 1]);
}

TEST(RayScan, InfinityRegimeDecaysLikeInverseRadius)
{
    const auto s = ray_scan(OperatorMatrix(jordan_zero_plus_one(), kHilbert), 1.0, 1e2, 1e6, 31, ScanRegime::infinity);
    EXPECT_NEAR(s.fitted_order, 1.0, 0.05);
}

TEST(Sector, FourRays)
{
    EXPECT_TRUE(sector_condition_check(ArcConfiguration::equally_spaced(4, ExponentContext(1.5))).holds);
    EXPECT_FALSE(sector_condition_check(ArcConfiguration::equally_spaced(4, ExponentContext(3.0))).holds);
}

TEST(Sector, ClosedForm)
{
    for (const double p : {1.5, 2.0, 3.0})
        for (int s = 1; s <= 64; ++s)
            EXPECT_EQ(sector_condition_check(ArcConfiguration::equally_spaced(s, ExponentContext(p))).holds, s > 2.0 * p)
                << "s=" << s << " p=" << p;
}

TEST(Sector, OpeningsWrapAround)
{
    const ArcConfiguration arcs({0.0, kPi / 2.0, kPi}, kHilbert);
    const auto o = arcs.openings();
    ASSERT_EQ(o.size(), 3u);
    EXPECT_NEAR(o[2], kPi, 1e-15);
    const auto r = sector_condition_check(arcs);
    EXPECT_NEAR(r.max_opening, kPi, 1e-15);
    EXPECT_NEAR(r.threshold, kPi / 2.0, 1e-15);
    EXPECT_FALSE(r.holds);
}

TEST(Sector, RejectsUnsortedOrOutOfRangeAngles)
{
    EXPECT_THROW(ArcConfiguration({1.0, 0.5}, kHilbert), DomainError);
    EXPECT_THROW(ArcConfiguration({0.0, 7.0}, kHilbert), DomainError);
}
