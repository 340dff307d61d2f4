#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "rootspan/banach_geometry.hpp"
#include "rootspan/norms.hpp"

using namespace rootspan;

namespace {

Vector unit(Index n, Index k)
{
    Vector v = Vector::Zero(n);
    v(k) = 1.0;
    return v;
}

}  // namespace

TEST(Pairing, CanonicalFirstPair)
{
    const auto sys = BiorthogonalSystem::canonical(4, ExponentContext(2.0));
    EXPECT_EQ(pairing(sys.primal().col(0), sys.dual().col(0)), Complex(1.0));
}

TEST(Pairing, SmallExample)
{
    Vector u(2), f(2);
    u << 1.0, 2.0;
    f << 3.0, 4.0;
    EXPECT_EQ(pairing(u, f), Complex(11.0));
}

TEST(Pairing, IsBilinearNotSesquilinear)
{
    Vector u(1), f(1);
    u << Complex(0.0, 1.0);
    f << Complex(0.0, 1.0);
    EXPECT_EQ(pairing(u, f), Complex(-1.0));
}

TEST(Pairing, MatchesBruteForceSum)
{
    Rng rng(7);
    const Vector u = random_vector(16, rng), f = random_vector(16, rng);
    Complex s = 0.0;
    for (Index i = 0; i < 16; ++i)
        s += u(i) * f(i);
    EXPECT_LE(std::abs(pairing(u, f) - s), 1e-13);
}

TEST(Pairing, LengthMismatchThrows)
{
    EXPECT_THROW(pairing(Vector::Zero(2), Vector::Zero(3)), DimensionError);
}

TEST(Fourier, UnitVectorInCanonicalSystem)
{
    const auto sys = BiorthogonalSystem::canonical(5, ExponentContext(3.0));
    EXPECT_EQ(fourier_coefficients(unit(5, 2), sys), unit(5, 2));
}

TEST(Fourier, CanonicalIsIdentity)
{
    Rng rng(3);
    const Vector u = random_vector(6, rng);
    EXPECT_EQ(fourier_coefficients(u, BiorthogonalSystem::canonical(6, ExponentContext(1.5))), u);
}

TEST(Fourier, ReconstructionInRandomSystem)
{
    Rng rng(11);
    const ExponentContext ctx(2.5);
    const auto sys = BiorthogonalSystem::from_primal(random_matrix(8, 8, rng), ctx);
    for (int t = 0; t < 20; ++t) {
        const Vector u = random_vector(8, rng);
        EXPECT_LE((synthesize(fourier_coefficients(u, sys), sys) - u).norm(), 1e-9);
    }
}

TEST(BiorthogonalSystem, ConstructedSystemsAreBiorthogonal)
{
    Rng rng(5);
    const ExponentContext ctx(3.0);
    const std::vector<Index> perm{2, 0, 3, 1};
    const BiorthogonalSystem systems[] = {
        BiorthogonalSystem::canonical(6, ctx),
        BiorthogonalSystem::permuted(perm, ctx),
        BiorthogonalSystem::from_primal(random_matrix(6, 6, rng), ctx),
        BiorthogonalSystem::random_biorthonormal(9, ctx, 42),
        BiorthogonalSystem::random_biorthonormal(6, ctx, 1).transformed(random_matrix(6, 6, rng)),
        BiorthogonalSystem::random_biorthonormal(6, ctx, 2).swapped(),
    };
    for (const auto& s : systems)
        EXPECT_LE(s.biorthogonality_defect(), 1e-10);
}

TEST(BiorthogonalSystem, RandomBiorthonormalHasUnitVectors)
{
    const ExponentContext ctx(3.0);
    const auto sys = BiorthogonalSystem::random_biorthonormal(10, ctx, 9);
    EXPECT_TRUE(sys.is_biorthonormal());
    for (Index j = 0; j < 10; ++j) {
        EXPECT_NEAR(lp_norm(sys.primal().col(j), ctx.p()), 1.0, 1e-12);
        EXPECT_NEAR(lp_norm(sys.dual().col(j), ctx.q()), 1.0, 1e-12);
    }
    const auto swapped = sys.swapped();
    EXPECT_DOUBLE_EQ(swapped.context().p(), ctx.q());
    EXPECT_TRUE(swapped.is_biorthonormal());
}

TEST(BiorthogonalSystem, RejectsNonBiorthogonalPair)
{
    Matrix E = Matrix::Identity(3, 3);
    Matrix F = Matrix::Identity(3, 3);
    F(0, 1) = 0.5;
    EXPECT_THROW(BiorthogonalSystem(E, F, ExponentContext(2.0)), DomainError);
    EXPECT_THROW(BiorthogonalSystem(Matrix::Identity(3, 3), Matrix::Identity(2, 2), ExponentContext(2.0)),
                 DimensionError);
}

TEST(ExponentContext, RejectsExponentOne)
{
    EXPECT_THROW(ExponentContext(1.0), DomainError);
    EXPECT_DOUBLE_EQ(ExponentContext(3.0).q(), 1.5);
}

TEST(BCondition, CanonicalConstantIsOne)
{
    for (const double p : {1.5, 2.0, 4.0})
        EXPECT_NEAR(b_condition_constant(BiorthogonalSystem::canonical(6, ExponentContext(p)), 200, 1), 1.0, 1e-9);
}

TEST(BCondition, PermutedCanonicalConstantIsOne)
{
    const std::vector<Index> perm{4, 2, 0, 1, 3};
    EXPECT_NEAR(b_condition_constant(BiorthogonalSystem::permuted(perm, ExponentContext(3.0)), 200, 2), 1.0, 1e-9);
}

TEST(BCondition, HilbertCaseMatchesOracles)
{
    Rng rng(21);
    const ExponentContext ctx(2.0);
    Matrix P = Matrix::Identity(8, 8) + 0.3 * random_matrix(8, 8, rng);
    const auto sys = BiorthogonalSystem::from_primal(P, ctx);
    const double estimate = b_condition_constant(sys, 400, 3);

    // dense sampling oracle: a lower estimate of the constant
    double sampled = 0.0;
    for (int t = 0; t < 100000; ++t) {
        const Vector u = random_vector(8, rng);
        sampled = std::max(sampled, u.squaredNorm() / fourier_coefficients(u, sys).squaredNorm());
    }
    // at p = 2 the constant is 1/σ_min(F^T)^2
    Eigen::JacobiSVD<Matrix> svd(sys.dual().transpose());
    const double sigma_min = svd.singularValues()(7);
    const double exact = 1.0 / (sigma_min * sigma_min);

    EXPECT_GE(estimate, sampled * (1.0 - 1e-9));
    EXPECT_LE(std::abs(estimate - exact) / exact, 0.05);
}

TEST(BCondition, RejectsTooFewSamples)
{
    EXPECT_THROW(b_condition_constant(BiorthogonalSystem::canonical(3, ExponentContext(2.0)), 10, 1), DomainError);
}

TEST(ApConstant, UnweightedIsExactlyOne)
{
    const auto est = ap_constant(PowerWeight(0.0), ExponentContext(2.0), 8);
    EXPECT_EQ(est.value, 1.0);
    EXPECT_TRUE(est.bounded);
}

TEST(ApConstant, AdmissibleWeightSaturates)
{
    const ExponentContext ctx(2.0);
    const double a8 = ap_constant(PowerWeight(0.5), ctx, 8).value;
    const double a9 = ap_constant(PowerWeight(0.5), ctx, 9).value;
    EXPECT_TRUE(std::isfinite(a8));
    EXPECT_GE(a8, 1.0);
    EXPECT_LE(std::abs(a9 - a8) / a8, 0.01);
}

TEST(ApConstant, BoundaryWeightDiverges)
{
    const ExponentContext ctx(2.0);
    // at γ = p − 1 the prefix average of w^{-1} is log(b/δ), so the estimate
    // grows linearly in the refinement level
    const auto e8 = ap_constant(PowerWeight(1.0), ctx, 8);
    const auto e9 = ap_constant(PowerWeight(1.0), ctx, 9);
    const auto e10 = ap_constant(PowerWeight(1.0), ctx, 10);
    EXPECT_FALSE(e9.bounded);
    EXPECT_GT(e9.value, e8.value * 1.05);
    EXPECT_NEAR((e10.value - e9.value) / (e9.value - e8.value), 1.0, 0.1);
}

TEST(ApConstant, IntervalScaleInvariance)
{
    const ExponentContext ctx(3.0);
    const double a = ap_constant(PowerWeight(0.7, 1.0), ctx, 10).value;
    const double b = ap_constant(PowerWeight(0.7, 5.0), ctx, 10).value;
    EXPECT_LE(std::abs(a - b) / a, 1e-6);
}

TEST(PowerWeight, RejectsNonIntegrableExponent)
{
    EXPECT_THROW(PowerWeight(-1.0), DomainError);
    EXPECT_THROW(PowerWeight(0.5, 0.0), DomainError);
}

TEST(RBound, IdentityFamily)
{
    OperatorFamily fam{{Complex(0.0)}, {Matrix::Identity(4, 4)}};
    EXPECT_NEAR(r_bound_estimate(fam, ExponentContext(3.0), 64, 1), 1.0, 0.02);
}

TEST(RBound, ScalarMultiples)
{
    OperatorFamily fam{{Complex(1.0), Complex(2.0)}, {Matrix::Identity(4, 4), 2.0 * Matrix::Identity(4, 4)}};
    EXPECT_LE(r_bound_estimate(fam, ExponentContext(3.0), 64, 1), 2.0 * 1.02);
}

TEST(RBound, SingletonMatchesNormEstimate)
{
    Rng rng(4);
    const Matrix T = random_matrix(5, 5, rng);
    const ExponentContext ctx(3.0);
    OperatorFamily fam{{Complex(0.0)}, {T}};
    const double norm = operator_norm_search(T, ctx.p()).value;
    const double est = r_bound_estimate(fam, ctx, 64, 1);
    EXPECT_GE(est, norm * 0.98);
    EXPECT_LE(est, norm * 1.02);
}

TEST(RBound, ResolventFamilyMatchesExhaustiveSigns)
{
    Matrix A = Matrix::Zero(8, 8);
    for (Index i = 0; i < 8; ++i)
        A(i, i) = static_cast<double>(i + 1);
    const std::vector<Complex> xis{0.5, 2.0, 8.0, 32.0};
    const auto fam = OperatorFamily::resolvent_family(A, xis);
    const ExponentContext ctx(3.0);
    const auto est = r_bound_estimate_detailed(fam, ctx, 64, 5);
    ASSERT_TRUE(std::isfinite(est.constant));
    ASSERT_EQ(est.witness.size(), 4u);

    // all 16 sign patterns on the witness, summed directly
    double num = 0.0, den = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
        Vector a = Vector::Zero(8), b = Vector::Zero(8);
        for (int j = 0; j < 4; ++j) {
            const double r = (mask >> j) & 1 ? 1.0 : -1.0;
            a += r * (fam.operators[static_cast<std::size_t>(j)] * est.witness[static_cast<std::size_t>(j)]);
            b += r * est.witness[static_cast<std::size_t>(j)];
        }
        num += lp_norm(a, 3.0);
        den += lp_norm(b, 3.0);
    }
    EXPECT_LE(std::abs(est.constant - num / den) / (num / den), 0.05);
}
