#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rootspan/linalg.hpp"
#include "rootspan/rootspace.hpp"

using namespace rootspan;

namespace {

const ExponentContext kHilbert(2.0);

Matrix jordan_block(Complex lambda, Index k)
{
    Matrix J = Matrix::Zero(k, k);
    for (Index i = 0; i < k; ++i) {
        J(i, i) = lambda;
        if (i + 1 < k)
            J(i, i + 1) = 1.0;
    }
    return J;
}

Matrix block_diag(const Matrix& a, const Matrix& b)
{
    Matrix M = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    M.topLeftCorner(a.rows(), a.cols()) = a;
    M.bottomRightCorner(b.rows(), b.cols()) = b;
    return M;
}

/// Well-conditioned random similarity.
Matrix similarity(Index n, Rng& rng)
{
    Vector d(n);
    for (Index i = 0; i < n; ++i)
        d(i) = 1.0 + static_cast<double>(i) / static_cast<double>(n);
    return random_unitary(n, rng) * d.asDiagonal() * random_unitary(n, rng);
}

std::vector<Index> chain_lengths(const RootCluster& c)
{
    std::vector<Index> out;
    for (const auto& ch : c.chains)
        out.push_back(static_cast<Index>(ch.size()));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(SpectralDecomposition, DistinctDiagonal)
{
    Vector d(4);
    d << 1.0, -2.0, Complex(0.0, 3.0), 5.0;
    const auto dec = spectral_decomposition(OperatorMatrix(d.asDiagonal(), kHilbert));
    ASSERT_EQ(dec.clusters.size(), 4u);
    for (const auto& c : dec.clusters) {
        EXPECT_EQ(c.multiplicity, 1);
        EXPECT_EQ(chain_lengths(c), std::vector<Index>{1});
    }
    EXPECT_EQ(dec.root_vector_count(), 4);
}

TEST(SpectralDecomposition, SingleJordanBlock)
{
    const Matrix J = jordan_block(2.0, 3);
    const auto dec = spectral_decomposition(OperatorMatrix(J, kHilbert));
    ASSERT_EQ(dec.clusters.size(), 1u);
    EXPECT_NEAR(std::abs(dec.clusters[0].eigenvalue - 2.0), 0.0, 1e-10);
    EXPECT_EQ(dec.clusters[0].multiplicity, 3);
    EXPECT_EQ(chain_lengths(dec.clusters[0]), std::vector<Index>{3});
    EXPECT_LE(dec.max_chain_residual(J), 1e-10);
}

TEST(SpectralDecomposition, RecoversJordanPatternUnderSimilarity)
{
    Rng rng(1);
    // J_3(1) ⊕ J_2(-1) ⊕ J_1(-1) ⊕ (3)
    Matrix J = block_diag(block_diag(jordan_block(1.0, 3), jordan_block(-1.0, 2)), jordan_block(-1.0, 1));
    J = block_diag(J, jordan_block(3.0, 1));
    for (int t = 0; t < 10; ++t) {
        const Matrix S = similarity(7, rng);
        const Matrix A = S * J * S.inverse();
        // a triple eigenvalue splits by about (eps ||A||)^{1/3} under rounding
        const auto dec = spectral_decomposition(OperatorMatrix(A, kHilbert), 1e-4);
        ASSERT_EQ(dec.clusters.size(), 3u);
        EXPECT_EQ(chain_lengths(dec.clusters[0]), (std::vector<Index>{1, 2}));  // at -1
        EXPECT_EQ(chain_lengths(dec.clusters[1]), std::vector<Index>{3});       // at 1
        EXPECT_EQ(chain_lengths(dec.clusters[2]), std::vector<Index>{1});       // at 3
        EXPECT_LE(dec.max_chain_residual(A), 1e-7);
    }
}

TEST(SpectralDecomposition, ProjectionsResolveIdentity)
{
    Rng rng(2);
    for (int t = 0; t < 100; ++t) {
        const Index n = 2 + t % 9;
        const Matrix A = random_matrix(n, n, rng);
        const auto dec = spectral_decomposition(OperatorMatrix(A, kHilbert));
        Matrix total = Matrix::Zero(n, n);
        for (std::size_t j = 0; j < dec.clusters.size(); ++j) {
            const Matrix& P = dec.clusters[j].projection;
            total += P;
            const double scale = std::max(1.0, P.norm() * P.norm());
            EXPECT_LE((P * P - P).norm() / scale, 1e-8);
            for (std::size_t k = 0; k < dec.clusters.size(); ++k)
                if (k != j)
                    EXPECT_LE((P * dec.clusters[k].projection).norm() / scale, 1e-8);
        }
        EXPECT_LE((total - Matrix::Identity(n, n)).norm(), 1e-8);
    }
}

TEST(RieszProjection, DiagonalExample)
{
    Matrix D = Matrix::Zero(2, 2);
    D(1, 1) = 1.0;
    const auto P = riesz_projection(OperatorMatrix(D, kHilbert), 0.0, 0.5, 64).entries();
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    EXPECT_LE((P - expected).norm(), 1e-10);
}

TEST(RieszProjection, JordanBlockWholeSpace)
{
    const auto P = riesz_projection(OperatorMatrix(jordan_block(0.0, 2), kHilbert), 0.0, 0.5, 64).entries();
    EXPECT_LE((P - Matrix::Identity(2, 2)).norm(), 1e-9);
}

TEST(RieszProjection, AgreesWithChainProjections)
{
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        const Index n = 2 + t % 9;
        const OperatorMatrix A(random_matrix(n, n, rng), kHilbert);
        const auto dec = spectral_decomposition(A);
        for (const auto& c : dec.clusters) {
            double gap = 1.0;
            bool first = true;
            for (const auto& o : dec.clusters)
                if (&o != &c) {
                    gap = first ? std::abs(o.eigenvalue - c.eigenvalue) : std::min(gap, std::abs(o.eigenvalue - c.eigenvalue));
                    first = false;
                }
            const Matrix P = riesz_projection(A, c.eigenvalue, 0.4 * gap, 128).entries();
            EXPECT_LE((P * P - P).norm() / std::max(1.0, P.norm() * P.norm()), 1e-8);
            EXPECT_LE((P - c.projection).norm() / std::max(1.0, c.projection.norm()), 1e-7);
        }
    }
}

TEST(RieszProjection, RejectsEigenvalueOnContour)
{
    Matrix D = Matrix::Zero(2, 2);
    D(1, 1) = 1.0;
    EXPECT_THROW(riesz_projection(OperatorMatrix(D, kHilbert), 0.0, 1.0, 64), SpectrumError);
    EXPECT_THROW(riesz_projection(OperatorMatrix(D, kHilbert), 0.0, 0.5, 4), DomainError);
}

TEST(RootSpanDistance, EigenvectorIsInSpan)
{
    Rng rng(4);
    const Matrix A = random_matrix(6, 6, rng);
    const auto es = eigensystem(A);
    const auto dec = spectral_decomposition(OperatorMatrix(A, kHilbert));
    EXPECT_LE(root_span_distance(dec, es.vectors.col(2), kHilbert), 1e-10);
}

TEST(RootSpanDistance, DiagonalizableSpansEverything)
{
    Rng rng(5);
    for (const double p : {1.5, 2.0, 3.0}) {
        const ExponentContext ctx(p);
        const auto dec = spectral_decomposition(OperatorMatrix(random_matrix(6, 6, rng), ctx));
        for (int t = 0; t < 5; ++t)
            EXPECT_LE(root_span_distance(dec, random_vector(6, rng), ctx), 1e-8);
    }
}

TEST(RootSpanDistance, TruncatedMatchesNormalEquations)
{
    Rng rng(6);
    const auto dec = spectral_decomposition(OperatorMatrix(random_matrix(7, 7, rng), kHilbert));
    for (Index k = 1; k <= 6; ++k) {
        const auto cut = dec.truncated(k);
        const Matrix V = cut.root_vectors();
        ASSERT_EQ(V.cols(), k);
        const Vector u = random_vector(7, rng);
        const Vector c = (V.adjoint() * V).ldlt().solve(V.adjoint() * u);
        EXPECT_NEAR(root_span_distance(cut, u, kHilbert), (u - V * c).norm(), 1e-8);
    }
}

TEST(RootSpanDistance, NonincreasingAsChainsAreAdded)
{
    Rng rng(7);
    const ExponentContext ctx(3.0);
    const auto dec = spectral_decomposition(OperatorMatrix(random_matrix(6, 6, rng), ctx));
    const Vector u = random_vector(6, rng);
    double previous = std::numeric_limits<double>::infinity();
    for (Index k = 0; k <= 6; ++k) {
        const double d = root_span_distance(dec.truncated(k), u, ctx);
        EXPECT_LE(d, previous * (1.0 + 1e-9) + 1e-14);
        previous = d;
    }
}

TEST(Completeness, DiagonalizableInvertible)
{
    Rng rng(8);
    for (const double p : {1.5, 2.0, 3.0}) {
        const ExponentContext ctx(p);
        Matrix A = Matrix::Zero(5, 5);
        for (Index i = 0; i < 5; ++i)
            A(i, i) = Complex(1.0 + i, 0.5 * i);
        const Matrix S = similarity(5, rng);
        const int s = static_cast<int>(std::floor(2.0 * p)) + 1;
        CompletenessOptions opt;
        opt.scan_points = 21;
        const auto v = completeness_verdict(OperatorMatrix(S * A * S.inverse(), ctx), 0,
                                            ArcConfiguration::equally_spaced(s, ctx, 0.1), 8, 1, opt);
        EXPECT_TRUE(v.sector.holds);
        EXPECT_TRUE(v.decay_holds);
        EXPECT_LE(v.max_distance, 1e-8);
        EXPECT_TRUE(v.verdict);
    }
}

TEST(Completeness, JordanBlockAtZeroWithOrderTwo)
{
    Matrix A = block_diag(jordan_block(0.0, 2), jordan_block(1.0, 1));
    const auto v = completeness_verdict(OperatorMatrix(A, kHilbert), 2,
                                        ArcConfiguration::equally_spaced(5, kHilbert, 0.1), 8, 2);
    EXPECT_EQ(v.regime, ScanRegime::origin);
    EXPECT_LE(v.max_absolute_distance, 1e-12);
    EXPECT_TRUE(v.decay_holds);
    EXPECT_TRUE(v.verdict);
}

TEST(Completeness, TruncatedChainIsIncomplete)
{
    const Matrix A = block_diag(jordan_block(1.0, 3), jordan_block(-2.0, 1));
    const OperatorMatrix op(A, kHilbert);
    const auto dec = spectral_decomposition(op);
    const auto v = completeness_verdict(op, dec.truncated(dec.root_vector_count() - 1), 0,
                                        ArcConfiguration::equally_spaced(5, kHilbert, 0.1), 8, 3);
    EXPECT_GT(v.max_distance, 1e-3);
    EXPECT_FALSE(v.distance_holds);
    EXPECT_FALSE(v.verdict);
}

TEST(Completeness, RejectsBadArguments)
{
    const OperatorMatrix A(Matrix::Identity(2, 2), kHilbert);
    const auto arcs = ArcConfiguration::equally_spaced(5, kHilbert);
    EXPECT_THROW(completeness_verdict(A, -1, arcs, 4, 1), DomainError);
    EXPECT_THROW(completeness_verdict(A, 0, arcs, 0, 1), DomainError);
}
