#pragma once
//
// Root vectors and Jordan chains, Riesz projections, ℓ_p distances to the
// span of root vectors and completeness verdicts.
//

#include <cstdint>
#include <optional>
#include <vector>

#include "rootspan/core.hpp"
#include "rootspan/resolvent.hpp"

namespace rootspan {

/// v_1..v_r with (A − λ)v_1 ≈ 0 and (A − λ)v_{j+1} ≈ v_j.
using JordanChain = std::vector<Vector>;

struct RootCluster {
    Complex eigenvalue;
    Index multiplicity = 0;
    std::vector<JordanChain> chains;
    Matrix projection;  // P(λ, A)
};

struct SpectralDecomposition {
    Index dim = 0;
    double tol = 0.0;
    std::vector<RootCluster> clusters;

    /// All chain vectors as columns, cluster by cluster.
    Matrix root_vectors() const;
    Index root_vector_count() const;

    /// Copy keeping at most max_vectors chain vectors (chain tails dropped
    /// first within each cluster order); multiplicities and projections stay.
    SpectralDecomposition truncated(Index max_vectors) const;

    /// max over chains of ‖(A − λ)v_1‖ and ‖(A − λ)v_{j+1} − v_j‖ (2-norms).
    double max_chain_residual(const Matrix& A) const;
};

//
// Eigenvalues are clustered at radius tol·(1 + max|λ|). Each multiple
// cluster gets an orthonormal basis of its root subspace from the null space
// of (A − μ)^m, the restriction of A − μ to it is split into Jordan chains
// by a top-down null-space ladder, and projections come from the inverse of
// the full root-vector matrix.
//
SpectralDecomposition spectral_decomposition(const OperatorMatrix& A, double tol = 1e-6);

/// (2πi)^{-1} ∮ R(ζ, A) dζ over |ζ − center| = radius, trapezoidal rule.
OperatorMatrix riesz_projection(const OperatorMatrix& A, Complex center, double radius, int quad_points);

//
// min_c ‖u − Σ c_j w_j‖ over the root vectors w_j, in ℓ_p of the context
// (optionally with row weights, norm (Σ w_i |r_i|^p)^{1/p}). Exact least
// squares for p = 2, iteratively reweighted least squares otherwise; the
// result is always an attained residual norm, hence an upper bound.
//
double root_span_distance(const SpectralDecomposition& decomp, const Vector& u, const ExponentContext& context,
                          const RealVector* weights = nullptr);

struct CompletenessOptions {
    double cluster_tol = 1e-6;
    int scan_points = 41;
    std::optional<RealVector> weights;
};

struct CompletenessVerdict {
    int m = 0;
    ScanRegime regime = ScanRegime::origin;
    SectorReport sector;
    std::vector<RayScan> scans;
    double order_bound = 0.0;  // m + 0.1 near the origin, 0.9 (lower) at infinity
    bool decay_holds = false;
    double max_distance = 0.0;          // max_u dist(A^m u) / ‖A^m u‖
    double max_absolute_distance = 0.0;
    bool distance_holds = false;        // max_distance ≤ 1e-6
    bool verdict = false;
};

CompletenessVerdict completeness_verdict(const OperatorMatrix& A, int m, const ArcConfiguration& arcs,
                                         int sample_count, std::uint64_t seed,
                                         const CompletenessOptions& options = {});

/// Same with a caller-supplied (possibly truncated) decomposition.
CompletenessVerdict completeness_verdict(const OperatorMatrix& A, const SpectralDecomposition& decomp, int m,
                                         const ArcConfiguration& arcs, int sample_count, std::uint64_t seed,
                                         const CompletenessOptions& options = {});

}  // namespace rootspan
