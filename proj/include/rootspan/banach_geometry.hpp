#pragma once
//
// Sequence-space geometry: bilinear duality pairing, biorthogonal systems and
// Fourier coefficients, the B-condition constant, Muckenhoupt A_p constants
// of power weights, and Monte-Carlo R-bound estimates.
//

#include <cstdint>
#include <span>
#include <vector>

#include "rootspan/core.hpp"

namespace rootspan {

/// Bilinear pairing <u, f> = Σ_j u_j f_j (no conjugation).
Complex pairing(const Vector& u, const Vector& f);

///
/// Truncated biorthogonal system {e_j, f_j} in ℓ_p × ℓ_q.
///
/// The columns of primal() are the e_j, the columns of dual() the f_j, and
/// pairing(e_j, f_i) = δ_ij holds to 1e-10 (checked on construction). The
/// system is biorthonormal when in addition ‖e_j‖_p = ‖f_j‖_q = 1; systems
/// built from an arbitrary invertible primal matrix normalize the e_j only,
/// since their duals are then fixed.
///
class BiorthogonalSystem {
  public:
    BiorthogonalSystem(Matrix primal, Matrix dual, ExponentContext context);

    static BiorthogonalSystem canonical(Index n, ExponentContext context);

    /// e_j = unit vector perm[j]; an ℓ_p isometry of the canonical system.
    static BiorthogonalSystem permuted(std::span<const Index> perm, ExponentContext context);

    /// Normalizes the columns of primal in ℓ_p; duals from the inverse transpose.
    static BiorthogonalSystem from_primal(const Matrix& primal, ExponentContext context);

    //
    // Random biorthonormal system: the coordinates are split into random
    // blocks, each carrying a phase-randomized discrete Fourier basis, then
    // rows are permuted. Every e_j has constant modulus k^{-1/p} on a support
    // of size k and f_j = conj(e_j) rescaled to k^{-1/q}, so both are unit.
    //
    static BiorthogonalSystem random_biorthonormal(Index n, ExponentContext context,
                                                   std::uint64_t seed);

    /// {U e_j, (U^{-1})^T f_j}; biorthogonal for any invertible U.
    BiorthogonalSystem transformed(const Matrix& U) const;

    /// {f_j, e_j} viewed as a system of ℓ_q × ℓ_p.
    BiorthogonalSystem swapped() const;

    Index dim() const noexcept { return primal_.cols(); }
    const Matrix& primal() const noexcept { return primal_; }
    const Matrix& dual() const noexcept { return dual_; }
    const ExponentContext& context() const noexcept { return context_; }

    bool primal_normalized() const noexcept { return primal_normalized_; }
    bool dual_normalized() const noexcept { return dual_normalized_; }
    bool is_biorthonormal() const noexcept { return primal_normalized_ && dual_normalized_; }

    /// max_{i,j} |pairing(e_j, f_i) − δ_ij|
    double biorthogonality_defect() const;

  private:
    Matrix primal_;
    Matrix dual_;
    ExponentContext context_;
    bool primal_normalized_ = false;
    bool dual_normalized_ = false;
};

/// α_j = pairing(u, f_j).
Vector fourier_coefficients(const Vector& u, const BiorthogonalSystem& system);

/// Σ_j α_j e_j.
Vector synthesize(const Vector& coefficients, const BiorthogonalSystem& system);

//
// Estimated smallest C with ‖u‖_p^p ≤ C Σ_j |α_j|^p. Samples the coordinate
// vectors, the primal vectors and sample_count seeded Gaussian directions,
// then runs a gradient ascent on log(‖u‖_p^p / Σ|α_j|^p) from the best few.
// The result is a lower estimate of the true constant.
//
double b_condition_constant(const BiorthogonalSystem& system, int sample_count, std::uint64_t seed);

/// Power weight x^γ on (0, b).
class PowerWeight {
  public:
    PowerWeight(double gamma, double b = 1.0);

    double gamma() const noexcept { return gamma_; }
    double b() const noexcept { return b_; }
    double operator()(double x) const;

  private:
    double gamma_;
    double b_;
};

struct ApEstimate {
    double value = 0.0;
    bool bounded = true;  // γ < p − 1 (and γ > −1 by construction)
    int refinement = 0;
};

//
// A_p characteristic sup_Q (avg_Q w)(avg_Q w^{-1/(p-1)})^{p-1} over the
// family of levels ℓ = 0..refinement: the dyadic cells (k 2^{-ℓ}b,(k+1)2^{-ℓ}b)
// and the prefixes (δ_ℓ, 2^{-j} b), j ≤ ℓ, where the origin is cut off at
// δ_ℓ = 4^{-ℓ} b. Families are nested, so the estimate is nondecreasing in
// the refinement; it saturates for γ in (−1, p−1) and grows without bound
// otherwise. Averages use adaptive Gauss–Kronrod quadrature in log x.
//
ApEstimate ap_constant(const PowerWeight& weight, const ExponentContext& context, int refinement);

/// Finite sample of an operator family indexed by sector parameters ξ.
struct OperatorFamily {
    std::vector<Complex> parameters;
    std::vector<Matrix> operators;

    Index dim() const;

    /// {A (A + ξ)^{-1} : ξ ∈ xis}.
    static OperatorFamily resolvent_family(const Matrix& A, std::span<const Complex> xis);
};

struct RBoundEstimate {
    double constant = 0.0;
    std::vector<Vector> witness;  // the u_1..u_m attaining constant
};

//
// Monte-Carlo estimate of the R-bound: maximizes, over seeded random
// configurations u_1..u_m and single-operator configurations aligned with
// each operator's norm witness, the ratio
//   mean_s ‖Σ_j r_sj T_j u_j‖_p / mean_s ‖Σ_j r_sj u_j‖_p
// with sign_samples independent Rademacher vectors r_s.
//
RBoundEstimate r_bound_estimate_detailed(const OperatorFamily& family, const ExponentContext& context,
                                         int sign_samples, std::uint64_t seed);

double r_bound_estimate(const OperatorFamily& family, const ExponentContext& context, int sign_samples,
                        std::uint64_t seed);

/// The Rademacher ratio for fixed vectors and an explicit list of sign rows.
double rademacher_ratio(const OperatorFamily& family, std::span<const Vector> vectors,
                        const std::vector<std::vector<int>>& signs, double p);

}  // namespace rootspan
