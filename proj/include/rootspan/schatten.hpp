#pragma once
//
// Quasi-nuclear σ_p norms over biorthogonal systems, ℓ_p operator-norm
// brackets, approximation numbers and the Weyl inequality.
//

#include <vector>

#include "rootspan/banach_geometry.hpp"
#include "rootspan/core.hpp"

namespace rootspan {

/// (Σ_i Σ_j |pairing(A e_i, f_j)|^p)^{1/p} with p taken from A's context.
double sigma_p_norm(const OperatorMatrix& A, const BiorthogonalSystem& system);

/// Same double sum at an explicit exponent r.
double sigma_norm_at(const Matrix& A, const BiorthogonalSystem& system, double r);

/// Bracket for ‖A‖_{p→p}: Riesz–Thorin above, seeded ℓ_p power search below.
NormBounds lp_operator_norm_bounds(const OperatorMatrix& A);

//
// Brackets for s_1..s_{k_max}. At p = 2 these are the singular values. For
// other p the upper bounds are norms of SVD tails, the lower bounds come from
// the singular values through the ℓ_2/ℓ_p comparison constants.
//
std::vector<NormBounds> approximation_numbers(const OperatorMatrix& A, Index k_max);

struct WeylReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Σ|λ_j|^p against Σ s_j^p (upper brackets when p ≠ 2).
WeylReport weyl_check(const OperatorMatrix& A);

struct BasisEquivalenceReport {
    double ratio = 1.0;
    double constant_bracket = 1.0;  // (C_1 C_2)^{1/p} from the B-condition estimates
    bool within_bracket = true;     // ratio and 1/ratio ≤ constant_bracket
    double change_of_basis_bound = 1.0;
    bool within_change_of_basis = true;
};

//
// Compares σ_p norms of A in two systems. The change-of-basis bound is the
// larger of ‖T‖‖T^{-T}‖ and ‖T^{-1}‖‖T^T‖ (RT upper brackets) for the Gram
// matrix T = F_1^T E_2; it always holds. The B-condition bracket is reported.
//
BasisEquivalenceReport basis_equivalence_check(const OperatorMatrix& A, const BiorthogonalSystem& system1,
                                               const BiorthogonalSystem& system2, int sample_count = 400,
                                               std::uint64_t seed = 1);

struct AdjointNormReport {
    double primal = 0.0;
    double dual = 0.0;
};

/// σ_p(A) against σ_p of the transpose in the swapped system.
AdjointNormReport adjoint_norm_identity(const OperatorMatrix& A, const BiorthogonalSystem& system);

}  // namespace rootspan
