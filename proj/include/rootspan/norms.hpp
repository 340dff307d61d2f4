#pragma once

#include <cstdint>

#include "rootspan/core.hpp"

namespace rootspan {

/// ℓ_p norm of a complex vector.
double lp_norm(const Vector& v, double p);

/// Σ_k |v_k|^p.
double lp_norm_pow(const Vector& v, double p);

/// Weighted ℓ_p norm (Σ_k w_k |v_k|^p)^{1/p}.
double weighted_lp_norm(const Vector& v, const RealVector& weights, double p);

/// Largest singular value.
double spectral_norm(const Matrix& A);

/// Exact ℓ_1 → ℓ_1 norm (max column sum).
double l1_operator_norm(const Matrix& A);

/// Exact ℓ_∞ → ℓ_∞ norm (max row sum).
double linf_operator_norm(const Matrix& A);

/// Riesz–Thorin upper bound ‖A‖_1^{1/p} ‖A‖_∞^{1/q} for the ℓ_p operator norm.
double riesz_thorin_upper(const Matrix& A, double p);

struct NormSearch {
    double value = 0.0;
    Vector witness;  // unit ℓ_p vector attaining value
};

//
// Lower bound for ‖A‖_{p→p} by maximizing ‖Au‖_p over coordinate vectors,
// the top right singular vector and seeded random starts, each refined with
// the ℓ_p power method (nondecreasing iterates).
//
NormSearch operator_norm_search(const Matrix& A, double p, std::uint64_t seed = 0x5eedULL);

/// Bracket for ‖A‖_{p→p}; exact (lower = upper) at p = 2.
NormBounds operator_norm_bounds(const Matrix& A, double p, std::uint64_t seed = 0x5eedULL);

}  // namespace rootspan
