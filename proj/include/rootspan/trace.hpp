#pragma once
//
// Bilinear trace of operator pairs, its symmetry and Hölder bound, polynomial
// functional calculus and the spectral trace identity.
//

#include <vector>

#include "rootspan/banach_geometry.hpp"
#include "rootspan/core.hpp"

namespace rootspan {

/// Polynomial F(z) = Σ_{k=1}^{K} c_k z^k (no constant term).
class AnalyticFunctionSpec {
  public:
    explicit AnalyticFunctionSpec(std::vector<Complex> coeffs);

    static AnalyticFunctionSpec identity() { return AnalyticFunctionSpec({Complex(1.0)}); }
    static AnalyticFunctionSpec monomial(int k);

    /// c_1..c_K
    const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
    int degree() const noexcept { return static_cast<int>(coeffs_.size()); }

    Complex operator()(Complex z) const;

  private:
    std::vector<Complex> coeffs_;
};

/// Σ_i pairing(A e_i, B^T f_i); equals tr(BA).
Complex trace_pair(const OperatorMatrix& A, const OperatorMatrix& B, const BiorthogonalSystem& system);

/// |Tr(A,B) − Tr(B,A)|
double trace_symmetry_check(const OperatorMatrix& A, const OperatorMatrix& B, const BiorthogonalSystem& system);

struct HolderReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// |Tr(A,B)| ≤ σ_p(A) σ_q(B^T) with the exponents of A's context.
HolderReport trace_holder_check(const OperatorMatrix& A, const OperatorMatrix& B,
                                const BiorthogonalSystem& system);

/// Horner evaluation of F at A.
OperatorMatrix apply_function(const AnalyticFunctionSpec& F, const OperatorMatrix& A);

struct SpectralTraceReport {
    Complex trace_side;
    Complex eigen_side;
    double delta = 0.0;
    bool holds = false;  // delta ≤ 1e-8 (1 + |eigen_side|)
};

SpectralTraceReport spectral_trace_check(const OperatorMatrix& A, const AnalyticFunctionSpec& F,
                                         const AnalyticFunctionSpec& g, const BiorthogonalSystem& system);

/// Tr(N, N) for quasi-nilpotent N; throws DomainError otherwise.
Complex quasinilpotent_trace(const OperatorMatrix& N, const BiorthogonalSystem& system);

}  // namespace rootspan
