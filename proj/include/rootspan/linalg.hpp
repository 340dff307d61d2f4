#pragma once
//
// Dense eigenvalue helpers shared by the spectral modules.
//

#include <vector>

#include "rootspan/core.hpp"

namespace rootspan {

/// Eigenvalues of a square matrix (complex Schur form). Throws NumericalError
/// if the QR iteration fails to converge.
Vector eigenvalues(const Matrix& A);

struct EigenSystem {
    Vector values;
    Matrix vectors;  // columns, unit 2-norm
};

EigenSystem eigensystem(const Matrix& A);

/// Group of numerically coincident eigenvalues.
struct EigenCluster {
    Complex center;               // arithmetic mean of the members
    std::vector<Index> members;   // indices into the eigenvalue vector
    Index multiplicity() const noexcept { return static_cast<Index>(members.size()); }
};

//
// Single-linkage clustering at the given radius. Clusters are ordered by
// (real part, imaginary part) of their centers.
//
std::vector<EigenCluster> cluster_eigenvalues(const Vector& values, double radius);

/// Default clustering radius tol · (1 + max|λ|).
double cluster_radius(const Vector& values, double tol);

/// Smallest distance from z to any entry of values; also reports the entry.
double distance_to_spectrum(const Vector& values, Complex z, Complex* nearest = nullptr);

//
// Quasi-nilpotency at tolerance: either the computed spectral radius is below
// radius_tol · max(1, ‖N‖₂), or every power sum satisfies
// |tr(N^k)| ≤ trace_tol · n · ‖N‖₂^k (k = 1..n). The second test is the
// backward-stable one; computed eigenvalues of a rounded nilpotent matrix
// scatter like ε^{1/n}.
//
bool is_quasinilpotent(const Matrix& N, double radius_tol = 1e-8, double trace_tol = 1e-10);

}  // namespace rootspan
