#pragma once
//
// Core value types shared by every rootspan module: complex dense matrices,
// the exponent context of the sequence space, operator matrices and the
// exception hierarchy.
//

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rootspan {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;

//
// errors
//

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A scalar parameter lies outside its admissible range.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A spectral parameter lies (numerically) in the spectrum.
class SpectrumError : public Error {
  public:
    SpectrumError(const std::string& what, Complex nearest)
        : Error(what), nearest_(nearest) {}
    Complex nearest_eigenvalue() const noexcept { return nearest_; }

  private:
    Complex nearest_;
};

/// A decomposition or solve failed or produced an unusable result.
class NumericalError : public Error {
  public:
    using Error::Error;
};

//
// exponent context
//

/// Exponent p of the sequence space ℓ_p together with its conjugate q.
class ExponentContext {
  public:
    explicit ExponentContext(double p);

    double p() const noexcept { return p_; }
    double q() const noexcept { return q_; }

    /// Context of the dual space ℓ_q.
    ExponentContext dual() const { return ExponentContext(q_); }

    bool is_hilbert() const noexcept { return p_ == 2.0; }

  private:
    double p_;
    double q_;
};

//
// operator matrix
//

/// Dense square complex matrix acting on ℓ_p (finite section of an operator).
class OperatorMatrix {
  public:
    OperatorMatrix(Matrix entries, ExponentContext context);

    const Matrix& entries() const noexcept { return entries_; }
    const ExponentContext& context() const noexcept { return context_; }
    Index dim() const noexcept { return entries_.rows(); }

    OperatorMatrix with_entries(Matrix entries) const { return {std::move(entries), context_}; }

  private:
    Matrix entries_;
    ExponentContext context_;
};

/// Two-sided bracket for a quantity that is not computed exactly.
struct NormBounds {
    double lower = 0.0;
    double upper = 0.0;

    bool contains(double value, double tol = 0.0) const noexcept
    {
        return value >= lower - tol && value <= upper + tol;
    }
};

//
// random helpers (deterministic given the engine state)
//

using Rng = std::mt19937_64;

Vector random_vector(Index n, Rng& rng);
Matrix random_matrix(Index rows, Index cols, Rng& rng);
/// Haar-like unitary from the QR factorization of a Gaussian matrix.
Matrix random_unitary(Index n, Rng& rng);

}  // namespace rootspan
