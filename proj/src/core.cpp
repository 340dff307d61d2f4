#include "rootspan/core.hpp"

#include <cmath>
#include <string>

namespace rootspan {

ExponentContext::ExponentContext(double p) : p_(p), q_(0.0)
{
    if (!(std::isfinite(p) && p > 1.0))
        throw DomainError("exponent p must lie in (1, inf), got " + std::to_string(p));
    q_ = p / (p - 1.0);
    if (std::abs(1.0 / p_ + 1.0 / q_ - 1.0) > 1e-12)
        throw DomainError("conjugate exponent lost precision for p = " + std::to_string(p));
}

OperatorMatrix::OperatorMatrix(Matrix entries, ExponentContext context)
    : entries_(std::move(entries)), context_(context)
{
    if (entries_.rows() != entries_.cols())
        throw DimensionError("operator matrix must be square, got " + std::to_string(entries_.rows()) +
                             "x" + std::to_string(entries_.cols()));
    if (!entries_.allFinite())
        throw DomainError("operator matrix has non-finite entries");
}

Vector random_vector(Index n, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = Complex(re, im);
    }
    return v;
}

Matrix random_matrix(Index rows, Index cols, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix M(rows, cols);
    // column-major fill keeps the draw order independent of Eigen internals
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            M(i, j) = Complex(re, im);
        }
    return M;
}

Matrix random_unitary(Index n, Rng& rng)
{
    const Matrix G = random_matrix(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix the phases so the distribution does not depend on the QR convention
    for (Index j = 0; j < n; ++j) {
        const double r = std::abs(R(j, j));
        if (r > 0.0)
            Q.col(j) *= R(j, j) / r;
    }
    return Q;
}

}  // namespace rootspan
