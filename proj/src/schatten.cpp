#include "rootspan/schatten.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rootspan/linalg.hpp"
#include "rootspan/norms.hpp"

namespace rootspan {

namespace {

void check_dims(const Matrix& A, const BiorthogonalSystem& system, const char* who)
{
    if (A.rows() != system.dim())
        throw DimensionError(std::string(who) + ": operator dimension " + std::to_string(A.rows()) +
                             " does not match system dimension " + std::to_string(system.dim()));
}

double entrywise_norm(const Matrix& M, double r)
{
    const Eigen::Map<const Vector> v(M.data(), M.size());
    return lp_norm(v, r);
}

}  // namespace

double sigma_norm_at(const Matrix& A, const BiorthogonalSystem& system, double r)
{
    check_dims(A, system, "sigma_p_norm");
    // entry (j, i) is pairing(A e_i, f_j)
    const Matrix P = system.dual().transpose() * A * system.primal();
    return entrywise_norm(P, r);
}

double sigma_p_norm(const OperatorMatrix& A, const BiorthogonalSystem& system)
{
    return sigma_norm_at(A.entries(), system, A.context().p());
}

NormBounds lp_operator_norm_bounds(const OperatorMatrix& A)
{
    return operator_norm_bounds(A.entries(), A.context().p());
}

std::vector<NormBounds> approximation_numbers(const OperatorMatrix& A, Index k_max)
{
    const Index n = A.dim();
    if (k_max < 1 || k_max > n)
        throw DomainError("approximation_numbers: k_max must lie in [1, " + std::to_string(n) + "]");
    const double p = A.context().p();

    Eigen::BDCSVD<Matrix> svd(A.entries(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    RealVector sigma = svd.singularValues();
    const double floor = sigma(0) * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
    for (Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) <= floor)
            sigma(i) = 0.0;

    std::vector<NormBounds> out(static_cast<std::size_t>(k_max));
    if (p == 2.0) {
        for (Index j = 0; j < k_max; ++j)
            out[static_cast<std::size_t>(j)] = {sigma(j), sigma(j)};
        return out;
    }

    const double comparison = std::pow(static_cast<double>(n), -std::abs(1.0 / p - 0.5));
    const Matrix& U = svd.matrixU();
    const Matrix& V = svd.matrixV();
    for (Index j = 0; j < k_max; ++j) {
        NormBounds b;
        if (j == 0) {
            b = lp_operator_norm_bounds(A);
        } else {
            Matrix tail = Matrix::Zero(n, n);
            for (Index i = j; i < n; ++i)
                if (sigma(i) > 0.0)
                    tail += sigma(i) * U.col(i) * V.col(i).adjoint();
            b.upper = riesz_thorin_upper(tail, p);
        }
        b.lower = std::max(b.lower, sigma(j) * comparison);
        out[static_cast<std::size_t>(j)] = b;
    }
    for (std::size_t j = 1; j < out.size(); ++j)
        out[j].upper = std::min(out[j].upper, out[j - 1].upper);
    for (std::size_t j = out.size() - 1; j-- > 0;)
        out[j].lower = std::max(out[j].lower, out[j + 1].lower);
    for (auto& b : out)
        b.lower = std::min(b.lower, b.upper);
    return out;
}

WeylReport weyl_check(const OperatorMatrix& A)
{
    const double p = A.context().p();
    const Vector lambda = eigenvalues(A.entries());
    WeylReport r;
    for (Index i = 0; i < lambda.size(); ++i)
        r.lhs += std::pow(std::abs(lambda(i)), p);
    for (const NormBounds& s : approximation_numbers(A, A.dim()))
        r.rhs += std::pow(s.upper, p);
    r.holds = r.lhs <= r.rhs + 1e-9;
    return r;
}

BasisEquivalenceReport basis_equivalence_check(const OperatorMatrix& A, const BiorthogonalSystem& system1,
                                               const BiorthogonalSystem& system2, int sample_count,
                                               std::uint64_t seed)
{
    if (system1.dim() != system2.dim())
        throw DimensionError("basis_equivalence_check: systems differ in dimension");
    const double p = A.context().p();
    const double n1 = sigma_p_norm(A, system1);
    const double n2 = sigma_p_norm(A, system2);

    BasisEquivalenceReport r;
    if (n1 == 0.0 && n2 == 0.0) {
        r.ratio = 1.0;
    } else if (n1 == 0.0 || n2 == 0.0) {
        throw NumericalError("basis_equivalence_check: norm vanishes in only one system");
    } else {
        r.ratio = n1 / n2;
    }

    const double c1 = b_condition_constant(system1, sample_count, seed);
    const double c2 = b_condition_constant(system2, sample_count, seed + 1);
    r.constant_bracket = std::pow(c1 * c2, 1.0 / p);
    const double slack = 1.0 + 1e-9;
    r.within_bracket = r.ratio <= r.constant_bracket * slack && 1.0 / r.ratio <= r.constant_bracket * slack;

    const Matrix T = system1.dual().transpose() * system2.primal();
    const Matrix Tinv = system2.dual().transpose() * system1.primal();
    const double up = riesz_thorin_upper(T, p) * riesz_thorin_upper(Tinv.transpose(), p);
    const double down = riesz_thorin_upper(Tinv, p) * riesz_thorin_upper(T.transpose(), p);
    r.change_of_basis_bound = std::max(up, down);
    r.within_change_of_basis = r.ratio <= up * slack && 1.0 / r.ratio <= down * slack;
    return r;
}

AdjointNormReport adjoint_norm_identity(const OperatorMatrix& A, const BiorthogonalSystem& system)
{
    const double p = A.context().p();
    return {sigma_norm_at(A.entries(), system, p),
            sigma_norm_at(A.entries().transpose(), system.swapped(), p)};
}

}  // namespace rootspan
