#include "rootspan/trace.hpp"

#include <cmath>
#include <string>

#include "rootspan/linalg.hpp"
#include "rootspan/schatten.hpp"

namespace rootspan {

AnalyticFunctionSpec::AnalyticFunctionSpec(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs))
{
    if (coeffs_.empty())
        throw DomainError("function spec needs at least one coefficient");
    for (const Complex c : coeffs_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw DomainError("function spec has non-finite coefficients");
}

AnalyticFunctionSpec AnalyticFunctionSpec::monomial(int k)
{
    if (k < 1)
        throw DomainError("monomial degree must be at least 1");
    std::vector<Complex> c(static_cast<std::size_t>(k), Complex(0.0));
    c.back() = 1.0;
    return AnalyticFunctionSpec(std::move(c));
}

Complex AnalyticFunctionSpec::operator()(Complex z) const
{
    Complex acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = (acc + *it) * z;
    return acc;
}

Complex trace_pair(const OperatorMatrix& A, const OperatorMatrix& B, const BiorthogonalSystem& system)
{
    const Index n = system.dim();
    if (A.dim() != n || B.dim() != n)
        throw DimensionError("trace_pair: operator and system dimensions differ");
    const Matrix AE = A.entries() * system.primal();
    const Matrix BtF = B.entries().transpose() * system.dual();
    Complex s = 0.0;
    for (Index i = 0; i < n; ++i)
        s += pairing(AE.col(i), BtF.col(i));
    return s;
}

double trace_symmetry_check(const OperatorMatrix& A, const OperatorMatrix& B, const BiorthogonalSystem& system)
{
    return std::abs(trace_pair(A, B, system) - trace_pair(B, A, system));
}

HolderReport trace_holder_check(const OperatorMatrix& A, const OperatorMatrix& B,
                                const BiorthogonalSystem& system)
{
    const ExponentContext& ctx = A.context();
    HolderReport r;
    r.lhs = std::abs(trace_pair(A, B, system));
    r.rhs = sigma_norm_at(A.entries(), system, ctx.p()) *
            sigma_norm_at(B.entries().transpose(), system.swapped(), ctx.q());
    r.holds = r.lhs <= r.rhs + 1e-9;
    return r;
}

OperatorMatrix apply_function(const AnalyticFunctionSpec& F, const OperatorMatrix& A)
{
    const Index n = A.dim();
    const auto& c = F.coeffs();
    Matrix acc = Matrix::Zero(n, n);
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc.diagonal().array() += *it;
        acc = acc * A.entries();
    }
    return A.with_entries(std::move(acc));
}

SpectralTraceReport spectral_trace_check(const OperatorMatrix& A, const AnalyticFunctionSpec& F,
                                         const AnalyticFunctionSpec& g, const BiorthogonalSystem& system)
{
    SpectralTraceReport r;
    r.trace_side = trace_pair(apply_function(F, A), apply_function(g, A), system);
    const Vector lambda = eigenvalues(A.entries());
    r.eigen_side = 0.0;
    for (Index i = 0; i < lambda.size(); ++i)
        r.eigen_side += F(lambda(i)) * g(lambda(i));
    r.delta = std::abs(r.trace_side - r.eigen_side);
    r.holds = r.delta <= 1e-8 * (1.0 + std::abs(r.eigen_side));
    return r;
}

Complex quasinilpotent_trace(const OperatorMatrix& N, const BiorthogonalSystem& system)
{
    if (!is_quasinilpotent(N.entries()))
        throw DomainError("quasinilpotent_trace: operator is not quasi-nilpotent at tolerance");
    return trace_pair(N, N, system);
}

}  // namespace rootspan
