#include "rootspan/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace rootspan {

namespace {

// phase(z) |z|^{e}, zero at z = 0
Complex signed_power(Complex z, double e)
{
    const double r = std::abs(z);
    if (r == 0.0)
        return 0.0;
    return (z / r) * std::pow(r, e);
}

Vector normalize_lp(Vector v, double p)
{
    const double n = lp_norm(v, p);
    if (n > 0.0)
        v /= n;
    return v;
}

// ℓ_p power method; returns the best value seen and its unit vector
NormSearch power_refine(const Matrix& A, Vector x, double p)
{
    const double q = p / (p - 1.0);
    x = normalize_lp(std::move(x), p);
    NormSearch best{lp_norm(A * x, p), x};

    for (int it = 0; it < 200; ++it) {
        const Vector y = A * x;
        const double ny = lp_norm(y, p);
        if (ny == 0.0)
            break;
        Vector w(y.size());
        for (Index k = 0; k < y.size(); ++k)
            w(k) = signed_power(y(k), p - 1.0) / std::pow(ny, p - 1.0);
        const Vector z = A.adjoint() * w;
        const double nz = lp_norm(z, q);
        if (nz <= std::real(z.dot(x)) * (1.0 + 1e-14))
            break;
        Vector xn(z.size());
        for (Index k = 0; k < z.size(); ++k)
            xn(k) = signed_power(z(k), q - 1.0) / std::pow(nz, q - 1.0);
        const double value = lp_norm(A * xn, p);
        const bool stalled = value <= best.value * (1.0 + 1e-13);
        if (value > best.value)
            best = {value, xn};
        x = std::move(xn);
        if (stalled)
            break;
    }
    return best;
}

}  // namespace

double lp_norm_pow(const Vector& v, double p)
{
    double s = 0.0;
    for (Index k = 0; k < v.size(); ++k)
        s += std::pow(std::abs(v(k)), p);
    return s;
}

double lp_norm(const Vector& v, double p)
{
    if (p == 2.0)
        return v.norm();
    // scale to avoid overflow in |v_k|^p
    const double m = v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
    if (m == 0.0)
        return 0.0;
    double s = 0.0;
    for (Index k = 0; k < v.size(); ++k)
        s += std::pow(std::abs(v(k)) / m, p);
    return m * std::pow(s, 1.0 / p);
}

double weighted_lp_norm(const Vector& v, const RealVector& weights, double p)
{
    if (v.size() != weights.size())
        throw DimensionError("weighted_lp_norm: weight length mismatch");
    double s = 0.0;
    for (Index k = 0; k < v.size(); ++k)
        s += weights(k) * std::pow(std::abs(v(k)), p);
    return std::pow(s, 1.0 / p);
}

double spectral_norm(const Matrix& A)
{
    if (A.size() == 0)
        return 0.0;
    Eigen::BDCSVD<Matrix> svd(A);
    return svd.singularValues()(0);
}

double l1_operator_norm(const Matrix& A)
{
    return A.size() == 0 ? 0.0 : A.cwiseAbs().colwise().sum().maxCoeff();
}

double linf_operator_norm(const Matrix& A)
{
    return A.size() == 0 ? 0.0 : A.cwiseAbs().rowwise().sum().maxCoeff();
}

double riesz_thorin_upper(const Matrix& A, double p)
{
    const double q = p / (p - 1.0);
    return std::pow(l1_operator_norm(A), 1.0 / p) * std::pow(linf_operator_norm(A), 1.0 / q);
}

NormSearch operator_norm_search(const Matrix& A, double p, std::uint64_t seed)
{
    const Index n = A.cols();
    if (n == 0)
        return {0.0, Vector(0)};

    std::vector<Vector> starts;
    for (Index k = 0; k < n; ++k)
        starts.push_back(Vector::Unit(n, k));
    starts.push_back(Vector::Ones(n));
    {
        Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinV);
        starts.push_back(svd.matrixV().col(0));
    }
    Rng rng(seed);
    for (int i = 0; i < 4; ++i)
        starts.push_back(random_vector(n, rng));

    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        starts[i] = normalize_lp(starts[i], p);
        ranked.emplace_back(lp_norm(A * starts[i], p), i);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    NormSearch best{ranked.front().first, starts[ranked.front().second]};
    if (p == 2.0) {
        // the singular vector start is already optimal
        const NormSearch s = power_refine(A, starts[static_cast<std::size_t>(n) + 1], p);
        return s.value > best.value ? s : best;
    }
    // refine the best few starts plus the singular-vector start
    std::vector<std::size_t> refine;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, ranked.size()); ++i)
        refine.push_back(ranked[i].second);
    refine.push_back(static_cast<std::size_t>(n) + 1);
    for (std::size_t idx : refine) {
        const NormSearch s = power_refine(A, starts[idx], p);
        if (s.value > best.value)
            best = s;
    }
    return best;
}

NormBounds operator_norm_bounds(const Matrix& A, double p, std::uint64_t seed)
{
    if (p == 2.0) {
        const double s = spectral_norm(A);
        return {s, s};
    }
    const double lower = operator_norm_search(A, p, seed).value;
    const double upper = riesz_thorin_upper(A, p);
    return {std::min(lower, upper), upper};
}

}  // namespace rootspan
