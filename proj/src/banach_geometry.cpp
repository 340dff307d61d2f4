#include "rootspan/banach_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rootspan/norms.hpp"

namespace rootspan {

namespace {

constexpr double kBiorthTol = 1e-10;
constexpr double kUnitTol = 1e-10;

bool columns_unit(const Matrix& M, double p)
{
    for (Index j = 0; j < M.cols(); ++j)
        if (std::abs(lp_norm(M.col(j), p) - 1.0) > kUnitTol)
            return false;
    return true;
}

Complex signed_power(Complex z, double e)
{
    const double r = std::abs(z);
    if (r == 0.0)
        return 0.0;
    return (z / r) * std::pow(r, e);
}

}  // namespace

Complex pairing(const Vector& u, const Vector& f)
{
    if (u.size() != f.size())
        throw DimensionError("pairing: lengths " + std::to_string(u.size()) + " and " +
                             std::to_string(f.size()) + " differ");
    Complex s = 0.0;
    for (Index j = 0; j < u.size(); ++j)
        s += u(j) * f(j);
    return s;
}

//
// BiorthogonalSystem
//

BiorthogonalSystem::BiorthogonalSystem(Matrix primal, Matrix dual, ExponentContext context)
    : primal_(std::move(primal)), dual_(std::move(dual)), context_(context)
{
    if (primal_.rows() != primal_.cols() || dual_.rows() != dual_.cols() ||
        primal_.rows() != dual_.rows())
        throw DimensionError("biorthogonal system: primal and dual must be square of equal size");
    if (primal_.cols() == 0)
        throw DimensionError("biorthogonal system: dimension must be positive");
    if (!primal_.allFinite() || !dual_.allFinite())
        throw DomainError("biorthogonal system: non-finite vectors");
    const double defect = biorthogonality_defect();
    if (defect > kBiorthTol)
        throw DomainError("biorthogonal system: pairing defect " + std::to_string(defect) +
                          " exceeds 1e-10");
    primal_normalized_ = columns_unit(primal_, context_.p());
    dual_normalized_ = columns_unit(dual_, context_.q());
}

double BiorthogonalSystem::biorthogonality_defect() const
{
    const Matrix G = dual_.transpose() * primal_;
    return (G - Matrix::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

BiorthogonalSystem BiorthogonalSystem::canonical(Index n, ExponentContext context)
{
    if (n <= 0)
        throw DimensionError("canonical system: dimension must be positive");
    return {Matrix::Identity(n, n), Matrix::Identity(n, n), context};
}

BiorthogonalSystem BiorthogonalSystem::permuted(std::span<const Index> perm, ExponentContext context)
{
    const Index n = static_cast<Index>(perm.size());
    if (n == 0)
        throw DimensionError("permuted system: empty permutation");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    Matrix P = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        const Index k = perm[static_cast<std::size_t>(j)];
        if (k < 0 || k >= n || seen[static_cast<std::size_t>(k)])
            throw DomainError("permuted system: not a permutation");
        seen[static_cast<std::size_t>(k)] = true;
        P(k, j) = 1.0;
    }
    return {P, P, context};
}

BiorthogonalSystem BiorthogonalSystem::from_primal(const Matrix& primal, ExponentContext context)
{
    if (primal.rows() != primal.cols())
        throw DimensionError("from_primal: matrix must be square");
    Matrix E = primal;
    for (Index j = 0; j < E.cols(); ++j) {
        const double nj = lp_norm(E.col(j), context.p());
        if (nj == 0.0)
            throw NumericalError("from_primal: zero primal vector");
        E.col(j) /= nj;
    }
    Eigen::FullPivLU<Matrix> lu(E);
    if (!lu.isInvertible())
        throw NumericalError("from_primal: primal matrix is singular");
    Matrix F = lu.inverse().transpose();
    return {E, F, context};
}

BiorthogonalSystem BiorthogonalSystem::random_biorthonormal(Index n, ExponentContext context,
                                                            std::uint64_t seed)
{
    if (n <= 0)
        throw DimensionError("random_biorthonormal: dimension must be positive");
    Rng rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    const double p = context.p();
    const double q = context.q();

    Matrix E = Matrix::Zero(n, n);
    Matrix F = Matrix::Zero(n, n);
    Index start = 0;
    while (start < n) {
        const Index cap = std::min<Index>(4, n - start);
        std::uniform_int_distribution<Index> size_dist(1, cap);
        const Index k = size_dist(rng);
        const double kd = static_cast<double>(k);
        for (Index a = 0; a < k; ++a) {
            const Complex phase = std::polar(1.0, angle(rng));
            for (Index j = 0; j < k; ++j) {
                const Complex u = phase * std::polar(1.0, 2.0 * kPi * static_cast<double>(a * j) / kd);
                E(start + a, start + j) = u / std::pow(kd, 1.0 / p);
                F(start + a, start + j) = std::conj(u) / std::pow(kd, 1.0 / q);
            }
        }
        start += k;
    }

    std::vector<Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Index{0});
    std::shuffle(rows.begin(), rows.end(), rng);
    Matrix Ep(n, n), Fp(n, n);
    for (Index i = 0; i < n; ++i) {
        Ep.row(rows[static_cast<std::size_t>(i)]) = E.row(i);
        Fp.row(rows[static_cast<std::size_t>(i)]) = F.row(i);
    }
    return {Ep, Fp, context};
}

BiorthogonalSystem BiorthogonalSystem::transformed(const Matrix& U) const
{
    if (U.rows() != dim() || U.cols() != dim())
        throw DimensionError("transformed: matrix size does not match the system");
    Eigen::FullPivLU<Matrix> lu(U);
    if (!lu.isInvertible())
        throw NumericalError("transformed: matrix is singular");
    return {U * primal_, lu.inverse().transpose() * dual_, context_};
}

BiorthogonalSystem BiorthogonalSystem::swapped() const
{
    return {dual_, primal_, context_.dual()};
}

Vector fourier_coefficients(const Vector& u, const BiorthogonalSystem& system)
{
    if (u.size() != system.dim())
        throw DimensionError("fourier_coefficients: vector length does not match the system");
    return system.dual().transpose() * u;
}

Vector synthesize(const Vector& coefficients, const BiorthogonalSystem& system)
{
    if (coefficients.size() != system.dim())
        throw DimensionError("synthesize: coefficient length does not match the system");
    return system.primal() * coefficients;
}

//
// B-condition
//

namespace {

struct BRatio {
    const Matrix& F;
    double p;

    double operator()(const Vector& u) const
    {
        const double den = lp_norm_pow(F.transpose() * u, p);
        return den > 0.0 ? lp_norm_pow(u, p) / den : 0.0;
    }

    // Wirtinger gradient of log ratio with respect to conj(u)
    Vector gradient(const Vector& u) const
    {
        const Vector alpha = F.transpose() * u;
        const double su = lp_norm_pow(u, p);
        const double sa = lp_norm_pow(alpha, p);
        Vector gu(u.size()), ga(alpha.size());
        for (Index k = 0; k < u.size(); ++k)
            gu(k) = signed_power(u(k), p - 1.0);
        for (Index k = 0; k < alpha.size(); ++k)
            ga(k) = signed_power(alpha(k), p - 1.0);
        return 0.5 * p * (gu / su - F.conjugate() * ga / sa);
    }
};

Vector ascend(const BRatio& ratio, Vector u, double p)
{
    u /= lp_norm(u, p);
    double value = ratio(u);
    double step = 1.0;
    for (int it = 0; it < 300; ++it) {
        const Vector g = ratio.gradient(u);
        const double gn = g.norm();
        if (gn < 1e-14)
            break;
        bool improved = false;
        for (int bt = 0; bt < 40; ++bt) {
            Vector trial = u + (step / gn) * g;
            const double tn = lp_norm(trial, p);
            if (tn > 0.0) {
                trial /= tn;
                const double tv = ratio(trial);
                if (tv > value) {
                    improved = tv > value * (1.0 + 1e-13);
                    u = std::move(trial);
                    value = tv;
                    step *= 2.0;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!improved)
            break;
    }
    return u;
}

}  // namespace

double b_condition_constant(const BiorthogonalSystem& system, int sample_count, std::uint64_t seed)
{
    if (sample_count < 100)
        throw DomainError("b_condition_constant: sample_count must be at least 100");
    const Index n = system.dim();
    const double p = system.context().p();
    {
        Eigen::BDCSVD<Matrix> svd(system.primal());
        const RealVector s = svd.singularValues();
        if (s(n - 1) <= 1e-12 * s(0))
            throw NumericalError("b_condition_constant: primal matrix is singular");
    }

    const BRatio ratio{system.dual(), p};
    std::vector<Vector> starts;
    for (Index k = 0; k < n; ++k)
        starts.push_back(Vector::Unit(n, k));
    for (Index k = 0; k < n; ++k)
        starts.push_back(system.primal().col(k));
    Rng rng(seed);
    for (int s = 0; s < sample_count; ++s)
        starts.push_back(random_vector(n, rng));

    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i)
        ranked.emplace_back(ratio(starts[i]), i);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    double best = ranked.front().first;
    for (std::size_t i = 0; i < std::min<std::size_t>(4, ranked.size()); ++i) {
        const Vector u = ascend(ratio, starts[ranked[i].second], p);
        best = std::max(best, ratio(u));
    }
    return best;
}

//
// A_p constants
//

PowerWeight::PowerWeight(double gamma, double b) : gamma_(gamma), b_(b)
{
    if (!std::isfinite(gamma) || gamma <= -1.0)
        throw DomainError("power weight exponent must exceed -1, got " + std::to_string(gamma));
    if (!std::isfinite(b) || b <= 0.0)
        throw DomainError("power weight interval end must be positive");
}

double PowerWeight::operator()(double x) const
{
    return std::pow(x, gamma_);
}

namespace {

// ∫_lo^hi x^e dx in the variable t = log x
double power_integral(double e, double lo, double hi)
{
    using boost::math::quadrature::gauss_kronrod;
    auto f = [e](double t) { return std::exp((e + 1.0) * t); };
    return gauss_kronrod<double, 15>::integrate(f, std::log(lo), std::log(hi), 30, 1e-10);
}

double ap_ratio(double gamma, double p, double lo, double hi)
{
    const double len = power_integral(0.0, lo, hi);
    const double avg_w = power_integral(gamma, lo, hi) / len;
    const double avg_dual = power_integral(-gamma / (p - 1.0), lo, hi) / len;
    return avg_w * std::pow(avg_dual, p - 1.0);
}

}  // namespace

ApEstimate ap_constant(const PowerWeight& weight, const ExponentContext& context, int refinement)
{
    if (refinement < 4)
        throw DomainError("ap_constant: refinement must be at least 4");
    if (refinement > 24)
        throw DomainError("ap_constant: refinement above 24 is not supported");
    const double p = context.p();
    const double g = weight.gamma();
    const double b = weight.b();

    ApEstimate est;
    est.refinement = refinement;
    est.bounded = g > -1.0 && g < p - 1.0;
    est.value = 0.0;
    for (int level = 0; level <= refinement; ++level) {
        const double h = std::ldexp(b, -level);
        const double cutoff = std::ldexp(b, -2 * level);
        for (int j = 0; j <= level; ++j) {
            const double hi = std::ldexp(b, -j);
            if (hi > cutoff)
                est.value = std::max(est.value, ap_ratio(g, p, cutoff, hi));
        }
        const long cells = 1L << level;
        for (long k = 1; k < cells; ++k)
            est.value = std::max(est.value, ap_ratio(g, p, static_cast<double>(k) * h,
                                                     static_cast<double>(k + 1) * h));
    }
    return est;
}

//
// R-bounds
//

Index OperatorFamily::dim() const
{
    return operators.empty() ? 0 : operators.front().rows();
}

OperatorFamily OperatorFamily::resolvent_family(const Matrix& A, std::span<const Complex> xis)
{
    if (A.rows() != A.cols())
        throw DimensionError("resolvent_family: matrix must be square");
    const Index n = A.rows();
    OperatorFamily family;
    for (const Complex xi : xis) {
        const Matrix shifted = A + xi * Matrix::Identity(n, n);
        Eigen::PartialPivLU<Matrix> lu(shifted);
        family.parameters.push_back(xi);
        family.operators.push_back(lu.solve(A));
    }
    return family;
}

namespace {

void validate_family(const OperatorFamily& family)
{
    if (family.operators.empty())
        throw DomainError("operator family is empty");
    const Index n = family.operators.front().rows();
    for (const Matrix& T : family.operators)
        if (T.rows() != n || T.cols() != n)
            throw DimensionError("operator family: all matrices must be square of equal size");
}

std::vector<std::vector<int>> draw_signs(std::size_t m, int samples, Rng& rng)
{
    std::vector<std::vector<int>> signs;
    if (m < 31 && (std::size_t{1} << m) <= static_cast<std::size_t>(samples)) {
        // few operators: the sign average is taken exactly
        for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
            std::vector<int> row(m);
            for (std::size_t j = 0; j < m; ++j)
                row[j] = ((mask >> j) & 1U) ? -1 : 1;
            signs.push_back(std::move(row));
        }
        return signs;
    }
    std::bernoulli_distribution coin(0.5);
    for (int s = 0; s < samples; ++s) {
        std::vector<int> row(m);
        for (std::size_t j = 0; j < m; ++j)
            row[j] = coin(rng) ? 1 : -1;
        signs.push_back(std::move(row));
    }
    return signs;
}

}  // namespace

double rademacher_ratio(const OperatorFamily& family, std::span<const Vector> vectors,
                        const std::vector<std::vector<int>>& signs, double p)
{
    validate_family(family);
    const std::size_t m = family.operators.size();
    if (vectors.size() != m)
        throw DimensionError("rademacher_ratio: one vector per operator required");
    const Index n = family.dim();
    std::vector<Vector> images(m);
    for (std::size_t j = 0; j < m; ++j) {
        if (vectors[j].size() != n)
            throw DimensionError("rademacher_ratio: vector length does not match the family");
        images[j] = family.operators[j] * vectors[j];
    }
    double num = 0.0;
    double den = 0.0;
    for (const auto& row : signs) {
        if (row.size() != m)
            throw DimensionError("rademacher_ratio: sign row length mismatch");
        Vector a = Vector::Zero(n), b = Vector::Zero(n);
        for (std::size_t j = 0; j < m; ++j) {
            a += static_cast<double>(row[j]) * images[j];
            b += static_cast<double>(row[j]) * vectors[j];
        }
        num += lp_norm(a, p);
        den += lp_norm(b, p);
    }
    return den > 0.0 ? num / den : 0.0;
}

RBoundEstimate r_bound_estimate_detailed(const OperatorFamily& family, const ExponentContext& context,
                                         int sign_samples, std::uint64_t seed)
{
    validate_family(family);
    if (sign_samples < 64)
        throw DomainError("r_bound_estimate: sign_samples must be at least 64");
    const std::size_t m = family.operators.size();
    const Index n = family.dim();
    const double p = context.p();
    Rng rng(seed);
    const auto signs = draw_signs(m, sign_samples, rng);

    RBoundEstimate best;
    auto consider = [&](std::vector<Vector> us) {
        const double r = rademacher_ratio(family, us, signs, p);
        if (r > best.constant || best.witness.empty()) {
            best.constant = r;
            best.witness = std::move(us);
        }
    };

    for (std::size_t j = 0; j < m; ++j) {
        std::vector<Vector> us(m, Vector::Zero(n));
        us[j] = operator_norm_search(family.operators[j], p, seed + j).witness;
        consider(std::move(us));
    }
    for (int trial = 0; trial < 32; ++trial) {
        std::vector<Vector> us(m);
        for (auto& u : us)
            u = random_vector(n, rng);
        consider(std::move(us));
    }
    return best;
}

double r_bound_estimate(const OperatorFamily& family, const ExponentContext& context, int sign_samples,
                        std::uint64_t seed)
{
    return r_bound_estimate_detailed(family, context, sign_samples, seed).constant;
}

}  // namespace rootspan
