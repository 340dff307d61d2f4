#include "rootspan/rootspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rootspan/linalg.hpp"
#include "rootspan/norms.hpp"

namespace rootspan {

namespace {

// orthonormal basis of the column span, dropping directions below rel · σ_max
Matrix orthonormal_columns(const Matrix& K, double rel)
{
    if (K.cols() == 0)
        return Matrix(K.rows(), 0);
    Eigen::BDCSVD<Matrix> svd(K, Eigen::ComputeThinU);
    const RealVector s = svd.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > rel * s(0))
        ++r;
    return svd.matrixU().leftCols(r);
}

// right singular vectors belonging to the `count` smallest singular values
Matrix smallest_right_vectors(const Matrix& M, Index count)
{
    Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(count);
}

std::vector<JordanChain> jordan_chains(const Matrix& C, double radius)
{
    const Index m = C.rows();
    const double norm_c = spectral_norm(C);

    std::vector<Matrix> powers{Matrix::Identity(m, m)};
    std::vector<Index> rank{m};
    Index k = m;
    for (Index j = 1; j <= m; ++j) {
        powers.push_back(powers.back() * C);
        const double thr = 10.0 * radius * std::pow(1.0 + norm_c, static_cast<double>(j - 1));
        Eigen::BDCSVD<Matrix> svd(powers.back());
        const RealVector s = svd.singularValues();
        Index r = 0;
        for (Index i = 0; i < s.size(); ++i)
            if (s(i) > thr)
                ++r;
        r = std::min(r, rank.back());
        rank.push_back(r);
        if (r == 0) {
            k = j;
            break;
        }
    }
    if (rank.back() != 0) {
        rank.back() = 0;
        k = m;
    }

    // chains of length ≥ j number rank[j-1] − rank[j]
    auto at_least = [&](Index j) -> Index { return j > k ? 0 : rank[j - 1] - rank[j]; };
    Index total = 0;
    std::vector<Index> exactly(static_cast<std::size_t>(k + 1), 0);
    for (Index j = 1; j <= k; ++j) {
        exactly[static_cast<std::size_t>(j)] = std::max<Index>(0, at_least(j) - at_least(j + 1));
        total += j * exactly[static_cast<std::size_t>(j)];
    }
    if (total != m)
        throw NumericalError("spectral_decomposition: inconsistent Jordan structure in a cluster of size " +
                             std::to_string(m));

    std::vector<JordanChain> chains;
    std::vector<Vector> spanned;
    for (Index j = k; j >= 1; --j) {
        const Index count = exactly[static_cast<std::size_t>(j)];
        if (count == 0)
            continue;
        const Matrix null_j = smallest_right_vectors(powers[static_cast<std::size_t>(j)], m - rank[j]);
        Matrix K(m, 0);
        if (j > 1)
            K = smallest_right_vectors(powers[static_cast<std::size_t>(j - 1)], m - rank[j - 1]);
        if (!spanned.empty()) {
            Matrix Kx(m, K.cols() + static_cast<Index>(spanned.size()));
            Kx.leftCols(K.cols()) = K;
            for (std::size_t i = 0; i < spanned.size(); ++i)
                Kx.col(K.cols() + static_cast<Index>(i)) = spanned[i];
            K = std::move(Kx);
        }
        const Matrix Q = orthonormal_columns(K, 1e-10);
        const Matrix residual = null_j - Q * (Q.adjoint() * null_j);
        Eigen::BDCSVD<Matrix> svd(residual, Eigen::ComputeThinV);
        for (Index c = 0; c < count; ++c) {
            const Vector head = null_j * svd.matrixV().col(c);
            JordanChain chain;
            for (Index i = j - 1; i >= 0; --i)
                chain.push_back(powers[static_cast<std::size_t>(i)] * head);
            for (const Vector& v : chain)
                spanned.push_back(v);
            chains.push_back(std::move(chain));
        }
    }
    return chains;
}

}  // namespace

Matrix SpectralDecomposition::root_vectors() const
{
    Matrix V(dim, root_vector_count());
    Index c = 0;
    for (const auto& cl : clusters)
        for (const auto& chain : cl.chains)
            for (const auto& v : chain)
                V.col(c++) = v;
    return V;
}

Index SpectralDecomposition::root_vector_count() const
{
    Index c = 0;
    for (const auto& cl : clusters)
        for (const auto& chain : cl.chains)
            c += static_cast<Index>(chain.size());
    return c;
}

SpectralDecomposition SpectralDecomposition::truncated(Index max_vectors) const
{
    if (max_vectors < 0)
        throw DomainError("truncated: negative vector budget");
    SpectralDecomposition out = *this;
    Index left = max_vectors;
    for (auto& cl : out.clusters) {
        for (auto& chain : cl.chains) {
            const Index keep = std::min<Index>(left, static_cast<Index>(chain.size()));
            chain.resize(static_cast<std::size_t>(keep));
            left -= keep;
        }
        cl.chains.erase(std::remove_if(cl.chains.begin(), cl.chains.end(),
                                       [](const JordanChain& ch) { return ch.empty(); }),
                        cl.chains.end());
    }
    return out;
}

double SpectralDecomposition::max_chain_residual(const Matrix& A) const
{
    double worst = 0.0;
    for (const auto& cl : clusters) {
        Matrix shifted = A;
        shifted.diagonal().array() -= cl.eigenvalue;
        for (const auto& chain : cl.chains)
            for (std::size_t i = 0; i < chain.size(); ++i) {
                Vector r = shifted * chain[i];
                if (i > 0)
                    r -= chain[i - 1];
                worst = std::max(worst, r.norm());
            }
    }
    return worst;
}

SpectralDecomposition spectral_decomposition(const OperatorMatrix& A, double tol)
{
    if (!(tol >= 1e-10))
        throw DomainError("spectral_decomposition: tol must be at least 1e-10");
    const Matrix& M = A.entries();
    const Index n = A.dim();
    const EigenSystem es = eigensystem(M);
    const double radius = cluster_radius(es.values, tol);

    SpectralDecomposition d;
    d.dim = n;
    d.tol = tol;
    for (const EigenCluster& ec : cluster_eigenvalues(es.values, radius)) {
        RootCluster rc;
        rc.multiplicity = ec.multiplicity();
        if (rc.multiplicity == 1) {
            const Index i = ec.members.front();
            rc.eigenvalue = es.values(i);
            rc.chains.push_back({es.vectors.col(i).normalized()});
        } else {
            const Index m = rc.multiplicity;
            Matrix shifted = M;
            shifted.diagonal().array() -= ec.center;
            Matrix power = shifted;
            for (Index j = 1; j < m; ++j)
                power = power * shifted;
            const Matrix W = smallest_right_vectors(power, m);
            Matrix C = W.adjoint() * shifted * W;
            const Complex drift = C.trace() / static_cast<double>(m);
            rc.eigenvalue = ec.center + drift;
            C.diagonal().array() -= drift;
            for (JordanChain& chain : jordan_chains(C, radius)) {
                for (Vector& v : chain)
                    v = W * v;
                rc.chains.push_back(std::move(chain));
            }
        }
        d.clusters.push_back(std::move(rc));
    }

    const Matrix V = d.root_vectors();
    if (V.cols() != n)
        throw NumericalError("spectral_decomposition: root vector count differs from the dimension");
    Eigen::FullPivLU<Matrix> lu(V);
    if (!lu.isInvertible())
        throw NumericalError("spectral_decomposition: root vectors are numerically dependent");
    const Matrix Vinv = lu.inverse();
    Index start = 0;
    for (auto& rc : d.clusters) {
        rc.projection = V.middleCols(start, rc.multiplicity) * Vinv.middleRows(start, rc.multiplicity);
        start += rc.multiplicity;
    }
    return d;
}

OperatorMatrix riesz_projection(const OperatorMatrix& A, Complex center, double radius, int quad_points)
{
    if (!(radius > 0.0))
        throw DomainError("riesz_projection: radius must be positive");
    if (quad_points < 8)
        throw DomainError("riesz_projection: need at least 8 quadrature points");
    const Matrix& M = A.entries();
    const Index n = A.dim();
    const Vector spectrum = eigenvalues(M);
    const double spacing = 2.0 * kPi * radius / quad_points;
    for (Index i = 0; i < spectrum.size(); ++i) {
        const double gap = std::abs(std::abs(spectrum(i) - center) - radius);
        if (gap < 10.0 * spacing)
            throw SpectrumError("riesz_projection: eigenvalue within " + std::to_string(gap) +
                                    " of the contour (spacing " + std::to_string(spacing) + ")",
                                spectrum(i));
    }
    Matrix P = Matrix::Zero(n, n);
    const Matrix I = Matrix::Identity(n, n);
    for (int k = 0; k < quad_points; ++k) {
        const Complex w = std::polar(radius, 2.0 * kPi * k / quad_points);
        Matrix shifted = -M;
        shifted.diagonal().array() += center + w;
        P += w * Eigen::PartialPivLU<Matrix>(shifted).solve(I);
    }
    return A.with_entries(P / static_cast<double>(quad_points));
}

double root_span_distance(const SpectralDecomposition& decomp, const Vector& u, const ExponentContext& context,
                          const RealVector* weights)
{
    if (u.size() != decomp.dim)
        throw DimensionError("root_span_distance: vector length does not match the decomposition");
    const double p = context.p();
    const Index n = u.size();
    RealVector w = weights ? *weights : RealVector::Ones(n);
    if (w.size() != n)
        throw DimensionError("root_span_distance: weight length mismatch");
    if ((w.array() <= 0.0).any())
        throw DomainError("root_span_distance: weights must be positive");

    auto norm_of = [&](const Vector& r) {
        double s = 0.0;
        for (Index i = 0; i < n; ++i)
            s += w(i) * std::pow(std::abs(r(i)), p);
        return std::pow(s, 1.0 / p);
    };

    const Matrix V = decomp.root_vectors();
    if (V.cols() == 0)
        return norm_of(u);

    // scaled problem: rows multiplied by w^{1/p}
    RealVector scale(n);
    for (Index i = 0; i < n; ++i)
        scale(i) = std::pow(w(i), 1.0 / p);
    const Matrix Vs = scale.asDiagonal() * V;
    const Vector us = scale.asDiagonal() * u;

    Vector c = Eigen::CompleteOrthogonalDecomposition<Matrix>(Vs).solve(us);
    Vector r = u - V * c;
    double best = norm_of(r);
    if (p == 2.0)
        return best;

    // reweighted least squares; the full step can overshoot for p > 2, so
    // it is halved until the residual norm decreases
    for (int it = 0; it < 500 && best > 0.0; ++it) {
        const Vector rs = us - Vs * c;
        const double floor = 1e-12 * rs.cwiseAbs().maxCoeff();
        RealVector root(n);
        for (Index i = 0; i < n; ++i)
            root(i) = std::pow(std::max(std::abs(rs(i)), floor), (p - 2.0) / 2.0);
        const Matrix Vw = root.asDiagonal() * Vs;
        const Vector uw = root.asDiagonal() * us;
        const Vector target = Eigen::CompleteOrthogonalDecomposition<Matrix>(Vw).solve(uw);
        bool improved = false;
        for (double step = 1.0; step >= 1.0 / 1024.0; step /= 2.0) {
            const Vector trial = c + step * (target - c);
            const double value = norm_of(u - V * trial);
            if (value < best * (1.0 - 1e-13)) {
                c = trial;
                best = value;
                improved = true;
                break;
            }
        }
        if (!improved)
            break;
    }
    return best;
}

CompletenessVerdict completeness_verdict(const OperatorMatrix& A, int m, const ArcConfiguration& arcs,
                                         int sample_count, std::uint64_t seed, const CompletenessOptions& options)
{
    return completeness_verdict(A, spectral_decomposition(A, options.cluster_tol), m, arcs, sample_count, seed,
                                options);
}

CompletenessVerdict completeness_verdict(const OperatorMatrix& A, const SpectralDecomposition& decomp, int m,
                                         const ArcConfiguration& arcs, int sample_count, std::uint64_t seed,
                                         const CompletenessOptions& options)
{
    if (m < 0)
        throw DomainError("completeness_verdict: m must be nonnegative");
    if (sample_count < 1)
        throw DomainError("completeness_verdict: sample_count must be positive");
    if (decomp.dim != A.dim())
        throw DimensionError("completeness_verdict: decomposition dimension mismatch");
    const Matrix& M = A.entries();
    const Index n = A.dim();
    const ExponentContext& ctx = A.context();

    CompletenessVerdict v;
    v.m = m;
    v.sector = sector_condition_check(arcs);

    const Vector spectrum = eigenvalues(M);
    const double radius = cluster_radius(spectrum, options.cluster_tol);
    double r_min = 0.0, r_max = 0.0;
    if (m > 0) {
        v.regime = ScanRegime::origin;
        double smallest = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < spectrum.size(); ++i)
            if (std::abs(spectrum(i)) > radius)
                smallest = std::min(smallest, std::abs(spectrum(i)));
        r_max = 0.1 * (std::isfinite(smallest) ? smallest : 1.0);
        r_min = 1e-4 * r_max;
        v.order_bound = m + 0.1;
    } else {
        v.regime = ScanRegime::infinity;
        double rho = 0.0;
        for (Index i = 0; i < spectrum.size(); ++i)
            rho = std::max(rho, std::abs(spectrum(i)));
        const double scale = std::max({rho, spectral_norm(M), 1e-3});
        r_min = 10.0 * scale;
        r_max = 1e4 * r_min;
        v.order_bound = 0.9;
    }
    v.decay_holds = true;
    for (const double theta : arcs.angles()) {
        RayScan scan = ray_scan(A, theta, r_min, r_max, options.scan_points, v.regime);
        const bool ok = v.regime == ScanRegime::origin ? scan.fitted_order <= v.order_bound
                                                       : scan.fitted_order >= v.order_bound;
        v.decay_holds = v.decay_holds && ok;
        v.scans.push_back(std::move(scan));
    }

    Matrix Am = Matrix::Identity(n, n);
    for (int j = 0; j < m; ++j)
        Am = Am * M;
    const RealVector* weights = options.weights ? &*options.weights : nullptr;
    Rng rng(seed);
    for (int s = 0; s < sample_count; ++s) {
        Vector u = random_vector(n, rng);
        u /= lp_norm(u, ctx.p());
        const Vector target = Am * u;
        const double size = weights ? weighted_lp_norm(target, *weights, ctx.p()) : lp_norm(target, ctx.p());
        const double dist = root_span_distance(decomp, target, ctx, weights);
        v.max_absolute_distance = std::max(v.max_absolute_distance, dist);
        if (size > 0.0)
            v.max_distance = std::max(v.max_distance, dist / size);
    }
    v.distance_holds = v.max_distance <= 1e-6;
    v.verdict = v.sector.holds && v.decay_holds && v.distance_holds;
    return v;
}

}  // namespace rootspan
