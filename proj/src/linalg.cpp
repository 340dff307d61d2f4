#include "rootspan/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rootspan/norms.hpp"

namespace rootspan {

Vector eigenvalues(const Matrix& A)
{
    if (A.rows() != A.cols())
        throw DimensionError("eigenvalues: matrix must be square");
    if (A.rows() == 0)
        return Vector(0);
    Eigen::ComplexEigenSolver<Matrix> solver(A, false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigenvalues: QR iteration did not converge");
    return solver.eigenvalues();
}

EigenSystem eigensystem(const Matrix& A)
{
    if (A.rows() != A.cols())
        throw DimensionError("eigensystem: matrix must be square");
    Eigen::ComplexEigenSolver<Matrix> solver(A, true);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigensystem: QR iteration did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

double cluster_radius(const Vector& values, double tol)
{
    const double scale = values.size() > 0 ? values.cwiseAbs().maxCoeff() : 0.0;
    return tol * (1.0 + scale);
}

std::vector<EigenCluster> cluster_eigenvalues(const Vector& values, double radius)
{
    const Index n = values.size();
    std::vector<Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            if (std::abs(values(i) - values(j)) <= radius) {
                const Index a = find(i), b = find(j);
                if (a != b)
                    parent[std::max(a, b)] = std::min(a, b);
            }

    std::vector<EigenCluster> clusters;
    std::vector<Index> slot(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; ++i) {
        const Index root = find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<Index>(clusters.size());
            clusters.push_back({});
        }
        clusters[slot[root]].members.push_back(i);
    }
    for (auto& c : clusters) {
        Complex sum = 0.0;
        for (Index i : c.members)
            sum += values(i);
        c.center = sum / static_cast<double>(c.members.size());
    }
    std::sort(clusters.begin(), clusters.end(), [](const EigenCluster& a, const EigenCluster& b) {
        if (a.center.real() != b.center.real())
            return a.center.real() < b.center.real();
        return a.center.imag() < b.center.imag();
    });
    return clusters;
}

double distance_to_spectrum(const Vector& values, Complex z, Complex* nearest)
{
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < values.size(); ++i) {
        const double d = std::abs(values(i) - z);
        if (d < best) {
            best = d;
            if (nearest)
                *nearest = values(i);
        }
    }
    return best;
}

bool is_quasinilpotent(const Matrix& N, double radius_tol, double trace_tol)
{
    const Index n = N.rows();
    if (n == 0)
        return true;
    const double norm = spectral_norm(N);
    if (norm == 0.0)
        return true;

    const Vector eig = eigenvalues(N);
    if (eig.cwiseAbs().maxCoeff() <= radius_tol * std::max(1.0, norm))
        return true;

    Matrix power = N;
    double norm_pow = norm;
    for (Index k = 1; k <= n; ++k) {
        if (std::abs(power.trace()) > trace_tol * static_cast<double>(n) * norm_pow)
            return false;
        power = power * N;
        norm_pow *= norm;
    }
    return true;
}

}  // namespace rootspan
