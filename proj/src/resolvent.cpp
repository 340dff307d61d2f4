#include "rootspan/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "rootspan/linalg.hpp"
#include "rootspan/norms.hpp"
#include "rootspan/schatten.hpp"

namespace rootspan {

namespace {

std::string describe(Complex z)
{
    std::ostringstream os;
    os.precision(6);
    os << "(" << z.real() << ", " << z.imag() << ")";
    return os.str();
}

Matrix resolvent_matrix(const Matrix& A, const Vector& spectrum, Complex lambda, double min_distance)
{
    Complex nearest;
    const double d = distance_to_spectrum(spectrum, lambda, &nearest);
    if (d <= min_distance)
        throw SpectrumError("lambda " + describe(lambda) + " lies in the spectrum near eigenvalue " +
                                describe(nearest),
                            nearest);
    const Index n = A.rows();
    Matrix shifted = -A;
    shifted.diagonal().array() += lambda;
    Eigen::PartialPivLU<Matrix> lu(shifted);
    Matrix R = lu.solve(Matrix::Identity(n, n));
    if (!R.allFinite())
        throw SpectrumError("resolvent solve failed near eigenvalue " + describe(nearest), nearest);
    return R;
}

}  // namespace

OperatorMatrix resolvent(const OperatorMatrix& A, Complex lambda)
{
    const Vector spectrum = eigenvalues(A.entries());
    return A.with_entries(resolvent_matrix(A.entries(), spectrum, lambda, 1e-12));
}

double log_abs_regularized_determinant(const Vector& eigenvalues, Complex lambda)
{
    if (lambda == Complex(0.0))
        throw DomainError("regularized determinant needs lambda != 0");
    double s = 0.0;
    for (Index i = 0; i < eigenvalues.size(); ++i) {
        const Complex z = eigenvalues(i) / lambda;
        s += std::log(std::abs(1.0 - z)) + z.real();
    }
    return s;
}

Complex regularized_determinant(const OperatorMatrix& A, Complex lambda)
{
    if (lambda == Complex(0.0))
        throw DomainError("regularized determinant needs lambda != 0");
    const Vector spectrum = eigenvalues(A.entries());
    Complex product = 1.0;
    for (Index i = 0; i < spectrum.size(); ++i) {
        const Complex z = spectrum(i) / lambda;
        product *= (1.0 - z) * std::exp(z);
    }
    return product;
}

CarlemanReport carleman_report(const OperatorMatrix& A, const BiorthogonalSystem& system, Complex lambda)
{
    const double p = A.context().p();
    const Vector spectrum = eigenvalues(A.entries());
    const Matrix R = resolvent_matrix(A.entries(), spectrum, lambda, 1e-12);
    const NormBounds rn = operator_norm_bounds(R, p);
    const double log_phi = log_abs_regularized_determinant(spectrum, lambda);

    CarlemanReport r;
    const double scale = std::exp(log_phi);
    r.lhs = {rn.lower * scale, rn.upper * scale};
    r.log_lhs_upper = log_phi + std::log(rn.upper);

    const double abs_lambda = std::abs(lambda);
    const double sp = std::pow(sigma_p_norm(A, system), p);
    r.log_rhs = std::log(abs_lambda) + 0.5 * (1.0 + sp / (abs_lambda * abs_lambda));
    r.rhs = std::exp(r.log_rhs);
    r.satisfied_at_bracket = r.log_lhs_upper <= r.log_rhs;

    const Index n = system.dim();
    const bool canonical = system.primal() == Matrix::Identity(n, n) && system.dual() == Matrix::Identity(n, n);
    r.asserted = A.context().is_hilbert() && canonical;
    return r;
}

QuasinilpotentResolventReport quasinilpotent_resolvent_report(const OperatorMatrix& N,
                                                              const BiorthogonalSystem& system,
                                                              Complex lambda, double M)
{
    if (lambda == Complex(0.0))
        throw DomainError("quasinilpotent_resolvent_report: lambda must be nonzero");
    if (!(M > 0.0))
        throw DomainError("quasinilpotent_resolvent_report: M must be positive");
    if (!is_quasinilpotent(N.entries()))
        throw DomainError("quasinilpotent_resolvent_report: operator is not quasi-nilpotent at tolerance");
    const double p = N.context().p();
    const Index n = N.dim();
    Matrix shifted = -N.entries();
    shifted.diagonal().array() += lambda;
    const Matrix R = Eigen::PartialPivLU<Matrix>(shifted).solve(Matrix::Identity(n, n));

    QuasinilpotentResolventReport r;
    r.lhs = operator_norm_bounds(R, p);
    const double s = sigma_norm_at(N.entries() / lambda, system, p);
    r.rhs = std::abs(lambda) * std::exp(M * (1.0 + std::pow(s, p)));
    r.satisfied = r.lhs.upper <= r.rhs;
    return r;
}

//
// arcs
//

ArcConfiguration::ArcConfiguration(std::vector<double> angles, ExponentContext context)
    : angles_(std::move(angles)), context_(context)
{
    if (angles_.empty())
        throw DomainError("arc configuration needs at least one ray");
    for (std::size_t i = 0; i < angles_.size(); ++i) {
        const double a = angles_[i];
        if (!std::isfinite(a) || a < 0.0 || a >= 2.0 * kPi)
            throw DomainError("ray angles must lie in [0, 2pi)");
        if (i > 0 && !(a > angles_[i - 1]))
            throw DomainError("ray angles must be strictly increasing");
    }
}

ArcConfiguration ArcConfiguration::equally_spaced(int s, ExponentContext context, double offset)
{
    if (s < 1)
        throw DomainError("equally_spaced: need at least one ray");
    std::vector<double> a;
    for (int k = 0; k < s; ++k) {
        double t = std::fmod(offset + 2.0 * kPi * k / s, 2.0 * kPi);
        if (t < 0.0)
            t += 2.0 * kPi;
        a.push_back(t);
    }
    std::sort(a.begin(), a.end());
    return {a, context};
}

std::vector<double> ArcConfiguration::openings() const
{
    std::vector<double> out;
    for (std::size_t i = 1; i < angles_.size(); ++i)
        out.push_back(angles_[i] - angles_[i - 1]);
    out.push_back(2.0 * kPi - angles_.back() + angles_.front());
    return out;
}

SectorReport sector_condition_check(const ArcConfiguration& arcs)
{
    SectorReport r;
    const auto open = arcs.openings();
    r.max_opening = *std::max_element(open.begin(), open.end());
    r.threshold = kPi / arcs.context().p();
    // relative guard so that openings equal to the threshold up to rounding fail
    r.holds = r.max_opening < r.threshold * (1.0 - 1e-12);
    return r;
}

//
// ray scans
//

RayScan ray_scan(const OperatorMatrix& A, double theta, double r_min, double r_max, int points,
                 ScanRegime regime)
{
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw DomainError("ray_scan: need 0 < r_min < r_max");
    if (points < 3)
        throw DomainError("ray_scan: need at least 3 points");
    const double p = A.context().p();
    const Vector spectrum = eigenvalues(A.entries());

    RayScan scan;
    scan.angle = theta;
    scan.regime = regime;
    const double lmin = std::log(r_min);
    const double lmax = std::log(r_max);
    for (int i = 0; i < points; ++i) {
        const double r = std::exp(lmax - (lmax - lmin) * i / (points - 1));
        const Complex lambda = std::polar(r, theta);
        const Matrix R = resolvent_matrix(A.entries(), spectrum, lambda, 1e-10);
        scan.radii.push_back(r);
        scan.norms.push_back(operator_norm_bounds(R, p));
    }

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < scan.radii.size(); ++i) {
        const double r = scan.radii[i];
        const bool in_window = regime == ScanRegime::origin ? r <= r_min * 10.0 * (1.0 + 1e-12)
                                                            : r >= r_max / 10.0 * (1.0 - 1e-12);
        if (in_window) {
            xs.push_back(-std::log(r));
            ys.push_back(std::log(scan.norms[i].upper));
        }
    }
    if (xs.size() < 3) {
        xs.clear();
        ys.clear();
        for (std::size_t i = 0; i < scan.radii.size(); ++i) {
            xs.push_back(-std::log(scan.radii[i]));
            ys.push_back(std::log(scan.norms[i].upper));
        }
    }

    const double m = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0, spread = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        spread = std::max(spread, std::abs(ys[i] - my));
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    scan.fitted_order = sxy / sxx;
    const double ss_res = std::max(0.0, syy - scan.fitted_order * sxy);
    // a flat profile (variation below 0.1% in log scale) is a perfect order-0 fit
    scan.r_squared = spread < 1e-3 ? 1.0 : 1.0 - ss_res / syy;
    scan.confident = scan.r_squared >= 0.99;
    return scan;
}

}  // namespace rootspan
