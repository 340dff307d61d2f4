#include "rootspan/suites.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "rootspan/banach_geometry.hpp"
#include "rootspan/bvp.hpp"
#include "rootspan/linalg.hpp"
#include "rootspan/norms.hpp"
#include "rootspan/resolvent.hpp"
#include "rootspan/rootspace.hpp"
#include "rootspan/schatten.hpp"
#include "rootspan/serialization.hpp"
#include "rootspan/trace.hpp"

namespace rootspan {

using nlohmann::json;

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"schatten", "trace", "resolvent", "completeness", "bvp"};
    return names;
}

const std::map<std::string, double>& default_tolerances()
{
    static const std::map<std::string, double> t{
        {"weyl", 1e-9},           {"weyl_normal", 1e-9},   {"bracket", 1e-12},    {"frobenius", 1e-12},
        {"adjoint", 1e-10},       {"symmetry", 1e-10},     {"holder", 1e-12},     {"spectral_trace", 1e-8},
        {"quasinilpotent", 1e-10}, {"similarity", 1e-9},   {"order", 0.05},       {"projection", 1e-8},
        {"contour", 1e-7},        {"root_distance", 1e-8}, {"truncated", 1e-3},   {"convergence_order", 0.2},
        {"stencil", 1e-10},       {"coercive", 0.1},       {"embedding", 0.1},    {"chain_rule", 1e-8},
        {"round_trip", 1e-9}};
    return t;
}

//
// configuration
//

namespace {

template <class T>
std::vector<T> list_field(const json& doc, const char* key, const std::vector<T>& fallback)
{
    if (!doc.contains(key))
        return fallback;
    const json& v = doc[key];
    std::vector<T> out;
    if (v.is_object()) {
        // {"min": a, "max": b} range of integers
        const T lo = v.at("min").get<T>();
        const T hi = v.at("max").get<T>();
        for (T x = lo; x <= hi; ++x)
            out.push_back(x);
    } else if (v.is_array()) {
        for (const auto& e : v)
            out.push_back(e.get<T>());
    } else {
        out.push_back(v.get<T>());
    }
    return out;
}

std::vector<Index> default_dims(const std::string& suite)
{
    if (suite == "resolvent")
        return {6};
    if (suite == "completeness")
        return {4, 6, 8, 10};
    if (suite == "bvp")
        return {16, 32, 64, 128};
    return {4, 6, 8};
}

std::vector<double> default_ps(const std::string& suite)
{
    if (suite == "resolvent" || suite == "bvp")
        return {2.0};
    return {2.0, 3.0};
}

}  // namespace

SuiteConfig SuiteConfig::from_json(const json& doc)
{
    if (!doc.is_object())
        throw ConfigError("config must be a table/object");
    static const std::vector<std::string> known{"suite", "seed", "dims", "p", "samples",
                                                "out", "c", "embedding_dim", "tolerances"};
    for (const auto& [k, v] : doc.items())
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw ConfigError("unknown config key '" + k + "'");
    SuiteConfig c;
    try {
        c.suite = doc.at("suite").get<std::string>();
        if (std::find(suite_names().begin(), suite_names().end(), c.suite) == suite_names().end())
            throw ConfigError("unknown suite '" + c.suite + "'");
        if (doc.contains("seed")) {
            const auto s = doc["seed"].get<std::int64_t>();
            if (s <= 0)
                throw ConfigError("seed must be positive");
            c.seed = static_cast<std::uint64_t>(s);
        }
        c.dims = list_field<Index>(doc, "dims", default_dims(c.suite));
        c.ps = list_field<double>(doc, "p", default_ps(c.suite));
        c.samples = doc.value("samples", 0);
        c.out_dir = doc.value("out", std::string("."));
        c.c = doc.value("c", 1.0);
        c.embedding_dim = doc.value("embedding_dim", Index{128});
        if (doc.contains("tolerances")) {
            for (const auto& [k, v] : doc["tolerances"].items()) {
                if (!default_tolerances().contains(k))
                    throw ConfigError("unknown tolerance '" + k + "'");
                const double t = v.get<double>();
                if (!(t > 0.0) || !std::isfinite(t))
                    throw ConfigError("tolerance '" + k + "' must be positive");
                c.tolerances[k] = t;
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (c.dims.empty() || c.ps.empty())
        throw ConfigError("dims and p must be nonempty");
    for (const Index n : c.dims)
        if (n < 1)
            throw ConfigError("dimensions must be positive");
    if (c.suite == "bvp")
        for (const Index n : c.dims)
            if (n < 8)
                throw ConfigError("bvp grid sizes must be at least 8");
    for (const double p : c.ps)
        if (!(p > 1.0) || !std::isfinite(p))
            throw ConfigError("every p must satisfy 1 < p < inf");
    if (c.samples < 0)
        throw ConfigError("samples must be nonnegative");
    if (c.embedding_dim < 64)
        throw ConfigError("embedding_dim must be at least 64");
    if (!std::isfinite(c.c))
        throw ConfigError("c must be finite");
    return c;
}

json SuiteConfig::to_json() const
{
    return {{"suite", suite},
            {"seed", seed},
            {"dims", dims},
            {"p", ps},
            {"samples", samples},
            {"tolerances", tolerances},
            {"c", c},
            {"embedding_dim", embedding_dim}};
}

double SuiteConfig::tolerance(const std::string& name) const
{
    const auto it = tolerances.find(name);
    return it != tolerances.end() ? it->second : default_tolerances().at(name);
}

//
// helpers
//

namespace {

std::string label(const std::string& check, Index n, double p)
{
    return check + " n=" + std::to_string(n) + " p=" + format_number(p);
}

std::string inputs(const std::string& check, std::uint64_t seed, Index n, double p, int samples)
{
    return check + "|seed=" + std::to_string(seed) + "|n=" + std::to_string(n) + "|p=" + format_number(p) +
           "|samples=" + std::to_string(samples);
}

std::uint64_t stream_seed(std::uint64_t seed, const std::string& tag)
{
    std::uint64_t h = 0xcbf29ce484222325ULL ^ (seed * 0x9e3779b97f4a7c15ULL);
    for (const unsigned char ch : tag) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <class F>
void guarded(const std::string& check, F&& f)
{
    try {
        f();
    } catch (const CheckFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw CheckFailure(check, e.what());
    }
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

Series spectrum_series(const Vector& values, double tol)
{
    Series s;
    s.columns = {"re", "im", "mult"};
    for (const auto& c : cluster_eigenvalues(values, cluster_radius(values, tol)))
        for (const Index i : c.members)
            s.rows.push_back({values(i).real(), values(i).imag(), static_cast<double>(c.multiplicity())});
    return s;
}

Series rayscan_series(const RayScan& scan)
{
    Series s;
    s.columns = {"r", "norm_lower", "norm_upper"};
    for (std::size_t i = 0; i < scan.radii.size(); ++i)
        s.rows.push_back({scan.radii[i], scan.norms[i].lower, scan.norms[i].upper});
    return s;
}

/// (j, s_j, fitted power law) with j 1-based; the fit line uses the window.
Series snumber_series(const SNumberFit& fit)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(fit.fit_end - fit.fit_begin);
    for (Index j = fit.fit_begin; j < fit.fit_end; ++j) {
        const double x = std::log(static_cast<double>(j + 1));
        const double y = std::log(fit.s[static_cast<std::size_t>(j)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = m > 1 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    const double icpt = m > 0 ? (sy - slope * sx) / m : 0.0;
    Series s;
    s.columns = {"j", "s_j", "fit"};
    for (std::size_t j = 0; j < fit.s.size(); ++j) {
        const double x = static_cast<double>(j + 1);
        s.rows.push_back({x, fit.s[j], std::exp(icpt + slope * std::log(x))});
    }
    return s;
}

Matrix random_normal_matrix(Index n, Rng& rng)
{
    const Matrix U = random_unitary(n, rng);
    const Vector d = random_vector(n, rng);
    return U * d.asDiagonal() * U.adjoint();
}

Matrix strictly_upper(Index n, Rng& rng)
{
    Matrix N = random_matrix(n, n, rng);
    for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i)
            N(i, j) = 0.0;
    return N;
}

/// Random well-conditioned similarity U diag(1..2) V.
Matrix random_similarity(Index n, Rng& rng)
{
    std::uniform_real_distribution<double> u(1.0, 2.0);
    Vector d(n);
    for (Index i = 0; i < n; ++i)
        d(i) = u(rng);
    return random_unitary(n, rng) * d.asDiagonal() * random_unitary(n, rng);
}

AnalyticFunctionSpec random_polynomial(Rng& rng)
{
    std::uniform_int_distribution<int> deg(1, 4);
    std::vector<Complex> c;
    const int k = deg(rng);
    for (int i = 0; i < k; ++i) {
        const Vector z = random_vector(1, rng);
        c.push_back(z(0) / static_cast<double>(i + 1));
    }
    return AnalyticFunctionSpec(c);
}

//
// schatten
//

void schatten_suite(const SuiteConfig& cfg, Report& rep)
{
    const int samples = cfg.samples > 0 ? cfg.samples : 200;
    const int heavy = std::max(1, samples / 20);
    for (const double p : cfg.ps) {
        const ExponentContext ctx(p);
        for (const Index n : cfg.dims) {
            Rng rng(stream_seed(cfg.seed, label("schatten", n, p)));
            const bool hilbert = ctx.is_hilbert();

            std::string name = label("weyl", n, p);
            guarded(name, [&] {
                double worst = -std::numeric_limits<double>::infinity();
                for (int s = 0; s < (hilbert ? samples : heavy); ++s) {
                    const WeylReport w = weyl_check(OperatorMatrix(random_matrix(n, n, rng), ctx));
                    worst = std::max(worst, w.lhs - w.rhs);
                }
                const double tol = cfg.tolerance("weyl");
                rep.add(name, inputs(name, cfg.seed, n, p, samples), worst, tol, worst <= tol, hilbert);
            });

            if (hilbert) {
                name = label("weyl_normal", n, p);
                guarded(name, [&] {
                    double worst = 0.0;
                    for (int s = 0; s < samples; ++s) {
                        const WeylReport w = weyl_check(OperatorMatrix(random_normal_matrix(n, rng), ctx));
                        worst = std::max(worst, std::abs(w.lhs - w.rhs));
                    }
                    const double tol = cfg.tolerance("weyl_normal");
                    rep.add(name, inputs(name, cfg.seed, n, p, samples), worst, tol, worst <= tol);
                });

                name = label("sigma_frobenius", n, p);
                guarded(name, [&] {
                    double worst = 0.0;
                    const auto sys = BiorthogonalSystem::canonical(n, ctx);
                    for (int s = 0; s < samples; ++s) {
                        const Matrix A = random_matrix(n, n, rng);
                        worst = std::max(worst, rel(sigma_p_norm(OperatorMatrix(A, ctx), sys), A.norm()));
                    }
                    const double tol = cfg.tolerance("frobenius");
                    rep.add(name, inputs(name, cfg.seed, n, p, samples), worst, tol, worst <= tol);
                });
            }

            name = label("approximation_brackets", n, p);
            guarded(name, [&] {
                double worst = 0.0;
                for (int s = 0; s < heavy; ++s) {
                    const auto b = approximation_numbers(OperatorMatrix(random_matrix(n, n, rng), ctx), n);
                    const double scale = std::max(1.0, b.front().upper);
                    for (std::size_t j = 0; j < b.size(); ++j) {
                        worst = std::max(worst, (b[j].lower - b[j].upper) / scale);
                        if (j > 0)
                            worst = std::max(worst, (b[j].upper - b[j - 1].upper) / scale);
                    }
                }
                const double tol = cfg.tolerance("bracket");
                rep.add(name, inputs(name, cfg.seed, n, p, heavy), worst, tol, worst <= tol);
            });

            name = label("basis_change", n, p);
            guarded(name, [&] {
                double worst_change = 0.0, worst_bracket = 0.0;
                for (int s = 0; s < heavy; ++s) {
                    const OperatorMatrix A(random_matrix(n, n, rng), ctx);
                    const auto s1 = BiorthogonalSystem::random_biorthonormal(n, ctx, rng());
                    const auto s2 = BiorthogonalSystem::random_biorthonormal(n, ctx, rng());
                    const auto r = basis_equivalence_check(A, s1, s2, 200, rng());
                    const double worse = std::max(r.ratio, 1.0 / r.ratio);
                    worst_change = std::max(worst_change, worse / r.change_of_basis_bound);
                    worst_bracket = std::max(worst_bracket, worse / r.constant_bracket);
                }
                rep.add(name, inputs(name, cfg.seed, n, p, heavy), worst_change, 1.0 + 1e-9,
                        worst_change <= 1.0 + 1e-9);
                const std::string b = label("basis_bracket", n, p);
                rep.add(b, inputs(b, cfg.seed, n, p, heavy), worst_bracket, 1.0, worst_bracket <= 1.0 + 1e-9, false);
            });

            name = label("adjoint_identity", n, p);
            guarded(name, [&] {
                double worst = 0.0;
                for (int s = 0; s < heavy; ++s) {
                    const OperatorMatrix A(random_matrix(n, n, rng), ctx);
                    const auto sys = BiorthogonalSystem::random_biorthonormal(n, ctx, rng());
                    const auto r = adjoint_norm_identity(A, sys);
                    worst = std::max(worst, rel(r.dual, r.primal));
                }
                const double tol = cfg.tolerance("adjoint");
                rep.add(name, inputs(name, cfg.seed, n, p, heavy), worst, tol, worst <= tol);
            });
        }
    }
}

//
// trace
//

void trace_suite(const SuiteConfig& cfg, Report& rep)
{
    const int samples = cfg.samples > 0 ? cfg.samples : 200;
    for (const double p : cfg.ps) {
        const ExponentContext ctx(p);
        for (const Index n : cfg.dims) {
            Rng rng(stream_seed(cfg.seed, label("trace", n, p)));

            std::string name = label("symmetry", n, p);
            guarded(name, [&] {
                double worst = 0.0;
                double holder = -std::numeric_limits<double>::infinity();
                for (int s = 0; s < samples; ++s) {
                    const auto sys = BiorthogonalSystem::random_biorthonormal(n, ctx, rng());
                    const OperatorMatrix A(random_matrix(n, n, rng), ctx);
                    const OperatorMatrix B(random_matrix(n, n, rng), ctx);
                    worst = std::max(worst, trace_symmetry_check(A, B, sys));
                    const HolderReport h = trace_holder_check(A, B, sys);
                    holder = std::max(holder, h.lhs / h.rhs - 1.0);
                }
                double tol = cfg.tolerance("symmetry");
                rep.add(name, inputs(name, cfg.seed, n, p, samples), worst, tol, worst <= tol);
                const std::string hn = label("holder", n, p);
                tol = cfg.tolerance("holder");
                rep.add(hn, inputs(hn, cfg.seed, n, p, samples), holder, tol, holder <= tol);
            });

            name = label("spectral_trace", n, p);
            guarded(name, [&] {
                double worst = 0.0;
                const int count = std::max(1, samples / 2);
                for (int s = 0; s < count; ++s) {
                    const auto sys = BiorthogonalSystem::random_biorthonormal(n, ctx, rng());
                    const Matrix S = random_similarity(n, rng);
                    const Matrix A = S * random_vector(n, rng).asDiagonal() * S.inverse();
                    const auto F = random_polynomial(rng);
                    const auto g = random_polynomial(rng);
                    const auto r = spectral_trace_check(OperatorMatrix(A, ctx), F, g, sys);
                    worst = std::max(worst, r.delta / (1.0 + std::abs(r.eigen_side)));
                }
                const double tol = cfg.tolerance("spectral_trace");
                rep.add(name, inputs(name, cfg.seed, n, p, count), worst, tol, worst <= tol);
            });

            name = label("quasinilpotent_trace", n, p);
            guarded(name, [&] {
                double worst = 0.0;
                const int count = std::max(1, samples / 2);
                for (int s = 0; s < count; ++s) {
                    const auto sys = BiorthogonalSystem::random_biorthonormal(n, ctx, rng());
                    const Matrix N = strictly_upper(n, rng);
                    const Matrix U = random_unitary(n, rng);
                    worst = std::max(worst, std::abs(quasinilpotent_trace(OperatorMatrix(N, ctx), sys)));
                    const Matrix C = U * N * U.adjoint();
                    worst = std::max(worst, std::abs(quasinilpotent_trace(OperatorMatrix(C, ctx), sys)));
                }
                const double tol = cfg.tolerance("quasinilpotent");
                rep.add(name, inputs(name, cfg.seed, n, p, count), worst, tol, worst <= tol);
            });
        }
    }
}

//
// resolvent
//

/// Test matrices with decay order 0, 1, 2 of the resolvent at the origin.
Matrix decay_matrix(int order, Index n, Rng& rng)
{
    Matrix J = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        J(i, i) = static_cast<double>(i + 1);
    if (order >= 1)
        J(0, 0) = 0.0;
    if (order == 2 && n >= 2) {
        J(1, 1) = 0.0;
        J(0, 1) = 1.0;
    }
    const Matrix S = random_similarity(n, rng);
    return S * J * S.inverse();
}

void resolvent_suite(const SuiteConfig& cfg, Report& rep)
{
    const int samples = cfg.samples > 0 ? cfg.samples : 100;
    for (const double p : cfg.ps) {
        const ExponentContext ctx(p);
        for (const Index n : cfg.dims) {
            Rng rng(stream_seed(cfg.seed, label("resolvent", n, p)));
            const auto sys = BiorthogonalSystem::canonical(n, ctx);

            std::string name = label("carleman", n, p);
            guarded(name, [&] {
                double worst = -std::numeric_limits<double>::infinity();
                int evaluated = 0;
                bool asserted = false;
                std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
                for (int s = 0; s < samples; ++s) {
                    const OperatorMatrix A(random_matrix(n, n, rng), ctx);
                    const Vector spec = eigenvalues(A.entries());
                    for (int k = 0; k < 20; ++k) {
                        const double r = std::pow(10.0, -0.5 + 2.5 * k / 19.0);
                        Complex lambda = std::polar(r, angle(rng));
                        for (int tries = 0; distance_to_spectrum(spec, lambda) < 0.1 && tries < 64; ++tries)
                            lambda = std::polar(r, angle(rng));
                        if (distance_to_spectrum(spec, lambda) < 0.1)
                            continue;
                        const auto c = carleman_report(A, sys, lambda);
                        asserted = c.asserted;
                        worst = std::max(worst, c.log_lhs_upper - c.log_rhs);
                        ++evaluated;
                    }
                }
                rep.add(name, inputs(name, cfg.seed, n, p, samples), worst, 0.0, evaluated > 0 && worst <= 0.0,
                        asserted);
            });

            name = label("phi_similarity", n, p);
            guarded(name, [&] {
                double worst = 0.0;
                for (int s = 0; s < samples; ++s) {
                    const Matrix A = random_matrix(n, n, rng);
                    const Matrix S = random_similarity(n, rng);
                    const Vector spec = eigenvalues(A);
                    Complex lambda = std::polar(3.0 * std::sqrt(static_cast<double>(n)), 0.3);
                    const double d = distance_to_spectrum(spec, lambda);
                    if (d < 0.1)
                        lambda *= 2.0;
                    const Complex a = regularized_determinant(OperatorMatrix(A, ctx), lambda);
                    const Complex b = regularized_determinant(OperatorMatrix(S * A * S.inverse(), ctx), lambda);
                    worst = std::max(worst, std::abs(a - b) / std::abs(a));
                }
                const double tol = cfg.tolerance("similarity");
                rep.add(name, inputs(name, cfg.seed, n, p, samples), worst, tol, worst <= tol);
            });

            const char* names[] = {"decay_invertible", "decay_simple_zero", "decay_jordan_zero"};
            for (int order = 0; order <= 2; ++order) {
                name = label(names[order], n, p);
                guarded(name, [&] {
                    const OperatorMatrix A(decay_matrix(order, std::max<Index>(n, 3), rng), ctx);
                    const RayScan scan = ray_scan(A, 1.0, 1e-4, 1e-2, 21, ScanRegime::origin);
                    const double dev = std::abs(scan.fitted_order - order);
                    const double tol = cfg.tolerance("order");
                    rep.add(name, inputs(name, cfg.seed, n, p, 1), scan.fitted_order, order, dev <= tol);
                    if (order == 2)
                        rep.series["rayscan"] = rayscan_series(scan);
                });
            }

            name = label("quasinilpotent_resolvent", n, p);
            guarded(name, [&] {
                double worst = 0.0;
                for (int s = 0; s < samples / 10 + 1; ++s) {
                    const OperatorMatrix N(strictly_upper(n, rng), ctx);
                    const auto r = quasinilpotent_resolvent_report(N, sys, Complex(2.0, 1.0));
                    worst = std::max(worst, r.lhs.upper / r.rhs);
                }
                rep.add(name, inputs(name, cfg.seed, n, p, samples / 10 + 1), worst, 1.0, worst <= 1.0, false);
            });
        }

    }

    // pure arithmetic, so it always covers the reference exponents as well
    std::set<double> sector_ps{1.5, 2.0, 3.0};
    sector_ps.insert(cfg.ps.begin(), cfg.ps.end());
    for (const double p : sector_ps) {
        const ExponentContext ctx(p);
        const std::string name = "sector_closed_form p=" + format_number(p);
        guarded(name, [&] {
            int mismatches = 0;
            for (int s = 1; s <= 64; ++s) {
                const bool closed = s > 2.0 * p;
                if (sector_condition_check(ArcConfiguration::equally_spaced(s, ctx)).holds != closed)
                    ++mismatches;
            }
            rep.add(name, inputs(name, cfg.seed, 64, p, 64), mismatches, 0.0, mismatches == 0);
        });
    }
}

//
// completeness
//

/// Jordan structure J_3(1) ⊕ J_2(−1) ⊕ diag(2, 3, ...) under a random similarity.
Matrix jordan_test_matrix(Index n, Rng& rng)
{
    Matrix J = Matrix::Zero(n, n);
    const Complex vals[] = {1.0, 1.0, 1.0, -1.0, -1.0};
    for (Index i = 0; i < n; ++i)
        J(i, i) = i < 5 ? vals[i] : Complex(static_cast<double>(i - 3), 0.5);
    J(0, 1) = J(1, 2) = J(3, 4) = 1.0;
    const Matrix S = random_similarity(n, rng);
    return S * J * S.inverse();
}

int arcs_for(double p)
{
    return static_cast<int>(std::floor(2.0 * p)) + 1;
}

void completeness_suite(const SuiteConfig& cfg, Report& rep)
{
    const int samples = cfg.samples > 0 ? cfg.samples : 100;
    const int per_dim = std::max(1, samples / static_cast<int>(cfg.dims.size()));
    bool spectrum_done = false;
    for (const double p : cfg.ps) {
        const ExponentContext ctx(p);
        const ArcConfiguration arcs = ArcConfiguration::equally_spaced(arcs_for(p), ctx, 0.1);
        CompletenessOptions scan_opts;
        scan_opts.scan_points = 21;
        for (const Index n : cfg.dims) {
            Rng rng(stream_seed(cfg.seed, label("completeness", n, p)));

            if (ctx.is_hilbert()) {
                std::string name = label("projections", n, p);
                guarded(name, [&] {
                    double sum_err = 0.0, idem_err = 0.0, contour_err = 0.0;
                    for (int s = 0; s < per_dim; ++s) {
                        const OperatorMatrix A(random_matrix(n, n, rng), ctx);
                        const auto d = spectral_decomposition(A);
                        Matrix total = Matrix::Zero(n, n);
                        std::vector<Complex> centers;
                        for (const auto& c : d.clusters)
                            centers.push_back(c.eigenvalue);
                        for (const auto& c : d.clusters) {
                            const Matrix& P = c.projection;
                            total += P;
                            const double scale = std::max(1.0, P.norm() * P.norm());
                            idem_err = std::max(idem_err, (P * P - P).norm() / scale);
                            double gap = std::numeric_limits<double>::infinity();
                            for (const Complex z : centers)
                                if (z != c.eigenvalue)
                                    gap = std::min(gap, std::abs(z - c.eigenvalue));
                            if (!std::isfinite(gap))
                                gap = 1.0;
                            const Matrix Pc = riesz_projection(A, c.eigenvalue, 0.4 * gap, 128).entries();
                            contour_err = std::max(contour_err, (Pc - P).norm() / std::max(1.0, P.norm()));
                        }
                        sum_err = std::max(sum_err, (total - Matrix::Identity(n, n)).norm());
                        if (!spectrum_done) {
                            rep.series["spectrum"] = spectrum_series(eigenvalues(A.entries()), 1e-6);
                            spectrum_done = true;
                        }
                    }
                    double tol = cfg.tolerance("projection");
                    rep.add(name, inputs(name, cfg.seed, n, p, per_dim), std::max(sum_err, idem_err), tol,
                            std::max(sum_err, idem_err) <= tol);
                    const std::string cn = label("contour_vs_chain", n, p);
                    tol = cfg.tolerance("contour");
                    rep.add(cn, inputs(cn, cfg.seed, n, p, per_dim), contour_err, tol, contour_err <= tol);
                });
            }

            std::string name = label("verdict_full", n, p);
            guarded(name, [&] {
                double worst = 0.0;
                bool all = true;
                // ray scans at p != 2 run a norm search per radius
                const int count = ctx.is_hilbert() ? std::max(1, per_dim / 5) : 2;
                for (int s = 0; s < count; ++s) {
                    const OperatorMatrix A(random_matrix(n, n, rng), ctx);
                    const auto v = completeness_verdict(A, 0, arcs, 8, rng(), scan_opts);
                    worst = std::max(worst, v.max_distance);
                    all = all && v.verdict;
                }
                const double tol = cfg.tolerance("root_distance");
                rep.add(name, inputs(name, cfg.seed, n, p, count), worst, tol, worst <= tol && all);
            });

            if (n >= 6) {
                name = label("verdict_jordan", n, p);
                guarded(name, [&] {
                    const OperatorMatrix A(jordan_test_matrix(n, rng), ctx);
                    // a triple eigenvalue splits by about (eps ||A||)^{1/3} under rounding
                    const auto d = spectral_decomposition(A, 1e-4);
                    const auto full = completeness_verdict(A, d, 0, arcs, 8, rng(), scan_opts);
                    double tol = cfg.tolerance("root_distance");
                    rep.add(name, inputs(name, cfg.seed, n, p, 8), full.max_distance, tol,
                            full.max_distance <= tol && full.verdict);
                    const auto cut = completeness_verdict(A, d.truncated(d.root_vector_count() - 1), 0, arcs, 8,
                                                          rng(), scan_opts);
                    const std::string tn = label("verdict_truncated", n, p);
                    tol = cfg.tolerance("truncated");
                    rep.add(tn, inputs(tn, cfg.seed, n, p, 8), cut.max_distance, tol,
                            cut.max_distance > tol && !cut.verdict);
                });
            }
        }
    }
}

//
// bvp
//

double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

Vector sorted_by_real(const Vector& v)
{
    std::vector<Complex> e(v.data(), v.data() + v.size());
    std::sort(e.begin(), e.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return Eigen::Map<Vector>(e.data(), static_cast<Index>(e.size()));
}

void bvp_suite(const SuiteConfig& cfg, Report& rep)
{
    const ExponentContext ctx(cfg.ps.front());
    const double c = cfg.c;
    const BvpProblem model = BvpProblem::scalar_dirichlet(c, ctx);
    const ArcConfiguration arcs = ArcConfiguration::equally_spaced(arcs_for(ctx.p()), ctx, 0.1);
    const int samples = cfg.samples > 0 ? cfg.samples : 8;
    rep.notes["sign_convention"] = "Q u = a u'' + B u' + A u; resolvents solve (Q_h + lambda) u = f";

    std::vector<double> logn, logerr;
    double stencil_err = 0.0;
    for (const Index n : cfg.dims) {
        const std::string name = label("root_distance", n, ctx.p());
        guarded(name, [&] {
            const DiscretizedOperator op = discretize(model, n);
            const Vector eig = sorted_by_real(eigenvalues(op.Q.entries()));
            const double np1 = static_cast<double>(n + 1);
            for (Index k = 0; k < n; ++k) {
                const double s = std::sin(static_cast<double>(k + 1) * kPi / (2.0 * np1));
                const double exact = 4.0 * np1 * np1 * s * s + c;
                stencil_err = std::max(stencil_err, std::abs(eig(k) - exact) / std::abs(exact));
            }
            const double err = std::abs(eig(0).real() - (kPi * kPi + c));
            logn.push_back(std::log(static_cast<double>(n)));
            logerr.push_back(std::log(err));
            const std::string en = label("eigenvalue_k1", n, ctx.p());
            rep.add(en, inputs(en, cfg.seed, n, ctx.p(), 1), eig(0).real(), kPi * kPi + c, true, false);

            BvpSpectralOptions opt;
            opt.sample_count = samples;
            opt.seed = stream_seed(cfg.seed, name);
            const auto r = bvp_spectral_report(op, arcs, 2.0, opt);
            const double tol = cfg.tolerance("root_distance");
            rep.add(name, inputs(name, cfg.seed, n, ctx.p(), samples), r.root_distance, tol, r.root_distance <= tol);
            if (n == cfg.dims.back()) {
                rep.series["spectrum"] = spectrum_series(eig, 1e-6);
                if (!r.completeness.scans.empty())
                    rep.series["rayscan"] = rayscan_series(r.completeness.scans.front());
                const std::string sn = label("resolvent_slope", n, ctx.p());
                rep.add(sn, inputs(sn, cfg.seed, n, ctx.p(), 1), r.resolvent_fit.fitted_exponent,
                        r.resolvent_fit.target, r.resolvent_fit.holds, false);
            }
        });
    }
    {
        const std::string name = "stencil_spectrum";
        const double tol = cfg.tolerance("stencil");
        rep.add(name, inputs(name, cfg.seed, cfg.dims.back(), ctx.p(), 1), stencil_err, tol, stencil_err <= tol);
    }
    if (cfg.dims.size() >= 2) {
        const std::string name = "convergence_order";
        const double order = -fit_slope(logn, logerr);
        const double tol = cfg.tolerance("convergence_order");
        rep.add(name, inputs(name, cfg.seed, cfg.dims.back(), ctx.p(), 1), order, 2.0, std::abs(order - 2.0) <= tol);
    }

    {
        const std::string name = "coercive";
        guarded(name, [&] {
            const DiscretizedOperator op = discretize(model, 64);
            std::vector<Complex> lambdas;
            for (int k = 0; k <= 16; ++k)
                lambdas.emplace_back(std::pow(10.0, k / 4.0), 0.0);
            const auto r = coercive_estimate_report(op, lambdas, 8, stream_seed(cfg.seed, name));
            const double dev = std::abs(r.top_decade_max / r.previous_decade_max - 1.0);
            const double tol = cfg.tolerance("coercive");
            rep.add(name, inputs(name, cfg.seed, 64, ctx.p(), 8), dev, tol, dev <= tol && r.bounded);
        });
    }

    for (const double nu : {1.0, 2.0}) {
        const std::string name = "embedding nu=" + format_number(nu);
        guarded(name, [&] {
            EmbeddingOptions opt;
            opt.n = cfg.embedding_dim;
            const auto fit = embedding_snumbers(cfg.embedding_dim, nu, ctx, opt);
            const double tol = cfg.tolerance("embedding");
            const double dev = std::abs(fit.fitted_exponent - fit.target);
            rep.add(name, inputs(name, cfg.seed, cfg.embedding_dim, ctx.p(), 1), fit.fitted_exponent, fit.target,
                    dev <= tol, fit.asserted);
            if (nu == 1.0)
                rep.series["snumbers"] = snumber_series(fit);
        });
    }

    const std::vector<std::vector<double>> polys{{0, 0, 1}, {1, -2, 0, 1}, {0, 1, 0.5, 0, -0.25}};
    for (const double g : {0.25, 0.5, 0.75}) {
        const std::string name = "chain_rule gamma=" + format_number(g);
        guarded(name, [&] {
            const auto t = degenerate_transform(model, g);
            double worst = 0.0;
            for (const auto& poly : polys)
                worst = std::max(worst, chain_rule_residual(t, poly));
            double tol = cfg.tolerance("chain_rule");
            rep.add(name, inputs(name, cfg.seed, 91, g, 3), worst, tol, worst <= tol);
            const std::string rn = "round_trip gamma=" + format_number(g);
            const double rt = round_trip_error(t);
            tol = cfg.tolerance("round_trip");
            rep.add(rn, inputs(rn, cfg.seed, 91, g, 1), rt, tol, rt <= tol);
        });
    }

    {
        const std::string name = "condition1";
        guarded(name, [&] {
            const auto r = condition1_check(model, 5, 8);
            rep.add(name, inputs(name, cfg.seed, 5, ctx.p(), 8), r.positivity_M, r.r_bound, r.holds, false);
        });
    }
}

}  // namespace

Report run_suite(const SuiteConfig& config)
{
    Report rep;
    rep.suite = config.suite;
    rep.config = config.to_json();
    if (config.suite == "schatten")
        schatten_suite(config, rep);
    else if (config.suite == "trace")
        trace_suite(config, rep);
    else if (config.suite == "resolvent")
        resolvent_suite(config, rep);
    else if (config.suite == "completeness")
        completeness_suite(config, rep);
    else if (config.suite == "bvp")
        bvp_suite(config, rep);
    else
        throw ConfigError("unknown suite '" + config.suite + "'");
    return rep;
}

Report run_bvp(const json& doc, Index n)
{
    if (n < 8)
        throw ConfigError("grid size must be at least 8");
    BvpProblem problem;
    json run = json::object();
    try {
        problem = BvpProblem::from_json(doc.contains("problem") ? doc["problem"] : doc);
        run = doc.value("run", json::object());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed problem: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    BvpSpectralOptions opt;
    double q = 2.0;
    std::optional<ArcConfiguration> arcs;
    try {
        opt.nu = run.value("nu", 1.0);
        opt.phi = run.value("phi", 0.0);
        opt.lambda0 = run.contains("lambda0") ? complex_from_json(run["lambda0"]) : Complex(1.0);
        opt.sample_count = run.value("samples", 8);
        opt.seed = run.value("seed", std::uint64_t{1});
        q = run.value("q", 2.0);
        if (run.contains("arcs"))
            arcs = ArcConfiguration(run["arcs"].get<std::vector<double>>(), problem.context);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed run section: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (!arcs)
        arcs = ArcConfiguration::equally_spaced(arcs_for(problem.context.p()), problem.context, 0.1);
    if (opt.sample_count < 1)
        throw ConfigError("samples must be positive");

    Report rep;
    rep.suite = "bvp_run";
    rep.config = {{"problem", problem.to_json()},
                  {"n", n},
                  {"run",
                   {{"nu", opt.nu},
                    {"phi", opt.phi},
                    {"lambda0", complex_to_json(opt.lambda0)},
                    {"samples", opt.sample_count},
                    {"seed", opt.seed},
                    {"q", q},
                    {"arcs", arcs->angles()}}}};
    rep.notes["sign_convention"] = "Q u = a u'' + B u' + A u; resolvents solve (Q_h + lambda) u = f";
    rep.notes["weight_reading"] = "chain_rule";
    const std::string desc = write_json(rep.config, 0);

    DiscretizedOperator op;
    guarded("discretize", [&] { op = discretize(problem, n); });
    guarded("spectral_report", [&] {
        const auto r = bvp_spectral_report(op, *arcs, q, opt);
        rep.add("root_distance", desc, r.root_distance, 1e-6, r.root_distance <= 1e-6);
        rep.add("completeness_verdict", desc, r.completeness.max_distance, 1e-6, r.completeness.verdict, false);
        rep.add("sector", desc, r.completeness.sector.max_opening, r.completeness.sector.threshold,
                r.completeness.sector.holds, false);
        rep.add("phi_bound", desc, opt.phi, kPi / (2.0 * q), r.phi_holds, false);
        rep.add("q_bound", desc, q, opt.nu + 0.5, r.q_holds, false);
        rep.add("resolvent_slope", desc, r.resolvent_fit.fitted_exponent, r.resolvent_fit.target,
                r.resolvent_fit.holds, false);
        rep.add("min_separation", desc, r.min_separation, 0.0, r.min_separation > 0.0, false);
        rep.add("max_abs_imag", desc, r.max_abs_imag, 0.0, true, false);
        rep.series["spectrum"] = spectrum_series(sorted_by_real(r.spectrum), opt.cluster_tol);
        rep.series["snumbers"] = snumber_series(r.resolvent_fit);
        if (!r.completeness.scans.empty())
            rep.series["rayscan"] = rayscan_series(r.completeness.scans.front());
    });
    guarded("condition1", [&] {
        const auto r = condition1_check(problem, 5, 8);
        rep.add("condition1", desc, r.positivity_M, r.r_bound, r.holds, false);
    });
    return rep;
}

std::vector<std::string> write_report_files(const Report& report, const std::string& out_dir, const std::string& name)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory " + out_dir + ": " + ec.message());
    std::vector<std::string> paths;
    const auto put = [&paths](const fs::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ConfigError("cannot write " + path.string());
        out << text;
        paths.push_back(path.string());
    };
    put(fs::path(out_dir) / (name + "_report.json"), write_json(report.to_json()));
    for (const auto& [kind, s] : report.series)
        put(fs::path(out_dir) / (name + "_" + kind + ".csv"), series_to_csv(s));
    return paths;
}

std::string plot_data(const Report& report, const std::string& kind)
{
    if (kind != "snumbers" && kind != "rayscan" && kind != "spectrum")
        throw ConfigError("unknown plot kind '" + kind + "'");
    const auto it = report.series.find(kind);
    if (it == report.series.end())
        throw ConfigError("report has no '" + kind + "' series");
    return series_to_csv(it->second);
}

}  // namespace rootspan
