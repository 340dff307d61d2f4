#include "rootspan/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "rootspan/banach_geometry.hpp"
#include "rootspan/linalg.hpp"
#include "rootspan/norms.hpp"

namespace rootspan {

//
// JSON helpers
//

Complex complex_from_json(const Json& j)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw DomainError("expected a number or an [re, im] pair, got " + j.dump());
}

Json complex_to_json(Complex z)
{
    return Json::array({z.real(), z.imag()});
}

namespace {

std::vector<Complex> complex_list(const Json& j, const char* what)
{
    if (!j.is_array())
        throw DomainError(std::string(what) + " must be a list");
    std::vector<Complex> out;
    for (const auto& e : j)
        out.push_back(complex_from_json(e));
    return out;
}

Json complex_list_to_json(const std::vector<Complex>& v)
{
    Json out = Json::array();
    for (const Complex z : v)
        out.push_back(complex_to_json(z));
    return out;
}

double number(const Json& spec, const char* key, double fallback)
{
    if (!spec.contains(key))
        return fallback;
    if (!spec[key].is_number())
        throw DomainError(std::string("field '") + key + "' must be a number");
    return spec[key].get<double>();
}

double degenerate_inverse(double gamma, double y)
{
    return std::pow((1.0 - gamma) * y, 1.0 / (1.0 - gamma));
}

std::function<Complex(double)> scalar_function(const Json& spec)
{
    if (!spec.is_object())
        throw DomainError("coefficient spec must be an object");
    const std::string kind = spec.value("kind", "constant");
    if (kind == "constant") {
        const Complex c = complex_from_json(spec.at("value"));
        return [c](double) { return c; };
    }
    if (kind == "affine") {
        const Complex c0 = spec.contains("c0") ? complex_from_json(spec["c0"]) : Complex(0.0);
        const Complex c1 = spec.contains("c1") ? complex_from_json(spec["c1"]) : Complex(0.0);
        return [c0, c1](double x) { return c0 + c1 * x; };
    }
    if (kind == "tabulated") {
        std::vector<double> xs;
        for (const auto& e : spec.at("x"))
            xs.push_back(e.get<double>());
        const std::vector<Complex> vs = complex_list(spec.at("values"), "values");
        if (xs.size() < 2 || xs.size() != vs.size())
            throw DomainError("tabulated coefficient needs matching x and values of length >= 2");
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (!(xs[i] > xs[i - 1]))
                throw DomainError("tabulated coefficient x must be strictly increasing");
        return [xs, vs](double x) {
            if (x <= xs.front())
                return vs.front();
            if (x >= xs.back())
                return vs.back();
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
            const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
            return (1.0 - t) * vs[i] + t * vs[i + 1];
        };
    }
    if (kind == "composed") {
        const double g = spec.at("gamma").get<double>();
        if (!(g > 0.0 && g < 1.0))
            throw DomainError("composed coefficient needs gamma in (0, 1)");
        auto inner = scalar_function(spec.at("inner"));
        return [g, inner](double y) { return inner(degenerate_inverse(g, y)); };
    }
    throw DomainError("unknown scalar coefficient kind '" + kind + "'");
}

std::function<Matrix(double)> matrix_function(const Json& spec, Index d)
{
    if (!spec.is_object())
        throw DomainError("coefficient spec must be an object");
    const std::string kind = spec.value("kind", "constant");
    if (kind == "zero")
        return [d](double) { return Matrix(Matrix::Zero(d, d)); };
    if (kind == "diag_power") {
        const double scale = number(spec, "scale", 1.0);
        const double nu = number(spec, "nu", 1.0);
        if (!(nu > 0.0))
            throw DomainError("diag_power needs nu > 0");
        Matrix M = Matrix::Zero(d, d);
        for (Index j = 0; j < d; ++j)
            M(j, j) = scale * std::pow(static_cast<double>(j + 1), 1.0 / nu);
        return [M](double) { return M; };
    }
    if (kind == "matrix") {
        const std::vector<Complex> e = complex_list(spec.at("entries"), "entries");
        if (static_cast<Index>(e.size()) != d * d)
            throw DomainError("matrix coefficient needs d*d entries");
        Matrix M(d, d);
        for (Index i = 0; i < d; ++i)
            for (Index j = 0; j < d; ++j)
                M(i, j) = e[static_cast<std::size_t>(i * d + j)];
        return [M](double) { return M; };
    }
    if (kind == "composed") {
        const double g = spec.at("gamma").get<double>();
        if (!(g > 0.0 && g < 1.0))
            throw DomainError("composed coefficient needs gamma in (0, 1)");
        auto inner = matrix_function(spec.at("inner"), d);
        return [g, inner](double y) { return inner(degenerate_inverse(g, y)); };
    }
    // scalar profile times identity or a fixed diagonal
    auto profile = scalar_function(spec);
    Vector base = Vector::Ones(d);
    if (spec.contains("diag")) {
        const std::vector<Complex> diag = complex_list(spec["diag"], "diag");
        if (static_cast<Index>(diag.size()) != d)
            throw DomainError("diag list length must equal the dimension");
        for (Index j = 0; j < d; ++j)
            base(j) = diag[static_cast<std::size_t>(j)];
    }
    return [profile, base](double x) { return Matrix((profile(x) * base).asDiagonal()); };
}

}  // namespace

ScalarCoefficient ScalarCoefficient::from_json(const Json& spec)
{
    ScalarCoefficient c;
    c.fn_ = scalar_function(spec);
    c.spec_ = spec;
    return c;
}

ScalarCoefficient ScalarCoefficient::constant(Complex value)
{
    return from_json(Json{{"kind", "constant"}, {"value", complex_to_json(value)}});
}

MatrixCoefficient MatrixCoefficient::from_json(const Json& spec, Index dim)
{
    if (dim < 1)
        throw DomainError("matrix coefficient dimension must be positive");
    MatrixCoefficient c;
    c.fn_ = matrix_function(spec, dim);
    c.spec_ = spec;
    c.dim_ = dim;
    return c;
}

MatrixCoefficient MatrixCoefficient::zero(Index dim)
{
    return from_json(Json{{"kind", "zero"}}, dim);
}

MatrixCoefficient MatrixCoefficient::scaled_identity(Complex c, Index dim)
{
    return from_json(Json{{"kind", "constant"}, {"value", complex_to_json(c)}}, dim);
}

MatrixCoefficient MatrixCoefficient::diag_power(double scale, double nu, Index dim)
{
    return from_json(Json{{"kind", "diag_power"}, {"scale", scale}, {"nu", nu}}, dim);
}

double WeightSpec::operator()(double x) const
{
    return coefficient * std::pow(x, exponent);
}

//
// problem
//

namespace {

void validate_functional(const BoundaryFunctional& L, double length, int k)
{
    const std::string tag = "boundary functional " + std::to_string(k) + ": ";
    if (L.order != 0 && L.order != 1)
        throw DomainError(tag + "order must be 0 or 1");
    const auto need = static_cast<std::size_t>(L.order + 1);
    if (L.alpha.size() != need || L.beta.size() != need)
        throw DomainError(tag + "alpha and beta need order + 1 coefficients");
    for (const auto& t : L.interior) {
        if (!(t.point > 0.0 && t.point < length))
            throw DomainError(tag + "interior point must lie strictly inside the interval");
        if (t.order != 0 && t.order != 1)
            throw DomainError(tag + "interior term order must be 0 or 1");
    }
}

BoundaryFunctional functional_from_json(const Json& j)
{
    BoundaryFunctional L;
    L.order = j.value("order", 0);
    L.alpha = complex_list(j.at("alpha"), "alpha");
    L.beta = complex_list(j.at("beta"), "beta");
    if (j.contains("interior"))
        for (const auto& t : j["interior"])
            L.interior.push_back({t.at("point").get<double>(), complex_from_json(t.at("delta")), t.value("order", 0)});
    return L;
}

Json functional_to_json(const BoundaryFunctional& L)
{
    Json interior = Json::array();
    for (const auto& t : L.interior)
        interior.push_back({{"point", t.point}, {"delta", complex_to_json(t.delta)}, {"order", t.order}});
    return {{"order", L.order},
            {"alpha", complex_list_to_json(L.alpha)},
            {"beta", complex_list_to_json(L.beta)},
            {"interior", interior}};
}

}  // namespace

void BvpProblem::validate() const
{
    if (dim < 1)
        throw DomainError("problem dimension must be positive");
    if (!(std::isfinite(length) && length > 0.0))
        throw DomainError("interval length must be positive");
    if (A.dim() != dim || B.dim() != dim)
        throw DomainError("coefficient dimensions must equal the problem dimension");
    validate_functional(L1, length, 1);
    validate_functional(L2, length, 2);
    if (!(weight.coefficient > 0.0) || !std::isfinite(weight.coefficient))
        throw DomainError("weight coefficient must be positive");
    if (!(weight.exponent > -1.0) || !std::isfinite(weight.exponent))
        throw DomainError("weight exponent must exceed -1");
}

BvpProblem BvpProblem::from_json(const Json& doc)
{
    if (!doc.is_object())
        throw DomainError("problem must be an object");
    BvpProblem pr;
    pr.dim = doc.value("dim", Index{1});
    if (pr.dim < 1)
        throw DomainError("problem dimension must be positive");
    pr.length = number(doc, "length", 1.0);
    pr.context = ExponentContext(number(doc, "p", 2.0));
    if (doc.contains("a"))
        pr.a = ScalarCoefficient::from_json(doc["a"]);
    pr.A = doc.contains("A") ? MatrixCoefficient::from_json(doc["A"], pr.dim)
                             : MatrixCoefficient::scaled_identity(1.0, pr.dim);
    pr.B = doc.contains("B") ? MatrixCoefficient::from_json(doc["B"], pr.dim) : MatrixCoefficient::zero(pr.dim);
    if (doc.contains("boundary")) {
        const Json& b = doc["boundary"];
        if (!b.is_array() || b.size() != 2)
            throw DomainError("boundary must list exactly two functionals");
        pr.L1 = functional_from_json(b[0]);
        pr.L2 = functional_from_json(b[1]);
    }
    if (doc.contains("weight")) {
        pr.weight.coefficient = number(doc["weight"], "coefficient", 1.0);
        pr.weight.exponent = number(doc["weight"], "exponent", 0.0);
    }
    pr.validate();
    return pr;
}

Json BvpProblem::to_json() const
{
    return {{"dim", dim},
            {"length", length},
            {"p", context.p()},
            {"a", a.spec()},
            {"A", A.spec()},
            {"B", B.spec()},
            {"boundary", Json::array({functional_to_json(L1), functional_to_json(L2)})},
            {"weight", {{"coefficient", weight.coefficient}, {"exponent", weight.exponent}}}};
}

BvpProblem BvpProblem::scalar_dirichlet(double c, ExponentContext context, double b)
{
    BvpProblem pr;
    pr.dim = 1;
    pr.A = MatrixCoefficient::scaled_identity(c, 1);
    pr.B = b == 0.0 ? MatrixCoefficient::zero(1) : MatrixCoefficient::scaled_identity(b, 1);
    pr.context = context;
    pr.validate();
    return pr;
}

BvpProblem BvpProblem::diagonal_model(Index dim, double kappa, double nu, ExponentContext context)
{
    BvpProblem pr;
    pr.dim = dim;
    pr.A = MatrixCoefficient::diag_power(kappa, nu, dim);
    pr.B = MatrixCoefficient::zero(dim);
    pr.context = context;
    pr.validate();
    return pr;
}

CharacteristicData characteristic_data(const BvpProblem& problem, double x)
{
    const Complex a = problem.a(x);
    if (a == Complex(0.0))
        throw DomainError("characteristic_data: a(x) vanishes at x = " + std::to_string(x));
    CharacteristicData c;
    c.omega1 = 1.0 / std::sqrt(-a);
    c.omega2 = -c.omega1;
    auto ipow = [](Complex z, int m) { return m == 0 ? Complex(1.0) : z; };
    const int m1 = problem.L1.order;
    const int m2 = problem.L2.order;
    c.eta = ipow(-c.omega1, m1) * problem.L1.top_alpha() * problem.L2.top_beta() * ipow(c.omega2, m2) -
            problem.L1.top_beta() * ipow(c.omega1, m1) * ipow(-c.omega2, m2) * problem.L2.top_alpha();
    return c;
}

//
// discretization
//

RealVector DiscretizedOperator::component_weights() const
{
    RealVector w(n * dim);
    for (Index i = 0; i < n; ++i)
        w.segment(i * dim, dim).setConstant(node_weights(i));
    return w;
}

double DiscretizedOperator::weighted_norm(const Vector& u) const
{
    return weighted_lp_norm(u, component_weights(), Q.context().p());
}

Matrix DiscretizedOperator::lift(const Matrix& D) const
{
    if (dim == 1)
        return D;
    Matrix out = Matrix::Zero(D.rows() * dim, D.cols() * dim);
    for (Index i = 0; i < D.rows(); ++i)
        for (Index j = 0; j < D.cols(); ++j)
            if (D(i, j) != Complex(0.0))
                out.block(i * dim, j * dim, dim, dim).diagonal().setConstant(D(i, j));
    return out;
}

namespace {

// functional rows over the n + 2 grid values u_0..u_{n+1}
struct Stencils {
    Index nodes;
    double h;

    Vector value(Index i) const { return Vector::Unit(nodes, i); }

    Vector derivative(Index i) const
    {
        Vector r = Vector::Zero(nodes);
        if (i == 0) {
            r(0) = -3.0;
            r(1) = 4.0;
            r(2) = -1.0;
        } else if (i == nodes - 1) {
            r(nodes - 1) = 3.0;
            r(nodes - 2) = -4.0;
            r(nodes - 3) = 1.0;
        } else {
            r(i + 1) = 1.0;
            r(i - 1) = -1.0;
        }
        return r / (2.0 * h);
    }

    Vector at(double x, int order) const
    {
        Index i = static_cast<Index>(std::floor(x / h));
        i = std::clamp<Index>(i, 0, nodes - 2);
        const double t = x / h - static_cast<double>(i);
        if (order == 0)
            return (1.0 - t) * value(i) + t * value(i + 1);
        return (1.0 - t) * derivative(i) + t * derivative(i + 1);
    }

    Vector functional(const BoundaryFunctional& L) const
    {
        Vector r = Vector::Zero(nodes);
        for (int i = 0; i <= L.order; ++i) {
            const auto k = static_cast<std::size_t>(i);
            r += L.alpha[k] * (i == 0 ? value(0) : derivative(0));
            r += L.beta[k] * (i == 0 ? value(nodes - 1) : derivative(nodes - 1));
        }
        for (const auto& t : L.interior)
            r += t.delta * at(t.point, t.order);
        return r;
    }
};

std::string complex_text(Complex z)
{
    std::ostringstream os;
    os.precision(6);
    os << "(" << z.real() << ", " << z.imag() << ")";
    return os.str();
}

}  // namespace

DiscretizedOperator discretize(const BvpProblem& problem, Index n)
{
    if (n < 8)
        throw DomainError("discretize: need at least 8 interior nodes");
    problem.validate();
    const Index d = problem.dim;
    const Index nodes = n + 2;
    const double h = problem.length / static_cast<double>(n + 1);
    const Stencils st{nodes, h};

    const Vector l1 = st.functional(problem.L1);
    const Vector l2 = st.functional(problem.L2);
    Eigen::Matrix2cd G;
    G << l1(0), l1(nodes - 1), l2(0), l2(nodes - 1);
    const double scale = G.cwiseAbs().maxCoeff();
    if (scale == 0.0 || std::abs(G.determinant()) <= 1e-12 * scale * scale) {
        const Complex eta = characteristic_data(problem, 0.5 * problem.length).eta;
        throw NumericalError("discretize: boundary elimination is singular (eta = " + complex_text(eta) + ")");
    }
    Matrix R(2, n);
    R.row(0) = l1.segment(1, n).transpose();
    R.row(1) = l2.segment(1, n).transpose();
    const Matrix boundary = -G.inverse() * R;  // rows give u_0 and u_{n+1}

    Matrix D1full = Matrix::Zero(n, nodes);
    Matrix D2full = Matrix::Zero(n, nodes);
    for (Index r = 0; r < n; ++r) {
        const Index i = r + 1;
        D2full(r, i - 1) = 1.0 / (h * h);
        D2full(r, i) = -2.0 / (h * h);
        D2full(r, i + 1) = 1.0 / (h * h);
        D1full(r, i - 1) = -1.0 / (2.0 * h);
        D1full(r, i + 1) = 1.0 / (2.0 * h);
    }
    auto reduce = [&](const Matrix& full) {
        Matrix D = full.middleCols(1, n);
        D += full.col(0) * boundary.row(0);
        D += full.col(nodes - 1) * boundary.row(1);
        return D;
    };

    DiscretizedOperator op;
    op.n = n;
    op.dim = d;
    op.h = h;
    op.D1 = reduce(D1full);
    op.D2 = reduce(D2full);
    op.nodes.resize(n);
    op.node_weights.resize(n);
    op.A_block = Matrix::Zero(n * d, n * d);
    Matrix Q = Matrix::Zero(n * d, n * d);
    for (Index i = 0; i < n; ++i) {
        const double x = static_cast<double>(i + 1) * h;
        op.nodes(i) = x;
        op.node_weights(i) = h * problem.weight(x);
        const Complex a = problem.a(x);
        const Matrix A = problem.A(x);
        const Matrix B = problem.B(x);
        op.A_block.block(i * d, i * d, d, d) = A;
        for (Index j = 0; j < n; ++j) {
            auto blk = Q.block(i * d, j * d, d, d);
            if (op.D1(i, j) != Complex(0.0))
                blk += op.D1(i, j) * B;
            if (op.D2(i, j) != Complex(0.0))
                blk.diagonal().array() += a * op.D2(i, j);
        }
        Q.block(i * d, i * d, d, d) += A;
    }
    op.Q = OperatorMatrix(std::move(Q), problem.context);
    return op;
}

//
// structural hypotheses: continuity, positivity, subordination, sector, weight
//

std::vector<Complex> sector_samples(double phi, int count)
{
    if (count < 2)
        throw DomainError("sector_samples: need at least 2 radii");
    if (!(phi >= 0.0 && phi < kPi))
        throw DomainError("sector_samples: phi must lie in [0, pi)");
    std::vector<double> angles{0.0};
    if (phi > 0.0)
        angles = {-phi, 0.0, phi};
    std::vector<Complex> out{Complex(0.0)};
    for (const double th : angles)
        for (int k = 0; k < count; ++k)
            out.push_back(std::polar(std::pow(10.0, -2.0 + 6.0 * k / (count - 1)), th));
    return out;
}

namespace {

std::vector<double> midpoints(double length, int count)
{
    std::vector<double> xs;
    for (int i = 0; i < count; ++i)
        xs.push_back((i + 0.5) * length / count);
    return xs;
}

double continuity_jump(const BvpProblem& pr, int count, double p)
{
    const Matrix ref = pr.A(0.5 * pr.length);
    const Matrix ref_inv = Eigen::PartialPivLU<Matrix>(ref).inverse();
    const auto xs = midpoints(pr.length, count);
    double worst = 0.0;
    Matrix prev;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Matrix cur = pr.A(xs[i]) * ref_inv;
        if (i > 0)
            worst = std::max(worst, riesz_thorin_upper(cur - prev, p));
        prev = cur;
    }
    return worst;
}

Matrix negative_fractional_power(const Matrix& A, double s)
{
    const EigenSystem es = eigensystem(A);
    Eigen::PartialPivLU<Matrix> lu(es.vectors);
    Vector powers(es.values.size());
    for (Index i = 0; i < es.values.size(); ++i) {
        const Complex z = es.values(i);
        if (std::abs(z) == 0.0 || (z.imag() == 0.0 && z.real() < 0.0))
            return Matrix::Constant(A.rows(), A.cols(), std::numeric_limits<double>::infinity());
        powers(i) = std::pow(z, -s);
    }
    return es.vectors * powers.asDiagonal() * lu.inverse();
}

}  // namespace

Condition1Report condition1_check(const BvpProblem& problem, int x_samples, int xi_samples,
                                  const Condition1Options& options)
{
    if (x_samples < 2)
        throw DomainError("condition1_check: need at least 2 x samples");
    if (!(options.mu > 0.0 && options.mu < 0.5))
        throw DomainError("condition1_check: mu must lie in (0, 1/2)");
    problem.validate();
    const double p = problem.context.p();
    const auto xs = midpoints(problem.length, x_samples);
    const auto lambdas = sector_samples(options.phi, xi_samples);
    const double inf = std::numeric_limits<double>::infinity();

    Condition1Report r;
    for (const double x : xs) {
        const Matrix A = problem.A(x);
        for (const Complex lambda : lambdas) {
            Matrix shifted = A;
            shifted.diagonal().array() += lambda;
            Eigen::FullPivLU<Matrix> lu(shifted);
            if (!lu.isInvertible()) {
                r.positivity_M = inf;
                continue;
            }
            const Matrix inv = lu.inverse();
            r.positivity_M = std::max(r.positivity_M, (1.0 + std::abs(lambda)) * operator_norm_bounds(inv, p).upper);
        }
    }

    std::vector<double> r_points{xs.front(), xs[xs.size() / 2], xs.back()};
    r_points.erase(std::unique(r_points.begin(), r_points.end()), r_points.end());
    for (const double x : r_points) {
        const Matrix A = problem.A(x);
        if (!Eigen::FullPivLU<Matrix>(A).isInvertible()) {
            r.r_bound = inf;
            continue;
        }
        const auto family = OperatorFamily::resolvent_family(A, lambdas);
        r.r_bound = std::max(r.r_bound, r_bound_estimate(family, problem.context, options.sign_samples, options.seed));
    }

    r.continuity_jump_coarse = continuity_jump(problem, x_samples, p);
    r.continuity_jump_fine = continuity_jump(problem, 2 * x_samples, p);
    r.continuity_holds = r.continuity_jump_fine <= 1e-12 || r.continuity_jump_fine <= 0.75 * r.continuity_jump_coarse;

    const double s = 0.5 - options.mu;
    for (const double x : xs) {
        const Matrix frac = problem.B(x) * negative_fractional_power(problem.A(x), s);
        const double v = frac.allFinite() ? riesz_thorin_upper(frac, p) : inf;
        r.fractional_bound = std::max(r.fractional_bound, v);
    }
    r.fractional_holds = std::isfinite(r.fractional_bound);

    bool a_ok = true;
    r.min_abs_eta = inf;
    for (const double x : xs) {
        const Complex a = problem.a(x);
        if (a == Complex(0.0)) {
            a_ok = false;
            r.min_abs_eta = 0.0;
            continue;
        }
        const Complex minus_a = -a;
        const double arg = std::abs(std::arg(minus_a));
        if (minus_a.imag() == 0.0 && minus_a.real() < 0.0)
            a_ok = false;
        r.phi1 = std::max(r.phi1, arg);
        r.min_abs_eta = std::min(r.min_abs_eta, std::abs(characteristic_data(problem, x).eta));
    }
    r.a_in_sector = a_ok && r.phi1 < kPi && r.phi1 + options.phi2 < options.phi;
    r.eta_nonzero = r.min_abs_eta > 1e-12;
    r.weight_in_ap = problem.weight.exponent >= 0.0 && problem.weight.exponent < p - 1.0;
    r.holds = std::isfinite(r.positivity_M) && std::isfinite(r.r_bound) && r.continuity_holds &&
              r.fractional_holds && r.a_in_sector && r.eta_nonzero && r.weight_in_ap;
    return r;
}

//
// coercive estimate
//

CoerciveReport coercive_estimate_report(const DiscretizedOperator& op, const std::vector<Complex>& lambdas,
                                        int f_samples, std::uint64_t seed)
{
    if (lambdas.empty())
        throw DomainError("coercive_estimate_report: no spectral parameters");
    if (f_samples < 1)
        throw DomainError("coercive_estimate_report: need at least one right-hand side");
    const Index N = op.Q.dim();
    const RealVector w = op.component_weights();
    const double p = op.Q.context().p();
    const Matrix D1 = op.lift(op.D1);
    const Matrix D2 = op.lift(op.D2);
    auto norm = [&](const Vector& v) { return weighted_lp_norm(v, w, p); };

    Rng rng(seed);
    std::vector<Vector> fs;
    for (int s = 0; s < f_samples; ++s)
        fs.push_back(random_vector(N, rng));

    CoerciveReport r;
    for (const Complex lambda : lambdas) {
        Matrix shifted = op.Q.entries();
        shifted.diagonal().array() += lambda;
        Eigen::PartialPivLU<Matrix> lu(shifted);
        if (!(lu.rcond() > 1e-14)) {
            Complex nearest;
            distance_to_spectrum(-eigenvalues(op.Q.entries()), lambda, &nearest);
            throw SpectrumError("coercive_estimate_report: Q + lambda is singular", nearest);
        }
        const double al = std::abs(lambda);
        double worst = 0.0;
        for (const Vector& f : fs) {
            const Vector u = lu.solve(f);
            const double num = al * norm(u) + std::sqrt(al) * norm(D1 * u) + norm(D2 * u) + norm(op.A_block * u);
            worst = std::max(worst, num / norm(f));
        }
        r.lambda_abs.push_back(al);
        r.ratios.push_back(worst);
    }
    const double top = *std::max_element(r.lambda_abs.begin(), r.lambda_abs.end());
    for (std::size_t i = 0; i < r.ratios.size(); ++i) {
        const double al = r.lambda_abs[i];
        r.M_observed = std::max(r.M_observed, r.ratios[i]);
        if (al >= top / 10.0 * (1.0 - 1e-12))
            r.top_decade_max = std::max(r.top_decade_max, r.ratios[i]);
        else if (al >= top / 100.0 * (1.0 - 1e-12))
            r.previous_decade_max = std::max(r.previous_decade_max, r.ratios[i]);
    }
    r.stable_top_two_decades =
        r.previous_decade_max > 0.0 && std::abs(r.top_decade_max / r.previous_decade_max - 1.0) <= 0.1;
    r.bounded = r.M_observed <= 1.1 * r.top_decade_max;
    return r;
}

//
// s-numbers
//

double middle_third_slope(const std::vector<double>& s, Index k, Index* begin, Index* end)
{
    k = std::min<Index>(k, static_cast<Index>(s.size()));
    const Index b = k / 3;
    const Index e = (2 * k) / 3;
    if (e - b < 2)
        throw DomainError("middle_third_slope: window holds fewer than 2 indices");
    if (begin)
        *begin = b;
    if (end)
        *end = e;
    double mx = 0.0, my = 0.0;
    for (Index j = b; j < e; ++j) {
        mx += std::log(static_cast<double>(j + 1));
        my += std::log(s[static_cast<std::size_t>(j)]);
    }
    const double m = static_cast<double>(e - b);
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (Index j = b; j < e; ++j) {
        const double dx = std::log(static_cast<double>(j + 1)) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(s[static_cast<std::size_t>(j)]) - my);
    }
    return sxy / sxx;
}

SNumberFit embedding_snumbers(Index dim, double nu, const ExponentContext& context, const EmbeddingOptions& options)
{
    if (dim < 64)
        throw DomainError("embedding_snumbers: dimension below 64 is too small for a stable fit");
    if (!(nu > 0.0))
        throw DomainError("embedding_snumbers: nu must be positive");
    if (!(options.kappa > 0.0))
        throw DomainError("embedding_snumbers: kappa must be positive");

    BvpProblem model = BvpProblem::scalar_dirichlet(0.0, context);
    model.weight.exponent = options.weight_exponent;
    model.validate();
    const DiscretizedOperator op = discretize(model, options.n);
    const RealMatrix D2 = op.D2.real();
    const RealMatrix W = op.node_weights.asDiagonal();
    const RealMatrix stiff = D2.transpose() * W * D2;

    SNumberFit fit;
    for (Index j = 0; j < dim; ++j) {
        const double a = options.kappa * std::pow(static_cast<double>(j + 1), 1.0 / nu);
        const RealMatrix S = a * a * W + stiff;
        Eigen::GeneralizedSelfAdjointEigenSolver<RealMatrix> ges(W, S, Eigen::EigenvaluesOnly);
        if (ges.info() != Eigen::Success)
            throw NumericalError("embedding_snumbers: generalized eigensolver failed");
        for (Index k = 0; k < ges.eigenvalues().size(); ++k)
            fit.s.push_back(std::sqrt(std::max(0.0, ges.eigenvalues()(k))));
    }
    std::sort(fit.s.begin(), fit.s.end(), std::greater<>());

    Index k = options.k_max;
    if (k == 0) {
        const double thr = 1.0 / (options.kappa * std::pow(static_cast<double>(dim), 1.0 / nu));
        k = static_cast<Index>(std::count_if(fit.s.begin(), fit.s.end(),
                                             [thr](double v) { return v >= thr * (1.0 - 1e-12); }));
    }
    fit.fitted_exponent = middle_third_slope(fit.s, k, &fit.fit_begin, &fit.fit_end);
    fit.target = -2.0 / (2.0 * nu + 1.0);
    fit.asserted = context.is_hilbert();
    fit.holds = std::abs(fit.fitted_exponent - fit.target) <= 0.1;
    return fit;
}

BvpSpectralReport bvp_spectral_report(const DiscretizedOperator& op, const ArcConfiguration& arcs, double q,
                                      const BvpSpectralOptions& options)
{
    BvpSpectralReport r;
    const Matrix& Q = op.Q.entries();
    const Index N = Q.rows();
    r.spectrum = eigenvalues(Q);
    r.min_separation = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < N; ++i) {
        r.max_abs_imag = std::max(r.max_abs_imag, std::abs(r.spectrum(i).imag()));
        for (Index j = i + 1; j < N; ++j)
            r.min_separation = std::min(r.min_separation, std::abs(r.spectrum(i) - r.spectrum(j)));
    }

    const RealVector w = op.component_weights();
    Matrix shifted = Q;
    shifted.diagonal().array() += options.lambda0;
    Eigen::PartialPivLU<Matrix> lu(shifted);
    if (!(lu.rcond() > 1e-14))
        throw SpectrumError("bvp_spectral_report: Q + lambda0 is singular", -options.lambda0);
    const Matrix T =
        w.cwiseSqrt().asDiagonal() * lu.solve(Matrix::Identity(N, N)) * w.cwiseSqrt().cwiseInverse().asDiagonal();
    Eigen::BDCSVD<Matrix> svd(T);
    const RealVector sv = svd.singularValues();
    r.resolvent_fit.s.assign(sv.data(), sv.data() + sv.size());

    double a_max = 0.0;
    const Vector a_eigs = eigenvalues(op.A_block);
    for (Index i = 0; i < a_eigs.size(); ++i)
        a_max = std::max(a_max, std::abs(a_eigs(i)));
    const double thr = a_max > 0.0 ? 1.0 / a_max : 0.0;
    Index k = static_cast<Index>(std::count_if(r.resolvent_fit.s.begin(), r.resolvent_fit.s.end(),
                                               [thr](double v) { return v >= thr * (1.0 - 1e-12); }));
    if (k < 12)
        k = N;
    r.resolvent_fit.fitted_exponent =
        middle_third_slope(r.resolvent_fit.s, k, &r.resolvent_fit.fit_begin, &r.resolvent_fit.fit_end);
    r.resolvent_fit.target = -2.0 / (2.0 * options.nu + 1.0);
    r.resolvent_fit.asserted = false;
    r.resolvent_fit.holds = std::abs(r.resolvent_fit.fitted_exponent - r.resolvent_fit.target) <= 0.1;

    r.phi_holds = options.phi <= kPi / (2.0 * q);
    r.q_holds = q > options.nu + 0.5;

    CompletenessOptions copt;
    copt.cluster_tol = options.cluster_tol;
    copt.weights = w;
    r.completeness = completeness_verdict(op.Q, 0, arcs, options.sample_count, options.seed, copt);
    r.root_distance = r.completeness.max_distance;
    return r;
}

//
// degenerate substitution
//

double DegenerateTransform::y_of_x(double x) const
{
    return std::pow(x, 1.0 - gamma) / (1.0 - gamma);
}

double DegenerateTransform::x_of_y(double y) const
{
    return degenerate_inverse(gamma, y);
}

DegenerateTransform degenerate_transform(const BvpProblem& problem, double gamma, WeightReading reading)
{
    if (!(gamma > 0.0 && gamma < 1.0))
        throw DomainError("degenerate_transform: gamma must lie in (0, 1)");
    problem.validate();
    DegenerateTransform t;
    t.gamma = gamma;
    t.reading = reading;
    t.b = t.y_of_x(problem.length);

    auto compose = [gamma](const Json& inner) { return Json{{"kind", "composed"}, {"gamma", gamma}, {"inner", inner}}; };
    BvpProblem reg = problem;
    reg.length = t.b;
    reg.a = ScalarCoefficient::from_json(compose(problem.a.spec()));
    reg.A = MatrixCoefficient::from_json(compose(problem.A.spec()), problem.dim);
    reg.B = MatrixCoefficient::from_json(compose(problem.B.spec()), problem.dim);
    for (BoundaryFunctional* L : {&reg.L1, &reg.L2})
        for (auto& term : L->interior)
            term.point = t.y_of_x(term.point);

    // w(x(y)) times x(y)^γ (chain rule) or x(y) (printed)
    const double extra = reading == WeightReading::chain_rule ? gamma : 1.0;
    const double e = (problem.weight.exponent + extra) / (1.0 - gamma);
    reg.weight.exponent = e;
    reg.weight.coefficient = problem.weight.coefficient * std::pow(1.0 - gamma, e);
    reg.validate();
    t.regular = std::move(reg);
    return t;
}

namespace {

double poly_value(const std::vector<double>& c, double x)
{
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
        acc = acc * x + *it;
    return acc;
}

double poly_derivative(const std::vector<double>& c, double x)
{
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;)
        acc = acc * x + static_cast<double>(k) * c[k];
    return acc;
}

std::vector<double> check_grid(int points)
{
    if (points < 2)
        throw DomainError("need at least 2 grid points");
    std::vector<double> xs;
    for (int k = 0; k < points; ++k)
        xs.push_back(0.05 + 0.9 * k / (points - 1));
    return xs;
}

}  // namespace

double chain_rule_residual(const DegenerateTransform& t, const std::vector<double>& poly, int grid_points)
{
    auto U = [&](double y) { return poly_value(poly, t.x_of_y(y)); };
    double worst = 0.0;
    for (const double x : check_grid(grid_points)) {
        const double exact = std::pow(x, t.gamma) * poly_derivative(poly, x);
        const double y = t.y_of_x(x);
        const double h = 1e-3 * y;
        auto central = [&](double s) { return (U(y + s) - U(y - s)) / (2.0 * s); };
        const double richardson = (4.0 * central(h / 2.0) - central(h)) / 3.0;
        worst = std::max(worst, std::abs(richardson - exact));
    }
    return worst;
}

double round_trip_error(const DegenerateTransform& t, int grid_points)
{
    double worst = 0.0;
    for (const double x : check_grid(grid_points))
        worst = std::max(worst, std::abs(t.x_of_y(t.y_of_x(x)) - x) / x);
    return worst;
}

}  // namespace rootspan
