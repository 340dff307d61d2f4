#pragma once
//
// Nonlocal second-order boundary value problems with ℂ^d-valued unknowns:
// problem description, finite-difference discretization, structural hypothesis
// checks, coercive estimates, s-number asymptotics and the degenerate
// substitution.
//
// Sign convention: Q u = a u'' + B u' + A u and resolvent work uses (Q + λ).
//

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "rootspan/core.hpp"
#include "rootspan/resolvent.hpp"
#include "rootspan/rootspace.hpp"

namespace rootspan {

using Json = nlohmann::json;

/// Complex scalar read from a number or an [re, im] pair.
Complex complex_from_json(const Json& j);
Json complex_to_json(Complex z);

//
// Coefficient functions. Builtins (JSON "kind"):
//   constant   {"value": c}                        c
//   affine     {"c0": c0, "c1": c1}                c0 + c1 x
//   tabulated  {"x": [...], "values": [...]}       piecewise linear
//   composed   {"gamma": g, "inner": spec}         inner(((1-g) x)^{1/(1-g)})
// Matrix coefficients accept the same kinds (times the identity, or times a
// "diag" list when given) plus
//   zero
//   diag_power {"scale": k, "nu": v}               k diag(j^{1/v})
//   matrix     {"entries": [[re,im],...]}          constant d×d, row-major
//
class ScalarCoefficient {
  public:
    static ScalarCoefficient from_json(const Json& spec);
    static ScalarCoefficient constant(Complex c);

    Complex operator()(double x) const { return fn_(x); }
    const Json& spec() const noexcept { return spec_; }

  private:
    Json spec_;
    std::function<Complex(double)> fn_;
};

class MatrixCoefficient {
  public:
    static MatrixCoefficient from_json(const Json& spec, Index dim);
    static MatrixCoefficient zero(Index dim);
    static MatrixCoefficient scaled_identity(Complex c, Index dim);
    static MatrixCoefficient diag_power(double scale, double nu, Index dim);

    Matrix operator()(double x) const { return fn_(x); }
    const Json& spec() const noexcept { return spec_; }
    Index dim() const noexcept { return dim_; }

  private:
    Json spec_;
    Index dim_ = 0;
    std::function<Matrix(double)> fn_;
};

struct InteriorTerm {
    double point = 0.5;
    Complex delta = 0.0;
    int order = 0;  // 0: u(x*), 1: u'(x*)
};

/// Σ_{i≤m} [α_i u^{(i)}(0) + β_i u^{(i)}(L)] + Σ_j δ_j u^{(order_j)}(x_j) = 0
struct BoundaryFunctional {
    int order = 0;
    std::vector<Complex> alpha{1.0};
    std::vector<Complex> beta{0.0};
    std::vector<InteriorTerm> interior;

    Complex top_alpha() const { return alpha.at(static_cast<std::size_t>(order)); }
    Complex top_beta() const { return beta.at(static_cast<std::size_t>(order)); }
};

/// w(x) = coefficient · x^exponent
struct WeightSpec {
    double coefficient = 1.0;
    double exponent = 0.0;
    double operator()(double x) const;
};

struct BvpProblem {
    Index dim = 1;
    double length = 1.0;
    ScalarCoefficient a = ScalarCoefficient::constant(-1.0);
    MatrixCoefficient A = MatrixCoefficient::scaled_identity(1.0, 1);
    MatrixCoefficient B = MatrixCoefficient::zero(1);
    BoundaryFunctional L1;
    BoundaryFunctional L2{0, {0.0}, {1.0}, {}};
    WeightSpec weight;
    ExponentContext context{2.0};

    /// Throws DomainError on structural violations (shapes, orders, interior
    /// points outside (0, L), nonpositive weight coefficient, exponent ≤ −1).
    void validate() const;

    static BvpProblem from_json(const Json& doc);
    Json to_json() const;

    /// a = −1, A = c, B = b, Dirichlet conditions, d = 1.
    static BvpProblem scalar_dirichlet(double c, ExponentContext context = ExponentContext(2.0), double b = 0.0);
    /// a = −1, A = κ diag(j^{1/ν}), B = 0, Dirichlet conditions.
    static BvpProblem diagonal_model(Index dim, double kappa, double nu, ExponentContext context = ExponentContext(2.0));
};

struct CharacteristicData {
    Complex omega1;
    Complex omega2;
    Complex eta;
};

CharacteristicData characteristic_data(const BvpProblem& problem, double x);

struct DiscretizedOperator {
    Index n = 0;    // interior nodes
    Index dim = 1;  // d
    double h = 0.0;
    RealVector nodes;
    RealVector node_weights;   // h · w(x_i)
    Matrix D1;                 // n×n, boundary rows eliminated
    Matrix D2;                 // n×n, boundary rows eliminated
    Matrix A_block;            // (n d)×(n d) block diagonal
    OperatorMatrix Q{Matrix::Zero(1, 1), ExponentContext(2.0)};

    /// node_weights repeated for each of the d components
    RealVector component_weights() const;

    /// (Σ_i h w(x_i) ‖u_i‖_p^p)^{1/p}
    double weighted_norm(const Vector& u) const;

    /// D ⊗ I_d
    Matrix lift(const Matrix& D) const;
};

//
// Second-order central differences on x_i = i h, h = L/(n+1); one-sided
// second-order stencils at the endpoints, linear interpolation at interior
// points, and elimination of u_0, u_{n+1} through the two boundary rows.
//
DiscretizedOperator discretize(const BvpProblem& problem, Index n);

struct Condition1Options {
    double phi = kPi / 2.0;   // sector of R-positivity of A
    double phi2 = kPi / 4.0;  // sector of the spectral parameter
    double mu = 0.25;
    int sign_samples = 64;
    std::uint64_t seed = 1;
};

struct Condition1Report {
    double positivity_M = 0.0;
    double r_bound = 0.0;
    double continuity_jump_coarse = 0.0;
    double continuity_jump_fine = 0.0;
    bool continuity_holds = false;
    double fractional_bound = 0.0;  // max ‖B A^{−(1/2−μ)}‖
    bool fractional_holds = false;
    double phi1 = 0.0;              // max |arg(−a)|
    bool a_in_sector = false;       // a ≠ 0, −a off the negative axis, φ1 + φ2 < φ
    double min_abs_eta = 0.0;
    bool eta_nonzero = false;
    bool weight_in_ap = false;      // 0 ≤ exponent < p − 1
    bool holds = false;
};

/// Spectral parameters used by the positivity scan: 0 and count log-spaced
/// radii in [1e-2, 1e4] on each of the rays arg λ ∈ {−φ, 0, φ}.
std::vector<Complex> sector_samples(double phi, int count);

Condition1Report condition1_check(const BvpProblem& problem, int x_samples, int xi_samples,
                                  const Condition1Options& options = {});

struct CoerciveReport {
    std::vector<double> lambda_abs;
    std::vector<double> ratios;  // max over f per λ
    double M_observed = 0.0;
    double top_decade_max = 0.0;
    double previous_decade_max = 0.0;
    bool stable_top_two_decades = false;  // |top/previous − 1| ≤ 0.1
    bool bounded = false;                 // M_observed ≤ 1.1 · top_decade_max
};

CoerciveReport coercive_estimate_report(const DiscretizedOperator& op, const std::vector<Complex>& lambdas,
                                        int f_samples = 8, std::uint64_t seed = 1);

struct EmbeddingOptions {
    double kappa = 100.0;
    Index n = 128;
    double weight_exponent = 0.0;
    Index k_max = 0;  // 0: all s_j ≥ 1/(κ d^{1/ν})
};

struct SNumberFit {
    std::vector<double> s;  // descending
    Index fit_begin = 0;    // 0-based, half-open window
    Index fit_end = 0;
    double fitted_exponent = 0.0;
    double target = 0.0;    // −2/(2ν+1)
    bool asserted = false;  // p = 2
    bool holds = false;     // |fitted − target| ≤ 0.1
};

//
// Singular values of the discrete embedding of the graph-normed space
// (‖Au‖² + ‖u''‖²)^{1/2} into the weighted L_2 space, A = κ diag(j^{1/ν}),
// Dirichlet grid with n nodes. Fit of log s_j against log j over the middle
// third of the first k_max indices.
//
SNumberFit embedding_snumbers(Index dim, double nu, const ExponentContext& context, const EmbeddingOptions& options = {});

/// Least-squares slope of log s_j against log j over the middle third of [0, k).
double middle_third_slope(const std::vector<double>& s, Index k, Index* begin = nullptr, Index* end = nullptr);

struct BvpSpectralOptions {
    double nu = 1.0;
    double phi = 0.0;
    Complex lambda0 = 1.0;
    int sample_count = 8;
    std::uint64_t seed = 1;
    double cluster_tol = 1e-6;
};

struct BvpSpectralReport {
    Vector spectrum;
    double min_separation = 0.0;
    double max_abs_imag = 0.0;
    SNumberFit resolvent_fit;
    bool phi_holds = false;  // φ ≤ π/(2q)
    bool q_holds = false;    // q > ν + 1/2
    CompletenessVerdict completeness;
    double root_distance = 0.0;
};

BvpSpectralReport bvp_spectral_report(const DiscretizedOperator& op, const ArcConfiguration& arcs, double q,
                                      const BvpSpectralOptions& options = {});

enum class WeightReading { chain_rule, printed };

struct DegenerateTransform {
    BvpProblem regular;
    double b = 1.0;
    double gamma = 0.0;
    WeightReading reading = WeightReading::chain_rule;

    double y_of_x(double x) const;
    double x_of_y(double y) const;
};

//
// For the degenerate problem with derivatives (x^γ d/dx)^i, 0 < γ < 1: the
// substitution y = x^{1−γ}/(1−γ) maps (0, 1) onto (0, b), b = 1/(1−γ).
// Coefficients are composed with x(y), interior points are mapped, and the
// new weight is x(y)^γ = ((1−γ)y)^{γ/(1−γ)} (chain rule reading) or
// ((1−γ)y)^{1/(1−γ)} (printed reading).
//
DegenerateTransform degenerate_transform(const BvpProblem& problem, double gamma,
                                         WeightReading reading = WeightReading::chain_rule);

/// max over x in [0.05, 0.95] of |x^γ u'(x) − d/dy u(x(y))| for the polynomial
/// u(x) = Σ c_k x^k; the y-derivative by Richardson-extrapolated differences.
double chain_rule_residual(const DegenerateTransform& t, const std::vector<double>& poly, int grid_points = 91);

/// max over the same grid of |x(y(x)) − x| relative to x
double round_trip_error(const DegenerateTransform& t, int grid_points = 91);

}  // namespace rootspan
