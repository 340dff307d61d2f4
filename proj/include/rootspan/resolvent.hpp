#pragma once
//
// Resolvents, the regularized product φ_λ(A), Carleman-type bounds, ray scans
// with decay-order fits and the sector geometry of ray configurations.
//

#include <vector>

#include "rootspan/banach_geometry.hpp"
#include "rootspan/core.hpp"

namespace rootspan {

/// (λI − A)^{-1}; throws SpectrumError when λ is within 1e-12 of the spectrum.
OperatorMatrix resolvent(const OperatorMatrix& A, Complex lambda);

/// Π_i (1 − λ_i/λ) e^{λ_i/λ} over the eigenvalues of A.
Complex regularized_determinant(const OperatorMatrix& A, Complex lambda);

/// log|φ_λ(A)|, finite even when the product itself overflows.
double log_abs_regularized_determinant(const Vector& eigenvalues, Complex lambda);

struct CarlemanReport {
    NormBounds lhs;             // bracket of ‖φ_λ(A)(λ − A)^{-1}‖
    double rhs = 0.0;           // |λ| exp(½(1 + σ_p(A)^p / |λ|²)); may be +inf
    double log_lhs_upper = 0.0;
    double log_rhs = 0.0;
    bool satisfied_at_bracket = false;
    bool asserted = false;      // p = 2 with the canonical system
};

CarlemanReport carleman_report(const OperatorMatrix& A, const BiorthogonalSystem& system, Complex lambda);

struct QuasinilpotentResolventReport {
    NormBounds lhs;   // bracket of ‖(λ − N)^{-1}‖
    double rhs = 0.0; // |λ| exp(M(1 + σ_p(N/λ)^p))
    bool satisfied = false;
};

QuasinilpotentResolventReport quasinilpotent_resolvent_report(const OperatorMatrix& N,
                                                              const BiorthogonalSystem& system,
                                                              Complex lambda, double M = 1.0);

/// Rays from the origin at sorted angles in [0, 2π).
class ArcConfiguration {
  public:
    ArcConfiguration(std::vector<double> angles, ExponentContext context);

    static ArcConfiguration equally_spaced(int s, ExponentContext context, double offset = 0.0);

    const std::vector<double>& angles() const noexcept { return angles_; }
    const ExponentContext& context() const noexcept { return context_; }

    /// Angular gaps between successive rays, the last one wrapping through 2π.
    std::vector<double> openings() const;

  private:
    std::vector<double> angles_;
    ExponentContext context_;
};

struct SectorReport {
    double max_opening = 0.0;
    double threshold = 0.0;  // π/p
    bool holds = false;
};

SectorReport sector_condition_check(const ArcConfiguration& arcs);

enum class ScanRegime { origin, infinity };

struct RayScan {
    double angle = 0.0;
    ScanRegime regime = ScanRegime::origin;
    std::vector<double> radii;  // decreasing
    std::vector<NormBounds> norms;
    double fitted_order = 0.0;
    double r_squared = 0.0;
    bool confident = false;  // r_squared ≥ 0.99
};

//
// Samples ‖R(r e^{iθ}, A)‖ on a log grid between r_min and r_max and fits the
// slope of log‖R‖ against −log r over the decade at the end selected by the
// regime (smallest radii for origin, largest for infinity).
//
RayScan ray_scan(const OperatorMatrix& A, double theta, double r_min, double r_max, int points,
                 ScanRegime regime = ScanRegime::origin);

}  // namespace rootspan
