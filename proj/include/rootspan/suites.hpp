#pragma once
//
// Verification suites: configuration, deterministic check batteries and the
// file layout of their output.
//
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rootspan/core.hpp"
#include "rootspan/report.hpp"

namespace rootspan {

/// Rejected configuration; the CLI maps it to exit status 2.
class ConfigError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Numerical failure inside a named check; the CLI maps it to exit status 3.
class CheckFailure : public Error {
  public:
    CheckFailure(std::string check, const std::string& what)
        : Error("check '" + check + "' failed: " + what), check_(std::move(check)) {}
    const std::string& check() const noexcept { return check_; }

  private:
    std::string check_;
};

struct SuiteConfig {
    std::string suite;
    std::uint64_t seed = 1;
    std::vector<Index> dims;      // matrix sizes (bvp: grid sizes)
    std::vector<double> ps;       // exponents
    int samples = 0;              // per battery; 0 picks the suite default
    std::map<std::string, double> tolerances;
    std::string out_dir = ".";
    double c = 1.0;               // bvp scalar model A = c
    Index embedding_dim = 128;    // bvp s-number model d = n

    /// Parses and validates; missing fields take the suite defaults.
    static SuiteConfig from_json(const nlohmann::json& doc);
    /// Echo of the effective configuration (out_dir excluded).
    nlohmann::json to_json() const;

    double tolerance(const std::string& name) const;
};

const std::vector<std::string>& suite_names();

/// Default tolerance table; overrides must use these names.
const std::map<std::string, double>& default_tolerances();

Report run_suite(const SuiteConfig& config);

/// BVP experiment on a problem document at grid size n. Optional "run" keys:
/// arcs, q, nu, phi, lambda0, samples, seed.
Report run_bvp(const nlohmann::json& doc, Index n);

/// Writes <out>/<name>_report.json and <out>/<name>_<series>.csv; returns the paths.
std::vector<std::string> write_report_files(const Report& report, const std::string& out_dir, const std::string& name);

/// CSV for kind ∈ {snumbers, rayscan, spectrum}; ConfigError otherwise or when absent.
std::string plot_data(const Report& report, const std::string& kind);

}  // namespace rootspan
