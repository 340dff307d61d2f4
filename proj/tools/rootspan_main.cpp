//
// rootspan command line: verification suites, BVP runs and plot tables.
//
// Exit status: 0 all asserted checks hold, 1 an asserted check failed,
// 2 invalid configuration or arguments, 3 numerical failure in a check.
//
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rootspan/report.hpp"
#include "rootspan/serialization.hpp"
#include "rootspan/suites.hpp"

namespace {

constexpr int kAssertedFailure = 1;
constexpr int kInvalid = 2;
constexpr int kNumerical = 3;

void print_summary(const rootspan::Report& rep, const std::vector<std::string>& paths)
{
    for (const auto& r : rep.records)
        if (r.asserted && !r.holds)
            std::cerr << "FAILED " << r.name << ": observed " << rootspan::format_number(r.observed) << ", bound "
                      << rootspan::format_number(r.bound) << "\n";
    const auto s = rep.summary();
    std::cout << rep.suite << ": " << s.total << " checks, " << s.asserted << " asserted, " << s.asserted_failed
              << " asserted failures\n";
    for (const auto& p : paths)
        std::cout << "wrote " << p << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"rootspan: finite-section spectral checks and nonlocal BVP experiments"};
    app.require_subcommand(1);

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    std::string suite, config_path, out_dir;
    std::int64_t seed = 0;
    verify->add_option("suite", suite, "schatten | trace | resolvent | completeness | bvp")->required();
    verify->add_option("--config", config_path, "TOML or JSON suite config");
    verify->add_option("--seed", seed, "override the config seed");
    verify->add_option("--out", out_dir, "output directory");

    auto* bvp = app.add_subcommand("bvp", "boundary value problem experiments");
    bvp->require_subcommand(1);
    auto* bvp_run = bvp->add_subcommand("run", "discretize a problem and report its spectral data");
    std::string bvp_config, bvp_out = ".";
    long long grid = 64;
    bvp_run->add_option("--config", bvp_config, "TOML or JSON problem document")->required();
    bvp_run->add_option("--n", grid, "interior grid nodes");
    bvp_run->add_option("--out", bvp_out, "output directory");

    auto* plot = app.add_subcommand("plot", "emit a plot-ready CSV table from a report");
    std::string report_path, kind, plot_out;
    plot->add_option("--report", report_path, "report JSON")->required();
    plot->add_option("--kind", kind, "snumbers | rayscan | spectrum")->required();
    plot->add_option("--out", plot_out, "CSV file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kInvalid;
    }

    try {
        if (*verify) {
            nlohmann::json doc = config_path.empty() ? nlohmann::json::object() : rootspan::load_document(config_path);
            if (!doc.is_object())
                throw rootspan::ConfigError("config must be a table/object");
            if (doc.contains("suite") && doc["suite"] != suite)
                throw rootspan::ConfigError("config suite does not match the command line");
            doc["suite"] = suite;
            if (verify->count("--seed"))
                doc["seed"] = seed;
            if (!out_dir.empty())
                doc["out"] = out_dir;
            const auto cfg = rootspan::SuiteConfig::from_json(doc);
            const auto rep = rootspan::run_suite(cfg);
            print_summary(rep, rootspan::write_report_files(rep, cfg.out_dir, cfg.suite));
            return rep.all_asserted_hold() ? 0 : kAssertedFailure;
        }
        if (*bvp_run) {
            const auto doc = rootspan::load_document(bvp_config);
            const auto rep = rootspan::run_bvp(doc, static_cast<rootspan::Index>(grid));
            print_summary(rep, rootspan::write_report_files(rep, bvp_out, "bvp_run"));
            return rep.all_asserted_hold() ? 0 : kAssertedFailure;
        }
        if (*plot) {
            const auto rep = rootspan::Report::from_json(rootspan::load_document(report_path));
            const std::string csv = rootspan::plot_data(rep, kind);
            if (plot_out.empty()) {
                std::cout << csv;
            } else {
                std::ofstream out(plot_out, std::ios::binary);
                if (!out)
                    throw rootspan::ConfigError("cannot write " + plot_out);
                out << csv;
            }
            return 0;
        }
    } catch (const rootspan::CheckFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const rootspan::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return 0;
}
