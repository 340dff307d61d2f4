#pragma once
//
// Check records and suite reports with deterministic JSON and CSV output.
//
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace rootspan {

inline constexpr const char* kVersion = "rootspan 0.1.0";

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string digest(const std::string& text);

struct CheckRecord {
    std::string name;
    std::string digest;  // of the input description
    double observed = 0.0;
    double bound = 0.0;
    bool holds = false;
    bool asserted = true;  // report-only records never fail a run
};

/// Plot-ready table.
struct Series {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct Summary {
    int total = 0;
    int held = 0;
    int asserted = 0;
    int asserted_failed = 0;
};

struct Report {
    std::string suite;
    std::string version = kVersion;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json notes = nlohmann::json::object();
    std::vector<CheckRecord> records;
    std::map<std::string, Series> series;

    /// Appends a record; the digest is taken of inputs.
    CheckRecord& add(const std::string& name, const std::string& inputs, double observed, double bound, bool holds,
                     bool asserted = true);

    Summary summary() const;
    bool all_asserted_hold() const;

    nlohmann::json to_json() const;
    static Report from_json(const nlohmann::json& j);
};

/// Header line followed by one line per row, 17 significant digits.
std::string series_to_csv(const Series& s);

}  // namespace rootspan
