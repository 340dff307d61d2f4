#include "rootspan/report.hpp"

#include <cstdint>
#include <cstdio>

#include "rootspan/core.hpp"
#include "rootspan/serialization.hpp"

namespace rootspan {

std::string digest(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CheckRecord& Report::add(const std::string& name, const std::string& inputs, double observed, double bound,
                         bool holds, bool asserted)
{
    records.push_back({name, digest(inputs), observed, bound, holds, asserted});
    return records.back();
}

Summary Report::summary() const
{
    Summary s;
    for (const auto& r : records) {
        ++s.total;
        s.held += r.holds ? 1 : 0;
        if (r.asserted) {
            ++s.asserted;
            s.asserted_failed += r.holds ? 0 : 1;
        }
    }
    return s;
}

bool Report::all_asserted_hold() const
{
    return summary().asserted_failed == 0;
}

nlohmann::json Report::to_json() const
{
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records)
        recs.push_back({{"name", r.name},
                        {"digest", r.digest},
                        {"observed", r.observed},
                        {"bound", r.bound},
                        {"holds", r.holds},
                        {"asserted", r.asserted}});
    nlohmann::json ser = nlohmann::json::object();
    for (const auto& [name, s] : series)
        ser[name] = {{"columns", s.columns}, {"rows", s.rows}};
    const Summary s = summary();
    return {{"suite", suite},
            {"version", version},
            {"config", config},
            {"notes", notes},
            {"records", recs},
            {"series", ser},
            {"summary",
             {{"total", s.total}, {"held", s.held}, {"asserted", s.asserted}, {"asserted_failed", s.asserted_failed}}}};
}

Report Report::from_json(const nlohmann::json& j)
{
    Report r;
    try {
        r.suite = j.at("suite").get<std::string>();
        r.version = j.value("version", std::string(kVersion));
        r.config = j.value("config", nlohmann::json::object());
        r.notes = j.value("notes", nlohmann::json::object());
        for (const auto& rec : j.at("records")) {
            const auto num = [&rec](const char* k) { return rec.at(k).is_null() ? std::nan("") : rec.at(k).get<double>(); };
            r.records.push_back({rec.at("name").get<std::string>(), rec.at("digest").get<std::string>(),
                                 num("observed"), num("bound"), rec.at("holds").get<bool>(),
                                 rec.value("asserted", true)});
        }
        if (j.contains("series"))
            for (const auto& [name, s] : j["series"].items()) {
                Series out;
                out.columns = s.at("columns").get<std::vector<std::string>>();
                for (const auto& row : s.at("rows")) {
                    std::vector<double> v;
                    for (const auto& x : row)
                        v.push_back(x.is_null() ? std::nan("") : x.get<double>());
                    out.rows.push_back(std::move(v));
                }
                r.series[name] = std::move(out);
            }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed report: ") + e.what());
    }
    return r;
}

std::string series_to_csv(const Series& s)
{
    std::string out;
    for (std::size_t i = 0; i < s.columns.size(); ++i)
        out += (i ? "," : "") + s.columns[i];
    out += "\n";
    for (const auto& row : s.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + format_number(row[i]);
        out += "\n";
    }
    return out;
}

}  // namespace rootspan
