#include "rootspan/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#define TOML_HEADER_ONLY 1
#include <toml.hpp>

namespace rootspan {

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_string(std::ostringstream& os, const std::string& s)
{
    os << Json(s).dump();
}

void write_value(std::ostringstream& os, const Json& j, int indent, int depth)
{
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{" << nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                os << "," << nl;
            first = false;
            os << pad;
            write_string(os, it.key());
            os << (indent > 0 ? ": " : ":");
            write_value(os, it.value(), indent, depth + 1);
        }
        os << nl << close_pad << "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        // arrays of scalars stay on one line
        bool flat = true;
        for (const auto& e : j)
            if (e.is_structured() && !(e.is_array() && e.size() <= 2 && !e.empty() && e[0].is_number()))
                flat = false;
        os << "[";
        bool first = true;
        for (const auto& e : j) {
            if (!first)
                os << (flat ? ", " : ",");
            if (!flat)
                os << nl << pad;
            first = false;
            write_value(os, e, flat ? 0 : indent, depth + 1);
        }
        if (!flat)
            os << nl << close_pad;
        os << "]";
        return;
    }
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        os << (std::isfinite(v) ? format_number(v) : "null");
        return;
    }
    default:
        os << j.dump();
    }
}

Json toml_to_json(const toml::node& node)
{
    if (const auto* t = node.as_table()) {
        Json out = Json::object();
        for (const auto& [k, v] : *t)
            out[std::string(k.str())] = toml_to_json(v);
        return out;
    }
    if (const auto* a = node.as_array()) {
        Json out = Json::array();
        for (const auto& v : *a)
            out.push_back(toml_to_json(v));
        return out;
    }
    if (const auto* s = node.as_string())
        return s->get();
    if (const auto* i = node.as_integer())
        return i->get();
    if (const auto* f = node.as_floating_point())
        return f->get();
    if (const auto* b = node.as_boolean())
        return b->get();
    std::ostringstream os;
    if (const auto* d = node.as_date())
        os << *d;
    else if (const auto* tm = node.as_time())
        os << *tm;
    else if (const auto* dt = node.as_date_time())
        os << *dt;
    return os.str();
}

std::vector<Complex> pairs(const Json& j, const char* what)
{
    if (!j.is_array())
        throw DomainError(std::string(what) + " must be a list of [re, im] pairs");
    std::vector<Complex> out;
    for (const auto& e : j)
        out.push_back(complex_from_json(e));
    return out;
}

Json column_pairs(const Matrix& M)
{
    Json out = Json::array();
    for (Index j = 0; j < M.cols(); ++j)
        for (Index i = 0; i < M.rows(); ++i)
            out.push_back(complex_to_json(M(i, j)));
    return out;
}

Matrix columns_from_pairs(const std::vector<Complex>& v, Index n, const char* what)
{
    if (static_cast<Index>(v.size()) != n * n)
        throw DomainError(std::string(what) + " must hold n*n entries");
    Matrix M(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            M(i, j) = v[static_cast<std::size_t>(j * n + i)];
    return M;
}

Json vector_json(const Vector& v)
{
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i)
        out.push_back(complex_to_json(v(i)));
    return out;
}

}  // namespace

std::string write_json(const Json& j, int indent)
{
    std::ostringstream os;
    write_value(os, j, indent, 0);
    os << "\n";
    return os.str();
}

Json parse_json(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw DomainError(std::string("invalid JSON: ") + e.what());
    }
}

Json parse_toml(const std::string& text)
{
    try {
        const toml::table t = toml::parse(text);
        return toml_to_json(t);
    } catch (const toml::parse_error& e) {
        throw DomainError(std::string("invalid TOML: ") + std::string(e.description()));
    }
}

Json load_document(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DomainError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const bool toml = path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0;
    return toml ? parse_toml(buf.str()) : parse_json(buf.str());
}

Json system_to_json(const BiorthogonalSystem& s)
{
    return {{"n", s.dim()}, {"p", s.context().p()}, {"e", column_pairs(s.primal())}, {"f", column_pairs(s.dual())}};
}

BiorthogonalSystem system_from_json(const Json& j)
{
    const Index n = j.at("n").get<Index>();
    if (n < 1)
        throw DomainError("system dimension must be positive");
    const ExponentContext ctx(j.at("p").get<double>());
    return {columns_from_pairs(pairs(j.at("e"), "e"), n, "e"), columns_from_pairs(pairs(j.at("f"), "f"), n, "f"), ctx};
}

Json weight_to_json(const PowerWeight& w)
{
    return {{"gamma", w.gamma()}, {"b", w.b()}};
}

PowerWeight weight_from_json(const Json& j)
{
    return PowerWeight(j.at("gamma").get<double>(), j.value("b", 1.0));
}

Json matrix_to_json(const Matrix& M)
{
    Json entries = Json::array();
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j)
            entries.push_back(complex_to_json(M(i, j)));
    return {{"n", M.rows()}, {"entries", entries}};
}

Matrix matrix_from_json(const Json& j)
{
    const Index n = j.at("n").get<Index>();
    if (n < 1)
        throw DomainError("matrix dimension must be positive");
    const auto e = pairs(j.at("entries"), "entries");
    if (static_cast<Index>(e.size()) != n * n)
        throw DomainError("matrix entries must hold n*n pairs");
    Matrix M(n, n);
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < n; ++c)
            M(r, c) = e[static_cast<std::size_t>(r * n + c)];
    return M;
}

Matrix matrix_from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
            continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw DomainError("matrix CSV: not a number: '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    const Index n = static_cast<Index>(rows.size());
    if (n == 0)
        throw DomainError("matrix CSV is empty");
    Matrix M(n, n);
    for (Index r = 0; r < n; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (static_cast<Index>(row.size()) != 2 * n)
            throw DomainError("matrix CSV: each row needs 2n columns");
        for (Index c = 0; c < n; ++c)
            M(r, c) = Complex(row[static_cast<std::size_t>(2 * c)], row[static_cast<std::size_t>(2 * c + 1)]);
    }
    return M;
}

Json function_to_json(const AnalyticFunctionSpec& f)
{
    Json c = Json::array();
    for (const Complex z : f.coeffs())
        c.push_back(complex_to_json(z));
    return {{"coeffs", c}};
}

AnalyticFunctionSpec function_from_json(const Json& j)
{
    return AnalyticFunctionSpec(pairs(j.at("coeffs"), "coeffs"));
}

Json arcs_to_json(const ArcConfiguration& arcs)
{
    return {{"angles", arcs.angles()}, {"p", arcs.context().p()}};
}

ArcConfiguration arcs_from_json(const Json& j)
{
    return {j.at("angles").get<std::vector<double>>(), ExponentContext(j.at("p").get<double>())};
}

Json rayscan_to_json(const RayScan& scan)
{
    Json lower = Json::array(), upper = Json::array();
    for (const auto& b : scan.norms) {
        lower.push_back(b.lower);
        upper.push_back(b.upper);
    }
    return {{"angle", scan.angle},
            {"regime", scan.regime == ScanRegime::origin ? "origin" : "infinity"},
            {"radii", scan.radii},
            {"norm_lower", lower},
            {"norm_upper", upper},
            {"fitted_order", scan.fitted_order},
            {"r_squared", scan.r_squared},
            {"confident", scan.confident}};
}

std::string rayscan_to_csv(const RayScan& scan)
{
    std::string out = "radius,norm_lower,norm_upper\n";
    for (std::size_t i = 0; i < scan.radii.size(); ++i)
        out += format_number(scan.radii[i]) + "," + format_number(scan.norms[i].lower) + "," +
               format_number(scan.norms[i].upper) + "\n";
    return out;
}

Json decomposition_to_json(const SpectralDecomposition& d)
{
    Json clusters = Json::array();
    for (const auto& c : d.clusters) {
        Json chains = Json::array();
        for (const auto& chain : c.chains) {
            Json vs = Json::array();
            for (const auto& v : chain)
                vs.push_back(vector_json(v));
            chains.push_back(vs);
        }
        clusters.push_back({{"eigenvalue", complex_to_json(c.eigenvalue)},
                            {"multiplicity", c.multiplicity},
                            {"chains", chains}});
    }
    return {{"n", d.dim}, {"tol", d.tol}, {"clusters", clusters}};
}

Json verdict_to_json(const CompletenessVerdict& v)
{
    Json scans = Json::array();
    for (const auto& s : v.scans)
        scans.push_back(rayscan_to_json(s));
    return {{"m", v.m},
            {"regime", v.regime == ScanRegime::origin ? "origin" : "infinity"},
            {"sector", {{"max_opening", v.sector.max_opening}, {"threshold", v.sector.threshold}, {"holds", v.sector.holds}}},
            {"scans", scans},
            {"order_bound", v.order_bound},
            {"decay_holds", v.decay_holds},
            {"max_distance", v.max_distance},
            {"max_absolute_distance", v.max_absolute_distance},
            {"distance_holds", v.distance_holds},
            {"verdict", v.verdict}};
}

std::string spectrum_to_csv(const SpectralDecomposition& d)
{
    std::string out = "re,im,multiplicity\n";
    for (const auto& c : d.clusters)
        for (Index k = 0; k < c.multiplicity; ++k)
            out += format_number(c.eigenvalue.real()) + "," + format_number(c.eigenvalue.imag()) + "," +
                   std::to_string(c.multiplicity) + "\n";
    return out;
}

}  // namespace rootspan
