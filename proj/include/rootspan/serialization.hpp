#pragma once
//
// JSON and CSV forms of the library's value types. Complex numbers are
// always [re, im] pairs; numbers are written with 17 significant digits.
//

#include <string>

#include "rootspan/banach_geometry.hpp"
#include "rootspan/bvp.hpp"
#include "rootspan/resolvent.hpp"
#include "rootspan/rootspace.hpp"
#include "rootspan/trace.hpp"

namespace rootspan {

/// "%.17g"; non-finite values become "nan", "inf" or "-inf".
std::string format_number(double v);

/// Deterministic JSON text: sorted keys, 17-digit numbers, non-finite as null.
std::string write_json(const Json& j, int indent = 2);

/// Parses JSON text; throws DomainError with the parser message on failure.
Json parse_json(const std::string& text);

/// Parses TOML text into the equivalent JSON document.
Json parse_toml(const std::string& text);

/// Reads a JSON or TOML file, chosen by extension (.toml, otherwise JSON).
Json load_document(const std::string& path);

Json system_to_json(const BiorthogonalSystem& s);
BiorthogonalSystem system_from_json(const Json& j);

Json weight_to_json(const PowerWeight& w);
PowerWeight weight_from_json(const Json& j);

Json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const Json& j);
/// Rows of 2n numbers (re, im alternating); blank lines and '#' lines skipped.
Matrix matrix_from_csv(const std::string& text);

Json function_to_json(const AnalyticFunctionSpec& f);
AnalyticFunctionSpec function_from_json(const Json& j);

Json arcs_to_json(const ArcConfiguration& arcs);
ArcConfiguration arcs_from_json(const Json& j);

Json rayscan_to_json(const RayScan& scan);
/// header radius,norm_lower,norm_upper
std::string rayscan_to_csv(const RayScan& scan);

Json decomposition_to_json(const SpectralDecomposition& d);
Json verdict_to_json(const CompletenessVerdict& v);

/// header re,im,multiplicity; one row per eigenvalue counted with multiplicity.
std::string spectrum_to_csv(const SpectralDecomposition& d);

}  // namespace rootspan
