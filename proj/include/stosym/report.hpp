#pragma once

#include "stosym/ansatz.hpp"
#include "stosym/catalog.hpp"
#include "stosym/montecarlo.hpp"

#include "json.hpp"

#include <string>

namespace stosym {

using Json = nlohmann::ordered_json;

/// Version tag carried by every report document.
inline constexpr const char* kReportSchema = "stosym-report/1";

/// Empty document with the schema tag and the command name.
Json report_header(const std::string& command);

Json to_json(const ResidualReport& r);
Json to_json(const SymmetryClass& c);
Json to_json(const PdeSymmetry& xi);
Json to_json(const InfTransform& v);
Json to_json(const SymmetrySpace& s);
Json to_json(const ClosureReport& c);
Json to_json(const McConfig& c);
Json to_json(const CompareReport& r);
Json to_json(const PathwiseReport& r);
Json to_json(const VerifyReport& r);

}  // namespace stosym
