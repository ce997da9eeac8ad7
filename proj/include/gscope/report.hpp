#pragma once

#include <string>

#include "gscope/pipeline.hpp"

namespace gscope::cli {

/// Deterministic JSON report (schema "galois-scope/1"). command selects the
/// sections: "monodromy" stops after the generators, "analyze" includes the
/// group report and verdict.
std::string report_json(const AnalysisResult& r, const std::string& command);

/// The same content as plain text.
std::string report_text(const AnalysisResult& r, const std::string& command);

}  // namespace gscope::cli
