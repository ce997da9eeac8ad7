#pragma once

#include <string>

#include "gscope/pipeline.hpp"

namespace gscope::cli {

/// Image-plane picture of the analysis: branch-locus markers (those inside
/// the image window), the monodromy loops, and the base point. The output
/// is byte-deterministic for a given result.
std::string render_svg(const AnalysisResult& r);

}  // namespace gscope::cli
