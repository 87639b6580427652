#pragma once

#include <string>

#include "pucut/hnc.hpp"
#include "pucut/simgraph.hpp"

namespace pucut {

// Machine-readable run report: per k and stage every (lambda,
// positive_fraction, cut_value), the stage-1 ranking, likely negatives, each
// k's candidate, the chosen partition and the final predictions. Sample ids
// label every per-sample entry.
std::string diagnostics_json(const hnc::Result& result, const SampleSet& samples,
                             const PUSplit& split, double pi);

}  // namespace pucut
