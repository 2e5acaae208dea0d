#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bn2o/engine.hpp"
#include "bn2o/model.hpp"

namespace bn2o {

/// Flat inclusion-exclusion over subsets of the positive findings. Terms are
/// visited in ascending bitmask order over the case's positive list.
struct QuickscoreOptions {
    std::size_t max_positives = 24;
};

struct QuickscoreResult {
    double z = 0.0;
    /// Empty for quickscore_evidence().
    std::vector<double> marginals;
    CostCounters cost;
    std::uint64_t terms = 0;
};

/// P(evidence). Throws TooManyPositiveFindings above the cap.
QuickscoreResult quickscore_evidence(const Network& net, const CaseEvidence& evidence,
                                     const QuickscoreOptions& options = {});

/// P(evidence) and every disease marginal from the same subset sweep.
/// Throws TooManyPositiveFindings or ZeroEvidence.
QuickscoreResult quickscore_posteriors(const Network& net, const CaseEvidence& evidence,
                                       const QuickscoreOptions& options = {});

}  // namespace bn2o
