#pragma once

#include <cstddef>
#include <vector>

#include "bn2o/model.hpp"

namespace bn2o {

/// Joint probability of a full disease assignment (`config[i]` true when
/// disease i is present) together with the case's finding values.
double joint_probability(const Network& net, const std::vector<bool>& config,
                         const CaseEvidence& evidence);

struct OracleResult {
    double p_evidence = 0.0;
    std::vector<double> marginals;
};

inline constexpr std::size_t kOracleMaxDiseases = 24;

/// Brute force over all 2^n disease configurations in ascending bitmask order
/// (bit i = disease i), accumulated with Neumaier compensated summation.
/// Throws TooManyDiseases above kOracleMaxDiseases and ZeroEvidence when the
/// evidence is impossible.
OracleResult enumerate_posteriors(const Network& net, const CaseEvidence& evidence);

}  // namespace bn2o
