#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bn2o/errors.hpp"

namespace bn2o {

using DiseaseIndex = std::size_t;
using FindingIndex = std::size_t;

struct Disease {
    std::string id;
    double prior = 0.5;

    bool operator==(const Disease&) const = default;
};

/// One noisy-or link: `activation` is the probability the finding fires when
/// this disease alone is present.
struct Link {
    DiseaseIndex disease = 0;
    double activation = 0.0;

    bool operator==(const Link&) const = default;
};

struct Finding {
    std::string id;
    /// Probability the finding fires with no modelled disease present.
    double leak = 0.0;
    /// Sorted by disease index, no duplicates.
    std::vector<Link> parents;

    bool operator==(const Finding&) const = default;
};

/// Two-level noisy-or network. Immutable once validated; share freely.
struct Network {
    std::vector<Disease> diseases;
    std::vector<Finding> findings;

    std::size_t num_diseases() const noexcept { return diseases.size(); }
    std::size_t num_findings() const noexcept { return findings.size(); }

    std::optional<DiseaseIndex> find_disease(std::string_view id) const;
    std::optional<FindingIndex> find_finding(std::string_view id) const;

    bool operator==(const Network&) const = default;
};

/// Observed finding values. Both lists are sorted, duplicate free and disjoint.
struct CaseEvidence {
    std::vector<FindingIndex> positives;
    std::vector<FindingIndex> negatives;

    bool empty() const noexcept { return positives.empty() && negatives.empty(); }

    bool operator==(const CaseEvidence&) const = default;
};

/// Throws ValidationError describing the first violated invariant.
void validate(const Network& net);
void validate(const CaseEvidence& evidence, const Network& net);

/// Sorts parent lists and evidence lists into canonical order.
void canonicalize(Network& net);
void canonicalize(CaseEvidence& evidence);

Network parse_network(std::string_view text);
CaseEvidence parse_case(std::string_view text, const Network& net);

std::string serialize_network(const Network& net);
std::string serialize_case(const CaseEvidence& evidence, const Network& net);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// printf-style %.*g rendering with `digits` significant digits.
std::string format_significant(double value, int digits);

}  // namespace bn2o
