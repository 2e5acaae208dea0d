#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "bn2o/engine.hpp"
#include "bn2o/model.hpp"

namespace bn2o {

/// How the probability of a not-yet-processed finding is estimated.
enum class PriorMode {
    /// 1 - P(evidence, finding negative) / P(evidence): two exact evaluations.
    kExact,
    /// Noisy-or over the current posterior marginals, treating diseases as
    /// independent.
    kMarginal,
};

struct OrderPolicy {
    enum class Kind { kHeuristic, kAscending, kDescending, kGiven };

    Kind kind = Kind::kHeuristic;
    /// Heuristic only: number of findings taken by ascending parent count
    /// before the score-driven phase starts.
    std::size_t k = 8;
    /// kGiven only: a permutation of the case's positive findings.
    std::vector<FindingIndex> given;

    static OrderPolicy heuristic(std::size_t k = 8) { return {Kind::kHeuristic, k, {}}; }
    static OrderPolicy ascending() { return {Kind::kAscending, 0, {}}; }
    static OrderPolicy descending() { return {Kind::kDescending, 0, {}}; }
    static OrderPolicy explicit_order(std::vector<FindingIndex> order) {
        return {Kind::kGiven, 0, std::move(order)};
    }
};

/// prior * sqrt(num_parents) / 100. Lower scores are processed first.
double score_finding(double prior_estimate, std::size_t num_parents);

/// Estimated probability that `candidate` is positive given `processed`.
double finding_prior(const Network& net, const CaseEvidence& processed, FindingIndex candidate,
                     PriorMode mode, const EngineOptions& engine = {});

/// Marginal-mode estimate from precomputed posterior marginals.
double finding_prior_from_marginals(const Network& net, FindingIndex candidate,
                                    std::span<const double> marginals);

/// Order in which run_incremental() would process the case's positives.
/// Throws ValidationError if a given order is not a permutation of them.
std::vector<FindingIndex> order_findings(const Network& net, const CaseEvidence& evidence,
                                         const OrderPolicy& policy,
                                         PriorMode mode = PriorMode::kMarginal,
                                         const EngineOptions& engine = {});

struct ApproxOptions {
    PriorMode prior_mode = PriorMode::kMarginal;
    /// Stop after this many positive findings; the last processed prefix
    /// becomes the reference posterior.
    std::optional<std::size_t> max_steps;
    EngineOptions engine;
};

struct ApproxTrace {
    std::vector<FindingIndex> order;
    /// snapshots[0] conditions on negatives only; snapshots[t] adds order[0..t).
    std::vector<std::vector<double>> snapshots;
    /// Lowest estimated prior among unprocessed positives after each step;
    /// 1 once none remain.
    std::vector<double> lep_curve;
    /// Divergence of each snapshot from the last one.
    std::vector<double> kl_curve;
    std::vector<CostCounters> costs;
};

ApproxTrace run_incremental(const Network& net, const CaseEvidence& evidence,
                            const OrderPolicy& policy, const ApproxOptions& options = {});

/// Sum over diseases of binary KL(final || partial). Partial entries are
/// clamped to [1e-12, 1 - 1e-12]; 0 ln 0 is taken as 0.
double kl_divergence(std::span<const double> final_marginals,
                     std::span<const double> partial_marginals);

/// Area under the KL curve (sum over steps).
double kl_area(const ApproxTrace& trace);

struct SettlingMetrics {
    std::size_t one_ip = 0;
    std::size_t four_is = 0;
    std::size_t four_ip = 0;
    double error_top = 0.0;
    double lep = 0.0;
    double flep = 0.0;
};

/// Steps after which the top disease, the top-four set and the ordered top
/// four stop changing for good, relative to the final snapshot. Rankings sort
/// by posterior descending, ties by disease index.
SettlingMetrics settling_metrics(const ApproxTrace& trace);

/// Tab-separated `step finding_id lep kl mults`, one row per snapshot.
void write_trace_tsv(std::ostream& out, const ApproxTrace& trace, const Network& net);

}  // namespace bn2o
