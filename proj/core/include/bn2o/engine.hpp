#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bn2o/model.hpp"

namespace bn2o {

/// Arithmetic and structural work done by an evaluation. Every floating
/// point multiply and add/subtract that the engine executes is counted.
struct CostCounters {
    std::uint64_t multiplications = 0;
    std::uint64_t additions = 0;  // includes subtractions
    std::uint64_t partition_calls = 0;
    std::uint64_t distributions = 0;
    std::uint64_t savings = 0;

    CostCounters& operator+=(const CostCounters& other) noexcept;
    bool operator==(const CostCounters&) const = default;
};

/// Unnormalized measure `scalar * prod_i w(D_i)` over disease configurations,
/// where w(D_i = t) = w_true[i] and w(D_i = f) = w_false[i].
struct WeightTable {
    double scalar = 1.0;
    std::vector<double> w_true;
    std::vector<double> w_false;

    static WeightTable from_priors(const Network& net);
};

/// Evidence weight and per-disease clamped weights. `z_true[i]` is the
/// weight with disease i clamped true; it is only meaningful for diseases in
/// `scope` and is 0 elsewhere.
struct EvalResult {
    double z = 0.0;
    std::vector<double> z_true;
    std::vector<DiseaseIndex> scope;
    CostCounters cost;
};

/// Connected piece of the bipartite graph between not-yet-distributed positive
/// findings and their parents. Both lists are sorted ascending.
struct Component {
    std::vector<FindingIndex> findings;
    std::vector<DiseaseIndex> diseases;
};

struct Partition {
    /// Ordered by smallest finding index.
    std::vector<Component> components;
    /// Scoped diseases referenced by no remaining finding, ascending.
    std::vector<DiseaseIndex> free_diseases;
};

/// One row of a partition trace: how many findings were partitioned and the
/// sizes of the resulting components.
struct PartitionEvent {
    std::size_t findings = 0;
    std::vector<std::size_t> sizes;

    bool operator==(const PartitionEvent&) const = default;
};

enum class SelectionRule {
    kMaxParents,  // greedy rule: distribute over the finding with most parents
    kMinParents,  // reverse rule, used to check order invariance of the expansion
};

/// Wall-clock seconds spent per evaluation phase; informational only.
struct PhaseTimings {
    double absorption = 0.0;
    double partitioning = 0.0;
    double evaluation = 0.0;
};

struct EngineOptions {
    SelectionRule rule = SelectionRule::kMaxParents;
    /// Among findings tied on parent count, prefer the one whose removal
    /// leaves the smallest largest component. Ties after that go to the
    /// smallest finding index.
    bool balance_ties = true;
    /// When set, posteriors(), posterior_single() and evidence_probability()
    /// add their phase timings here.
    PhaseTimings* timings = nullptr;
};

/// Multiplies each negative finding's noisy-or "all triggers fail" factor
/// into the weights: w_true[i] *= (1 - c) per parent link and
/// scalar *= (1 - leak) when the finding leaks.
WeightTable absorb_negatives(const Network& net, const CaseEvidence& evidence, WeightTable weights,
                             CostCounters& cost);
WeightTable absorb_negatives(const Network& net, const CaseEvidence& evidence,
                             WeightTable weights);

/// Connected components of `findings` and their parents. Parents of every
/// finding must lie in `scope` (sorted ascending).
Partition partition(std::span<const FindingIndex> findings, std::span<const DiseaseIndex> scope,
                    const Network& net);

/// Number of the finding's parents that lie in the component's disease set.
std::size_t live_parent_count(const Component& comp, FindingIndex finding, const Network& net);

/// Next finding to distribute over within `comp` (non-empty).
FindingIndex choose_finding(const Component& comp, const Network& net,
                            const EngineOptions& options = {});

/// Factoring plan: which finding each distribution step removes and how the
/// remaining findings split. Built once per query; both terms of every
/// distribution share it because partitioning does not depend on weights.
struct PlanNode {
    FindingIndex finding = 0;
    std::vector<PlanNode> children;
    std::vector<DiseaseIndex> free_diseases;
    /// Children's diseases in child order, then free_diseases.
    std::vector<DiseaseIndex> diseases;
};

struct FactorPlan {
    std::vector<PlanNode> components;
    std::vector<DiseaseIndex> free_diseases;
    /// Depth-first record of every partition of a non-empty finding set.
    std::vector<PartitionEvent> trace;
    /// partition_calls, distributions and savings.
    CostCounters cost;
};

FactorPlan build_plan(const Network& net, std::span<const FindingIndex> positives,
                      std::span<const DiseaseIndex> scope, const EngineOptions& options = {});

/// Sum over the trace of (findings partitioned - largest resulting part).
/// Throws ValidationError if some entry's sizes do not add up.
std::uint64_t savings_metric(std::span<const PartitionEvent> trace);

/// Distribute-and-partition evaluation of the positive findings over `scope`
/// under `weights`. All parents of `positives` must lie in `scope`.
EvalResult evaluate(const Network& net, std::span<const FindingIndex> positives,
                    const WeightTable& weights, std::span<const DiseaseIndex> scope,
                    const EngineOptions& options = {});

struct PosteriorResult {
    double p_evidence = 0.0;
    std::vector<double> marginals;  // indexed by disease
    CostCounters cost;
    std::vector<PartitionEvent> trace;
};

/// Posterior marginals of every disease given the case. Throws ZeroEvidence
/// when the evidence has probability zero.
PosteriorResult posteriors(const Network& net, const CaseEvidence& evidence,
                           const EngineOptions& options = {});

struct SinglePosterior {
    double p_evidence = 0.0;
    double probability = 0.0;
    CostCounters cost;
};

/// Same evaluation as posteriors() tracking only one clamped weight; the
/// result is bit-identical to posteriors().marginals[target].
SinglePosterior posterior_single(const Network& net, const CaseEvidence& evidence,
                                 DiseaseIndex target, const EngineOptions& options = {});

/// P(evidence) only; no clamped weights are tracked.
double evidence_probability(const Network& net, const CaseEvidence& evidence,
                            const EngineOptions& options = {}, CostCounters* cost = nullptr);

}  // namespace bn2o
