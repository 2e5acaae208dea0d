#include "bn2o/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace bn2o {

double score_finding(double prior_estimate, std::size_t num_parents) {
    return prior_estimate * std::sqrt(static_cast<double>(num_parents)) / 100.0;
}

double finding_prior_from_marginals(const Network& net, FindingIndex candidate,
                                    std::span<const double> marginals) {
    const Finding& f = net.findings[candidate];
    double fail = 1.0 - f.leak;
    for (const Link& link : f.parents) {
        const double q = marginals[link.disease];
        fail *= (1.0 - q) + q * (1.0 - link.activation);
    }
    return std::clamp(1.0 - fail, 0.0, 1.0);
}

namespace {

bool contains(const std::vector<FindingIndex>& sorted, FindingIndex j) {
    return std::binary_search(sorted.begin(), sorted.end(), j);
}

void insert_sorted(std::vector<FindingIndex>& sorted, FindingIndex j) {
    sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), j), j);
}

double exact_prior(const Network& net, const CaseEvidence& processed, double z_processed,
                   FindingIndex candidate, const EngineOptions& engine) {
    if (!(z_processed > 0.0)) throw ZeroEvidence();
    CaseEvidence extended = processed;
    insert_sorted(extended.negatives, candidate);
    const double z_negative = evidence_probability(net, extended, engine);
    return std::clamp(1.0 - z_negative / z_processed, 0.0, 1.0);
}

std::vector<FindingIndex> by_parent_count(const Network& net, std::vector<FindingIndex> findings,
                                          bool descending) {
    std::stable_sort(findings.begin(), findings.end(), [&](FindingIndex a, FindingIndex b) {
        const std::size_t na = net.findings[a].parents.size();
        const std::size_t nb = net.findings[b].parents.size();
        if (na != nb) return descending ? na > nb : na < nb;
        return a < b;
    });
    return findings;
}

void check_given(const OrderPolicy& policy, const CaseEvidence& evidence) {
    std::vector<FindingIndex> sorted = policy.given;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != evidence.positives)
        throw ValidationError("given order is not a permutation of the positive findings");
}

}  // namespace

double finding_prior(const Network& net, const CaseEvidence& processed, FindingIndex candidate,
                     PriorMode mode, const EngineOptions& engine) {
    if (candidate >= net.num_findings())
        throw ValidationError("finding index " + std::to_string(candidate) + " out of range");
    if (contains(processed.positives, candidate) || contains(processed.negatives, candidate))
        throw ValidationError("finding " + net.findings[candidate].id + " is already processed");
    if (mode == PriorMode::kExact)
        return exact_prior(net, processed, evidence_probability(net, processed, engine), candidate,
                           engine);
    const PosteriorResult post = posteriors(net, processed, engine);
    return finding_prior_from_marginals(net, candidate, post.marginals);
}

ApproxTrace run_incremental(const Network& net, const CaseEvidence& evidence,
                            const OrderPolicy& policy, const ApproxOptions& options) {
    if (policy.kind == OrderPolicy::Kind::kGiven) check_given(policy, evidence);

    const std::vector<FindingIndex> ascending = by_parent_count(net, evidence.positives, false);
    const std::vector<FindingIndex> descending = by_parent_count(net, evidence.positives, true);

    ApproxTrace trace;
    CaseEvidence processed;
    processed.negatives = evidence.negatives;
    std::vector<FindingIndex> unprocessed = evidence.positives;
    std::vector<double> priors;

    auto snapshot = [&] {
        PosteriorResult post = posteriors(net, processed, options.engine);
        priors.clear();
        for (FindingIndex j : unprocessed) {
            priors.push_back(options.prior_mode == PriorMode::kExact
                                 ? exact_prior(net, processed, post.p_evidence, j, options.engine)
                                 : finding_prior_from_marginals(net, j, post.marginals));
        }
        trace.lep_curve.push_back(priors.empty() ? 1.0
                                                 : *std::min_element(priors.begin(), priors.end()));
        trace.snapshots.push_back(std::move(post.marginals));
        trace.costs.push_back(post.cost);
    };

    auto select = [&](std::size_t step) -> FindingIndex {
        switch (policy.kind) {
            case OrderPolicy::Kind::kGiven: return policy.given[step];
            case OrderPolicy::Kind::kAscending: return ascending[step];
            case OrderPolicy::Kind::kDescending: return descending[step];
            case OrderPolicy::Kind::kHeuristic: break;
        }
        if (step < policy.k) return ascending[step];
        std::size_t best = 0;
        double best_score = std::numeric_limits<double>::infinity();
        for (std::size_t u = 0; u < unprocessed.size(); ++u) {
            const double score = score_finding(priors[u], net.findings[unprocessed[u]].parents.size());
            if (score < best_score) {  // unprocessed is ascending, so ties keep the smaller index
                best = u;
                best_score = score;
            }
        }
        return unprocessed[best];
    };

    snapshot();
    const std::size_t steps = std::min(evidence.positives.size(),
                                       options.max_steps.value_or(evidence.positives.size()));
    for (std::size_t step = 0; step < steps; ++step) {
        const FindingIndex next = select(step);
        unprocessed.erase(std::find(unprocessed.begin(), unprocessed.end(), next));
        insert_sorted(processed.positives, next);
        trace.order.push_back(next);
        snapshot();
    }

    const std::vector<double>& reference = trace.snapshots.back();
    for (const auto& snap : trace.snapshots) trace.kl_curve.push_back(kl_divergence(reference, snap));
    return trace;
}

std::vector<FindingIndex> order_findings(const Network& net, const CaseEvidence& evidence,
                                         const OrderPolicy& policy, PriorMode mode,
                                         const EngineOptions& engine) {
    switch (policy.kind) {
        case OrderPolicy::Kind::kGiven:
            check_given(policy, evidence);
            return policy.given;
        case OrderPolicy::Kind::kAscending: return by_parent_count(net, evidence.positives, false);
        case OrderPolicy::Kind::kDescending: return by_parent_count(net, evidence.positives, true);
        case OrderPolicy::Kind::kHeuristic: break;
    }
    if (evidence.positives.size() <= policy.k) return by_parent_count(net, evidence.positives, false);
    ApproxOptions options;
    options.prior_mode = mode;
    options.engine = engine;
    return run_incremental(net, evidence, policy, options).order;
}

double kl_divergence(std::span<const double> final_marginals,
                     std::span<const double> partial_marginals) {
    if (final_marginals.size() != partial_marginals.size())
        throw ValidationError("marginal vectors differ in length");
    constexpr double eps = 1e-12;
    auto term = [](double p, double q) { return p > 0.0 ? p * std::log(p / q) : 0.0; };
    double total = 0.0;
    for (std::size_t i = 0; i < final_marginals.size(); ++i) {
        const double p = final_marginals[i];
        if (p == partial_marginals[i]) continue;  // exact zero, even at p = 0 or 1
        const double q = std::clamp(partial_marginals[i], eps, 1.0 - eps);
        total += term(p, q) + term(1.0 - p, 1.0 - q);
    }
    return std::max(total, 0.0);
}

double kl_area(const ApproxTrace& trace) {
    double area = 0.0;
    for (double v : trace.kl_curve) area += v;
    return area;
}

namespace {

std::vector<DiseaseIndex> ranking(const std::vector<double>& marginals, std::size_t top) {
    std::vector<DiseaseIndex> order(marginals.size());
    for (DiseaseIndex i = 0; i < order.size(); ++i) order[i] = i;
    top = std::min(top, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](DiseaseIndex a, DiseaseIndex b) {
                          if (marginals[a] != marginals[b]) return marginals[a] > marginals[b];
                          return a < b;
                      });
    order.resize(top);
    return order;
}

// Smallest step from which `same(step)` holds through the end.
template <typename Pred>
std::size_t settled_from(std::size_t steps, Pred same) {
    std::size_t from = steps;
    while (from > 0 && same(from - 1)) --from;
    return from;
}

}  // namespace

SettlingMetrics settling_metrics(const ApproxTrace& trace) {
    SettlingMetrics m;
    const std::size_t steps = trace.snapshots.size();
    if (steps == 0 || trace.snapshots.back().empty()) return m;

    const auto& last = trace.snapshots.back();
    const std::vector<DiseaseIndex> final_top = ranking(last, 4);
    std::vector<DiseaseIndex> final_set = final_top;
    std::sort(final_set.begin(), final_set.end());
    std::vector<std::vector<DiseaseIndex>> tops;
    tops.reserve(steps);
    for (const auto& snap : trace.snapshots) tops.push_back(ranking(snap, 4));

    const DiseaseIndex leader = final_top.front();
    m.one_ip = settled_from(steps, [&](std::size_t t) { return tops[t].front() == leader; });
    m.four_ip = settled_from(steps, [&](std::size_t t) { return tops[t] == final_top; });
    m.four_is = settled_from(steps, [&](std::size_t t) {
        std::vector<DiseaseIndex> set = tops[t];
        std::sort(set.begin(), set.end());
        return set == final_set;
    });
    for (std::size_t t = 0; t < steps; ++t) {
        if (tops[t].front() != leader) continue;
        m.error_top = std::abs(trace.snapshots[t][leader] - last[leader]);
        break;
    }
    if (!trace.lep_curve.empty()) {
        m.lep = trace.lep_curve[std::min(m.one_ip, trace.lep_curve.size() - 1)];
        m.flep = trace.lep_curve.back();
    }
    return m;
}

void write_trace_tsv(std::ostream& out, const ApproxTrace& trace, const Network& net) {
    out << "step\tfinding_id\tlep\tkl\tmults\n";
    for (std::size_t t = 0; t < trace.snapshots.size(); ++t) {
        out << t << '\t' << (t == 0 ? std::string("-") : net.findings[trace.order[t - 1]].id) << '\t'
            << format_significant(trace.lep_curve[t], 12) << '\t'
            << format_significant(trace.kl_curve[t], 12) << '\t' << trace.costs[t].multiplications
            << '\n';
    }
}

}  // namespace bn2o
