#include "bn2o/engine.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <utility>

namespace bn2o {

CostCounters& CostCounters::operator+=(const CostCounters& other) noexcept {
    multiplications += other.multiplications;
    additions += other.additions;
    partition_calls += other.partition_calls;
    distributions += other.distributions;
    savings += other.savings;
    return *this;
}

WeightTable WeightTable::from_priors(const Network& net) {
    WeightTable w;
    w.w_true.reserve(net.num_diseases());
    w.w_false.reserve(net.num_diseases());
    for (const Disease& d : net.diseases) {
        w.w_true.push_back(d.prior);
        w.w_false.push_back(1.0 - d.prior);
    }
    return w;
}

WeightTable absorb_negatives(const Network& net, const CaseEvidence& evidence, WeightTable weights,
                             CostCounters& cost) {
    for (FindingIndex j : evidence.negatives) {
        const Finding& f = net.findings[j];
        for (const Link& link : f.parents) {
            weights.w_true[link.disease] *= 1.0 - link.activation;
            ++cost.multiplications;
        }
        if (f.leak > 0.0) {
            weights.scalar *= 1.0 - f.leak;
            ++cost.multiplications;
        }
    }
    return weights;
}

WeightTable absorb_negatives(const Network& net, const CaseEvidence& evidence,
                             WeightTable weights) {
    CostCounters ignored;
    return absorb_negatives(net, evidence, std::move(weights), ignored);
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    // Keeps the smaller representative so roots are the earliest member.
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a < b) parent[b] = a;
        else parent[a] = b;
    }
};

std::size_t largest_part(const Partition& p) {
    std::size_t best = 0;
    for (const Component& c : p.components) best = std::max(best, c.findings.size());
    return best;
}

std::vector<FindingIndex> without(std::span<const FindingIndex> findings, FindingIndex drop) {
    std::vector<FindingIndex> rest;
    rest.reserve(findings.size());
    for (FindingIndex j : findings)
        if (j != drop) rest.push_back(j);
    return rest;
}

}  // namespace

Partition partition(std::span<const FindingIndex> findings, std::span<const DiseaseIndex> scope,
                    const Network& net) {
    std::vector<std::size_t> owner(net.num_diseases(), kNone);
    DisjointSets sets(findings.size());
    for (std::size_t pos = 0; pos < findings.size(); ++pos) {
        for (const Link& link : net.findings[findings[pos]].parents) {
            std::size_t& o = owner[link.disease];
            if (o == kNone) o = pos;
            else sets.unite(pos, o);
        }
    }

    Partition result;
    std::vector<std::size_t> slot(findings.size(), kNone);
    std::vector<std::pair<FindingIndex, std::size_t>> order;  // (smallest finding, root)
    for (std::size_t pos = 0; pos < findings.size(); ++pos) {
        const std::size_t root = sets.find(pos);
        if (slot[root] == kNone) {
            slot[root] = order.size();
            order.emplace_back(findings[pos], root);
        } else {
            order[slot[root]].first = std::min(order[slot[root]].first, findings[pos]);
        }
    }
    std::vector<std::size_t> rank(order.size());
    std::iota(rank.begin(), rank.end(), 0);
    std::sort(rank.begin(), rank.end(),
              [&](std::size_t a, std::size_t b) { return order[a].first < order[b].first; });
    std::vector<std::size_t> position(order.size());
    for (std::size_t r = 0; r < rank.size(); ++r) position[rank[r]] = r;

    result.components.resize(order.size());
    for (std::size_t pos = 0; pos < findings.size(); ++pos) {
        Component& comp = result.components[position[slot[sets.find(pos)]]];
        comp.findings.push_back(findings[pos]);
        for (const Link& link : net.findings[findings[pos]].parents) comp.diseases.push_back(link.disease);
    }
    for (Component& comp : result.components) {
        std::sort(comp.findings.begin(), comp.findings.end());
        std::sort(comp.diseases.begin(), comp.diseases.end());
        comp.diseases.erase(std::unique(comp.diseases.begin(), comp.diseases.end()),
                            comp.diseases.end());
    }
    for (DiseaseIndex d : scope)
        if (owner[d] == kNone) result.free_diseases.push_back(d);
    return result;
}

std::size_t live_parent_count(const Component& comp, FindingIndex finding, const Network& net) {
    std::size_t count = 0;
    for (const Link& link : net.findings[finding].parents)
        if (std::binary_search(comp.diseases.begin(), comp.diseases.end(), link.disease)) ++count;
    return count;
}

FindingIndex choose_finding(const Component& comp, const Network& net,
                            const EngineOptions& options) {
    std::vector<FindingIndex> tied;
    std::size_t best = 0;
    for (FindingIndex j : comp.findings) {
        const std::size_t count = live_parent_count(comp, j, net);
        const bool better = tied.empty() || (options.rule == SelectionRule::kMaxParents
                                                 ? count > best
                                                 : count < best);
        if (better) {
            best = count;
            tied.assign(1, j);
        } else if (count == best) {
            tied.push_back(j);
        }
    }
    if (tied.size() == 1 || !options.balance_ties) return tied.front();

    FindingIndex choice = tied.front();
    std::size_t choice_largest = std::numeric_limits<std::size_t>::max();
    for (FindingIndex j : tied) {
        const auto rest = without(comp.findings, j);
        const std::size_t largest = largest_part(bn2o::partition(rest, comp.diseases, net));
        if (largest < choice_largest) {
            choice = j;
            choice_largest = largest;
        }
    }
    return choice;
}

namespace {

class PlanBuilder {
public:
    PlanBuilder(const Network& net, const EngineOptions& options, FactorPlan& plan)
        : net_(net), options_(options), plan_(plan) {}

    // Partitions `findings` and records the event; returns the split.
    Partition split(std::span<const FindingIndex> findings, std::span<const DiseaseIndex> scope) {
        Partition p = bn2o::partition(findings, scope, net_);
        ++plan_.cost.partition_calls;
        if (!findings.empty()) {
            PartitionEvent event{findings.size(), {}};
            for (const Component& c : p.components) event.sizes.push_back(c.findings.size());
            plan_.cost.savings += findings.size() - largest_part(p);
            plan_.trace.push_back(std::move(event));
        }
        return p;
    }

    PlanNode build(const Component& comp) {
        PlanNode node;
        node.finding = choose_finding(comp, net_, options_);
        ++plan_.cost.distributions;
        const auto rest = without(comp.findings, node.finding);
        Partition p = split(rest, comp.diseases);
        for (const Component& child : p.components) node.children.push_back(build(child));
        node.free_diseases = std::move(p.free_diseases);
        for (const PlanNode& child : node.children)
            node.diseases.insert(node.diseases.end(), child.diseases.begin(), child.diseases.end());
        node.diseases.insert(node.diseases.end(), node.free_diseases.begin(),
                             node.free_diseases.end());
        return node;
    }

private:
    const Network& net_;
    const EngineOptions& options_;
    FactorPlan& plan_;
};

}  // namespace

FactorPlan build_plan(const Network& net, std::span<const FindingIndex> positives,
                      std::span<const DiseaseIndex> scope, const EngineOptions& options) {
    FactorPlan plan;
    PlanBuilder builder(net, options, plan);
    Partition top = builder.split(positives, scope);
    for (const Component& comp : top.components) plan.components.push_back(builder.build(comp));
    plan.free_diseases = std::move(top.free_diseases);
    return plan;
}

std::uint64_t savings_metric(std::span<const PartitionEvent> trace) {
    std::uint64_t total = 0;
    for (const PartitionEvent& event : trace) {
        const std::size_t sum = std::accumulate(event.sizes.begin(), event.sizes.end(), std::size_t{0});
        if (sum != event.findings || (event.findings > 0 && event.sizes.empty()) ||
            std::find(event.sizes.begin(), event.sizes.end(), std::size_t{0}) != event.sizes.end())
            throw ValidationError("partition sizes do not sum to " + std::to_string(event.findings));
        const std::size_t largest =
            event.sizes.empty() ? 0 : *std::max_element(event.sizes.begin(), event.sizes.end());
        total += event.findings - largest;
    }
    return total;
}

namespace {

enum class Track {
    kAll,     // clamped weight of every scoped disease
    kTarget,  // clamped weight of a single disease
    kNone,    // evidence weight only
};

// Result of evaluating one independent factor. For kAll, `zt` is aligned with
// the factor's disease list; for kTarget it holds the target's entry when the
// target belongs to the factor and is empty otherwise.
struct Block {
    double z = 1.0;
    std::vector<double> zt;
};

class Evaluator {
public:
    Evaluator(const Network& net, WeightTable weights, Track track, DiseaseIndex target,
              CostCounters& cost)
        : net_(net), w_(std::move(weights)), track_(track), target_(target), cost_(cost) {}

    // Independent factors `children` plus the free diseases, multiplied out.
    // With `free_ratio` the free diseases only contribute to z.
    Block combine(const std::vector<PlanNode>& children, const std::vector<DiseaseIndex>& free,
                  bool free_ratio) {
        std::vector<Block> blocks;
        blocks.reserve(children.size() + 1);
        std::size_t target_block = kNone;
        for (const PlanNode& child : children) {
            blocks.push_back(eval_node(child));
            if (track_ == Track::kTarget && !blocks.back().zt.empty()) target_block = blocks.size() - 1;
        }
        if (!free.empty()) {
            blocks.push_back(base(free, free_ratio));
            if (track_ == Track::kTarget && !blocks.back().zt.empty()) target_block = blocks.size() - 1;
        }

        std::vector<double> zs;
        zs.reserve(blocks.size());
        for (const Block& b : blocks) zs.push_back(b.z);

        Block out;
        out.z = product(zs);
        if (track_ == Track::kAll) {
            const std::vector<double> excl = excluded_all(zs);
            for (std::size_t b = 0; b < blocks.size(); ++b)
                for (double v : blocks[b].zt) out.zt.push_back(scale(v, excl[b], zs.size()));
        } else if (track_ == Track::kTarget && target_block != kNone) {
            const double excl = excluded_one(zs, target_block);
            out.zt.push_back(scale(blocks[target_block].zt.front(), excl, zs.size()));
        }
        return out;
    }

    Block eval_node(const PlanNode& node) {
        Block a = combine(node.children, node.free_diseases, false);

        const Finding& f = net_.findings[node.finding];
        // Only the finding's parents change in the absorbed term.
        std::vector<std::pair<DiseaseIndex, double>> saved;
        saved.reserve(f.parents.size());
        for (const Link& link : f.parents) {
            double& wt = w_.w_true[link.disease];
            saved.emplace_back(link.disease, wt);
            wt = mul(wt, 1.0 - link.activation);
        }
        Block b = combine(node.children, node.free_diseases, false);
        for (const auto& [d, value] : saved) w_.w_true[d] = value;

        if (f.leak > 0.0) {
            const double keep = 1.0 - f.leak;
            b.z = mul(b.z, keep);
            for (double& v : b.zt) v = mul(v, keep);
        }
        a.z = sub(a.z, b.z);
        for (std::size_t k = 0; k < a.zt.size(); ++k) a.zt[k] = sub(a.zt[k], b.zt[k]);
        return a;
    }

private:
    double mul(double x, double y) {
        ++cost_.multiplications;
        return x * y;
    }
    double add(double x, double y) {
        ++cost_.additions;
        return x + y;
    }
    double sub(double x, double y) {
        ++cost_.additions;
        return x - y;
    }

    // v * excl, where excl is the identity when there is a single block.
    double scale(double v, double excl, std::size_t count) { return count == 1 ? v : mul(v, excl); }

    // Left-to-right product x0 * x1 * ... ; shares its multiplication chain
    // with the prefix products in excluded_all().
    double product(const std::vector<double>& x) {
        if (x.empty()) return 1.0;
        double total = x[0];
        for (std::size_t k = 1; k < x.size(); ++k) total = mul(total, x[k]);
        return total;
    }

    // excl[k] = prod_{m != k} x[m], from prefix and suffix products.
    std::vector<double> excluded_all(const std::vector<double>& x) {
        const std::size_t n = x.size();
        std::vector<double> excl(n, 1.0);
        if (n <= 1) return excl;
        std::vector<double> pre(n), suf(n);
        pre[0] = 1.0;
        pre[1] = x[0];
        for (std::size_t k = 2; k < n; ++k) pre[k] = mul(pre[k - 1], x[k - 1]);
        suf[n - 1] = 1.0;
        suf[n - 2] = x[n - 1];
        for (std::size_t k = n - 2; k-- > 0;) suf[k] = mul(x[k + 1], suf[k + 1]);
        excl[0] = suf[0];
        excl[n - 1] = pre[n - 1];
        for (std::size_t k = 1; k + 1 < n; ++k) excl[k] = mul(pre[k], suf[k]);
        return excl;
    }

    // Same arithmetic as excluded_all()[k] for a single index.
    double excluded_one(const std::vector<double>& x, std::size_t k) {
        const std::size_t n = x.size();
        if (n <= 1) return 1.0;
        double pre = 1.0;
        if (k >= 1) {
            pre = x[0];
            for (std::size_t m = 2; m <= k; ++m) pre = mul(pre, x[m - 1]);
        }
        double suf = 1.0;
        if (k <= n - 2) {
            suf = x[n - 1];
            for (std::size_t m = n - 2; m > k; --m) suf = mul(x[m], suf);
        }
        if (k == 0) return suf;
        if (k == n - 1) return pre;
        return mul(pre, suf);
    }

    // Diseases with no pending finding: z = prod (w_t + w_f) and
    // z_t[i] = w_t[i] * prod_{k != i} (w_t[k] + w_f[k]).
    Block base(const std::vector<DiseaseIndex>& diseases, bool z_only) {
        std::vector<double> x;
        x.reserve(diseases.size());
        for (DiseaseIndex d : diseases) x.push_back(add(w_.w_true[d], w_.w_false[d]));

        Block out;
        out.z = product(x);
        if (z_only) return out;
        if (track_ == Track::kAll) {
            const std::vector<double> excl = excluded_all(x);
            out.zt.reserve(diseases.size());
            for (std::size_t k = 0; k < diseases.size(); ++k)
                out.zt.push_back(diseases.size() == 1 ? w_.w_true[diseases[k]]
                                                      : mul(w_.w_true[diseases[k]], excl[k]));
        } else if (track_ == Track::kTarget) {
            for (std::size_t k = 0; k < diseases.size(); ++k) {
                if (diseases[k] != target_) continue;
                out.zt.push_back(diseases.size() == 1
                                     ? w_.w_true[diseases[k]]
                                     : mul(w_.w_true[diseases[k]], excluded_one(x, k)));
            }
        }
        return out;
    }

    const Network& net_;
    WeightTable w_;
    Track track_;
    DiseaseIndex target_;
    CostCounters& cost_;
};

std::vector<DiseaseIndex> all_diseases(const Network& net) {
    std::vector<DiseaseIndex> scope(net.num_diseases());
    std::iota(scope.begin(), scope.end(), 0);
    return scope;
}

std::vector<DiseaseIndex> top_order(const FactorPlan& plan, bool with_free) {
    std::vector<DiseaseIndex> order;
    for (const PlanNode& node : plan.components)
        order.insert(order.end(), node.diseases.begin(), node.diseases.end());
    if (with_free) order.insert(order.end(), plan.free_diseases.begin(), plan.free_diseases.end());
    return order;
}

double apply_scalar(double v, double scalar, CostCounters& cost) {
    if (scalar == 1.0) return v;
    ++cost.multiplications;
    return v * scalar;
}

double ratio(double num, double den) { return den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0; }

// Evaluation shared by posteriors() and posterior_single(): absorbs the
// negatives, builds the plan and evaluates it. Top-level free diseases only
// contribute to z; their marginals are w_t / (w_t + w_f).
struct Pipeline {
    WeightTable weights;
    FactorPlan plan;
    Block top;
    CostCounters cost;

    Pipeline(const Network& net, const CaseEvidence& evidence, const EngineOptions& options,
             Track track, DiseaseIndex target) {
        using Clock = std::chrono::steady_clock;
        const auto t0 = Clock::now();
        weights = absorb_negatives(net, evidence, WeightTable::from_priors(net), cost);
        const auto t1 = Clock::now();
        const auto scope = all_diseases(net);
        plan = build_plan(net, evidence.positives, scope, options);
        cost += plan.cost;
        const auto t2 = Clock::now();
        Evaluator eval(net, weights, track, target, cost);
        top = eval.combine(plan.components, plan.free_diseases, true);
        top.z = apply_scalar(top.z, weights.scalar, cost);
        for (double& v : top.zt) v = apply_scalar(v, weights.scalar, cost);
        if (options.timings) {
            const auto t3 = Clock::now();
            using Seconds = std::chrono::duration<double>;
            options.timings->absorption += Seconds(t1 - t0).count();
            options.timings->partitioning += Seconds(t2 - t1).count();
            options.timings->evaluation += Seconds(t3 - t2).count();
        }
    }

    double free_marginal(DiseaseIndex d) const {
        const double x = weights.w_true[d] + weights.w_false[d];
        return ratio(weights.w_true[d], x);
    }
};

}  // namespace

EvalResult evaluate(const Network& net, std::span<const FindingIndex> positives,
                    const WeightTable& weights, std::span<const DiseaseIndex> scope,
                    const EngineOptions& options) {
    EvalResult result;
    FactorPlan plan = build_plan(net, positives, scope, options);
    result.cost = plan.cost;
    Evaluator eval(net, weights, Track::kAll, 0, result.cost);
    Block top = eval.combine(plan.components, plan.free_diseases, false);
    result.z = apply_scalar(top.z, weights.scalar, result.cost);
    result.scope = top_order(plan, true);
    result.z_true.assign(net.num_diseases(), 0.0);
    for (std::size_t k = 0; k < result.scope.size(); ++k)
        result.z_true[result.scope[k]] = apply_scalar(top.zt[k], weights.scalar, result.cost);
    std::sort(result.scope.begin(), result.scope.end());
    return result;
}

PosteriorResult posteriors(const Network& net, const CaseEvidence& evidence,
                           const EngineOptions& options) {
    Pipeline run(net, evidence, options, Track::kAll, 0);
    if (!(run.top.z > 0.0)) throw ZeroEvidence();

    PosteriorResult result;
    result.p_evidence = run.top.z;
    result.marginals.assign(net.num_diseases(), 0.0);
    const auto order = top_order(run.plan, false);
    for (std::size_t k = 0; k < order.size(); ++k)
        result.marginals[order[k]] = ratio(run.top.zt[k], run.top.z);
    for (DiseaseIndex d : run.plan.free_diseases) result.marginals[d] = run.free_marginal(d);
    result.cost = run.cost;
    result.trace = std::move(run.plan.trace);
    return result;
}

SinglePosterior posterior_single(const Network& net, const CaseEvidence& evidence,
                                 DiseaseIndex target, const EngineOptions& options) {
    if (target >= net.num_diseases())
        throw ValidationError("target disease index " + std::to_string(target) + " out of range");
    Pipeline run(net, evidence, options, Track::kTarget, target);
    if (!(run.top.z > 0.0)) throw ZeroEvidence();

    SinglePosterior result;
    result.p_evidence = run.top.z;
    result.probability = run.top.zt.empty() ? run.free_marginal(target)
                                            : ratio(run.top.zt.front(), run.top.z);
    result.cost = run.cost;
    return result;
}

double evidence_probability(const Network& net, const CaseEvidence& evidence,
                            const EngineOptions& options, CostCounters* cost) {
    Pipeline run(net, evidence, options, Track::kNone, 0);
    if (cost) *cost += run.cost;
    return std::max(run.top.z, 0.0);
}

}  // namespace bn2o
