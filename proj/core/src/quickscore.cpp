#include "bn2o/quickscore.hpp"

#include <algorithm>
#include <bit>

namespace bn2o {

namespace {

struct Sweep {
    double z = 0.0;
    std::vector<double> zt;  // aligned with `relevant`
    std::vector<DiseaseIndex> relevant;
    WeightTable weights;
    CostCounters cost;
    std::uint64_t terms = 0;
};

Sweep sweep(const Network& net, const CaseEvidence& evidence, const QuickscoreOptions& options,
            bool clamped) {
    const auto& pos = evidence.positives;
    if (pos.size() > options.max_positives || pos.size() >= 63)
        throw TooManyPositiveFindings(pos.size(), options.max_positives);

    Sweep s;
    s.weights = absorb_negatives(net, evidence, WeightTable::from_priors(net), s.cost);
    const WeightTable& w = s.weights;

    // Only parents of positive findings vary between terms.
    std::vector<std::size_t> slot(net.num_diseases(), net.num_diseases());
    for (FindingIndex j : pos)
        for (const Link& link : net.findings[j].parents) s.relevant.push_back(link.disease);
    std::sort(s.relevant.begin(), s.relevant.end());
    s.relevant.erase(std::unique(s.relevant.begin(), s.relevant.end()), s.relevant.end());
    for (std::size_t k = 0; k < s.relevant.size(); ++k) slot[s.relevant[k]] = k;

    const std::size_t r = s.relevant.size();
    if (clamped) s.zt.assign(r, 0.0);
    std::vector<double> pi(r), a(r), x(r), pre(r), suf(r);
    std::vector<char> touched(r);

    auto mul = [&](double u, double v) {
        ++s.cost.multiplications;
        return u * v;
    };
    auto add = [&](double u, double v) {
        ++s.cost.additions;
        return u + v;
    };

    const std::uint64_t count = std::uint64_t{1} << pos.size();
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        ++s.terms;
        std::fill(pi.begin(), pi.end(), 1.0);
        std::fill(touched.begin(), touched.end(), 0);
        double leak_keep = 1.0;
        bool leaky = false;
        for (std::size_t b = 0; b < pos.size(); ++b) {
            if (!(mask >> b & 1U)) continue;
            const Finding& f = net.findings[pos[b]];
            for (const Link& link : f.parents) {
                const std::size_t k = slot[link.disease];
                pi[k] = touched[k] ? mul(pi[k], 1.0 - link.activation) : 1.0 - link.activation;
                touched[k] = 1;
            }
            if (f.leak > 0.0) {
                leak_keep = leaky ? mul(leak_keep, 1.0 - f.leak) : 1.0 - f.leak;
                leaky = true;
            }
        }
        for (std::size_t k = 0; k < r; ++k) {
            const double wt = w.w_true[s.relevant[k]];
            a[k] = touched[k] ? mul(wt, pi[k]) : wt;
            x[k] = add(w.w_false[s.relevant[k]], a[k]);
        }

        double term = r == 0 ? 1.0 : x[0];
        for (std::size_t k = 1; k < r; ++k) term = mul(term, x[k]);
        if (leaky) term = mul(term, leak_keep);
        const bool negative = std::popcount(mask) % 2 == 1;
        s.z = add(s.z, negative ? -term : term);

        if (!clamped || r == 0) continue;
        // a_k * prod_{m != k} x_m via prefix and suffix products
        pre[0] = 1.0;
        for (std::size_t k = 1; k < r; ++k) pre[k] = k == 1 ? x[0] : mul(pre[k - 1], x[k - 1]);
        suf[r - 1] = 1.0;
        for (std::size_t k = r - 1; k-- > 0;) suf[k] = k == r - 2 ? x[r - 1] : mul(x[k + 1], suf[k + 1]);
        for (std::size_t k = 0; k < r; ++k) {
            double excl = (k == 0) ? suf[0] : (k == r - 1) ? pre[r - 1] : mul(pre[k], suf[k]);
            double v = r == 1 ? a[k] : mul(a[k], excl);
            if (leaky) v = mul(v, leak_keep);
            s.zt[k] = add(s.zt[k], negative ? -v : v);
        }
    }
    return s;
}

// Product over diseases that no positive finding touches, times the scalar.
double constant_factor(Sweep& s, const Network& net) {
    std::vector<char> relevant(net.num_diseases(), 0);
    for (DiseaseIndex d : s.relevant) relevant[d] = 1;
    double factor = s.weights.scalar;
    for (DiseaseIndex d = 0; d < net.num_diseases(); ++d) {
        if (relevant[d]) continue;
        factor *= s.weights.w_true[d] + s.weights.w_false[d];
        ++s.cost.multiplications;
        ++s.cost.additions;
    }
    return factor;
}

}  // namespace

QuickscoreResult quickscore_evidence(const Network& net, const CaseEvidence& evidence,
                                     const QuickscoreOptions& options) {
    Sweep s = sweep(net, evidence, options, false);
    QuickscoreResult result;
    const double factor = constant_factor(s, net);
    ++s.cost.multiplications;
    result.z = std::max(s.z * factor, 0.0);
    result.cost = s.cost;
    result.terms = s.terms;
    return result;
}

QuickscoreResult quickscore_posteriors(const Network& net, const CaseEvidence& evidence,
                                       const QuickscoreOptions& options) {
    Sweep s = sweep(net, evidence, options, true);
    QuickscoreResult result;
    const double factor = constant_factor(s, net);
    ++s.cost.multiplications;
    result.z = s.z * factor;
    if (!(result.z > 0.0)) throw ZeroEvidence();

    result.marginals.assign(net.num_diseases(), 0.0);
    std::vector<char> relevant(net.num_diseases(), 0);
    for (std::size_t k = 0; k < s.relevant.size(); ++k) {
        relevant[s.relevant[k]] = 1;
        result.marginals[s.relevant[k]] = std::clamp(s.zt[k] / s.z, 0.0, 1.0);
    }
    for (DiseaseIndex d = 0; d < net.num_diseases(); ++d) {
        if (relevant[d]) continue;
        const double wt = s.weights.w_true[d];
        result.marginals[d] = wt / (wt + s.weights.w_false[d]);
    }
    result.cost = s.cost;
    result.terms = s.terms;
    return result;
}

}  // namespace bn2o
