#include "bn2o/gen.hpp"

#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace bn2o {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) return 0;
    // Largest multiple of n representable; draws at or above it are rejected.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % n;
}

namespace {

void check_interval(const Interval& iv, const char* name, bool (*ok)(double)) {
    if (!(iv.lo <= iv.hi) || !ok(iv.lo) || !ok(iv.hi))
        throw ValidationError(std::string(name) + " range [" + format_double(iv.lo) + ", " +
                              format_double(iv.hi) + "] is not a legal interval");
}

}  // namespace

Network random_network(const RandomNetworkParams& params) {
    if (params.parents_min < 1 || params.parents_min > params.parents_max ||
        params.parents_max > params.n_diseases) {
        if (params.n_findings > 0 || params.parents_min > params.parents_max)
            throw ValidationError("need 1 <= parents_min <= parents_max <= n_diseases");
    }
    check_interval(params.prior, "prior", [](double p) { return p > 0.0 && p < 1.0; });
    check_interval(params.activation, "activation", [](double c) { return c > 0.0 && c <= 1.0; });
    check_interval(params.leak, "leak", [](double l) { return l >= 0.0 && l < 1.0; });

    Rng rng(params.seed);
    Network net;
    for (std::size_t i = 0; i < params.n_diseases; ++i)
        net.diseases.push_back({"D" + std::to_string(i + 1), rng.uniform(params.prior.lo, params.prior.hi)});

    std::vector<DiseaseIndex> pool(params.n_diseases);
    for (std::size_t j = 0; j < params.n_findings; ++j) {
        Finding f;
        f.id = "F" + std::to_string(j + 1);
        const std::size_t k = rng.between(params.parents_min, params.parents_max);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t m = 0; m < k; ++m) {
            const std::size_t pick = m + rng.below(pool.size() - m);
            std::swap(pool[m], pool[pick]);
            f.parents.push_back({pool[m], rng.uniform(params.activation.lo, params.activation.hi)});
        }
        f.leak = params.leak.hi > 0.0 ? rng.uniform(params.leak.lo, params.leak.hi) : 0.0;
        net.findings.push_back(std::move(f));
    }
    canonicalize(net);
    validate(net);
    return net;
}

Network chain_network(std::size_t m, double prior, double activation) {
    if (m < 1) throw ValidationError("chain needs at least one finding");
    Network net;
    for (std::size_t i = 0; i <= m; ++i) net.diseases.push_back({"D" + std::to_string(i + 1), prior});
    for (std::size_t j = 0; j < m; ++j)
        net.findings.push_back({"F" + std::to_string(j + 1), 0.0, {{j, activation}, {j + 1, activation}}});
    validate(net);
    return net;
}

CaseEvidence sample_case(const Network& net, std::uint64_t seed, double report_fraction) {
    if (!(report_fraction >= 0.0 && report_fraction <= 1.0))
        throw ValidationError("report fraction must lie in [0,1]");
    Rng rng(seed);
    std::vector<char> present(net.num_diseases());
    for (DiseaseIndex i = 0; i < net.num_diseases(); ++i) present[i] = rng.bernoulli(net.diseases[i].prior);

    CaseEvidence evidence;
    for (FindingIndex j = 0; j < net.num_findings(); ++j) {
        const Finding& f = net.findings[j];
        double fail = 1.0 - f.leak;
        for (const Link& link : f.parents)
            if (present[link.disease]) fail *= 1.0 - link.activation;
        const bool fires = !rng.bernoulli(fail);
        if (!rng.bernoulli(report_fraction)) continue;
        (fires ? evidence.positives : evidence.negatives).push_back(j);
    }
    return evidence;
}

}  // namespace bn2o
