#pragma once

#include <cstdint>
#include <vector>

#include "bn2o/gen.hpp"
#include "bn2o/model.hpp"

namespace bn2o::testing {

// One disease (p=0.5), one finding (c=0.8, leak=0.1).
inline Network single_leak_net() {
    return parse_network("bn2o 1\ndisease D1 0.5\nfinding F1 leak=0.1\nedge F1 D1 0.8\n");
}

// Two diseases (p=0.5 each), one finding with c=0.8 and c=0.6, no leak.
inline Network two_disease_net() {
    return parse_network(
        "bn2o 1\ndisease D1 0.5\ndisease D2 0.5\nfinding F1\nedge F1 D1 0.8\nedge F1 D2 0.6\n");
}

// F1:{D1,D2}, F2:{D2,D3}, F3:{D3,D4}.
inline Network figure2_net() { return chain_network(3, 0.5, 0.8); }

inline CaseEvidence all_positive(const Network& net) {
    CaseEvidence e;
    for (FindingIndex j = 0; j < net.num_findings(); ++j) e.positives.push_back(j);
    return e;
}

struct Instance {
    Network net;
    CaseEvidence evidence;
};

// Small random network plus evidence where every finding is independently
// positive, negative or unobserved.
inline Instance random_instance(std::uint64_t seed, std::size_t max_diseases = 12,
                                std::size_t max_findings = 8, std::size_t max_parents = 4) {
    Rng rng(seed * 0x9E3779B97F4A7C15ULL + 1);
    RandomNetworkParams p;
    p.n_diseases = rng.between(2, max_diseases);
    p.n_findings = rng.between(1, max_findings);
    p.parents_min = 1;
    p.parents_max = std::min(max_parents, p.n_diseases);
    p.prior = {0.05, 0.95};
    p.activation = {0.05, 0.95};
    p.leak = rng.bernoulli(0.5) ? Interval{0.0, 0.0} : Interval{0.01, 0.1};
    p.seed = seed;
    Instance inst{random_network(p), {}};
    for (FindingIndex j = 0; j < inst.net.num_findings(); ++j) {
        const double u = rng.uniform();
        if (u < 0.45) inst.evidence.positives.push_back(j);
        else if (u < 0.8) inst.evidence.negatives.push_back(j);
    }
    return inst;
}

}  // namespace bn2o::testing
