#include "bn2o/oracle.hpp"

#include <cmath>
#include <cstdint>

#include "bn2o/errors.hpp"

namespace bn2o {

namespace {

// Neumaier's compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) carry += (sum - t) + v;
        else carry += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

// Probability that every trigger of finding `f` fails under `present`.
template <typename Present>
double all_fail(const Finding& f, Present present) {
    double fail = 1.0 - f.leak;
    for (const Link& link : f.parents)
        if (present(link.disease)) fail *= 1.0 - link.activation;
    return fail;
}

template <typename Present>
double joint(const Network& net, const CaseEvidence& evidence, Present present) {
    double p = 1.0;
    for (DiseaseIndex i = 0; i < net.num_diseases(); ++i)
        p *= present(i) ? net.diseases[i].prior : 1.0 - net.diseases[i].prior;
    for (FindingIndex j : evidence.positives) p *= 1.0 - all_fail(net.findings[j], present);
    for (FindingIndex j : evidence.negatives) p *= all_fail(net.findings[j], present);
    return p;
}

}  // namespace

double joint_probability(const Network& net, const std::vector<bool>& config,
                         const CaseEvidence& evidence) {
    if (config.size() != net.num_diseases())
        throw ValidationError("disease assignment has " + std::to_string(config.size()) +
                              " entries, network has " + std::to_string(net.num_diseases()));
    return joint(net, evidence, [&](DiseaseIndex i) { return static_cast<bool>(config[i]); });
}

OracleResult enumerate_posteriors(const Network& net, const CaseEvidence& evidence) {
    const std::size_t n = net.num_diseases();
    if (n > kOracleMaxDiseases) throw TooManyDiseases(n, kOracleMaxDiseases);

    CompensatedSum total;
    std::vector<CompensatedSum> clamped(n);
    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        const double p = joint(net, evidence, [mask](DiseaseIndex i) { return (mask >> i & 1U) != 0; });
        total.add(p);
        for (DiseaseIndex i = 0; i < n; ++i)
            if (mask >> i & 1U) clamped[i].add(p);
    }

    OracleResult result;
    result.p_evidence = total.value();
    if (!(result.p_evidence > 0.0)) throw ZeroEvidence();
    result.marginals.reserve(n);
    for (const CompensatedSum& s : clamped) result.marginals.push_back(s.value() / result.p_evidence);
    return result;
}

}  // namespace bn2o
