#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "bn2o/model.hpp"

namespace bn2o {

/// Reproducible random source for generated fixtures.
///
/// Algorithm: std::mt19937_64 seeded with the 64-bit seed. Reals are
/// (draw >> 11) * 2^-53, uniform on [0,1); integers in [0, n) use rejection
/// on the raw 64-bit draw. The standard library's distribution classes are
/// avoided because their output is implementation defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t below(std::uint64_t n);
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct RandomNetworkParams {
    std::size_t n_diseases = 10;
    std::size_t n_findings = 10;
    std::size_t parents_min = 1;
    std::size_t parents_max = 3;
    Interval prior{0.05, 0.95};
    Interval activation{0.05, 0.95};
    Interval leak{0.0, 0.0};
    std::uint64_t seed = 0;
};

/// Diseases D1..Dn, findings F1..Fm. Each finding draws its parent count
/// uniformly in [parents_min, parents_max], the parents uniformly without
/// replacement (partial Fisher-Yates), then activations and leak uniformly in
/// their intervals. Throws ValidationError on infeasible parameters.
Network random_network(const RandomNetworkParams& params);

/// m findings over m+1 diseases; finding Fj has parents Dj and Dj+1.
Network chain_network(std::size_t m, double prior, double activation);

/// Forward-samples diseases from their priors and findings from their
/// noisy-or conditionals, then reports each finding independently with
/// probability `report_fraction`.
CaseEvidence sample_case(const Network& net, std::uint64_t seed, double report_fraction);

}  // namespace bn2o
