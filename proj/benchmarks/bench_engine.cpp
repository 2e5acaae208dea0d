#include <benchmark/benchmark.h>

#include "bn2o/approx.hpp"
#include "bn2o/engine.hpp"
#include "bn2o/gen.hpp"
#include "bn2o/quickscore.hpp"

namespace {

using namespace bn2o;

CaseEvidence all_positive(const Network& net) {
    CaseEvidence e;
    for (FindingIndex j = 0; j < net.num_findings(); ++j) e.positives.push_back(j);
    return e;
}

Network random_net(std::size_t diseases, std::size_t findings, std::uint64_t seed) {
    RandomNetworkParams p;
    p.n_diseases = diseases;
    p.n_findings = findings;
    p.parents_min = 3;
    p.parents_max = 8;
    p.leak = {0.0, 0.01};
    p.seed = seed;
    return random_network(p);
}

void report(benchmark::State& state, const CostCounters& cost) {
    state.counters["mults"] = static_cast<double>(cost.multiplications);
    state.counters["distributions"] = static_cast<double>(cost.distributions);
}

void BM_ChainRecursive(benchmark::State& state) {
    const Network net = chain_network(static_cast<std::size_t>(state.range(0)), 0.5, 0.8);
    const CaseEvidence e = all_positive(net);
    CostCounters cost;
    for (auto _ : state) {
        PosteriorResult r = posteriors(net, e);
        cost = r.cost;
        benchmark::DoNotOptimize(r);
    }
    report(state, cost);
}
BENCHMARK(BM_ChainRecursive)->DenseRange(4, 16, 4)->Arg(64);

void BM_ChainQuickscore(benchmark::State& state) {
    const Network net = chain_network(static_cast<std::size_t>(state.range(0)), 0.5, 0.8);
    const CaseEvidence e = all_positive(net);
    CostCounters cost;
    for (auto _ : state) {
        QuickscoreResult r = quickscore_posteriors(net, e);
        cost = r.cost;
        benchmark::DoNotOptimize(r);
    }
    report(state, cost);
}
BENCHMARK(BM_ChainQuickscore)->DenseRange(4, 16, 4);

// All posteriors versus one target on a 100-disease network.
void BM_AllPosteriors(benchmark::State& state) {
    const Network net = random_net(100, static_cast<std::size_t>(state.range(0)), 1);
    const CaseEvidence e = all_positive(net);
    CostCounters cost;
    for (auto _ : state) {
        PosteriorResult r = posteriors(net, e);
        cost = r.cost;
        benchmark::DoNotOptimize(r);
    }
    report(state, cost);
}
BENCHMARK(BM_AllPosteriors)->Arg(4)->Arg(8)->Arg(12);

void BM_SinglePosterior(benchmark::State& state) {
    const Network net = random_net(100, static_cast<std::size_t>(state.range(0)), 1);
    const CaseEvidence e = all_positive(net);
    CostCounters cost;
    for (auto _ : state) {
        SinglePosterior r = posterior_single(net, e, 0);
        cost = r.cost;
        benchmark::DoNotOptimize(r);
    }
    report(state, cost);
}
BENCHMARK(BM_SinglePosterior)->Arg(4)->Arg(8)->Arg(12);

void BM_NegativeOnly(benchmark::State& state) {
    const Network net = random_net(600, static_cast<std::size_t>(state.range(0)), 2);
    CaseEvidence e;
    for (FindingIndex j = 0; j < net.num_findings(); ++j) e.negatives.push_back(j);
    for (auto _ : state) benchmark::DoNotOptimize(posteriors(net, e));
}
BENCHMARK(BM_NegativeOnly)->Arg(100)->Arg(1000);

void BM_Incremental(benchmark::State& state) {
    const Network net = random_net(30, 10, 3);
    const CaseEvidence e = all_positive(net);
    for (auto _ : state) benchmark::DoNotOptimize(run_incremental(net, e, OrderPolicy::heuristic()));
}
BENCHMARK(BM_Incremental);

}  // namespace

BENCHMARK_MAIN();
