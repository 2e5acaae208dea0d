#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bn2o/approx.hpp"
#include "bn2o/oracle.hpp"
#include "fixtures.hpp"

namespace bn2o {
namespace {

// F1 has 4 parents, F2 has 2, F3 has 7.
Network counts_4_2_7() {
    RandomNetworkParams p;
    p.n_diseases = 8;
    p.n_findings = 0;
    Network net = random_network(p);
    auto finding = [&](const char* id, std::size_t parents) {
        Finding f{id, 0.0, {}};
        for (DiseaseIndex d = 0; d < parents; ++d) f.parents.push_back({d, 0.5});
        net.findings.push_back(f);
    };
    finding("F1", 4);
    finding("F2", 2);
    finding("F3", 7);
    validate(net);
    return net;
}

TEST(ScoreFinding, Examples) {
    EXPECT_NEAR(score_finding(0.5, 4), 0.01, 1e-17);
    EXPECT_EQ(score_finding(0.0, 7), 0.0);
    EXPECT_LT(score_finding(0.2, 3), score_finding(0.3, 3));
    EXPECT_LT(score_finding(0.2, 3), score_finding(0.2, 4));
}

TEST(FindingPrior, EmptyEvidenceBothModes) {
    const Network net = parse_network("bn2o 1\ndisease D1 0.5\nfinding F1\nedge F1 D1 0.8\n");
    EXPECT_NEAR(finding_prior(net, {}, 0, PriorMode::kExact), 0.4, 1e-15);
    EXPECT_NEAR(finding_prior(net, {}, 0, PriorMode::kMarginal), 0.4, 1e-15);
}

TEST(FindingPrior, WeakLinkApproachesLeak) {
    const Network net = parse_network(
        "bn2o 1\ndisease D1 0.5\nfinding F1 leak=0.07\nedge F1 D1 1e-12\n");
    EXPECT_NEAR(finding_prior(net, {}, 0, PriorMode::kExact), 0.07, 1e-9);
    EXPECT_NEAR(finding_prior(net, {}, 0, PriorMode::kMarginal), 0.07, 1e-9);
}

TEST(FindingPrior, ExactModeMatchesOracle) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto inst = testing::random_instance(seed);
        std::vector<FindingIndex> unobserved;
        for (FindingIndex j = 0; j < inst.net.num_findings(); ++j)
            if (!std::count(inst.evidence.positives.begin(), inst.evidence.positives.end(), j) &&
                !std::count(inst.evidence.negatives.begin(), inst.evidence.negatives.end(), j))
                unobserved.push_back(j);
        if (unobserved.empty()) continue;
        const FindingIndex j = unobserved.front();
        CaseEvidence with_pos = inst.evidence;
        with_pos.positives.push_back(j);
        canonicalize(with_pos);
        const double expected = enumerate_posteriors(inst.net, with_pos).p_evidence /
                                enumerate_posteriors(inst.net, inst.evidence).p_evidence;
        EXPECT_NEAR(finding_prior(inst.net, inst.evidence, j, PriorMode::kExact), expected, 1e-9);
    }
}

TEST(FindingPrior, RejectsProcessedFinding) {
    const Network net = testing::two_disease_net();
    EXPECT_THROW(finding_prior(net, {{0}, {}}, 0, PriorMode::kMarginal), ValidationError);
    EXPECT_THROW(finding_prior(net, {}, 3, PriorMode::kMarginal), ValidationError);
}

TEST(OrderFindings, ByParentCount) {
    const Network net = counts_4_2_7();
    const CaseEvidence all{{0, 1, 2}, {}};
    EXPECT_EQ(order_findings(net, all, OrderPolicy::ascending()), (std::vector<FindingIndex>{1, 0, 2}));
    EXPECT_EQ(order_findings(net, all, OrderPolicy::descending()), (std::vector<FindingIndex>{2, 0, 1}));
    EXPECT_EQ(order_findings(net, all, OrderPolicy::heuristic()), (std::vector<FindingIndex>{1, 0, 2}));
    EXPECT_EQ(order_findings(net, all, OrderPolicy::explicit_order({2, 1, 0})),
              (std::vector<FindingIndex>{2, 1, 0}));
    EXPECT_THROW(order_findings(net, all, OrderPolicy::explicit_order({2, 1})), ValidationError);
    EXPECT_THROW(order_findings(net, all, OrderPolicy::explicit_order({2, 1, 1})), ValidationError);
}

TEST(OrderFindings, HeuristicSecondPhaseUsesScore) {
    // k=0: pick the lowest prior*sqrt(parents) first.
    const Network net = parse_network(
        "bn2o 1\ndisease D1 0.5\ndisease D2 0.05\n"
        "finding F1\nedge F1 D1 0.9\nfinding F2\nedge F2 D2 0.9\n");
    EXPECT_EQ(order_findings(net, {{0, 1}, {}}, OrderPolicy::heuristic(0)),
              (std::vector<FindingIndex>{1, 0}));
}

TEST(RunIncremental, SinglePositive) {
    const Network net = testing::two_disease_net();
    const ApproxTrace trace = run_incremental(net, {{0}, {}}, OrderPolicy::heuristic());
    ASSERT_EQ(trace.snapshots.size(), 2u);
    EXPECT_EQ(trace.snapshots[0], (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(trace.snapshots[1], posteriors(net, {{0}, {}}).marginals);
    EXPECT_EQ(trace.kl_curve.back(), 0.0);
    EXPECT_GT(trace.kl_curve.front(), 0.0);
    EXPECT_EQ(trace.lep_curve.back(), 1.0);
}

TEST(RunIncremental, InvariantsOnRandomCases) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto inst = testing::random_instance(seed, 12, 10, 4);
        for (PriorMode mode : {PriorMode::kExact, PriorMode::kMarginal}) {
            ApproxOptions opt;
            opt.prior_mode = mode;
            const ApproxTrace t = run_incremental(inst.net, inst.evidence, OrderPolicy::heuristic(2), opt);
            ASSERT_EQ(t.snapshots.size(), t.order.size() + 1);
            ASSERT_EQ(t.order.size(), inst.evidence.positives.size());
            EXPECT_EQ(t.kl_curve.back(), 0.0);
            EXPECT_EQ(t.lep_curve.size(), t.snapshots.size());
            for (double kl : t.kl_curve) EXPECT_GE(kl, 0.0);
            const auto final_post = posteriors(inst.net, inst.evidence).marginals;
            for (DiseaseIndex i = 0; i < final_post.size(); ++i)
                EXPECT_NEAR(t.snapshots.back()[i], final_post[i], 1e-12);
        }
    }
}

TEST(RunIncremental, MaxStepsTruncatesReference) {
    const Network net = chain_network(5, 0.5, 0.8);
    ApproxOptions opt;
    opt.max_steps = 2;
    const ApproxTrace t = run_incremental(net, testing::all_positive(net), OrderPolicy::ascending(), opt);
    EXPECT_EQ(t.order.size(), 2u);
    EXPECT_EQ(t.snapshots.size(), 3u);
    EXPECT_EQ(t.kl_curve.back(), 0.0);
    EXPECT_LT(t.lep_curve.back(), 1.0);
}

TEST(KlDivergence, Examples) {
    const std::vector<double> p{0.2, 0.7};
    EXPECT_EQ(kl_divergence(p, p), 0.0);
    EXPECT_NEAR(kl_divergence(std::vector<double>{1.0}, std::vector<double>{0.5}), std::log(2.0), 1e-15);
    const std::vector<double> a{0.1}, b{0.6};
    EXPECT_NE(kl_divergence(a, b), kl_divergence(b, a));
    EXPECT_TRUE(std::isfinite(kl_divergence(std::vector<double>{1.0}, std::vector<double>{0.0})));
    EXPECT_THROW(kl_divergence(a, p), ValidationError);
}

ApproxTrace trace_of(std::vector<std::vector<double>> snaps) {
    ApproxTrace t;
    t.lep_curve.assign(snaps.size(), 0.5);
    t.lep_curve.back() = 1.0;
    for (std::size_t i = 1; i < snaps.size(); ++i) t.order.push_back(i - 1);
    t.snapshots = std::move(snaps);
    return t;
}

TEST(SettlingMetrics, ConstantLeader) {
    const auto m = settling_metrics(trace_of({{0.9, 0.1, 0.2, 0.3, 0.4},
                                              {0.8, 0.4, 0.3, 0.1, 0.2},
                                              {0.7, 0.3, 0.4, 0.1, 0.2}}));
    EXPECT_EQ(m.one_ip, 0u);
    EXPECT_EQ(m.four_is, 1u);
    EXPECT_EQ(m.four_ip, 2u);
    EXPECT_NEAR(m.error_top, 0.2, 1e-15);
    EXPECT_EQ(m.lep, 0.5);
    EXPECT_EQ(m.flep, 1.0);
}

TEST(SettlingMetrics, FewerThanFourDiseases) {
    const auto m = settling_metrics(trace_of({{0.1, 0.5}, {0.6, 0.5}, {0.6, 0.5}}));
    EXPECT_EQ(m.four_is, 0u);
    EXPECT_EQ(m.four_ip, 1u);
    EXPECT_EQ(m.one_ip, 1u);
}

TEST(SettlingMetrics, LeaderFlipsAtLastStep) {
    const auto m = settling_metrics(trace_of({{0.9, 0.1}, {0.9, 0.1}, {0.9, 0.1}, {0.2, 0.8}}));
    EXPECT_EQ(m.one_ip, 3u);
    EXPECT_EQ(m.error_top, 0.0);
    EXPECT_EQ(m.lep, 1.0);
}

TEST(WriteTraceTsv, Format) {
    const Network net = testing::two_disease_net();
    const ApproxTrace trace = run_incremental(net, {{0}, {}}, OrderPolicy::ascending());
    std::ostringstream out;
    write_trace_tsv(out, trace, net);
    const std::string text = out.str();
    EXPECT_EQ(text.rfind("step\tfinding_id\tlep\tkl\tmults\n0\t-\t", 0), 0u) << text;
    EXPECT_NE(text.find("\n1\tF1\t1\t0\t"), std::string::npos) << text;
}

}  // namespace
}  // namespace bn2o
