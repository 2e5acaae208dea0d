#include <gtest/gtest.h>

#include "bn2o/gen.hpp"
#include "bn2o/oracle.hpp"
#include "fixtures.hpp"

namespace bn2o {
namespace {

TEST(JointProbability, NoActiveCauseMeansNoPositive) {
    const Network net = testing::two_disease_net();
    EXPECT_EQ(joint_probability(net, {false, false}, {{0}, {}}), 0.0);
}

TEST(JointProbability, BothTrueNoisyOr) {
    const Network net = testing::two_disease_net();
    const double expected = 0.25 * (1.0 - (1.0 - 0.8) * (1.0 - 0.6));
    EXPECT_NEAR(joint_probability(net, {true, true}, {{0}, {}}), expected, 1e-15);
}

TEST(JointProbability, AllFalseNegativeFinding) {
    const Network net = testing::two_disease_net();
    EXPECT_NEAR(joint_probability(net, {false, false}, {{}, {0}}), 0.25, 1e-15);
}

TEST(JointProbability, LeakActsAsAlwaysTrueParent) {
    const Network net = testing::single_leak_net();
    EXPECT_NEAR(joint_probability(net, {false}, {{0}, {}}), 0.5 * 0.1, 1e-15);
    EXPECT_NEAR(joint_probability(net, {true}, {{0}, {}}), 0.5 * (1 - 0.9 * 0.2), 1e-15);
}

TEST(EnumeratePosteriors, EmptyEvidenceGivesPriors) {
    const auto inst = testing::random_instance(11);
    const OracleResult r = enumerate_posteriors(inst.net, {});
    EXPECT_NEAR(r.p_evidence, 1.0, 1e-14);
    for (DiseaseIndex i = 0; i < inst.net.num_diseases(); ++i)
        EXPECT_NEAR(r.marginals[i], inst.net.diseases[i].prior, 1e-14);
}

TEST(EnumeratePosteriors, SingleDiseaseLeak) {
    const OracleResult r = enumerate_posteriors(testing::single_leak_net(), {{0}, {}});
    EXPECT_NEAR(r.p_evidence, 0.46, 1e-15);
    EXPECT_NEAR(r.marginals[0], 0.891304, 1e-6);
}

// Exact rational value 5104/15625 computed independently with fractions.
TEST(EnumeratePosteriors, Figure2Exact) {
    const Network net = testing::figure2_net();
    EXPECT_NEAR(enumerate_posteriors(net, testing::all_positive(net)).p_evidence, 5104.0 / 15625.0,
                1e-15);
}

TEST(EnumeratePosteriors, Errors) {
    RandomNetworkParams p;
    p.n_diseases = kOracleMaxDiseases + 1;
    p.n_findings = 1;
    EXPECT_THROW(enumerate_posteriors(random_network(p), {}), TooManyDiseases);
    const Network impossible = parse_network(
        "bn2o 1\ndisease D1 0.5\nfinding N\nedge N D1 1\nfinding P\nedge P D1 0.7\n");
    EXPECT_THROW(enumerate_posteriors(impossible, {{1}, {0}}), ZeroEvidence);
}

}  // namespace
}  // namespace bn2o
