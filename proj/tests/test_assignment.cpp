#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rbassign/assignment.hpp"
#include "rbassign/errors.hpp"

namespace rbassign {
namespace {

using oracle::make_instance;

TEST(Evaluate, AllZeroRatesIsInfeasible) {
  const Instance inst = make_instance({{0, 0}, {0, 0}}, {1, 1}, {0, 0}, {1});
  const auto report = evaluate(inst, Assignment{{0, 1}});
  EXPECT_EQ(report.ue_throughput, (std::vector<double>{0, 0}));
  EXPECT_FALSE(report.feasible);
  EXPECT_EQ(report.system_throughput(), 0.0);
}

TEST(Evaluate, OneCellCase) {
  const Instance inst = make_instance({{5}}, {3}, {0}, {1});
  const auto report = evaluate(inst, Assignment{{0}});
  EXPECT_EQ(report.ue_throughput[0], 5.0);
  EXPECT_TRUE(report.ue_satisfied[0]);
  EXPECT_TRUE(report.feasible);
}

TEST(Evaluate, MatchesLoopOracleOnRandomInstances) {
  std::mt19937_64 rng(17);
  ScenarioConfig config;
  for (int t = 0; t < 50; ++t) {
    const Instance inst = generate_instance(config, rng());
    std::uniform_int_distribution<int> ue(0, 3);
    Assignment a;
    for (int n = 0; n < 6; ++n) a.rb_owner.push_back(ue(rng));
    const auto report = evaluate(inst, a);
    const auto expected = oracle::evaluate(inst, a.rb_owner);
    EXPECT_EQ(report.ue_throughput, expected.throughput);
    for (int j = 0; j < 4; ++j) EXPECT_EQ(report.ue_satisfied[j], expected.satisfied[j] == 1);
    EXPECT_EQ(report.service_satisfied, expected.per_service);
    EXPECT_EQ(report.feasible, expected.feasible);
    EXPECT_EQ(report.system_throughput(), expected.total);
  }
}

TEST(Evaluate, DimensionMismatchThrows) {
  const Instance inst = make_instance({{1, 2}, {3, 4}}, {1, 1}, {0, 0}, {1});
  EXPECT_THROW(evaluate(inst, Assignment{{0}}), InvalidParameter);
  EXPECT_THROW(evaluate(inst, Assignment{{0, 2}}), InvalidParameter);
  EXPECT_THROW(evaluate(inst, Assignment{{-1, 0}}), InvalidParameter);
}

TEST(Reward, FeasibleIsThroughput) {
  const Instance inst = make_instance({{100, 0}, {0, 120}}, {50, 50}, {0, 0}, {2});
  EXPECT_EQ(reward(inst, Assignment{{0, 1}}), 220.0);
}

TEST(Reward, BoundaryCountsAsSatisfied) {
  const Instance inst = make_instance({{100, 0}, {0, 120}}, {100, 120}, {0, 0}, {2});
  const auto report = evaluate(inst, Assignment{{0, 1}});
  EXPECT_TRUE(report.feasible);
  EXPECT_EQ(reward(inst, report), 220.0);
}

TEST(Reward, HandTracedPenalty) {
  const Instance inst = make_instance({{100, 0}, {0, 50}}, {100, 100}, {0, 0}, {2});
  const Assignment a{{0, 1}};
  EXPECT_EQ(reward(inst, a), -0.5 / 150.0);
  EXPECT_EQ(reward(inst, a), oracle::reward(inst, a.rb_owner));
}

TEST(Reward, UnsatisfiedUeInSatisfiedServiceIsIgnored) {
  // Service 0 meets its quota of 1 with UE 0; UE 1 misses but adds nothing.
  // Service 1 (UE 2) misses: theta = (10 - 40) / 40.
  const Instance inst =
      make_instance({{100, 0, 0}, {0, 5, 0}, {0, 0, 10}}, {50, 50, 40}, {0, 0, 1}, {1, 1});
  EXPECT_DOUBLE_EQ(reward(inst, Assignment{{0, 1, 2}}), (-30.0 / 40.0) / 115.0);
}

TEST(Reward, ZeroThroughputCornerUsesFloorPenalty) {
  const Instance inst = make_instance({{0, 0}, {0, 0}}, {1, 1}, {0, 1}, {1, 1});
  EXPECT_EQ(reward(inst, Assignment{{0, 0}}), -2.0);
  EXPECT_EQ(zero_throughput_penalty(inst), -2.0);
}

TEST(RewardProperty, SignMatchesFeasibilityExhaustively) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const Instance inst = oracle::random_integer_instance(rng, 3, 4, {0, 0, 1}, {1, 1},
                                                          {40, 40, 60}, 40);
    oracle::for_each_assignment(3, 4, [&](const std::vector<int>& owner) {
      const auto report = evaluate(inst, Assignment{owner});
      if (report.system_throughput() <= 0) return;
      const double phi = reward(inst, report);
      EXPECT_EQ(phi > 0, report.feasible);
      EXPECT_EQ(phi, oracle::reward(inst, owner));
    });
  }
}

TEST(RewardProperty, ScalesWithRatesAndTargets) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    Instance inst = oracle::random_integer_instance(rng, 3, 4, {0, 0, 1}, {1, 1}, {30, 30, 40}, 40);
    Instance scaled = inst;
    const double c = 8.0;  // exact in binary
    scaled.rate *= c;
    for (double& q : scaled.qos) q *= c;
    oracle::for_each_assignment(3, 4, [&](const std::vector<int>& owner) {
      const auto report = evaluate(inst, Assignment{owner});
      if (!report.feasible) return;
      EXPECT_EQ(reward(scaled, Assignment{owner}), c * reward(inst, Assignment{owner}));
    });
  }
}

TEST(RewardProperty, PenaltyMonotoneInShortfall) {
  // Lowering an unsatisfied UE's rate in a violating service never raises
  // the accumulated shortfall. Checked through the total reward numerator.
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    Instance inst = oracle::random_integer_instance(rng, 2, 3, {0, 0}, {2}, {200, 200}, 100);
    const Assignment a{{0, 0, 1}};
    const auto before = evaluate(inst, a);
    if (before.feasible || before.ue_satisfied[1]) continue;
    const double phi_before = reward(inst, before);
    const double theta_before = phi_before * before.system_throughput();
    inst.rate(1, 2) = std::max(0.0, inst.rate(1, 2) - 10);
    const auto after = evaluate(inst, a);
    if (after.system_throughput() == 0) continue;
    const double theta_after = reward(inst, after) * after.system_throughput();
    EXPECT_LE(theta_after, theta_before + 1e-12);
  }
}

TEST(FeasibilityProperty, DirectCheckEqualsLinearizedForm) {
  std::mt19937_64 rng(8);
  ScenarioConfig config;
  for (int t = 0; t < 10; ++t) {
    const Instance inst = generate_instance(config, rng());
    oracle::for_each_assignment(4, 6, [&](const std::vector<int>& owner) {
      EXPECT_EQ(evaluate(inst, Assignment{owner}).feasible, oracle::linearized_feasible(inst, owner));
    });
  }
}

TEST(AssignmentIndex, RoundTripsLexicographically) {
  std::uint64_t index = 0;
  oracle::for_each_assignment(3, 4, [&](const std::vector<int>& owner) {
    EXPECT_EQ(assignment_from_index(index, 3, 4).rb_owner, owner);
    EXPECT_EQ(assignment_index(Assignment{owner}, 3), index);
    ++index;
  });
  EXPECT_EQ(index, 81u);
}

TEST(ReportCsv, OneRowPerUe) {
  const Instance inst = make_instance({{5, 1}, {2, 7}}, {3, 8}, {0, 1}, {1, 0});
  std::ostringstream out;
  write_report_csv(out, inst, evaluate(inst, Assignment{{0, 1}}));
  EXPECT_EQ(out.str(),
            "ue,service,throughput_bps,target_bps,satisfied\n0,0,5,3,1\n1,1,7,8,0\n");
}

}  // namespace
}  // namespace rbassign
