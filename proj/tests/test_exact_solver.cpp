#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rbassign/errors.hpp"
#include "rbassign/exact_solver.hpp"

namespace rbassign {
namespace {

using oracle::make_instance;

TEST(BruteForce, SingleUe) {
  const Instance ok = make_instance({{2, 3}}, {5}, {0}, {1});
  const auto r = solve_brute_force(ok);
  ASSERT_TRUE(r.feasible());
  EXPECT_EQ(r.objective, 5.0);
  EXPECT_EQ(r.best.rb_owner, (std::vector<int>{0, 0}));

  const Instance bad = make_instance({{2, 2}}, {5}, {0}, {1});
  EXPECT_FALSE(solve_brute_force(bad).feasible());
}

TEST(BruteForce, DominantUeTakesEverything) {
  const Instance inst =
      make_instance({{9, 9, 9}, {1, 2, 3}, {4, 5, 6}}, {10, 1, 1}, {0, 0, 1}, {1, 0});
  for (const auto& r : {solve_brute_force(inst), solve_pruned(inst)}) {
    ASSERT_TRUE(r.feasible());
    EXPECT_EQ(r.best.rb_owner, (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(r.objective, 27.0);
  }
}

TEST(BruteForce, TiesGoToLexicographicallySmallest) {
  const Instance inst = make_instance({{4, 4}, {4, 4}}, {1, 1}, {0, 0}, {1});
  const auto r = solve_brute_force(inst);
  EXPECT_EQ(r.best.rb_owner, (std::vector<int>{0, 0}));
}

TEST(BruteForce, BudgetExceededThrows) {
  ScenarioConfig config;
  const Instance inst = generate_instance(config, 1);
  EXPECT_THROW(solve_brute_force(inst, 4095), ResourceLimit);
  EXPECT_NO_THROW(solve_brute_force(inst, 4096));
}

TEST(Pruned, InfeasibleInstance) {
  const Instance inst = make_instance({{1, 1, 1}, {2, 2, 2}}, {100, 100}, {0, 1}, {1, 1});
  const auto r = solve_pruned(inst);
  EXPECT_EQ(r.status, SolveStatus::kInfeasible);
  EXPECT_GE(r.nodes_explored, 1u);
  EXPECT_FALSE(is_feasible(inst));
}

TEST(Pruned, AllRatesEqual) {
  const Instance inst = make_instance(std::vector<std::vector<double>>(4, std::vector<double>(6, 7)),
                                      {14, 14, 14, 7}, {0, 0, 1, 1}, {2, 1});
  const auto r = solve_pruned(inst);
  ASSERT_TRUE(r.feasible());
  EXPECT_EQ(r.objective, 42.0);
  EXPECT_TRUE(evaluate(inst, r.best).feasible);
}

TEST(Pruned, MatchesBruteForceOnIntegerInstances) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> q(0, 60);
  int feasible = 0;
  for (int t = 0; t < 1000; ++t) {
    const Instance inst = oracle::random_integer_instance(
        rng, 4, 6, {0, 0, 1, 1}, {2, 1},
        {double(q(rng) + 1), double(q(rng) + 1), double(q(rng) + 1), double(q(rng) + 1)}, 30);
    const auto brute = solve_brute_force(inst);
    const auto pruned = solve_pruned(inst);
    ASSERT_EQ(brute.status, pruned.status) << "trial " << t;
    ASSERT_EQ(brute.objective, pruned.objective) << "trial " << t;
    if (pruned.feasible()) {
      ++feasible;
      EXPECT_TRUE(evaluate(inst, pruned.best).feasible);
      EXPECT_EQ(evaluate(inst, pruned.best).system_throughput(), pruned.objective);
    }
  }
  EXPECT_GT(feasible, 100);
}

TEST(Pruned, OptimalityCertificateAgainstEnumeration) {
  std::mt19937_64 rng(100);
  ScenarioConfig config;
  for (int t = 0; t < 30; ++t) {
    const Instance inst = generate_instance(config, rng());
    const auto r = solve_pruned(inst);
    const auto expected = oracle::enumerate_optimum(inst);
    ASSERT_EQ(r.feasible(), expected.feasible);
    if (expected.feasible) {
      EXPECT_EQ(r.objective, expected.objective);
    }
  }
}

TEST(Pruned, ExploresFewerNodesThanEnumeration) {
  ScenarioConfig config;
  const Instance inst = generate_instance(config, 12);
  EXPECT_LT(solve_pruned(inst).nodes_explored, solve_brute_force(inst).nodes_explored);
}

TEST(OptResultCsv, OneLine) {
  const Instance inst = make_instance({{2, 3}}, {5}, {0}, {1});
  std::ostringstream out;
  write_opt_result_csv(out, 7, solve_pruned(inst));
  const std::string line = out.str();
  EXPECT_EQ(line.rfind("7,optimal,5,", 0), 0u);
  EXPECT_EQ(line.substr(line.size() - 5), ",0;0\n");
}

}  // namespace
}  // namespace rbassign
