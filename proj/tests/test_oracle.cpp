#include "tonealloc/oracle.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "reference.hpp"
#include "tonealloc/errors.hpp"
#include "tonealloc/scenario_io.hpp"

namespace tonealloc {
namespace {

TEST(DualOracle, SingleUserSingleTone) {
  const Scenario s = ref::uniform_scenario(1, 1, 1.0, 2.0);
  // Closed form: the whole budget on the only tone gives ln(1 + 2).
  EXPECT_NEAR(ref::best_exclusive(s, 2000), std::log(3.0), 1e-12);
  const DualOracleResult r = dual_oracle_solve(s);
  EXPECT_NEAR(r.primal_value, std::log(3.0), 1e-9);
  EXPECT_NEAR(r.dual_value, std::log(3.0), 1e-9);
  EXPECT_NEAR(r.gap(), 0.0, 1e-9);
}

TEST(DualOracle, SymmetricTwoByTwo) {
  const Scenario s = ref::uniform_scenario(2, 2);
  const DualOracleResult r = dual_oracle_solve(s);
  EXPECT_NEAR(r.primal_value, 2 * std::log(2.0), 1e-4);
  EXPECT_GE(r.gap(), -1e-9);
  EXPECT_FALSE(check_allocation(s, r.allocation));
}

TEST(DualOracle, WeakDualityOnRandomScenarios) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Scenario s = generate_random_scenario(seed, 3, 4);
    DualOracleOptions o;
    o.iters = 3000;
    const DualOracleResult r = dual_oracle_solve(s, o);
    EXPECT_GE(r.dual_value + 1e-9, r.primal_value) << seed;
    EXPECT_NEAR(r.primal_value, objective(s, r.allocation), 1e-12);
    EXPECT_FALSE(check_allocation(s, r.allocation));
  }
}

TEST(DualOracle, HistoryMatchesIterations) {
  DualOracleOptions o;
  o.iters = 40;
  o.record_history = true;
  const DualOracleResult r =
      dual_oracle_solve(generate_random_scenario(1, 2, 3), o);
  EXPECT_EQ(r.dual_history.size(), r.iterations);
  EXPECT_GE(r.price_history.size(), r.iterations);
  EXPECT_EQ(r.price_history.front(), std::vector<double>(3, 0.0));
}

TEST(DualOracle, RejectsBadOptions) {
  const Scenario s = ref::uniform_scenario(1, 1);
  DualOracleOptions o;
  o.iters = 0;
  EXPECT_THROW((void)dual_oracle_solve(s, o), DomainError);
  o = {};
  o.tol = 0;
  EXPECT_THROW((void)dual_oracle_solve(s, o), DomainError);
}

TEST(GridOracle, SingleUserSingleTone) {
  const GridOracleResult g =
      exhaustive_grid_solve(ref::uniform_scenario(1, 1, 1.0, 2.0), 11);
  EXPECT_NEAR(g.best_value, std::log(3.0), 1e-12);
  EXPECT_EQ(g.assignments, 2u);
}

TEST(GridOracle, IdenticalUsersOneTone) {
  Scenario s = ref::uniform_scenario(2, 1, 1.5, 3.0);
  const GridOracleResult g = exhaustive_grid_solve(s, 11);
  EXPECT_NEAR(g.best_value, std::log(1 + 3.0 * 1.5), 1e-12);
  EXPECT_EQ(g.allocation.owner(0), 0u);
}

TEST(GridOracle, SymmetricTwoByTwo) {
  const GridOracleResult g =
      exhaustive_grid_solve(ref::uniform_scenario(2, 2), 11);
  EXPECT_EQ(g.assignments, 9u);
  EXPECT_NEAR(g.best_value, 2 * std::log(2.0), 1e-12);
  EXPECT_NE(*g.allocation.owner(0), *g.allocation.owner(1));
}

TEST(GridOracle, AgreesWithReferenceEnumeration) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scenario s = generate_random_scenario(seed, 2, 2);
    const GridOracleResult g = exhaustive_grid_solve(s, 51);
    EXPECT_NEAR(g.best_value, ref::best_exclusive(s, 50), 1e-12);
    EXPECT_FALSE(check_allocation(s, g.allocation));
    EXPECT_NEAR(objective(s, g.allocation), g.best_value, 1e-12);
  }
}

TEST(GridOracle, ErrorBoundCoversFineReference) {
  const Scenario s = generate_random_scenario(3, 2, 2);
  const GridOracleResult g = exhaustive_grid_solve(s, 21);
  EXPECT_GE(g.best_value + g.error_bound, ref::best_exclusive(s, 2000));
}

TEST(GridOracle, Limits) {
  EXPECT_THROW((void)exhaustive_grid_solve(ref::uniform_scenario(3, 4), 11),
               SizeError);
  EXPECT_THROW((void)exhaustive_grid_solve(ref::uniform_scenario(1, 1), 10),
               DomainError);
  EXPECT_NO_THROW((void)exhaustive_grid_solve(ref::uniform_scenario(3, 3), 11));
}

}  // namespace
}  // namespace tonealloc
