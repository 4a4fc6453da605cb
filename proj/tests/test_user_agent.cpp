#include "tonealloc/user_agent.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "reference.hpp"
#include "tonealloc/errors.hpp"

namespace tonealloc {
namespace {

// Oracle values below were produced by ref::grid_argmax at step 1e-4 over
// [0, 100] (see BestResponseGridOracle) and then frozen.
constexpr double kRootBetaHalf = 2.3785095752200145;  // 0.75 q^2 + 2 q - 9 = 0
constexpr double kValueBetaHalf = 0.4976117228919933;

UserParams single_user(std::vector<Link> links, double P, double w = 1.0) {
  return {w, P, std::move(links)};
}

TEST(BestResponse, PriceAboveMarginalUtility) {
  const BestResponse r = per_tone_best_response(1, 10, 0.2, {1, 1, 0});
  EXPECT_EQ(r.q, 0.0);
  EXPECT_DOUBLE_EQ(r.v, -0.2);
  EXPECT_FALSE(r.demand);
}

TEST(BestResponse, WaterFilling) {
  const BestResponse r = per_tone_best_response(1, 0.5, 0, {1, 1, 0});
  EXPECT_DOUBLE_EQ(r.q, 1.0);
  EXPECT_NEAR(r.v, std::log(2.0) - 0.5, 1e-15);
  EXPECT_TRUE(r.demand);
}

TEST(BestResponse, SelfNoiseRoot) {
  const BestResponse r = per_tone_best_response(1, 0.1, 0, {1, 1, 0.5});
  EXPECT_NEAR(r.q, kRootBetaHalf, 1e-12);
  EXPECT_NEAR(r.v, kValueBetaHalf, 1e-12);
  EXPECT_TRUE(r.demand);
}

TEST(BestResponse, CapClamps) {
  const BestResponse r = per_tone_best_response(1, 0.1, 0, {1, 1, 0.5, 1});
  EXPECT_DOUBLE_EQ(r.q, 2.0);
  EXPECT_NEAR(r.v, std::log(2.0) - 0.2, 1e-15);
}

TEST(BestResponse, GridOracle) {
  struct Case {
    double w, lambda;
    Link link;
    double q, v;
  };
  const Case cases[] = {
      {1, 0.5, {1, 1, 0}, 1.0, std::log(2.0) - 0.5},
      {1, 0.1, {1, 1, 0.5}, kRootBetaHalf, kValueBetaHalf},
      {1, 0.1, {1, 1, 0.5, 1}, 2.0, std::log(2.0) - 0.2},
  };
  for (const Case& c : cases) {
    const ref::GridMax g = ref::grid_argmax(c.w, c.lambda, c.link, 100, 1e-4);
    EXPECT_NEAR(g.q, c.q, 1e-4);
    EXPECT_NEAR(g.value, c.v, 1e-7);
    const BestResponse r = per_tone_best_response(c.w, c.lambda, 0, c.link);
    EXPECT_GE(r.v, g.value - 1e-12);
  }
}

TEST(BestResponse, ZeroPowerPrice) {
  EXPECT_THROW((void)per_tone_best_response(1, 0, 0, {1, 1, 0}),
               UnboundedError);
  EXPECT_THROW((void)per_tone_best_response(1, 0, 0, {1, 1, 0.5, 2}),
               UnboundedError);
  const BestResponse r = per_tone_best_response(1, 0, 0, {1, 1, 0, 3});
  EXPECT_DOUBLE_EQ(r.q, 3.0);
  EXPECT_NEAR(r.v, std::log(4.0), 1e-15);
}

TEST(BestResponse, RejectsBadPrices) {
  EXPECT_THROW((void)per_tone_best_response(1, -1, 0, {1, 1, 0}), DomainError);
  EXPECT_THROW((void)per_tone_best_response(1, 1, -1, {1, 1, 0}), DomainError);
  EXPECT_THROW((void)per_tone_best_response(0, 1, 0, {1, 1, 0}), DomainError);
  EXPECT_THROW((void)per_tone_best_response(1, NAN, 0, {1, 1, 0}),
               DomainError);
}

TEST(BestResponse, TieAbstains) {
  // v is exactly zero when the price equals the surplus.
  const BestResponse r = per_tone_best_response(1, 0.5, 0, {1, 1, 0});
  const BestResponse t = per_tone_best_response(1, 0.5, r.v, {1, 1, 0});
  EXPECT_EQ(t.v, 0.0);
  EXPECT_FALSE(t.demand);
}

TEST(PowerPriceBisection, SlackBudgetWithReachableCap) {
  const UserParams u = single_user({{1, 1, 0, 3}}, 10);
  const PowerPriceSolution s = power_price_bisection(u, std::vector{0.0});
  EXPECT_EQ(s.lambda, 0.0);
  EXPECT_DOUBLE_EQ(s.responses[0].q, 3.0);
}

TEST(PowerPriceBisection, SingleTone) {
  const UserParams u = single_user({{1, 1, 0}}, 1);
  const PowerPriceSolution s = power_price_bisection(u, std::vector{0.0});
  EXPECT_NEAR(s.lambda, 0.5, 1e-9);
  EXPECT_NEAR(s.responses[0].q, 1.0, 1e-9);
  EXPECT_LE(s.total_power(), 1.0 * (1 + 1e-9));
}

TEST(PowerPriceBisection, TwoIdenticalTones) {
  const UserParams u = single_user({{1, 1, 0}, {1, 1, 0}}, 2);
  const PowerPriceSolution s =
      power_price_bisection(u, std::vector{0.0, 0.0});
  EXPECT_NEAR(s.lambda, 0.5, 1e-9);
  EXPECT_NEAR(s.responses[0].q, 1.0, 1e-9);
  EXPECT_NEAR(s.responses[1].q, 1.0, 1e-9);
}

// Plain bisection on lambda over golden-section responses.
double reference_lambda(const UserParams& u, const std::vector<double>& mu) {
  double lo = 0.0, hi = 0.0;
  for (const Link& l : u.links) hi = std::max(hi, u.weight * l.gain / l.noise);
  const double q_max = 10 * u.power_budget + 100;
  for (int i = 0; i < 100; ++i) {
    const double mid = (lo + hi) / 2;
    if (ref::demanded_power(u.weight, mid, u.links, mu, q_max) >
        u.power_budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

TEST(PowerPriceBisection, MatchesReferenceBisection) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    UserParams u;
    u.weight = 0.5 + 1.5 * u01(rng);
    u.power_budget = 1 + 4 * u01(rng);
    for (int n = 0; n < 4; ++n) {
      u.links.push_back({0.1 + 5 * u01(rng), 1.0, 0.2 * u01(rng), kInf});
    }
    const std::vector<double> mu(4, 0.0);
    const PowerPriceSolution s = power_price_bisection(u, mu);
    EXPECT_NEAR(s.lambda, reference_lambda(u, mu), 1e-6) << trial;
    EXPECT_NEAR(s.total_power(), u.power_budget, 1e-9 * u.power_budget);
  }
}

TEST(PowerPriceBisection, RestrictedToToneSet) {
  const UserParams u = single_user({{1, 1, 0}, {1, 1, 0}, {1, 1, 0}}, 1);
  const std::vector<std::size_t> tones{2};
  const PowerPriceSolution s =
      power_price_bisection(u, std::vector<double>(3, 0.0), tones);
  EXPECT_FALSE(s.responses[0].demand);
  EXPECT_FALSE(s.responses[1].demand);
  EXPECT_NEAR(s.powers()[2], 1.0, 1e-9);
  const std::vector<std::size_t> bad{3};
  EXPECT_THROW(
      (void)power_price_bisection(u, std::vector<double>(3, 0.0), bad),
      DomainError);
}

TEST(PowerPriceBisection, RejectsPriceVectorOfWrongLength) {
  const UserParams u = single_user({{1, 1, 0}}, 1);
  EXPECT_THROW((void)power_price_bisection(u, std::vector{0.0, 0.0}),
               DomainError);
}

TEST(AllocatePower, SingleToneUsesWholeBudget) {
  const UserParams u = single_user({{1, 1, 0}}, 2);
  const std::vector<std::size_t> tones{0};
  const PowerSplit p = allocate_power(u, tones);
  EXPECT_NEAR(p.power[0], 2.0, 1e-9);
  EXPECT_NEAR(p.utility, std::log(3.0), 1e-9);
  EXPECT_EQ(allocate_power(u, {}).utility, 0.0);
}

TEST(UserDual, SingleToneHasNoGap) {
  const UserParams u = single_user({{1, 1, 0}}, 1);
  const UserDual d = user_dual(u, std::vector{0.0});
  EXPECT_NEAR(d.value, std::log(2.0), 1e-9);
  EXPECT_EQ(d.share[0], 1.0);
}

TEST(TieOffsets, UserZeroSeesTruePrices) {
  EXPECT_EQ(tie_offsets(0, 4, 0.05), std::vector<double>(4, 0.0));
  EXPECT_EQ(tie_offsets(3, 4, 0.0), std::vector<double>(4, 0.0));
  const auto o = tie_offsets(2, 3, 0.05);
  EXPECT_NEAR(o[0], 2 * 0.05 * 0.6180339887498949, 1e-15);
  for (double x : o) {
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 2 * 0.05);
  }
}

TEST(BuildBid, AllNegative) {
  UserState st;
  st.user_id = 4;
  st.last_responses = {{0, -0.1, false}, {0, -0.3, false}};
  const Bid b = build_bid(st);
  EXPECT_EQ(b.user_id, 4u);
  EXPECT_EQ(b.demand, std::vector<bool>({false, false}));
}

TEST(BuildBid, SingleDemandedTone) {
  UserState st;
  st.last_responses.assign(5, {0, -1, false});
  st.last_responses[3] = {1.0, 0.2, true};
  const Bid b = build_bid(st);
  EXPECT_EQ(b.demand, std::vector<bool>({false, false, false, true, false}));
}

TEST(BuildBid, BothTonesProfitable) {
  const UserParams u = single_user({{1, 1, 0}, {2, 1, 0}}, 2);
  UserState st;
  respond_to_prices(st, u, std::vector{0.0, 0.0});
  EXPECT_EQ(build_bid(st).demand, std::vector<bool>({true, true}));
}

TEST(RespondToPrices, OffsetsShiftPrices) {
  const UserParams u = single_user({{1, 1, 0}}, 1);
  UserState st;
  st.price_offset = {0.5};
  respond_to_prices(st, u, std::vector{0.0});
  const PowerPriceSolution direct = power_price_bisection(u, std::vector{0.5});
  EXPECT_EQ(st.last_responses, direct.responses);
  st.price_offset = {0.5, 0.5};
  EXPECT_THROW(respond_to_prices(st, u, std::vector{0.0}), DomainError);
}

}  // namespace
}  // namespace tonealloc
