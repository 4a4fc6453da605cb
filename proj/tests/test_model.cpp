#include "tonealloc/model.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "reference.hpp"
#include "tonealloc/errors.hpp"

namespace tonealloc {
namespace {

Link make(double h, double s2, double beta, double smax = kInf) {
  return {h, s2, beta, smax};
}

TEST(EffectiveSinr, Examples) {
  EXPECT_EQ(effective_sinr(0.0, make(1, 1, 0.5)), 0.0);
  EXPECT_DOUBLE_EQ(effective_sinr(3.0, make(1, 1, 0)), 3.0);
  EXPECT_DOUBLE_EQ(effective_sinr(10.0, make(1, 1, 0.1)), 5.0);
}

TEST(EffectiveSinr, RejectsBadPower) {
  EXPECT_THROW((void)effective_sinr(-1.0, make(1, 1, 0)), DomainError);
  EXPECT_THROW((void)effective_sinr(NAN, make(1, 1, 0)), DomainError);
  EXPECT_THROW((void)effective_sinr(kInf, make(1, 1, 0)), DomainError);
  EXPECT_THROW((void)capped_rate(-1e-9, make(1, 1, 0)), DomainError);
  EXPECT_THROW((void)rate_derivative(-1.0, make(1, 1, 0)), DomainError);
}

TEST(EffectiveSinr, RejectsBadLink) {
  EXPECT_THROW((void)effective_sinr(1.0, make(0, 1, 0)), DomainError);
  EXPECT_THROW((void)effective_sinr(1.0, make(1, 0, 0)), DomainError);
  EXPECT_THROW((void)effective_sinr(1.0, make(1, 1, -0.1)), DomainError);
  EXPECT_THROW((void)capped_rate(1.0, make(1, 1, 0, 0)), DomainError);
}

TEST(CappedRate, Examples) {
  EXPECT_EQ(capped_rate(0.0, make(2, 1, 0.3, 4)), 0.0);
  // q_cap = 1 / (1 - 0.5) = 2 and s(2) = 1 exactly.
  EXPECT_DOUBLE_EQ(cap_power(make(1, 1, 0.5, 1)), 2.0);
  EXPECT_DOUBLE_EQ(effective_sinr(2.0, make(1, 1, 0.5, 1)), 1.0);
  EXPECT_NEAR(capped_rate(2.0, make(1, 1, 0.5, 1)), std::log(2.0), 1e-15);
  EXPECT_NEAR(capped_rate(100.0, make(1, 1, 0.5, 1)), std::log(2.0), 1e-15);
}

TEST(CappedRate, FlatBeyondCapOnGrid) {
  const Link l = make(1, 1, 0.5, 1);
  for (double q = 2.0; q <= 100.0; q += 0.01) {
    EXPECT_NEAR(capped_rate(q, l), std::log(2.0), 1e-15) << q;
  }
}

TEST(CappedRate, MatchesReferenceFormula) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Link l = make(0.1 + 10 * u(rng), 0.5 + u(rng), 0.3 * u(rng),
                        i % 2 ? kInf : 1 + 10 * u(rng));
    const double q = 20 * u(rng);
    EXPECT_NEAR(capped_rate(q, l), ref::rate(q, l), 1e-14);
  }
}

TEST(CapPower, Reachability) {
  EXPECT_FALSE(cap_reachable(make(1, 1, 0)));
  EXPECT_TRUE(std::isinf(cap_power(make(1, 1, 0))));
  EXPECT_FALSE(cap_reachable(make(1, 1, 0.5, 2)));  // beta * s_max = 1
  EXPECT_TRUE(cap_reachable(make(1, 1, 0, 3)));
  EXPECT_DOUBLE_EQ(cap_power(make(1, 1, 0, 3)), 3.0);
  EXPECT_DOUBLE_EQ(cap_power(make(2, 4, 0.1, 5)), 4 * 5 / (2 * 0.5));
}

TEST(RateDerivative, Examples) {
  EXPECT_DOUBLE_EQ(rate_derivative(0.0, make(1, 1, 0)), 1.0);
  EXPECT_DOUBLE_EQ(rate_derivative(1.0, make(1, 1, 0)), 0.5);
  EXPECT_NEAR(rate_derivative(1.0, make(1, 1, 0.5)), 0.26666666666666666,
              1e-15);
}

TEST(RateDerivative, ExampleAgreesWithFiniteDifference) {
  const Link l = make(1, 1, 0.5);
  const double fd =
      ref::centered_difference([&](double q) { return ref::rate(q, l); }, 1.0,
                               1e-6);
  EXPECT_NEAR(fd, 1.0 / (1.5 * 2.5), 1e-9);
}

TEST(RateDerivative, KinkAndBeyond) {
  const Link l = make(1, 1, 0.5, 1);  // q_cap = 2
  const double left = 1.0 / ((1 + 0.5 * 2) * (1 + 1.5 * 2));
  EXPECT_DOUBLE_EQ(rate_derivative(2.0, l), left);
  EXPECT_EQ(rate_derivative(2.0 + 1e-9, l), 0.0);
  EXPECT_EQ(rate_derivative(50.0, l), 0.0);
}

TEST(ScenarioValidation, AcceptsUniform) {
  EXPECT_NO_THROW(validate(ref::uniform_scenario(2, 3)));
}

TEST(ScenarioValidation, NamesFieldAndIndex) {
  Scenario s = ref::uniform_scenario(2, 2);
  s.power_budget[1] = -1.0;
  try {
    validate(s);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "power_budget[1] must be > 0");
  }
  s = ref::uniform_scenario(2, 2);
  s.self_noise[0] = -0.5;
  EXPECT_THROW(validate(s), ValidationError);
  s = ref::uniform_scenario(2, 2);
  s.gain.pop_back();
  EXPECT_THROW(validate(s), ValidationError);
  s = ref::uniform_scenario(2, 2);
  s.snr_cap[0] = 0.0;
  EXPECT_THROW(validate(s), ValidationError);
  s = ref::uniform_scenario(2, 2);
  s.num_users = 0;
  EXPECT_THROW(validate(s), ValidationError);
}

}  // namespace
}  // namespace tonealloc
