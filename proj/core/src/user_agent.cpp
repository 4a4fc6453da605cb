#include "tonealloc/user_agent.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>

#include "tonealloc/errors.hpp"

namespace tonealloc {
namespace {

void check_response_args(double weight, double lambda, double mu) {
  if (!(std::isfinite(weight) && weight > 0.0)) {
    throw DomainError("weight must be finite and > 0");
  }
  if (!(std::isfinite(lambda) && lambda >= 0.0)) {
    throw DomainError("power price must be finite and >= 0");
  }
  if (!(std::isfinite(mu) && mu >= 0.0)) {
    throw DomainError("tone price must be finite and >= 0");
  }
}

// Positive root in u = h q / sigma^2 of
//   beta (1 + beta) u^2 + (1 + 2 beta) u + (1 - g) = 0,   g > 1,
// which is the stationarity condition w h sigma^2 = lambda (sigma^2 + beta h q)
// (sigma^2 + (1 + beta) h q) divided through by sigma^4.
double stationary_snr(double g, double beta) {
  const double a = beta * (1.0 + beta);
  const double b = 1.0 + 2.0 * beta;
  const double minus_c = g - 1.0;
  if (a < 1e-14 * std::max(b, minus_c)) return minus_c / b;
  return 2.0 * minus_c / (b + std::sqrt(b * b + 4.0 * a * minus_c));
}

// Unchecked core of per_tone_best_response; arguments already validated.
BestResponse best_response(double weight, double lambda, double mu,
                           const Link& link, double q_cap) {
  double q = 0.0;
  if (lambda == 0.0) {
    q = q_cap;
  } else {
    const double g = weight * link.gain / (lambda * link.noise);
    if (g > 1.0) {
      q = std::min(stationary_snr(g, link.self_noise) * link.noise / link.gain,
                   q_cap);
    }
  }
  const double received = link.gain * q;
  const double s = received / (link.noise + link.self_noise * received);
  BestResponse r;
  r.q = q;
  r.v = weight * std::log1p(std::fmin(s, link.snr_cap)) - lambda * q - mu;
  r.demand = r.v > 0.0;
  return r;
}

// Bracketing search on the nonincreasing demanded power D(lambda). Steps are
// regula falsi with the Illinois weight halving; a plain bisection step is
// forced whenever the previous step failed to halve the bracket, so the
// bracket at least halves every two evaluations even across a jump in D.
class PowerPriceSearch {
 public:
  PowerPriceSearch(const UserParams& user, std::span<const double> prices,
                   std::vector<char> eligible)
      : user_(user), prices_(prices), eligible_(std::move(eligible)) {
    if (prices_.size() != user_.links.size()) {
      throw DomainError("price vector has " + std::to_string(prices_.size()) +
                        " entries for " + std::to_string(user_.links.size()) +
                        " tones");
    }
    for (double mu : prices_) {
      if (!(std::isfinite(mu) && mu >= 0.0)) {
        throw DomainError("tone prices must be finite and >= 0");
      }
    }
    if (!(std::isfinite(user_.weight) && user_.weight > 0.0)) {
      throw DomainError("weight must be finite and > 0");
    }
    if (!(std::isfinite(user_.power_budget) && user_.power_budget > 0.0)) {
      throw DomainError("power budget must be finite and > 0");
    }
    q_cap_.resize(user_.links.size());
    for (std::size_t n = 0; n < user_.links.size(); ++n) {
      validate_link(user_.links[n]);
      q_cap_[n] = cap_power(user_.links[n]);
    }
  }

  PowerPriceSolution solve() {
    const double budget = user_.power_budget;
    const double tol = kBudgetRelTolerance * budget;

    double lambda_max = 0.0;
    bool zero_ok = true;
    bool any = false;
    for (std::size_t n = 0; n < user_.links.size(); ++n) {
      if (!eligible_[n]) continue;
      any = true;
      const Link& l = user_.links[n];
      lambda_max = std::max(lambda_max, user_.weight * l.gain / l.noise);
      zero_ok = zero_ok && cap_reachable(l);
    }

    PowerPriceSolution out;
    if (!any) {
      out.responses = responses(0.0);
      return out;
    }

    // lambda = 0 has no maximizer when some cap is unreachable; start just
    // above it instead.
    double lo = zero_ok ? 0.0 : 1e-12 * lambda_max;
    double d_lo = demanded_power(lo);
    ++out.iterations;
    if (d_lo <= budget) {
      out.lambda = out.lambda_lower = lo;
      out.responses = responses(lo);
      return out;
    }

    double hi = lambda_max;
    double d_hi = demanded_power(hi);
    ++out.iterations;
    // Regula falsi weights for f = D - budget; halved on repeated sides.
    double f_lo = d_lo - budget;
    double f_hi = d_hi - budget;
    int last_side = 0;
    bool bisect_next = false;
    double width = hi - lo;
    while (budget - d_hi > tol) {
      if (hi - lo <= 2.0 * DBL_EPSILON * hi + DBL_MIN) {
        out.jump = true;
        break;
      }
      if (out.iterations >= kMaxBisectionIterations) {
        throw NumericalError("power price search did not converge in " +
                             std::to_string(kMaxBisectionIterations) +
                             " iterations; bracket [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "]");
      }
      double x = lo + 0.5 * (hi - lo);
      if (!bisect_next && std::isfinite(f_lo) && f_lo > f_hi) {
        const double secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        if (secant > lo && secant < hi) x = secant;
      }
      const double d_x = demanded_power(x);
      ++out.iterations;
      if (d_x <= budget) {
        hi = x;
        d_hi = d_x;
        f_hi = d_x - budget;
        if (last_side == 1) f_lo *= 0.5;
        last_side = 1;
      } else {
        lo = x;
        d_lo = d_x;
        f_lo = d_x - budget;
        if (last_side == -1) f_hi *= 0.5;
        last_side = -1;
      }
      bisect_next = (hi - lo) > 0.5 * width;
      width = hi - lo;
    }
    out.lambda = hi;
    out.lambda_lower = lo;
    out.responses = responses(hi);
    return out;
  }

  double demanded_power(double lambda) const {
    double total = 0.0;
    for (std::size_t n = 0; n < user_.links.size(); ++n) {
      if (!eligible_[n]) continue;
      const BestResponse r = best_response(user_.weight, lambda, prices_[n],
                                           user_.links[n], q_cap_[n]);
      if (r.demand) total += r.q;
    }
    return total;
  }

  std::vector<BestResponse> responses(double lambda) const {
    std::vector<BestResponse> out(user_.links.size());
    for (std::size_t n = 0; n < user_.links.size(); ++n) {
      out[n] = eligible_[n] ? best_response(user_.weight, lambda, prices_[n],
                                            user_.links[n], q_cap_[n])
                            : BestResponse{0.0, -prices_[n], false};
    }
    return out;
  }

 private:
  const UserParams& user_;
  std::span<const double> prices_;
  std::vector<char> eligible_;
  std::vector<double> q_cap_;
};

}  // namespace

BestResponse per_tone_best_response(double weight, double lambda, double mu,
                                    const Link& link) {
  check_response_args(weight, lambda, mu);
  validate_link(link);
  const double q_cap = cap_power(link);
  if (lambda == 0.0 && !std::isfinite(q_cap)) {
    throw UnboundedError(
        "zero power price with an unreachable SNR cap has no finite "
        "maximizer");
  }
  return best_response(weight, lambda, mu, link, q_cap);
}

UserParams user_params(const Scenario& scenario, std::size_t user) {
  UserParams p;
  p.weight = scenario.weight[user];
  p.power_budget = scenario.power_budget[user];
  p.links.reserve(scenario.num_tones);
  for (std::size_t n = 0; n < scenario.num_tones; ++n) {
    p.links.push_back(scenario.link(user, n));
  }
  return p;
}

std::vector<double> PowerPriceSolution::powers() const {
  std::vector<double> p(responses.size(), 0.0);
  for (std::size_t n = 0; n < responses.size(); ++n) {
    if (responses[n].demand) p[n] = responses[n].q;
  }
  return p;
}

double PowerPriceSolution::total_power() const {
  const auto p = powers();
  return std::accumulate(p.begin(), p.end(), 0.0);
}

PowerPriceSolution power_price_bisection(const UserParams& user,
                                         std::span<const double> prices) {
  return PowerPriceSearch(user, prices,
                          std::vector<char>(user.links.size(), 1))
      .solve();
}

PowerPriceSolution power_price_bisection(const UserParams& user,
                                         std::span<const double> prices,
                                         std::span<const std::size_t> tones) {
  std::vector<char> eligible(user.links.size(), 0);
  for (std::size_t n : tones) {
    if (n >= eligible.size()) {
      throw DomainError("tone index " + std::to_string(n) + " out of range");
    }
    eligible[n] = 1;
  }
  return PowerPriceSearch(user, prices, std::move(eligible)).solve();
}

PowerSplit allocate_power(const UserParams& user,
                          std::span<const std::size_t> tones) {
  const std::vector<double> zero(user.links.size(), 0.0);
  const PowerPriceSolution sol = power_price_bisection(user, zero, tones);
  PowerSplit split;
  split.power = sol.powers();
  for (std::size_t n = 0; n < split.power.size(); ++n) {
    if (split.power[n] > 0.0) {
      split.utility += user.weight * capped_rate(split.power[n], user.links[n]);
    }
  }
  return split;
}

UserDual user_dual(const UserParams& user, std::span<const double> prices) {
  const PowerPriceSolution sol = power_price_bisection(user, prices);
  UserDual d;
  d.lambda = sol.lambda;
  d.value = sol.lambda * user.power_budget;
  d.share.assign(user.links.size(), 0.0);
  double used = 0.0;
  for (std::size_t n = 0; n < sol.responses.size(); ++n) {
    const BestResponse& r = sol.responses[n];
    d.value += std::max(0.0, r.v);
    if (r.demand) {
      d.share[n] = 1.0;
      used += r.q;
    }
  }
  if (sol.jump) {
    // Tones that drop out across the jump are time-shared so that the
    // budget is spent exactly.
    std::vector<std::size_t> tied;
    double tied_power = 0.0;
    for (std::size_t n = 0; n < sol.responses.size(); ++n) {
      if (sol.responses[n].demand) continue;
      const BestResponse below = per_tone_best_response(
          user.weight, sol.lambda_lower, prices[n], user.links[n]);
      if (below.demand) {
        tied.push_back(n);
        tied_power += below.q;
      }
    }
    if (tied_power > 0.0) {
      const double theta =
          std::clamp((user.power_budget - used) / tied_power, 0.0, 1.0);
      for (std::size_t n : tied) d.share[n] = theta;
    }
  }
  return d;
}

std::vector<double> tie_offsets(std::size_t user, std::size_t num_tones,
                                double margin) {
  constexpr double kPhi = 0.61803398874989484820;
  std::vector<double> out(num_tones, 0.0);
  if (user == 0 || margin == 0.0) return out;
  for (std::size_t n = 0; n < num_tones; ++n) {
    const double spread = std::fmod(static_cast<double>(n + 1) * kPhi, 1.0);
    out[n] = static_cast<double>(user) * margin * spread;
  }
  return out;
}

void respond_to_prices(UserState& state, const UserParams& user,
                       std::span<const double> prices) {
  PowerPriceSolution sol;
  if (state.price_offset.empty()) {
    sol = power_price_bisection(user, prices);
  } else {
    if (state.price_offset.size() != prices.size()) {
      throw DomainError("price offset length differs from the tone count");
    }
    std::vector<double> shifted(prices.begin(), prices.end());
    for (std::size_t n = 0; n < shifted.size(); ++n) {
      shifted[n] += state.price_offset[n];
    }
    sol = power_price_bisection(user, shifted);
  }
  state.lambda = sol.lambda;
  state.last_responses = std::move(sol.responses);
}

Bid build_bid(const UserState& state) {
  Bid bid;
  bid.user_id = state.user_id;
  bid.demand.reserve(state.last_responses.size());
  for (const BestResponse& r : state.last_responses) {
    bid.demand.push_back(r.demand);
  }
  return bid;
}

}  // namespace tonealloc
