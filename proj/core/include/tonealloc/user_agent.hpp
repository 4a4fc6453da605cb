#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tonealloc/messages.hpp"
#include "tonealloc/model.hpp"

namespace tonealloc {

/// A user's answer on one tone to the pair (power price, tone price).
struct BestResponse {
  double q = 0.0;       // maximizer of w * rate(q) - lambda * q
  double v = 0.0;       // net benefit at q, tone price already subtracted
  bool demand = false;  // v > 0; a tie at v == 0 abstains

  friend bool operator==(const BestResponse&, const BestResponse&) = default;
};

/// Closed-form maximizer of w * capped_rate(q) - lambda * q over q >= 0, and
/// the net benefit after paying the tone price mu.
///
/// Below the cap the stationarity condition is a quadratic in the received
/// SNR; its positive root is clamped to [0, cap_power]. With lambda == 0 the
/// smallest maximizer is the cap power, which only exists when the cap is
/// reachable; otherwise UnboundedError is thrown.
[[nodiscard]] BestResponse per_tone_best_response(double weight, double lambda,
                                                  double mu, const Link& link);

/// Everything a user knows about itself.
struct UserParams {
  double weight = 1.0;
  double power_budget = 1.0;
  std::vector<Link> links;  // one per tone
};

[[nodiscard]] UserParams user_params(const Scenario& scenario,
                                     std::size_t user);

/// Result of the local power-price search.
struct PowerPriceSolution {
  double lambda = 0.0;        // feasible end of the final bracket
  double lambda_lower = 0.0;  // infeasible end; equals lambda if never bracketed
  std::vector<BestResponse> responses;
  int iterations = 0;
  bool jump = false;  // demand fell discontinuously across the final bracket

  /// Power the user actually transmits on each tone (zero unless demanded).
  [[nodiscard]] std::vector<double> powers() const;
  [[nodiscard]] double total_power() const;
};

inline constexpr int kMaxBisectionIterations = 200;
inline constexpr double kBudgetRelTolerance = 1e-9;

/// Smallest power price lambda >= 0 at which the power spent on demanded
/// tones fits the budget. When the demanded power is continuous in lambda
/// the budget is met within 1e-9 * budget; across a discontinuity the
/// feasible side is returned and `jump` is set. Throws NumericalError after
/// kMaxBisectionIterations halvings.
[[nodiscard]] PowerPriceSolution power_price_bisection(
    const UserParams& user, std::span<const double> prices);

/// Same search restricted to `tones`; every other tone gets zero power and
/// never demands.
[[nodiscard]] PowerPriceSolution power_price_bisection(
    const UserParams& user, std::span<const double> prices,
    std::span<const std::size_t> tones);

/// Optimal power split over an owned set of tones (tone prices are sunk).
struct PowerSplit {
  std::vector<double> power;  // length N, zero off the set
  double utility = 0.0;       // weight * sum of rates
};

[[nodiscard]] PowerSplit allocate_power(const UserParams& user,
                                        std::span<const std::size_t> tones);

/// The user's term of the dual function under time sharing:
///   min over lambda of  sum_n max(0, max_q [w r_n(q) - lambda q] - mu_n)
///                       + lambda * budget,
/// evaluated at the bisection's lambda, together with a relaxed tone share
/// in [0, 1] per tone (fractional only on tones that tie at a jump).
struct UserDual {
  double lambda = 0.0;
  double value = 0.0;
  std::vector<double> share;
};

[[nodiscard]] UserDual user_dual(const UserParams& user,
                                 std::span<const double> prices);

/// Local state of one user agent.
struct UserState {
  std::size_t user_id = 0;
  double lambda = 0.0;
  std::vector<BestResponse> last_responses;
  /// Added per tone to the announced prices before the local solve; see
  /// tie_offsets().
  std::vector<double> price_offset;
};

/// Per-tone price offsets for a user: user k adds
///   k * margin * frac((n + 1) * phi)
/// on tone n (phi the golden-ratio conjugate). User 0 sees the true prices.
/// The tone-dependent factor keeps otherwise identical users from ranking
/// equal-sized tone sets the same way, which is what lets identical users
/// settle on distinct tones instead of flipping between them in lockstep.
[[nodiscard]] std::vector<double> tie_offsets(std::size_t user,
                                              std::size_t num_tones,
                                              double margin);

/// Runs the local solve against announced prices and stores the result.
void respond_to_prices(UserState& state, const UserParams& user,
                       std::span<const double> prices);

/// Demand bits and the user id; no gains, powers or utilities.
[[nodiscard]] Bid build_bid(const UserState& state);

}  // namespace tonealloc
