#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tonealloc/model.hpp"

namespace tonealloc {

/// Step size schedule for the tone-price subgradient step.
struct StepSchedule {
  double alpha0 = 0.1;
  double tau = 50.0;
  bool constant = false;  // alpha_t = alpha0 for every t

  [[nodiscard]] double at(std::uint64_t iter) const;
};

/// Base-station dual state.
struct PriceState {
  std::vector<double> mu;
  std::uint64_t iter = 0;
  StepSchedule step;

  friend bool operator==(const PriceState&, const PriceState&) = default;
};

[[nodiscard]] PriceState initial_prices(std::size_t num_tones,
                                        StepSchedule step = {});

/// Tones that violate feasibility (demand > 1) or complementary slackness
/// (demand < 1 with a positive price). Returned in ascending order.
[[nodiscard]] std::vector<std::size_t> reduced_update_set(
    std::span<const double> mu, std::span<const int> demand);

struct PriceUpdate {
  PriceState state;
  std::size_t updates_performed = 0;
};

/// One projected subgradient step mu <- max(0, mu + alpha_t (demand - 1)).
/// With `reduced` only the tones in reduced_update_set are touched; the
/// others would be left unchanged by the full rule anyway.
[[nodiscard]] PriceUpdate price_update(const PriceState& state,
                                       std::span<const int> demand,
                                       bool reduced);

/// max_n max(demand_n - 1, mu_n (1 - demand_n), 0).
[[nodiscard]] double kkt_residual(std::span<const double> mu,
                                  std::span<const int> demand);

/// True iff the last `window` entries of `history` are all below epsilon.
[[nodiscard]] bool check_converged(std::span<const double> history,
                                   double epsilon = 1e-3,
                                   std::size_t window = 5);

/// Exclusive tone assignment with per-tone powers.
struct Allocation {
  std::size_t num_users = 0;
  std::size_t num_tones = 0;
  std::vector<char> assign;   // K x N, row-major
  std::vector<double> power;  // K x N, row-major

  Allocation() = default;
  Allocation(std::size_t users, std::size_t tones)
      : num_users(users),
        num_tones(tones),
        assign(users * tones, 0),
        power(users * tones, 0.0) {}

  [[nodiscard]] bool assigned(std::size_t k, std::size_t n) const {
    return assign[k * num_tones + n] != 0;
  }
  [[nodiscard]] double power_at(std::size_t k, std::size_t n) const {
    return power[k * num_tones + n];
  }
  /// Owner of tone n, if any.
  [[nodiscard]] std::optional<std::size_t> owner(std::size_t n) const;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// Returns a description of the first violated Allocation invariant, or
/// nothing when the allocation is feasible for the scenario.
[[nodiscard]] std::optional<std::string> check_allocation(
    const Scenario& scenario, const Allocation& allocation);

/// Sum over users of weight * sum of capped rates on assigned tones.
[[nodiscard]] double objective(const Scenario& scenario,
                               const Allocation& allocation);

struct RecoveryOptions {
  /// Local-search passes (single-tone and two-tone moves) run after the
  /// price-based assignment.
  bool local_search = true;
  std::size_t max_passes = 64;
};

/// Turns prices into a feasible exclusive allocation. Every tone goes to the
/// user with the largest positive net benefit at `mu` (lowest index on ties),
/// each user re-splits its budget over the tones it won, and then single-tone
/// and two-tone reassignments that strictly increase the objective are
/// applied until none is left.
[[nodiscard]] Allocation recover_allocation(const Scenario& scenario,
                                            std::span<const double> mu,
                                            const RecoveryOptions& options = {});

}  // namespace tonealloc
