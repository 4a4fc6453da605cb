#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tonealloc/bs_agent.hpp"
#include "tonealloc/model.hpp"

namespace tonealloc {

struct DualOracleOptions {
  /// At least ten times the distributed default of 5000 rounds.
  std::uint64_t iters = 50000;
  /// Stop early once the best dual value and the recovered primal value are
  /// within tol (relative), or, after min_iters, once the best dual value
  /// improved by less than tol (relative) over one recovery interval.
  double tol = 1e-9;
  std::uint64_t min_iters = 5000;
  StepSchedule step;
  /// Recover a primal candidate and test the stopping rules every this many
  /// iterations.
  std::uint64_t recovery_interval = 1000;
  /// Keep the per-iteration dual values and prices.
  bool record_history = false;
};

/// Centralized reference: full-information subgradient on the tone prices
/// using time-shared (fractional) demands, with best-dual tracking.
struct DualOracleResult {
  double dual_value = 0.0;  // smallest dual value seen
  std::vector<double> mu;   // prices attaining it
  Allocation allocation;    // best recovered primal
  double primal_value = 0.0;
  std::uint64_t iterations = 0;
  std::vector<double> dual_history;
  /// Entry t holds the prices after t updates; the last entry is the state
  /// the solver stopped in.
  std::vector<std::vector<double>> price_history;

  /// dual_value - primal_value; nonnegative by weak duality.
  [[nodiscard]] double gap() const { return dual_value - primal_value; }
};

[[nodiscard]] DualOracleResult dual_oracle_solve(
    const Scenario& scenario, const DualOracleOptions& options = {});

/// Brute force over every exclusive assignment and every budget split on a
/// simplex grid with grid_points levels per user.
struct GridOracleResult {
  double best_value = 0.0;
  Allocation allocation;
  /// A priori bound on best-possible minus best_value:
  /// sum_k w_k * N * max_n(h_kn / sigma2_n) * P_k / (grid_points - 1).
  double error_bound = 0.0;
  std::uint64_t assignments = 0;
};

inline constexpr std::size_t kMaxGridAssignments = 64;

/// Requires (K + 1)^N <= 64 and grid_points >= 11; throws SizeError or
/// DomainError otherwise.
[[nodiscard]] GridOracleResult exhaustive_grid_solve(const Scenario& scenario,
                                                     std::size_t grid_points);

}  // namespace tonealloc
