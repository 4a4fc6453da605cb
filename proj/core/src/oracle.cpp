#include "tonealloc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tonealloc/errors.hpp"
#include "tonealloc/user_agent.hpp"

namespace tonealloc {

DualOracleResult dual_oracle_solve(const Scenario& scenario,
                                   const DualOracleOptions& options) {
  validate(scenario);
  if (options.iters < 1) throw DomainError("oracle needs iters >= 1");
  if (!(options.tol > 0.0)) throw DomainError("oracle needs tol > 0");
  if (options.recovery_interval < 1) {
    throw DomainError("oracle needs recovery_interval >= 1");
  }

  const std::size_t K = scenario.num_users;
  const std::size_t N = scenario.num_tones;
  std::vector<UserParams> users;
  for (std::size_t k = 0; k < K; ++k) users.push_back(user_params(scenario, k));

  DualOracleResult out;
  out.dual_value = kInf;
  out.primal_value = -kInf;

  auto try_primal = [&](const std::vector<double>& mu) {
    Allocation a = recover_allocation(scenario, mu);
    const double value = objective(scenario, a);
    if (value > out.primal_value) {
      out.primal_value = value;
      out.allocation = std::move(a);
    }
  };

  double checkpoint = kInf;
  PriceState state = initial_prices(N, options.step);
  std::vector<double> load(N);
  for (std::uint64_t it = 0; it < options.iters; ++it) {
    double g = 0.0;
    std::fill(load.begin(), load.end(), 0.0);
    for (std::size_t n = 0; n < N; ++n) g += state.mu[n];
    for (const UserParams& u : users) {
      const UserDual d = user_dual(u, state.mu);
      g += d.value;
      for (std::size_t n = 0; n < N; ++n) load[n] += d.share[n];
    }
    if (!std::isfinite(g)) {
      throw NumericalError("dual value is not finite at iteration " +
                           std::to_string(it));
    }
    if (options.record_history) {
      out.dual_history.push_back(g);
      out.price_history.push_back(state.mu);
    }
    if (g < out.dual_value) {
      out.dual_value = g;
      out.mu = state.mu;
    }
    out.iterations = it + 1;

    if ((it + 1) % options.recovery_interval == 0) {
      try_primal(out.mu);
      const double scale = std::max(1.0, std::abs(out.dual_value));
      if (out.dual_value - out.primal_value <= options.tol * scale) break;
      if (it + 1 >= options.min_iters &&
          checkpoint - out.dual_value <= options.tol * scale) {
        break;
      }
      checkpoint = out.dual_value;
    }

    const double alpha = state.step.at(state.iter);
    for (std::size_t n = 0; n < N; ++n) {
      state.mu[n] = std::max(0.0, state.mu[n] + alpha * (load[n] - 1.0));
    }
    ++state.iter;
  }
  if (options.record_history && out.price_history.back() != state.mu) {
    out.price_history.push_back(state.mu);
  }
  try_primal(out.mu);
  try_primal(state.mu);
  return out;
}

namespace {

// Visits every composition of `total` into `parts` nonnegative integers.
template <typename Visit>
void for_each_composition(std::size_t total, std::size_t parts,
                          std::vector<std::size_t>& scratch, Visit&& visit,
                          std::size_t index = 0) {
  if (index + 1 == parts) {
    scratch[index] = total;
    visit(scratch);
    return;
  }
  for (std::size_t i = 0; i <= total; ++i) {
    scratch[index] = i;
    for_each_composition(total - i, parts, scratch, visit, index + 1);
  }
}

struct UserBest {
  double value = 0.0;
  std::vector<double> power;  // over the user's tones, in tone order
};

UserBest best_grid_split(const Scenario& s, std::size_t k,
                         const std::vector<std::size_t>& tones,
                         std::size_t grid_points) {
  UserBest best;
  if (tones.empty()) return best;
  const double budget = s.power_budget[k];
  const std::size_t steps = grid_points - 1;
  std::vector<std::size_t> parts(tones.size());
  best.value = -kInf;
  for_each_composition(steps, tones.size(), parts, [&](const auto& c) {
    double value = 0.0;
    for (std::size_t i = 0; i < tones.size(); ++i) {
      const double q = budget * static_cast<double>(c[i]) /
                       static_cast<double>(steps);
      value += capped_rate(q, s.link(k, tones[i]));
    }
    value *= s.weight[k];
    if (value > best.value) {
      best.value = value;
      best.power.resize(tones.size());
      double total = 0.0;
      for (std::size_t i = 0; i < tones.size(); ++i) {
        best.power[i] = budget * static_cast<double>(c[i]) /
                        static_cast<double>(steps);
        total += best.power[i];
      }
      // Rounding may push the grid point a few ulps past the budget.
      while (total > budget) {
        total = 0.0;
        for (double& q : best.power) {
          q = std::nextafter(q, 0.0);
          total += q;
        }
      }
    }
  });
  return best;
}

}  // namespace

GridOracleResult exhaustive_grid_solve(const Scenario& s,
                                       std::size_t grid_points) {
  validate(s);
  if (grid_points < 11) throw DomainError("grid_points must be >= 11");
  const std::size_t K = s.num_users;
  const std::size_t N = s.num_tones;

  std::uint64_t count = 1;
  for (std::size_t n = 0; n < N; ++n) {
    count *= K + 1;
    if (count > kMaxGridAssignments) {
      throw SizeError("exhaustive search needs (K+1)^N <= " +
                      std::to_string(kMaxGridAssignments) + "; got K=" +
                      std::to_string(K) + ", N=" + std::to_string(N));
    }
  }

  GridOracleResult out;
  out.best_value = -kInf;
  out.assignments = count;

  // Digit n of the code is tone n's owner; digit value K means unassigned.
  // Codes run with tone 0 as the most significant digit so that lower user
  // indices are visited first and win exact ties.
  std::vector<std::size_t> owner(N);
  for (std::uint64_t code = 0; code < count; ++code) {
    std::uint64_t rest = code;
    for (std::size_t n = N; n-- > 0;) {
      owner[n] = static_cast<std::size_t>(rest % (K + 1));
      rest /= K + 1;
    }
    double value = 0.0;
    Allocation a(K, N);
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<std::size_t> tones;
      for (std::size_t n = 0; n < N; ++n) {
        if (owner[n] == k) tones.push_back(n);
      }
      const UserBest b = best_grid_split(s, k, tones, grid_points);
      value += b.value;
      for (std::size_t i = 0; i < tones.size(); ++i) {
        a.assign[k * N + tones[i]] = 1;
        a.power[k * N + tones[i]] = b.power[i];
      }
    }
    if (value > out.best_value) {
      out.best_value = value;
      out.allocation = std::move(a);
    }
  }

  for (std::size_t k = 0; k < K; ++k) {
    double slope = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
      slope = std::max(slope, s.gain_at(k, n) / s.noise[n]);
    }
    out.error_bound += s.weight[k] * static_cast<double>(N) * slope *
                       s.power_budget[k] /
                       static_cast<double>(grid_points - 1);
  }
  return out;
}

}  // namespace tonealloc
