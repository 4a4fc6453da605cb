#include "tonealloc/bs_agent.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "tonealloc/errors.hpp"
#include "tonealloc/user_agent.hpp"

namespace tonealloc {
namespace {

void check_same_size(std::span<const double> mu, std::span<const int> demand) {
  if (mu.size() != demand.size()) {
    throw DomainError("price and demand vectors differ in length");
  }
}

}  // namespace

double StepSchedule::at(std::uint64_t iter) const {
  if (constant) return alpha0;
  return alpha0 / (1.0 + static_cast<double>(iter) / tau);
}

PriceState initial_prices(std::size_t num_tones, StepSchedule step) {
  return PriceState{std::vector<double>(num_tones, 0.0), 0, step};
}

std::vector<std::size_t> reduced_update_set(std::span<const double> mu,
                                            std::span<const int> demand) {
  check_same_size(mu, demand);
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < mu.size(); ++n) {
    if (demand[n] > 1 || (demand[n] < 1 && mu[n] > 0.0)) out.push_back(n);
  }
  return out;
}

PriceUpdate price_update(const PriceState& state, std::span<const int> demand,
                         bool reduced) {
  check_same_size(state.mu, demand);
  PriceUpdate out{state, 0};
  const double alpha = state.step.at(state.iter);
  auto step_tone = [&](std::size_t n) {
    out.state.mu[n] = std::max(
        0.0, state.mu[n] + alpha * static_cast<double>(demand[n] - 1));
  };
  if (reduced) {
    const auto tones = reduced_update_set(state.mu, demand);
    for (std::size_t n : tones) step_tone(n);
    out.updates_performed = tones.size();
  } else {
    for (std::size_t n = 0; n < state.mu.size(); ++n) step_tone(n);
    out.updates_performed = state.mu.size();
  }
  ++out.state.iter;
  return out;
}

double kkt_residual(std::span<const double> mu, std::span<const int> demand) {
  check_same_size(mu, demand);
  double r = 0.0;
  for (std::size_t n = 0; n < mu.size(); ++n) {
    const double d = static_cast<double>(demand[n]);
    r = std::max({r, d - 1.0, mu[n] * (1.0 - d)});
  }
  return r;
}

bool check_converged(std::span<const double> history, double epsilon,
                     std::size_t window) {
  if (!(epsilon > 0.0) || window == 0) {
    throw DomainError("check_converged needs epsilon > 0 and window >= 1");
  }
  if (history.size() < window) return false;
  return std::all_of(history.end() - static_cast<std::ptrdiff_t>(window),
                     history.end(), [&](double r) { return r < epsilon; });
}

std::optional<std::size_t> Allocation::owner(std::size_t n) const {
  for (std::size_t k = 0; k < num_users; ++k) {
    if (assigned(k, n)) return k;
  }
  return std::nullopt;
}

std::optional<std::string> check_allocation(const Scenario& scenario,
                                            const Allocation& a) {
  if (a.num_users != scenario.num_users || a.num_tones != scenario.num_tones ||
      a.assign.size() != a.num_users * a.num_tones ||
      a.power.size() != a.num_users * a.num_tones) {
    return "allocation dimensions do not match the scenario";
  }
  for (std::size_t n = 0; n < a.num_tones; ++n) {
    std::size_t owners = 0;
    for (std::size_t k = 0; k < a.num_users; ++k) owners += a.assigned(k, n);
    if (owners > 1) return "tone " + std::to_string(n) + " has " +
                           std::to_string(owners) + " owners";
  }
  for (std::size_t k = 0; k < a.num_users; ++k) {
    double total = 0.0;
    for (std::size_t n = 0; n < a.num_tones; ++n) {
      const double p = a.power_at(k, n);
      if (!(std::isfinite(p) && p >= 0.0)) {
        return "power[" + std::to_string(k) + "][" + std::to_string(n) +
               "] is negative or not finite";
      }
      if (p > 0.0 && !a.assigned(k, n)) {
        return "user " + std::to_string(k) + " transmits on unowned tone " +
               std::to_string(n);
      }
      total += p;
    }
    if (total > scenario.power_budget[k]) {
      return "user " + std::to_string(k) + " exceeds its power budget";
    }
  }
  return std::nullopt;
}

double objective(const Scenario& scenario, const Allocation& a) {
  double total = 0.0;
  for (std::size_t k = 0; k < a.num_users; ++k) {
    double user_rate = 0.0;
    for (std::size_t n = 0; n < a.num_tones; ++n) {
      if (a.assigned(k, n)) {
        user_rate += capped_rate(a.power_at(k, n), scenario.link(k, n));
      }
    }
    total += scenario.weight[k] * user_rate;
  }
  return total;
}

namespace {

// Owner per tone (K means unassigned) plus the cached optimal split per user.
class AssignmentSearch {
 public:
  AssignmentSearch(const Scenario& scenario, std::vector<std::size_t> owner)
      : scenario_(scenario), owner_(std::move(owner)) {
    for (std::size_t k = 0; k < scenario.num_users; ++k) {
      users_.push_back(user_params(scenario, k));
      splits_.push_back(split_for(k, owner_));
    }
  }

  // Alternates single-tone moves with two-tone moves until neither gains
  // more than a relative 1e-12.
  void improve(std::size_t max_passes) {
    for (std::size_t pass = 0; pass < max_passes; ++pass) {
      if (!move_pass() && !pair_pass()) return;
    }
  }

  Allocation allocation() const {
    Allocation a(scenario_.num_users, scenario_.num_tones);
    for (std::size_t n = 0; n < scenario_.num_tones; ++n) {
      const std::size_t k = owner_[n];
      if (k >= scenario_.num_users) continue;
      a.assign[k * a.num_tones + n] = 1;
      a.power[k * a.num_tones + n] = splits_[k].power[n];
    }
    return a;
  }

 private:
  double threshold() const {
    return 1e-12 * (1.0 + std::abs(total_utility()));
  }

  // Moves each tone to whichever owner (or nobody) raises the objective the
  // most. Returns whether anything moved.
  bool move_pass() {
    const std::size_t K = scenario_.num_users;
    bool moved = false;
    for (std::size_t n = 0; n < scenario_.num_tones; ++n) {
      const std::size_t from = owner_[n];
      double best_gain = threshold();
      std::size_t best_to = from;
      PowerSplit best_from_split, best_to_split;
      for (std::size_t to = 0; to <= K; ++to) {
        if (to == from) continue;
        std::vector<std::size_t> trial = owner_;
        trial[n] = to;
        double gain = 0.0;
        PowerSplit from_split, to_split;
        if (from < K) {
          from_split = split_for(from, trial);
          gain += from_split.utility - splits_[from].utility;
        }
        if (to < K) {
          to_split = split_for(to, trial);
          gain += to_split.utility - splits_[to].utility;
        }
        if (gain > best_gain) {
          best_gain = gain;
          best_to = to;
          best_from_split = std::move(from_split);
          best_to_split = std::move(to_split);
        }
      }
      if (best_to != from) {
        owner_[n] = best_to;
        if (from < K) splits_[from] = std::move(best_from_split);
        if (best_to < K) splits_[best_to] = std::move(best_to_split);
        moved = true;
      }
    }
    return moved;
  }

  // Reassigns two tones at once (swaps included) when no single move helps.
  // Returns whether anything changed.
  bool pair_pass() {
    const std::size_t K = scenario_.num_users;
    const std::size_t N = scenario_.num_tones;
    bool changed = false;
    for (std::size_t n = 0; n < N; ++n) {
      for (std::size_t m = n + 1; m < N; ++m) {
        for (std::size_t x = 0; x <= K; ++x) {
          for (std::size_t y = 0; y <= K; ++y) {
            if (x == owner_[n] && y == owner_[m]) continue;
            std::vector<std::size_t> trial = owner_;
            trial[n] = x;
            trial[m] = y;
            std::vector<std::size_t> touched = {owner_[n], owner_[m], x, y};
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()),
                          touched.end());
            double gain = 0.0;
            std::vector<std::pair<std::size_t, PowerSplit>> next;
            for (std::size_t k : touched) {
              if (k >= K) continue;
              PowerSplit split = split_for(k, trial);
              gain += split.utility - splits_[k].utility;
              next.emplace_back(k, std::move(split));
            }
            if (gain > threshold()) {
              owner_ = std::move(trial);
              for (auto& [k, split] : next) splits_[k] = std::move(split);
              changed = true;
            }
          }
        }
      }
    }
    return changed;
  }

  PowerSplit split_for(std::size_t k, const std::vector<std::size_t>& owner) {
    std::vector<std::size_t> tones;
    for (std::size_t n = 0; n < owner.size(); ++n) {
      if (owner[n] == k) tones.push_back(n);
    }
    return allocate_power(users_[k], tones);
  }

  double total_utility() const {
    double t = 0.0;
    for (const auto& s : splits_) t += s.utility;
    return t;
  }

  const Scenario& scenario_;
  std::vector<std::size_t> owner_;
  std::vector<UserParams> users_;
  std::vector<PowerSplit> splits_;
};

}  // namespace

Allocation recover_allocation(const Scenario& scenario,
                              std::span<const double> mu,
                              const RecoveryOptions& options) {
  const std::size_t K = scenario.num_users;
  const std::size_t N = scenario.num_tones;
  if (mu.size() != N) throw DomainError("price vector length differs from N");

  std::vector<std::size_t> owner(N, K);
  std::vector<double> best(N, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const PowerPriceSolution sol =
        power_price_bisection(user_params(scenario, k), mu);
    for (std::size_t n = 0; n < N; ++n) {
      const BestResponse& r = sol.responses[n];
      if (r.demand && r.v > best[n]) {
        best[n] = r.v;
        owner[n] = k;
      }
    }
  }

  AssignmentSearch search(scenario, std::move(owner));
  if (options.local_search) search.improve(options.max_passes);
  return search.allocation();
}

}  // namespace tonealloc
