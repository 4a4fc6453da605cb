#include "tonealloc/protocol.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "tonealloc/errors.hpp"

namespace tonealloc {

NetworkModel::NetworkModel(std::uint64_t delay, double drop,
                           std::uint64_t seed)
    : delay_rounds(delay), drop_probability(drop), rng_seed(seed) {
  if (!(drop >= 0.0 && drop < 1.0)) {
    throw ValidationError("drop_probability must lie in [0, 1), got " +
                          std::to_string(drop));
  }
}

Network::Network(NetworkModel model) : model_(model), rng_(model.rng_seed) {
  if (!(model_.drop_probability >= 0.0 && model_.drop_probability < 1.0)) {
    throw ValidationError("drop_probability must lie in [0, 1)");
  }
}

bool Network::send(LinkId link, Message message, std::uint64_t round) {
  Envelope env{link, round, round + model_.delay_rounds, sent_++,
               std::move(message)};
  if (model_.drop_probability > 0.0) {
    // 53 random bits -> uniform double in [0, 1).
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    if (u < model_.drop_probability) {
      drop_log_.push_back(std::move(env));
      return false;
    }
  }
  queues_[link].push_back(std::move(env));
  return true;
}

std::vector<Envelope> Network::deliver(std::uint64_t round) {
  std::vector<Envelope> out;
  for (auto& [link, queue] : queues_) {
    while (!queue.empty() && queue.front().due_round <= round) {
      out.push_back(std::move(queue.front()));
      queue.pop_front();
    }
  }
  delivered_ += out.size();
  return out;
}

std::size_t Network::in_flight() const noexcept {
  std::size_t n = 0;
  for (const auto& [link, queue] : queues_) n += queue.size();
  return n;
}

void validate(const RunConfig& c) {
  if (c.max_rounds < 1) throw ValidationError("max_rounds must be >= 1");
  if (!(c.epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
  if (c.window < 1) throw ValidationError("window must be >= 1");
  if (!(std::isfinite(c.step.alpha0) && c.step.alpha0 > 0.0)) {
    throw ValidationError("alpha0 must be > 0");
  }
  if (!(std::isfinite(c.step.tau) && c.step.tau > 0.0)) {
    throw ValidationError("tau must be > 0");
  }
  if (!(std::isfinite(c.tie_margin) && c.tie_margin >= 0.0)) {
    throw ValidationError("tie_margin must be >= 0");
  }
  NetworkModel check(c.network.delay_rounds, c.network.drop_probability,
                     c.network.rng_seed);
  (void)check;
}

World make_world(const Scenario& scenario, const RunConfig& config) {
  World w;
  w.scenario = scenario;
  w.config = config;
  for (std::size_t k = 0; k < scenario.num_users; ++k) {
    w.params.push_back(user_params(scenario, k));
    UserState u;
    u.user_id = k;
    u.price_offset = tie_offsets(k, scenario.num_tones, config.tie_margin);
    u.last_responses.assign(scenario.num_tones, BestResponse{});
    w.users.push_back(std::move(u));
  }
  w.prices = initial_prices(scenario.num_tones, config.step);
  w.network = Network(config.synchronous ? NetworkModel{} : config.network);
  w.held_bids.assign(scenario.num_users,
                     std::vector<bool>(scenario.num_tones, false));
  return w;
}

double dual_value(std::span<const UserParams> users,
                  std::span<const double> mu) {
  double g = std::accumulate(mu.begin(), mu.end(), 0.0);
  for (const UserParams& u : users) g += user_dual(u, mu).value;
  return g;
}

TraceRecord schedule_round(World& w) {
  const std::size_t K = w.scenario.num_users;
  const std::size_t N = w.scenario.num_tones;
  const std::uint64_t t = w.round;
  const std::uint64_t dropped_before = w.network.dropped();

  TraceRecord rec;
  rec.round = t;
  rec.prices = w.prices.mu;

  for (std::size_t k = 0; k < K; ++k) {
    w.network.send(downlink(k), PriceAnnounce{t, w.prices.mu}, t);
  }

  auto handle = [&](std::vector<Envelope> batch) {
    for (Envelope& env : batch) {
      if (auto* announce = std::get_if<PriceAnnounce>(&env.message)) {
        ++w.announces_delivered;
        const std::size_t k = env.link;
        respond_to_prices(w.users[k], w.params[k], announce->mu);
        w.network.send(uplink(K, k), build_bid(w.users[k]), t);
      } else {
        auto& bid = std::get<Bid>(env.message);
        ++w.bids_delivered;
        w.held_bids[bid.user_id] = std::move(bid.demand);
      }
    }
  };
  // Announcements first; bids sent in reaction may be due this same round.
  handle(w.network.deliver(t));
  handle(w.network.deliver(t));

  rec.demand.assign(N, 0);
  for (const auto& bid : w.held_bids) {
    for (std::size_t n = 0; n < N; ++n) rec.demand[n] += bid[n] ? 1 : 0;
  }
  rec.residual = kkt_residual(w.prices.mu, rec.demand);
  rec.dual_value = w.config.record_dual ? dual_value(w.params, w.prices.mu)
                                        : std::nan("");

  PriceUpdate next = price_update(w.prices, rec.demand, w.config.reduced);
  for (double mu : next.state.mu) {
    if (!std::isfinite(mu)) {
      throw NumericalError("non-finite tone price at round " +
                           std::to_string(t));
    }
  }
  w.prices = std::move(next.state);
  rec.updates_performed = next.updates_performed;
  rec.messages_dropped = w.network.dropped() - dropped_before;

  w.residuals.push_back(rec.residual);
  ++w.round;
  return rec;
}

RunResult run_until_converged(const Scenario& scenario,
                              const RunConfig& config) {
  validate(scenario);
  validate(config);
  World w = make_world(scenario, config);

  RunResult result;
  while (w.round < config.max_rounds) {
    result.trace.push_back(schedule_round(w));
    if (check_converged(w.residuals, config.epsilon, config.window)) {
      result.converged = true;
      break;
    }
  }
  result.rounds_used = w.round;
  result.final_prices = w.prices.mu;
  result.allocation = recover_allocation(scenario, w.prices.mu);
  if (auto err = check_allocation(scenario, result.allocation)) {
    throw NumericalError("recovered allocation is infeasible: " + *err);
  }
  result.objective = objective(scenario, result.allocation);
  result.messages_sent = w.network.sent();
  result.messages_dropped = w.network.dropped();
  return result;
}

}  // namespace tonealloc
