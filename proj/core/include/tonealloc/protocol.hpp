#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <vector>

#include "tonealloc/bs_agent.hpp"
#include "tonealloc/messages.hpp"
#include "tonealloc/model.hpp"
#include "tonealloc/trace.hpp"
#include "tonealloc/user_agent.hpp"

namespace tonealloc {

/// Per-link delay and loss model. drop_probability must lie in [0, 1).
struct NetworkModel {
  std::uint64_t delay_rounds = 0;
  double drop_probability = 0.0;
  std::uint64_t rng_seed = 0;

  NetworkModel() = default;
  NetworkModel(std::uint64_t delay, double drop, std::uint64_t seed);

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

inline constexpr const char* kPrngName = "mt19937_64";

using LinkId = std::size_t;

/// Link ids: base station -> user k is k, user k -> base station is K + k.
[[nodiscard]] constexpr LinkId downlink(std::size_t user) noexcept {
  return user;
}
[[nodiscard]] constexpr LinkId uplink(std::size_t num_users,
                                      std::size_t user) noexcept {
  return num_users + user;
}

struct Envelope {
  LinkId link = 0;
  std::uint64_t sent_round = 0;
  std::uint64_t due_round = 0;
  std::uint64_t seq = 0;
  Message message;
};

/// In-flight message store. Drops are decided at send time from the seeded
/// generator; delivery is FIFO per link with links visited in ascending id.
class Network {
 public:
  explicit Network(NetworkModel model = {});

  /// Queues a message; returns false when it was dropped (and logged).
  bool send(LinkId link, Message message, std::uint64_t round);

  /// Removes and returns every message due at or before `round`.
  [[nodiscard]] std::vector<Envelope> deliver(std::uint64_t round);

  [[nodiscard]] const NetworkModel& model() const noexcept { return model_; }
  [[nodiscard]] std::uint64_t sent() const noexcept { return sent_; }
  [[nodiscard]] std::uint64_t delivered() const noexcept { return delivered_; }
  [[nodiscard]] std::uint64_t dropped() const noexcept { return drop_log_.size(); }
  [[nodiscard]] std::size_t in_flight() const noexcept;
  [[nodiscard]] const std::vector<Envelope>& drop_log() const noexcept {
    return drop_log_;
  }

 private:
  NetworkModel model_;
  std::mt19937_64 rng_;
  std::map<LinkId, std::deque<Envelope>> queues_;
  std::vector<Envelope> drop_log_;
  std::uint64_t sent_ = 0;
  std::uint64_t delivered_ = 0;
};

struct RunConfig {
  std::uint64_t max_rounds = 5000;
  double epsilon = 1e-3;
  std::size_t window = 5;
  bool reduced = true;
  StepSchedule step;
  /// Ideal network when true; `network` is used only when false.
  bool synchronous = true;
  NetworkModel network;
  /// Scale of the per-user price offsets (see tie_offsets).
  double tie_margin = 0.05;
  /// Evaluate the dual function every round for the trace.
  bool record_dual = true;
};

void validate(const RunConfig& config);

/// Everything the simulation owns.
struct World {
  Scenario scenario;
  RunConfig config;
  std::vector<UserParams> params;
  std::vector<UserState> users;
  PriceState prices;
  Network network;
  /// Last bid received from each user (all false until one arrives).
  std::vector<std::vector<bool>> held_bids;
  std::vector<double> residuals;
  std::uint64_t round = 0;
  std::uint64_t announces_delivered = 0;
  std::uint64_t bids_delivered = 0;
};

/// Builds the initial world. Does not validate the scenario, so degenerate
/// worlds (no users) can be simulated.
[[nodiscard]] World make_world(const Scenario& scenario,
                               const RunConfig& config);

/// Dual function value at mu: sum of per-user dual terms plus sum(mu).
[[nodiscard]] double dual_value(std::span<const UserParams> users,
                                std::span<const double> mu);

/// One round: announce prices, let every user that hears them bid, aggregate
/// the held bids, record the KKT residual, and step the prices.
TraceRecord schedule_round(World& world);

struct RunResult {
  Allocation allocation;
  std::vector<TraceRecord> trace;
  std::vector<double> final_prices;
  std::uint64_t rounds_used = 0;
  bool converged = false;
  double objective = 0.0;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_dropped = 0;
};

/// Runs rounds until the residual stays below epsilon for `window` rounds or
/// max_rounds is hit, then recovers a feasible allocation. Throws
/// NumericalError if any price becomes non-finite.
[[nodiscard]] RunResult run_until_converged(const Scenario& scenario,
                                            const RunConfig& config);

}  // namespace tonealloc
