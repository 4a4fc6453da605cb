#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace tonealloc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Physical parameters of one (user, tone) link.
///
/// The effective SINR at transmit power q is
///   s(q) = gain * q / (noise + self_noise * gain * q),
/// which saturates at 1 / self_noise. Usable SINR is additionally capped at
/// snr_cap, so the achievable rate in nats is ln(1 + min(s(q), snr_cap)).
struct Link {
  double gain = 1.0;        // h, linear power gain
  double noise = 1.0;       // sigma^2, watts
  double self_noise = 0.0;  // beta >= 0
  double snr_cap = kInf;    // s_max > 0, may be infinite
};

/// Throws DomainError unless gain, noise > 0, self_noise >= 0 and
/// snr_cap > 0 (infinity allowed), all finite except snr_cap.
void validate_link(const Link& link);

/// True when the cap can actually be reached at finite power, i.e.
/// snr_cap is finite and self_noise * snr_cap < 1.
[[nodiscard]] bool cap_reachable(const Link& link) noexcept;

/// Smallest power at which the SINR cap binds, or +inf when unreachable.
[[nodiscard]] double cap_power(const Link& link) noexcept;

[[nodiscard]] double effective_sinr(double q, const Link& link);

/// Rate in nats. Nondecreasing and concave in q.
[[nodiscard]] double capped_rate(double q, const Link& link);

/// d(capped_rate)/dq. Zero beyond the cap power; the left limit at exactly
/// the cap power.
[[nodiscard]] double rate_derivative(double q, const Link& link);

/// Static problem instance. Matrices are stored row-major, one row per user.
struct Scenario {
  std::size_t num_users = 0;
  std::size_t num_tones = 0;
  std::vector<double> gain;          // K x N
  std::vector<double> noise;         // N
  std::vector<double> self_noise;    // K
  std::vector<double> snr_cap;       // K, +inf allowed
  std::vector<double> power_budget;  // K
  std::vector<double> weight;        // K

  [[nodiscard]] double gain_at(std::size_t user, std::size_t tone) const {
    return gain[user * num_tones + tone];
  }
  [[nodiscard]] std::span<const double> gain_row(std::size_t user) const {
    return {gain.data() + user * num_tones, num_tones};
  }
  [[nodiscard]] Link link(std::size_t user, std::size_t tone) const {
    return {gain_at(user, tone), noise[tone], self_noise[user], snr_cap[user]};
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Checks every Scenario invariant; throws ValidationError naming the
/// offending field and index.
void validate(const Scenario& scenario);

}  // namespace tonealloc
