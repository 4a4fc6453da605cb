#include "tonealloc/model.hpp"

#include <cmath>
#include <string>

#include "tonealloc/errors.hpp"

namespace tonealloc {
namespace {

void check_power(double q) {
  if (!std::isfinite(q) || q < 0.0) {
    throw DomainError("transmit power must be finite and nonnegative, got " +
                      std::to_string(q));
  }
}

void check_field(bool ok, const char* field, std::size_t index,
                 const char* requirement) {
  if (!ok) {
    throw ValidationError(std::string(field) + "[" + std::to_string(index) +
                          "] " + requirement);
  }
}

void check_size(std::size_t actual, std::size_t expected, const char* field) {
  if (actual != expected) {
    throw ValidationError(std::string(field) + " has " +
                          std::to_string(actual) + " entries, expected " +
                          std::to_string(expected));
  }
}

}  // namespace

void validate_link(const Link& link) {
  if (!(std::isfinite(link.gain) && link.gain > 0.0)) {
    throw DomainError("gain must be finite and > 0");
  }
  if (!(std::isfinite(link.noise) && link.noise > 0.0)) {
    throw DomainError("noise must be finite and > 0");
  }
  if (!(std::isfinite(link.self_noise) && link.self_noise >= 0.0)) {
    throw DomainError("self_noise must be finite and >= 0");
  }
  if (!(link.snr_cap > 0.0)) {
    throw DomainError("snr_cap must be > 0");
  }
}

bool cap_reachable(const Link& link) noexcept {
  return std::isfinite(link.snr_cap) && link.self_noise * link.snr_cap < 1.0;
}

double cap_power(const Link& link) noexcept {
  if (!cap_reachable(link)) return kInf;
  return link.noise * link.snr_cap /
         (link.gain * (1.0 - link.self_noise * link.snr_cap));
}

double effective_sinr(double q, const Link& link) {
  check_power(q);
  validate_link(link);
  const double received = link.gain * q;
  return received / (link.noise + link.self_noise * received);
}

double capped_rate(double q, const Link& link) {
  const double s = effective_sinr(q, link);
  return std::log1p(std::fmin(s, link.snr_cap));
}

double rate_derivative(double q, const Link& link) {
  check_power(q);
  validate_link(link);
  if (q > cap_power(link)) return 0.0;
  const double hq = link.gain * q;
  return link.gain * link.noise /
         ((link.noise + link.self_noise * hq) *
          (link.noise + (1.0 + link.self_noise) * hq));
}

void validate(const Scenario& s) {
  if (s.num_users == 0) throw ValidationError("num_users must be >= 1");
  if (s.num_tones == 0) throw ValidationError("num_tones must be >= 1");
  check_size(s.gain.size(), s.num_users * s.num_tones, "gain");
  check_size(s.noise.size(), s.num_tones, "noise");
  check_size(s.self_noise.size(), s.num_users, "self_noise");
  check_size(s.snr_cap.size(), s.num_users, "snr_cap");
  check_size(s.power_budget.size(), s.num_users, "power_budget");
  check_size(s.weight.size(), s.num_users, "weight");

  for (std::size_t i = 0; i < s.gain.size(); ++i) {
    check_field(std::isfinite(s.gain[i]) && s.gain[i] > 0.0, "gain", i,
                "must be > 0");
  }
  for (std::size_t n = 0; n < s.num_tones; ++n) {
    check_field(std::isfinite(s.noise[n]) && s.noise[n] > 0.0, "noise", n,
                "must be > 0");
  }
  for (std::size_t k = 0; k < s.num_users; ++k) {
    check_field(std::isfinite(s.self_noise[k]) && s.self_noise[k] >= 0.0,
                "self_noise", k, "must be >= 0");
    check_field(s.snr_cap[k] > 0.0 && !std::isnan(s.snr_cap[k]), "snr_cap", k,
                "must be > 0 or inf");
    check_field(std::isfinite(s.power_budget[k]) && s.power_budget[k] > 0.0,
                "power_budget", k, "must be > 0");
    check_field(std::isfinite(s.weight[k]) && s.weight[k] > 0.0, "weight", k,
                "must be > 0");
  }
}

}  // namespace tonealloc
