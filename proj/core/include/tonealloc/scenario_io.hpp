#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tonealloc/model.hpp"

namespace tonealloc {

/// Reads a JSON scenario document with fields num_users, num_tones, gain
/// (row-major K*N), noise (N), self_noise (K), snr_cap (K; the string "inf"
/// is accepted), power_budget (K) and weight (K). Throws ValidationError
/// naming the field (and index) on any problem.
[[nodiscard]] Scenario load_scenario(std::istream& in);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);
[[nodiscard]] Scenario parse_scenario(const std::string& text);

/// Writes the same schema; reals keep full round-trip precision.
void save_scenario(std::ostream& out, const Scenario& scenario);
void save_scenario(const std::filesystem::path& path,
                   const Scenario& scenario);

/// Sampling ranges for random scenarios.
struct ScenarioRanges {
  double gain_min = 0.1;  // log-uniform
  double gain_max = 10.0;
  double noise = 1.0;
  double self_noise_min = 0.0;  // uniform
  double self_noise_max = 0.2;
  std::vector<double> snr_caps = {10.0, kInf};  // equiprobable
  double budget_min = 1.0;  // uniform
  double budget_max = 5.0;
  double weight_min = 0.5;  // uniform
  double weight_max = 2.0;
};

void validate(const ScenarioRanges& ranges);

/// Deterministic in (seed, K, N, ranges) for a given standard library.
[[nodiscard]] Scenario generate_random_scenario(std::uint64_t seed,
                                                std::size_t num_users,
                                                std::size_t num_tones,
                                                const ScenarioRanges& ranges = {});

/// Random scenario in which every user is a copy of user 0 (tones still
/// differ from each other).
[[nodiscard]] Scenario generate_identical_users_scenario(
    std::uint64_t seed, std::size_t num_users, std::size_t num_tones,
    const ScenarioRanges& ranges = {});

/// Identical users on identical tones: one gain for every (user, tone) pair
/// and one set of user parameters, all drawn from `ranges`. Every exclusive
/// assignment that gives each user the same number of tones is optimal.
[[nodiscard]] Scenario generate_symmetric_scenario(
    std::uint64_t seed, std::size_t num_users, std::size_t num_tones,
    const ScenarioRanges& ranges = {});

/// One entry of a seeded benchmark suite.
struct SuiteEntry {
  std::uint64_t seed = 0;
  std::size_t num_users = 0;
  std::size_t num_tones = 0;
};

/// `count` scenarios with seeds base_seed, base_seed + 1, ...; users cycle
/// through {2, 3, 4} and tones through {4, 8}.
[[nodiscard]] std::vector<SuiteEntry> benchmark_suite(std::uint64_t base_seed,
                                                      std::size_t count);

/// Seeds base_seed .. base_seed + seeds - 1 crossed with users {2, 3, 4}
/// and tones 1 .. max_tones.
[[nodiscard]] std::vector<SuiteEntry> symmetric_suite(std::uint64_t base_seed,
                                                      std::size_t seeds,
                                                      std::size_t max_tones);

}  // namespace tonealloc
