#include "tonealloc/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"
#include "tonealloc/errors.hpp"

namespace tonealloc {
namespace {

using nlohmann::json;

const json& require(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) {
    throw ValidationError(std::string("missing field '") + field + "'");
  }
  return *it;
}

std::size_t read_count(const json& doc, const char* field) {
  const json& v = require(doc, field);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ValidationError(std::string(field) + " must be a positive integer");
  }
  return v.get<std::size_t>();
}

double read_real(const json& v, const char* field, std::size_t i,
                 bool allow_inf) {
  if (v.is_number()) return v.get<double>();
  if (allow_inf && v.is_string() && v.get<std::string>() == "inf") {
    return kInf;
  }
  throw ValidationError(std::string(field) + "[" + std::to_string(i) +
                        "] must be a number" +
                        (allow_inf ? " or \"inf\"" : ""));
}

std::vector<double> read_vector(const json& doc, const char* field,
                                std::size_t expected, bool allow_inf = false) {
  const json& v = require(doc, field);
  if (!v.is_array()) {
    throw ValidationError(std::string(field) + " must be an array");
  }
  if (v.size() != expected) {
    throw ValidationError(std::string(field) + " has " +
                          std::to_string(v.size()) + " entries, expected " +
                          std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(read_real(v[i], field, i, allow_inf));
  }
  return out;
}

Scenario from_json(const json& doc) {
  if (!doc.is_object()) {
    throw ValidationError("scenario document must be a JSON object");
  }
  Scenario s;
  s.num_users = read_count(doc, "num_users");
  s.num_tones = read_count(doc, "num_tones");
  s.gain = read_vector(doc, "gain", s.num_users * s.num_tones);
  s.noise = read_vector(doc, "noise", s.num_tones);
  s.self_noise = read_vector(doc, "self_noise", s.num_users);
  s.snr_cap = read_vector(doc, "snr_cap", s.num_users, true);
  s.power_budget = read_vector(doc, "power_budget", s.num_users);
  s.weight = read_vector(doc, "weight", s.num_users);
  validate(s);
  return s;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::clamp(std::exp(u(rng)), lo, hi);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") +
                          e.what());
  }
  return from_json(doc);
}

Scenario load_scenario(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  return load_scenario(in);
}

void save_scenario(std::ostream& out, const Scenario& s) {
  json doc;
  doc["num_users"] = s.num_users;
  doc["num_tones"] = s.num_tones;
  doc["gain"] = s.gain;
  doc["noise"] = s.noise;
  doc["self_noise"] = s.self_noise;
  json caps = json::array();
  for (double c : s.snr_cap) {
    if (std::isinf(c)) {
      caps.push_back("inf");
    } else {
      caps.push_back(c);
    }
  }
  doc["snr_cap"] = caps;
  doc["power_budget"] = s.power_budget;
  doc["weight"] = s.weight;
  out << doc.dump(2) << '\n';
}

void save_scenario(const std::filesystem::path& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_scenario(out, s);
  if (!out) throw IoError("failed writing " + path.string());
}

void validate(const ScenarioRanges& r) {
  auto bad = [](const std::string& what) {
    throw ValidationError("invalid scenario ranges: " + what);
  };
  if (!(r.gain_min > 0.0 && r.gain_min <= r.gain_max &&
        std::isfinite(r.gain_max))) {
    bad("need 0 < gain_min <= gain_max");
  }
  if (!(r.noise > 0.0 && std::isfinite(r.noise))) bad("need noise > 0");
  if (!(r.self_noise_min >= 0.0 && r.self_noise_min <= r.self_noise_max &&
        std::isfinite(r.self_noise_max))) {
    bad("need 0 <= self_noise_min <= self_noise_max");
  }
  if (r.snr_caps.empty()) bad("need at least one snr cap");
  for (double c : r.snr_caps) {
    if (!(c > 0.0)) bad("snr caps must be > 0");
  }
  if (!(r.budget_min > 0.0 && r.budget_min <= r.budget_max &&
        std::isfinite(r.budget_max))) {
    bad("need 0 < budget_min <= budget_max");
  }
  if (!(r.weight_min > 0.0 && r.weight_min <= r.weight_max &&
        std::isfinite(r.weight_max))) {
    bad("need 0 < weight_min <= weight_max");
  }
}

Scenario generate_random_scenario(std::uint64_t seed, std::size_t K,
                                  std::size_t N, const ScenarioRanges& r) {
  if (K < 1 || N < 1) throw ValidationError("need at least one user and tone");
  validate(r);
  std::mt19937_64 rng(seed);
  Scenario s;
  s.num_users = K;
  s.num_tones = N;
  s.gain.resize(K * N);
  for (double& g : s.gain) g = log_uniform(rng, r.gain_min, r.gain_max);
  s.noise.assign(N, r.noise);
  std::uniform_int_distribution<std::size_t> pick_cap(0, r.snr_caps.size() - 1);
  for (std::size_t k = 0; k < K; ++k) {
    s.self_noise.push_back(uniform(rng, r.self_noise_min, r.self_noise_max));
    s.snr_cap.push_back(r.snr_caps[pick_cap(rng)]);
    s.power_budget.push_back(uniform(rng, r.budget_min, r.budget_max));
    s.weight.push_back(uniform(rng, r.weight_min, r.weight_max));
  }
  validate(s);
  return s;
}

Scenario generate_identical_users_scenario(std::uint64_t seed, std::size_t K,
                                           std::size_t N,
                                           const ScenarioRanges& r) {
  Scenario s = generate_random_scenario(seed, K, N, r);
  for (std::size_t k = 1; k < K; ++k) {
    for (std::size_t n = 0; n < N; ++n) s.gain[k * N + n] = s.gain[n];
    s.self_noise[k] = s.self_noise[0];
    s.snr_cap[k] = s.snr_cap[0];
    s.power_budget[k] = s.power_budget[0];
    s.weight[k] = s.weight[0];
  }
  return s;
}

Scenario generate_symmetric_scenario(std::uint64_t seed, std::size_t K,
                                     std::size_t N, const ScenarioRanges& r) {
  Scenario s = generate_identical_users_scenario(seed, K, N, r);
  std::fill(s.gain.begin(), s.gain.end(), s.gain[0]);
  std::fill(s.noise.begin(), s.noise.end(), s.noise[0]);
  return s;
}

std::vector<SuiteEntry> benchmark_suite(std::uint64_t base_seed,
                                        std::size_t count) {
  static constexpr std::size_t kUsers[] = {2, 3, 4};
  static constexpr std::size_t kTones[] = {4, 8};
  std::vector<SuiteEntry> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({base_seed + i, kUsers[i % 3], kTones[(i / 3) % 2]});
  }
  return out;
}

std::vector<SuiteEntry> symmetric_suite(std::uint64_t base_seed,
                                        std::size_t seeds,
                                        std::size_t max_tones) {
  std::vector<SuiteEntry> out;
  for (std::size_t i = 0; i < seeds; ++i) {
    for (std::size_t k : {2, 3, 4}) {
      for (std::size_t n = 1; n <= max_tones; ++n) {
        out.push_back({base_seed + i, k, n});
      }
    }
  }
  return out;
}

}  // namespace tonealloc
