// tonealloc: distributed tone/power allocation simulator.
//
// Exit codes: 0 converged, 2 unconverged, 1 usage or validation error,
// 3 numerical error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tonealloc/errors.hpp"
#include "tonealloc/oracle.hpp"
#include "tonealloc/protocol.hpp"
#include "tonealloc/scenario_io.hpp"
#include "tonealloc/trace.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace tonealloc;

constexpr int kExitConverged = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnconverged = 2;
constexpr int kExitNumerical = 3;

struct ScenarioOptions {
  std::string path;
  std::uint64_t seed = 0;
  std::size_t users = 2;
  std::size_t tones = 4;
  bool symmetric = false;
};

struct RunOptions {
  RunConfig config;
  bool async = false;
  std::uint64_t delay = 0;
  double drop = 0.0;
  std::optional<std::uint64_t> net_seed;
  std::string trace;
};

struct OracleOptions {
  DualOracleOptions dual;
  std::size_t grid = 0;
};

void add_scenario_options(CLI::App* app, ScenarioOptions& o) {
  app->add_option("--scenario", o.path, "Scenario JSON file")
      ->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "Seed for a generated scenario");
  app->add_option("--users", o.users, "Users in a generated scenario")
      ->check(CLI::PositiveNumber);
  app->add_option("--tones", o.tones, "Tones in a generated scenario")
      ->check(CLI::PositiveNumber);
  app->add_flag("--symmetric", o.symmetric,
                "Generate identical users on identical tones");
}

void add_run_options(CLI::App* app, RunOptions& o) {
  RunConfig& c = o.config;
  app->add_flag("--reduced,!--full", c.reduced,
                "Reduced (default) or full price updates");
  app->add_option("--alpha0", c.step.alpha0, "Initial step size")
      ->check(CLI::PositiveNumber);
  app->add_option("--tau", c.step.tau, "Step decay constant")
      ->check(CLI::PositiveNumber);
  app->add_flag("--constant-step", c.step.constant, "Keep alpha0 every round");
  app->add_option("--epsilon", c.epsilon, "KKT residual threshold")
      ->check(CLI::PositiveNumber);
  app->add_option("--window", c.window, "Rounds below epsilon to stop")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-rounds", c.max_rounds, "Round limit")
      ->check(CLI::PositiveNumber);
  app->add_option("--tie-margin", c.tie_margin, "Per-user price offset scale")
      ->check(CLI::NonNegativeNumber);
  app->add_flag("--async", o.async, "Use the delay/drop network model");
  app->add_option("--delay", o.delay, "Per-link delay in rounds (async)");
  app->add_option("--drop", o.drop, "Drop probability in [0, 1) (async)");
  app->add_option("--net-seed", o.net_seed,
                  "Network RNG seed (defaults to --seed)");
}

void add_oracle_options(CLI::App* app, OracleOptions& o) {
  app->add_option("--iters", o.dual.iters, "Centralized iteration cap")
      ->check(CLI::PositiveNumber);
  app->add_option("--tol", o.dual.tol, "Centralized stopping tolerance")
      ->check(CLI::PositiveNumber);
}

Scenario make_scenario(const ScenarioOptions& o) {
  if (!o.path.empty()) return load_scenario(std::filesystem::path(o.path));
  return o.symmetric ? generate_symmetric_scenario(o.seed, o.users, o.tones)
                     : generate_random_scenario(o.seed, o.users, o.tones);
}

RunConfig finish_config(const RunOptions& o, std::uint64_t seed) {
  RunConfig c = o.config;
  c.synchronous = !o.async;
  c.network = NetworkModel(o.delay, o.drop, o.net_seed.value_or(seed));
  validate(c);
  return c;
}

json vec(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

json config_json(const RunConfig& c) {
  return {{"max_rounds", c.max_rounds},
          {"epsilon", c.epsilon},
          {"window", c.window},
          {"reduced", c.reduced},
          {"alpha0", c.step.alpha0},
          {"tau", c.step.tau},
          {"constant_step", c.step.constant},
          {"synchronous", c.synchronous},
          {"delay_rounds", c.network.delay_rounds},
          {"drop_probability", c.network.drop_probability},
          {"network_seed", c.network.rng_seed},
          {"tie_margin", c.tie_margin}};
}

json allocation_json(const Allocation& a) {
  json owner = json::array();
  json power = json::array();
  for (std::size_t n = 0; n < a.num_tones; ++n) {
    auto k = a.owner(n);
    owner.push_back(k ? json(*k) : json(nullptr));
    power.push_back(k ? a.power_at(*k, n) : 0.0);
  }
  return {{"owner", owner}, {"power", power}};
}

void write_metadata(const std::string& trace, const ScenarioOptions& so,
                    const RunConfig& c) {
  json meta = {{"version", version()},
               {"prng", kPrngName},
               {"seed", so.seed},
               {"scenario", so.path.empty() ? json(nullptr) : json(so.path)},
               {"generated", so.path.empty()},
               {"symmetric", so.symmetric},
               {"config", config_json(c)}};
  const auto path = metadata_path(trace);
  std::ofstream out(path);
  out << meta.dump(2) << '\n';
  if (!out) throw IoError("cannot write " + path.string());
}

int cmd_run(const ScenarioOptions& so, const RunOptions& ro) {
  const Scenario s = make_scenario(so);
  const RunConfig c = finish_config(ro, so.seed);
  const RunResult r = run_until_converged(s, c);
  if (!ro.trace.empty()) {
    write_trace(std::filesystem::path(ro.trace), r.trace, s.num_tones);
    write_metadata(ro.trace, so, c);
  }
  std::size_t updates = 0;
  for (const auto& t : r.trace) updates += t.updates_performed;
  json out = {{"converged", r.converged},
              {"rounds_used", r.rounds_used},
              {"objective", r.objective},
              {"updates_performed", updates},
              {"messages_sent", r.messages_sent},
              {"messages_dropped", r.messages_dropped},
              {"final_prices", vec(r.final_prices)},
              {"allocation", allocation_json(r.allocation)}};
  std::cout << out.dump(2) << '\n';
  return r.converged ? kExitConverged : kExitUnconverged;
}

int cmd_oracle(const ScenarioOptions& so, const OracleOptions& oo) {
  const Scenario s = make_scenario(so);
  const DualOracleResult d = dual_oracle_solve(s, oo.dual);
  json out = {{"solver", "centralized-dual"},
              {"dual_value", d.dual_value},
              {"primal_value", d.primal_value},
              {"gap", d.gap()},
              {"iterations", d.iterations},
              {"mu", vec(d.mu)},
              {"allocation", allocation_json(d.allocation)}};
  if (oo.grid > 0) {
    const GridOracleResult g = exhaustive_grid_solve(s, oo.grid);
    out["grid"] = {{"grid_points", oo.grid},
                   {"best_value", g.best_value},
                   {"error_bound", g.error_bound},
                   {"assignments", g.assignments},
                   {"allocation", allocation_json(g.allocation)}};
  }
  std::cout << out.dump(2) << '\n';
  return kExitConverged;
}

int cmd_gen(const ScenarioOptions& so, const std::string& out_path) {
  const Scenario s = make_scenario(so);
  if (out_path.empty()) {
    save_scenario(std::cout, s);
  } else {
    save_scenario(std::filesystem::path(out_path), s);
  }
  return kExitConverged;
}

// Smallest t such that the allocation read off the prices after t updates
// (no local search, so the prices alone decide the assignment) is within
// eps (relative) of the reference objective.
std::optional<std::size_t> rounds_to_eps(
    const Scenario& s, const std::vector<std::vector<double>>& prices,
    double reference, double eps) {
  const double target = reference - eps * std::max(1.0, std::abs(reference));
  RecoveryOptions price_only;
  price_only.local_search = false;
  for (std::size_t t = 0; t < prices.size(); ++t) {
    const Allocation a = recover_allocation(s, prices[t], price_only);
    if (objective(s, a) >= target) return t;
  }
  return std::nullopt;
}

struct CompareRow {
  std::string solver;
  std::uint64_t rounds_used = 0;
  bool converged = false;
  std::optional<std::size_t> to_eps;
  std::size_t updates = 0;
  double primal = 0.0;
  double dual = 0.0;
  std::vector<std::vector<double>> prices;
};

void print_row(const SuiteEntry& e, const CompareRow& row, double upper) {
  const double gap =
      100.0 * (upper - row.primal) / std::max(1e-300, std::abs(upper));
  std::printf("%llu,%zu,%zu,%s,%llu,%d,%s,%zu,%.10g,%.10g,%.6f\n",
              static_cast<unsigned long long>(e.seed), e.num_users,
              e.num_tones, row.solver.c_str(),
              static_cast<unsigned long long>(row.rounds_used),
              row.converged ? 1 : 0,
              row.to_eps ? std::to_string(*row.to_eps).c_str() : "NA",
              row.updates, row.primal, row.dual, gap);
}

CompareRow distributed_row(const Scenario& s, const SuiteEntry& e,
                           const RunOptions& ro, bool reduced) {
  RunOptions variant = ro;
  variant.config.reduced = reduced;
  variant.config.record_dual = true;
  const RunResult r = run_until_converged(s, finish_config(variant, e.seed));
  CompareRow row;
  row.solver = reduced ? "distributed-reduced" : "distributed-full";
  row.rounds_used = r.rounds_used;
  row.converged = r.converged;
  row.primal = r.objective;
  row.dual = kInf;
  for (const auto& t : r.trace) {
    row.updates += t.updates_performed;
    row.dual = std::min(row.dual, t.dual_value);
    row.prices.push_back(t.prices);
  }
  row.prices.push_back(r.final_prices);
  return row;
}

bool compare_one(const Scenario& s, const SuiteEntry& e, const RunOptions& ro,
                 const OracleOptions& oo) {
  DualOracleOptions dopt = oo.dual;
  dopt.record_history = true;
  const DualOracleResult central = dual_oracle_solve(s, dopt);

  std::vector<CompareRow> rows;
  rows.push_back(distributed_row(s, e, ro, true));
  rows.push_back(distributed_row(s, e, ro, false));
  CompareRow c;
  c.solver = "centralized";
  c.rounds_used = central.iterations;
  c.converged = true;
  c.updates = central.iterations * s.num_tones;
  c.primal = central.primal_value;
  c.dual = central.dual_value;
  c.prices = central.price_history;
  rows.push_back(std::move(c));

  double best = -kInf;
  for (const auto& row : rows) best = std::max(best, row.primal);
  bool all_converged = true;
  for (auto& row : rows) {
    row.to_eps = rounds_to_eps(s, row.prices, best, ro.config.epsilon);
    print_row(e, row, central.dual_value);
    all_converged = all_converged && row.converged;
  }
  return all_converged;
}

int cmd_compare(const ScenarioOptions& so, const RunOptions& ro,
                const OracleOptions& oo, std::size_t suite,
                std::uint64_t base_seed) {
  std::printf(
      "seed,users,tones,solver,rounds_used,converged,rounds_to_eps,updates,"
      "primal,dual,gap_pct\n");
  bool ok = true;
  if (suite > 0) {
    for (const SuiteEntry& e : benchmark_suite(base_seed, suite)) {
      const Scenario s =
          generate_random_scenario(e.seed, e.num_users, e.num_tones);
      ok = compare_one(s, e, ro, oo) && ok;
    }
  } else {
    const Scenario s = make_scenario(so);
    ok = compare_one(s, {so.seed, s.num_users, s.num_tones}, ro, oo);
  }
  std::fflush(stdout);
  return ok ? kExitConverged : kExitUnconverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed OFDM uplink tone and power allocation"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  ScenarioOptions so;
  RunOptions ro;
  OracleOptions oo;
  std::string gen_out;
  std::size_t suite = 0;
  std::uint64_t base_seed = 1000;

  auto* run = app.add_subcommand("run", "Run the distributed algorithm");
  add_scenario_options(run, so);
  add_run_options(run, ro);
  run->add_option("--trace", ro.trace, "Write the per-round trace here");

  auto* oracle = app.add_subcommand("oracle", "Run the centralized baselines");
  add_scenario_options(oracle, so);
  add_oracle_options(oracle, oo);
  oracle->add_option("--grid", oo.grid,
                     "Also brute-force with this many grid points");

  auto* gen = app.add_subcommand("gen", "Write a random scenario");
  add_scenario_options(gen, so);
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  auto* compare = app.add_subcommand(
      "compare", "Distributed vs centralized convergence table (CSV)");
  add_scenario_options(compare, so);
  add_run_options(compare, ro);
  add_oracle_options(compare, oo);
  compare->add_option("--suite", suite,
                      "Run the seeded benchmark suite of this size instead");
  compare->add_option("--base-seed", base_seed, "First seed of the suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(so, ro);
    if (*oracle) return cmd_oracle(so, oo);
    if (*gen) return cmd_gen(so, gen_out);
    return cmd_compare(so, ro, oo, suite, base_seed);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const UnboundedError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
