// dtvoi: command-line front end of the VoI scheduling simulator.
//
//   dtvoi run --config cfg.ini --policy voi --out results/
//   dtvoi sweep --config cfg.ini --policies all --runs 500 --out results/
//   dtvoi verify-lemma1 --config cfg.ini
//   dtvoi selftest

#include "dtvoi/channel.hpp"
#include "dtvoi/config.hpp"
#include "dtvoi/experiment.hpp"
#include "dtvoi/selftest.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using namespace dtvoi;

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  int runs = 0;
  long long seed = -1;
  int threads = -1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "INI configuration file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "Override a key, e.g. --set scheduler.slots=5");
}

SimConfig resolve(const CommonOptions& o) {
  SimConfig cfg = o.config.empty() ? SimConfig{} : load_config(o.config);
  std::map<std::string, std::string> kv;
  for (const auto& item : o.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  apply_overrides(cfg, kv);
  if (o.runs > 0) cfg.runs = o.runs;
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (o.threads >= 0) cfg.threads = o.threads;
  cfg.validate();
  return cfg;
}

void print_table(const MonteCarloResult& result, int warmup) {
  std::printf("%-14s %10s %12s %10s %10s\n", "policy", "n_sched", "power_w", "viol_prob", "MRMSE");
  for (const auto& pa : result.metrics.policies) {
    double n = 0, p = 0, v = 0;
    int count = 0;
    for (const auto& q : pa.per_qi) {
      if (q.qi < warmup) continue;
      n += q.mean_n_scheduled;
      p += q.mean_total_power;
      v += q.violation_prob;
      ++count;
    }
    count = std::max(count, 1);
    std::printf("%-14s %10.3f %12.3f %10.4f %10.5f\n", std::string(to_string(pa.policy)).c_str(),
                n / count, p / count, v / count, pa.mrmse);
  }
  std::printf("(per-QI means over QI >= %d; MRMSE over all QIs)\n", warmup);
}

int simulate(SimConfig cfg, const std::string& out_dir) {
  const auto result = run_monte_carlo(cfg);
  write_outputs(cfg, result, out_dir);
  print_table(result, std::min(40, cfg.qis));
  std::printf("wrote %s/{trace.csv,summary.csv,fleet.csv,config.resolved}\n", out_dir.c_str());
  return 0;
}

int verify_link(const SimConfig& cfg, std::uint64_t trials, const std::vector<double>& distances,
                  unsigned workers) {
  const LinkParams lp = cfg.link();
  std::printf("G = %.6g (linear), eps = %.3g, y_Q = %.9g\n", lp.rician_g, lp.outage_eps,
              y_q(lp.rician_g, lp.outage_eps));
  std::printf("%10s %16s %16s %12s\n", "d_ap_m", "power_w", "mc_outage", "bound_5eps");
  bool ok = true;
  for (double d : distances) {
    const double p = required_tx_power(d, lp);
    const double out = outage_probability_mc_parallel(p, d, lp, trials,
                                                      derive_seed({cfg.seed, static_cast<std::uint64_t>(d * 1000)}),
                                                      workers);
    ok = ok && out <= 5.0 * lp.outage_eps;
    std::printf("%10.3f %16.9g %16.9g %12s\n", d, p, out, out <= 5.0 * lp.outage_eps ? "ok" : "EXCEEDED");
  }
  return ok ? 0 : 1;
}

void print_nested(const std::exception& e, int depth = 0) {
  std::cerr << std::string(static_cast<std::size_t>(depth) * 2, ' ') << e.what() << '\n';
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    print_nested(inner, depth + 1);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VoI sensor scheduling simulator for digital-twin trajectory estimation"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string run_policy = "voi";
  std::string run_out = "out";
  auto* run = app.add_subcommand("run", "Monte Carlo episodes of a single policy");
  add_common(run, run_opts);
  run->add_option("--policy", run_policy, "voi | cost_bg | confidence_bg | random | bcs");
  run->add_option("--out", run_out, "Output directory")->required();
  run->add_option("--runs", run_opts.runs, "Number of runs (overrides harness.runs)");
  run->add_option("--seed", run_opts.seed, "Base seed (overrides harness.seed)");
  run->add_option("--threads", run_opts.threads, "Worker threads, 0 = all cores");

  CommonOptions sweep_opts;
  std::string sweep_policies = "all";
  std::string sweep_out = "out";
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo episodes of several policies");
  add_common(sweep, sweep_opts);
  sweep->add_option("--policies", sweep_policies, "'all' or a comma-separated list");
  sweep->add_option("--out", sweep_out, "Output directory")->required();
  sweep->add_option("--runs", sweep_opts.runs, "Number of runs (overrides harness.runs)");
  sweep->add_option("--seed", sweep_opts.seed, "Base seed (overrides harness.seed)");
  sweep->add_option("--threads", sweep_opts.threads, "Worker threads, 0 = all cores");

  CommonOptions link_opts;
  std::uint64_t trials = 10'000'000;
  std::vector<double> distances{5.0, 10.0, 20.0};
  unsigned workers = 4;
  auto* link = app.add_subcommand("verify-lemma1", "Closed-form power vs Monte Carlo outage");
  add_common(link, link_opts);
  link->add_option("--trials", trials, "Channel draws per distance");
  link->add_option("--distances", distances, "AP-SA distances in m");
  link->add_option("--workers", workers, "Independent Monte Carlo streams");

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      SimConfig cfg = resolve(run_opts);
      cfg.policies = {policy_from_string(run_policy)};
      return simulate(cfg, run_out);
    }
    if (*sweep) {
      SimConfig cfg = resolve(sweep_opts);
      cfg.policies = parse_policy_list(sweep_policies);
      cfg.validate();
      return simulate(cfg, sweep_out);
    }
    if (*link) return verify_link(resolve(link_opts), trials, distances, workers);
    if (*selftest) {
      bool ok = true;
      for (const auto& c : run_selftest()) {
        std::printf("[%s] %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        ok = ok && c.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: ";
    print_nested(e);
    return 2;
  }
  return 0;
}
