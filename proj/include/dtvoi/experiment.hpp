#pragma once

#include "dtvoi/config.hpp"
#include "dtvoi/scheduler.hpp"
#include "dtvoi/sensing.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtvoi {

/// Metrics of one query interval of one episode.
struct QIRecord {
  int qi = 0;
  PolicyKind policy = PolicyKind::VoI;
  int run = 0;
  int n_scheduled = 0;
  double total_power = 0.0;  // W
  bool violated = false;     // posterior breaks some xi_k^2
  double sq_error = 0.0;     // |s - s_hat|^2
  double objective = 0.0;
  std::vector<AgentId> agents;

  // Not serialized; kept for invariant checks.
  int n_reachable = 0;
  bool prior_compliant = false;
  int iterations_used = 0;

  bool operator==(const QIRecord&) const = default;
};

struct Episode {
  Fleet fleet;
  std::vector<QIRecord> records;
};

/// Thrown (with the module error nested) when a query interval fails.
class EpisodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stream seeds. The scenario stream (fleet, initial state, process noise)
/// depends only on (base, run) so all policies of a run share the truth; the
/// policy stream (measurement noise, random selection) adds the policy.
std::uint64_t scenario_seed(std::uint64_t base_seed, int run);
std::uint64_t policy_seed(std::uint64_t base_seed, PolicyKind policy, int run);

/// The fleet of a run: loaded from cfg.agents_file when set, else placed from
/// the scenario stream.
Fleet episode_fleet(const SimConfig& cfg, int run);

/// Simulates cfg.qis query intervals of one policy. Deterministic in
/// (cfg, policy, run).
Episode run_episode(const SimConfig& cfg, PolicyKind policy, int run);

/// Per-QI aggregate across runs for one policy.
struct QIAggregate {
  int qi = 0;
  double mean_n_scheduled = 0.0;
  double mean_total_power = 0.0;
  double violation_prob = 0.0;
  double rmse = 0.0;
};

struct PolicyAggregate {
  PolicyKind policy = PolicyKind::VoI;
  std::vector<QIAggregate> per_qi;
  double mrmse = 0.0;
};

struct AggregateMetrics {
  std::vector<PolicyAggregate> policies;

  const PolicyAggregate& of(PolicyKind p) const;
};

/// RMSE(n) = sqrt(mean_runs sq_error), MRMSE = mean_n RMSE(n), violation
/// probability = fraction of runs violated. Records may arrive in any order.
AggregateMetrics aggregate(const std::vector<QIRecord>& records);

struct MonteCarloResult {
  std::vector<QIRecord> records;          // ordered by (policy order, run, qi)
  std::map<int, Fleet> fleets;            // by run
  AggregateMetrics metrics;
};

/// Runs cfg.runs episodes for each of cfg.policies on a pool of cfg.threads
/// workers. Output is independent of the thread count.
MonteCarloResult run_monte_carlo(const SimConfig& cfg);

// CSV outputs. Doubles use 9 significant digits.
inline constexpr const char* kTraceHeader =
    "qi,policy,run,n_scheduled,total_power_w,violated,sq_error,objective,agents";
inline constexpr const char* kSummaryHeader =
    "policy,qi,mean_n_scheduled,mean_total_power_w,violation_prob,rmse";
inline constexpr const char* kFleetHeader = "run,id,kind,x,y,var_1,var_2,ap_distance";

std::string format_sig9(double v);

std::string trace_row(const QIRecord& r);
QIRecord parse_trace_row(const std::string& line);

void emit_csv(const std::vector<QIRecord>& records, const std::filesystem::path& path);
std::vector<QIRecord> read_trace(const std::filesystem::path& path);
void emit_summary(const AggregateMetrics& agg, const std::filesystem::path& path);
void emit_fleets(const std::map<int, Fleet>& fleets, const std::filesystem::path& path);

/// Reads a fleet file (kFleetHeader columns); rows of `run` only, or all rows
/// when run < 0. An empty ap_distance cell is recomputed from `ap`.
Fleet read_fleet(const std::filesystem::path& path, double d_max, const Vec2& ap, int run = -1);

/// Writes trace.csv, summary.csv, fleet.csv and config.resolved into `dir`.
void write_outputs(const SimConfig& cfg, const MonteCarloResult& result,
                   const std::filesystem::path& dir);

}  // namespace dtvoi
