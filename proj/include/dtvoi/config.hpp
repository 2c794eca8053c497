#pragma once

#include "dtvoi/channel.hpp"
#include "dtvoi/dynamics.hpp"
#include "dtvoi/estimator.hpp"
#include "dtvoi/scheduler.hpp"
#include "dtvoi/sensing.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace dtvoi {

/// Fully resolved simulation configuration. Defaults reproduce the reference
/// scenario (60 agents, C = 10, 100 query intervals, 500 runs).
struct SimConfig {
  DynamicsConfig dynamics;

  FleetSpec fleet;
  std::filesystem::path agents_file;  // explicit fleet; overrides fleet counts when set

  // Stored in the config units; link() converts.
  double carrier_hz = 2.4e9;
  double bandwidth_hz = 5e6;
  double rate_threshold_bps = 250e3;
  double noise_power_dbm = -11.5;
  double rician_factor_db = 15.0;
  double outage_eps = 1e-4;
  double mu0 = 1e-4;
  double path_loss_exp = 2.5;

  double xi_sq_pos = 0.015;
  double xi_sq_vel = 0.005;

  int slots = 10;
  double d_max = 20.0;
  double alpha = 0.5;
  double power_budget_w = 1000.0;
  bool regularize = false;

  int qis = 100;
  int runs = 500;
  std::uint64_t seed = 1;
  std::vector<PolicyKind> policies{kAllPolicies.begin(), kAllPolicies.end()};
  int threads = 0;  // 0: hardware concurrency

  LinkParams link() const;
  Requirements requirements() const;
  SchedulerParams scheduler() const;

  /// Throws ConfigError on any out-of-range value.
  void validate() const;
};

/// Applies `section.key = value` assignments to `cfg`. Unknown keys throw ConfigError.
void apply_overrides(SimConfig& cfg, const std::map<std::string, std::string>& assignments);

/// Parses an INI file (sections + key = value). Missing keys keep their
/// defaults; unknown sections or keys are rejected.
SimConfig load_config(const std::filesystem::path& path);
SimConfig parse_config(std::istream& in, const std::string& origin = "<stream>");

/// Every key with its resolved value, in the same INI layout load_config reads.
std::string resolved_config(const SimConfig& cfg);

std::string policy_list_string(const std::vector<PolicyKind>& policies);
std::vector<PolicyKind> parse_policy_list(const std::string& text);

}  // namespace dtvoi
