#pragma once

#include "dtvoi/common.hpp"
#include "dtvoi/rng.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace dtvoi {

enum class SensorKind { Position, Velocity };

std::string_view to_string(SensorKind kind);
SensorKind sensor_kind_from_string(std::string_view name);

using ObsMatrix = Eigen::Matrix<double, kObsDim, kFeatures>;

/// H_pos = [I 0], H_vel = [0 I].
ObsMatrix observation_matrix(SensorKind kind);

/// First (0-based) feature observed by an agent of this kind; it observes two
/// consecutive features starting there.
int first_feature(SensorKind kind);

/// A fixed sensing agent (SA).
struct SensingAgent {
  AgentId id = 0;
  SensorKind kind = SensorKind::Position;
  Vec2 location = Vec2::Zero();
  Mat2 meas_cov = Mat2::Identity();
  double ap_distance = 1.0;  // distance to the AP, floored at 1 m

  ObsMatrix obs_matrix() const { return observation_matrix(kind); }
  bool measures(int feature) const;
  /// Measurement variance of `feature`; requires measures(feature).
  double feature_variance(int feature) const;
};

/// Variance interval for a sensor kind's diagonal measurement noise.
struct VarianceRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct FleetSpec {
  int m_pos = 30;
  int m_vel = 30;
  VarianceRange pos_var{0.01, 0.09};      // m^2
  VarianceRange vel_var{0.0025, 0.0225};  // (m/s)^2

  void validate() const;
};

/// The SA population. Immutable once built; ids are dense 1..M.
class Fleet {
 public:
  Fleet() = default;
  Fleet(std::vector<SensingAgent> agents, double d_max);

  const std::vector<SensingAgent>& agents() const { return agents_; }
  std::size_t size() const { return agents_.size(); }
  bool empty() const { return agents_.empty(); }
  double d_max() const { return d_max_; }

  const SensingAgent& agent(AgentId id) const;

 private:
  std::vector<SensingAgent> agents_;
  double d_max_ = 0.0;
};

/// Uniform placement in the disk of `region_radius` around `ap`; position
/// agents get ids 1..m_pos, velocity agents follow.
Fleet place_fleet(const FleetSpec& spec, double region_radius, const Vec2& ap, double d_max,
                  Rng& rng);

/// H_m s + w, w ~ N(0, meas_cov).
Vec2 observe(const SensingAgent& agent, const StateVector& s, Rng& rng);

/// Ids of agents within d_max of the PA, ascending.
std::vector<AgentId> reachable_set(const Fleet& fleet, const Vec2& pa_position);

/// Resolves ids to agents, preserving order.
std::vector<SensingAgent> select_agents(const Fleet& fleet, std::span<const AgentId> ids);

}  // namespace dtvoi
