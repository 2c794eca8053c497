#include "dtvoi/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace dtvoi {

std::string_view to_string(SensorKind kind) {
  return kind == SensorKind::Position ? "position" : "velocity";
}

SensorKind sensor_kind_from_string(std::string_view name) {
  if (name == "position") return SensorKind::Position;
  if (name == "velocity") return SensorKind::Velocity;
  throw ConfigError("unknown sensor kind '" + std::string(name) + "'");
}

ObsMatrix observation_matrix(SensorKind kind) {
  ObsMatrix h = ObsMatrix::Zero();
  const int first = first_feature(kind);
  h(0, first) = 1.0;
  h(1, first + 1) = 1.0;
  return h;
}

int first_feature(SensorKind kind) { return kind == SensorKind::Position ? 0 : 2; }

bool SensingAgent::measures(int feature) const {
  const int first = first_feature(kind);
  return feature >= first && feature < first + kObsDim;
}

double SensingAgent::feature_variance(int feature) const {
  if (!measures(feature)) {
    throw ContractViolation("agent " + std::to_string(id) + " does not measure feature " +
                            std::to_string(feature + 1));
  }
  const int local = feature - first_feature(kind);
  return meas_cov(local, local);
}

void FleetSpec::validate() const {
  if (m_pos < 0 || m_vel < 0) throw ConfigError("fleet counts must be >= 0");
  for (const auto& r : {pos_var, vel_var}) {
    if (!(r.lo > 0.0) || r.hi < r.lo) throw ConfigError("fleet variance range must be 0 < lo <= hi");
  }
}

Fleet::Fleet(std::vector<SensingAgent> agents, double d_max)
    : agents_(std::move(agents)), d_max_(d_max) {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto& a = agents_[i];
    if (a.id != static_cast<AgentId>(i + 1)) {
      throw ConfigError("fleet ids must be dense 1..M in order; got id " + std::to_string(a.id) +
                        " at position " + std::to_string(i + 1));
    }
    Eigen::LLT<Mat2> llt(a.meas_cov);
    if (!a.meas_cov.isApprox(a.meas_cov.transpose()) || llt.info() != Eigen::Success) {
      throw ConfigError("agent " + std::to_string(a.id) + " meas_cov is not symmetric PD");
    }
  }
}

const SensingAgent& Fleet::agent(AgentId id) const {
  if (id < 1 || id > static_cast<AgentId>(agents_.size())) {
    throw ContractViolation("no agent with id " + std::to_string(id));
  }
  return agents_[static_cast<std::size_t>(id - 1)];
}

Fleet place_fleet(const FleetSpec& spec, double region_radius, const Vec2& ap, double d_max,
                  Rng& rng) {
  spec.validate();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SensingAgent> agents;
  agents.reserve(static_cast<std::size_t>(spec.m_pos + spec.m_vel));

  auto add = [&](SensorKind kind, const VarianceRange& range) {
    SensingAgent a;
    a.id = static_cast<AgentId>(agents.size() + 1);
    a.kind = kind;
    const double r = region_radius * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    a.location = ap + Vec2{r * std::cos(theta), r * std::sin(theta)};
    const double v = range.lo + (range.hi - range.lo) * unit(rng);
    a.meas_cov = v * Mat2::Identity();
    a.ap_distance = std::max(1.0, (a.location - ap).norm());
    agents.push_back(a);
  };
  for (int i = 0; i < spec.m_pos; ++i) add(SensorKind::Position, spec.pos_var);
  for (int i = 0; i < spec.m_vel; ++i) add(SensorKind::Velocity, spec.vel_var);
  return Fleet(std::move(agents), d_max);
}

Vec2 observe(const SensingAgent& agent, const StateVector& s, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Vec2 z{gauss(rng), gauss(rng)};
  // Symmetric square root also covers the noiseless (zero covariance) case.
  const Mat2 root = Eigen::SelfAdjointEigenSolver<Mat2>(agent.meas_cov).operatorSqrt();
  return agent.obs_matrix() * s + root * z;
}

std::vector<AgentId> reachable_set(const Fleet& fleet, const Vec2& pa_position) {
  std::vector<AgentId> out;
  for (const auto& a : fleet.agents()) {
    if ((a.location - pa_position).norm() <= fleet.d_max()) out.push_back(a.id);
  }
  return out;
}

std::vector<SensingAgent> select_agents(const Fleet& fleet, std::span<const AgentId> ids) {
  std::vector<SensingAgent> out;
  out.reserve(ids.size());
  for (AgentId id : ids) out.push_back(fleet.agent(id));
  return out;
}

}  // namespace dtvoi
