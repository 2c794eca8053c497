#include "dtvoi/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace dtvoi {

void ForceConfig::validate() const {
  if (!(mass > 0.0)) throw ConfigError("dynamics.mass must be > 0");
  if (!(region_radius > 0.0)) throw ConfigError("dynamics.region_radius must be > 0");
}

void DynamicsConfig::validate() const {
  force.validate();
  if (!(step >= 0.0)) throw ConfigError("dynamics.step must be >= 0");
  if (sigma_sq_pos < 0.0 || sigma_sq_vel < 0.0)
    throw ConfigError("dynamics process noise variances must be >= 0");
  if ((init_cov_diag.array() < 0.0).any())
    throw ConfigError("dynamics.init_cov must be non-negative");
}

Vec2 driving_force(double n, const ForceConfig& cfg) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return {cfg.amp.x() * std::cos(two_pi * cfg.freq.x() * n),
          cfg.amp.y() * std::cos(two_pi * cfg.freq.y() * n)};
}

Vec2 restoring_force(const Vec2& pos, const Vec2& vel, const ForceConfig& cfg) {
  const Vec2 offset = pos - cfg.center;
  const double d = offset.norm();
  if (!(d < cfg.region_radius)) {
    throw DegenerateGeometry("restoring force undefined: PA at distance " + std::to_string(d) +
                             " m with region radius " + std::to_string(cfg.region_radius) + " m");
  }
  if (d < kCenterEps) return Vec2::Zero();
  return cfg.restore_gain * (offset / d) * (vel.norm() / (cfg.region_radius - d));
}

Vec2 clamp_to_region(const Vec2& pos, const ForceConfig& cfg) {
  const Vec2 offset = pos - cfg.center;
  const double limit = kClampFraction * cfg.region_radius;
  const double d = offset.norm();
  if (d <= limit) return pos;
  return cfg.center + offset * (limit / d);
}

Vec2 acceleration(const StateVector& s, int n_prev, const ForceConfig& cfg) {
  const Vec2 pos = clamp_to_region(s.head<2>(), cfg);
  const Vec2 vel = s.tail<2>();
  return (driving_force(n_prev, cfg) + restoring_force(pos, vel, cfg)) / cfg.mass;
}

TruthStep step_true_state(const StateVector& s, int n, const DynamicsConfig& cfg, Rng& rng) {
  const double T = cfg.step;
  const Vec2 pos = clamp_to_region(s.head<2>(), cfg.force);
  const Vec2 vel = s.tail<2>();
  const Vec2 a = acceleration(s, n - 1, cfg.force);

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sd_pos = std::sqrt(cfg.sigma_sq_pos);
  const double sd_vel = std::sqrt(cfg.sigma_sq_vel);
  // Draw order is part of the reproducibility contract: n_x then n_v.
  const Vec2 n_x{sd_pos * gauss(rng), sd_pos * gauss(rng)};
  const Vec2 n_v{sd_vel * gauss(rng), sd_vel * gauss(rng)};

  TruthStep out;
  out.state.head<2>() = pos + T * vel + 0.5 * T * T * a + n_x;
  out.state.tail<2>() = vel + T * a + n_v;
  out.accel = a;
  return out;
}

Eigen::Matrix<double, kFeatures, 2> input_matrix(double step) {
  Eigen::Matrix<double, kFeatures, 2> b;
  b.topRows<2>() = 0.5 * step * step * Mat2::Identity();
  b.bottomRows<2>() = step * Mat2::Identity();
  return b;
}

ProcessModel linearize(const DynamicsConfig& cfg) {
  ProcessModel pm;
  pm.step = cfg.step;
  pm.transition.setIdentity();
  pm.transition.topRightCorner<2, 2>() = cfg.step * Mat2::Identity();
  pm.noise_cov.diagonal() << cfg.sigma_sq_pos, cfg.sigma_sq_pos, cfg.sigma_sq_vel,
      cfg.sigma_sq_vel;
  if (!cfg.known_input) {
    const double a_max = cfg.force.amp.cwiseAbs().maxCoeff() / cfg.force.mass;
    const double var_a = 0.5 * a_max * a_max;
    const auto b = input_matrix(cfg.step);
    pm.noise_cov += var_a * b * b.transpose();
  }
  return pm;
}

}  // namespace dtvoi
