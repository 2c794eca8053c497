#pragma once

#include "dtvoi/common.hpp"
#include "dtvoi/rng.hpp"

#include <utility>

namespace dtvoi {

/// Driving and restoring force parameters of the primary agent (PA).
struct ForceConfig {
  Vec2 amp{100.0, 100.0};      // N
  Vec2 freq{0.005, 0.004};     // cycles per query interval
  double restore_gain = -5.0;  // N, negative pulls toward the center
  Vec2 center{0.0, 0.0};       // m
  double region_radius = 25.0; // m
  double mass = 100.0;         // kg

  void validate() const;
};

/// Everything needed to step the truth and to build the filter's process model.
struct DynamicsConfig {
  ForceConfig force;
  double step = 0.2;            // T, seconds per query interval
  double sigma_sq_pos = 0.04;   // m^2 per interval
  double sigma_sq_vel = 0.01;   // (m/s)^2 per interval
  bool known_input = false;     // feed f(n)+g(s_hat) into the predict step
  StateVector init_mean = StateVector::Zero();
  Vec4 init_cov_diag{1.0, 1.0, 0.1, 0.1};

  void validate() const;
};

/// Linear process model s(n) = P s(n-1) + u, u ~ N(noise_mean, noise_cov).
struct ProcessModel {
  Mat4 transition = Mat4::Identity();
  Vec4 noise_mean = Vec4::Zero();
  Mat4 noise_cov = Mat4::Zero();
  double step = 0.0;
};

inline constexpr double kCenterEps = 1e-6;      // m
inline constexpr double kClampFraction = 0.999; // of region_radius

/// [A_x cos(2 pi f_x n), A_y cos(2 pi f_y n)].
Vec2 driving_force(double n, const ForceConfig& cfg);

/// Center-restoring force G (pos-O)/d * |vel|/(R-d).
/// Zero within kCenterEps of the center; throws DegenerateGeometry when d >= R.
Vec2 restoring_force(const Vec2& pos, const Vec2& vel, const ForceConfig& cfg);

/// Projects a position outside kClampFraction*R back onto that circle.
Vec2 clamp_to_region(const Vec2& pos, const ForceConfig& cfg);

/// Deterministic acceleration applied over the interval that starts at `s`
/// (index n_prev), after clamping the position into the region.
Vec2 acceleration(const StateVector& s, int n_prev, const ForceConfig& cfg);

/// Result of one truth step.
struct TruthStep {
  StateVector state;
  Vec2 accel;  // acceleration that was applied over the interval
};

/// Advances the truth from s(n-1) to s(n):
///   x(n) = x(n-1) + T v(n-1) + T^2/2 a(n-1) + n_x,   n_x ~ N(0, sigma_pos^2 I)
///   v(n) = v(n-1) + T a(n-1) + n_v,                  n_v ~ N(0, sigma_vel^2 I)
/// with a(n-1) = (f(n-1) + g(s(n-1))) / m.
TruthStep step_true_state(const StateVector& s, int n, const DynamicsConfig& cfg, Rng& rng);

/// Kinematic input matrix B = [T^2/2 I; T I] mapping acceleration to state.
Eigen::Matrix<double, kFeatures, 2> input_matrix(double step);

/// Constant-velocity process model. Unless known_input is set the forces are
/// treated as zero-mean noise and folded into noise_cov via B sigma_a^2 B^T,
/// sigma_a^2 = (max(A)/m)^2 / 2.
ProcessModel linearize(const DynamicsConfig& cfg);

}  // namespace dtvoi
