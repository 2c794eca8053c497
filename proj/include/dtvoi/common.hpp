#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dtvoi {

// Number of state features: [x, y, vx, vy].
inline constexpr int kFeatures = 4;
// Dimension of a single sensing-agent observation.
inline constexpr int kObsDim = 2;

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Matrix<double, kFeatures, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix<double, kFeatures, kFeatures>;
using StateVector = Vec4;

using AgentId = int;

/// PA too close to (or outside) the region boundary for the restoring force.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rician link cannot meet the outage target at any power.
class InfeasibleLink : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Innovation covariance is (numerically) singular.
class SingularInnovation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (dimension mismatch, empty candidate set, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid or unknown configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dtvoi
