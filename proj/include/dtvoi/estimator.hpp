#pragma once

#include "dtvoi/common.hpp"
#include "dtvoi/dynamics.hpp"
#include "dtvoi/sensing.hpp"

#include <span>
#include <vector>

namespace dtvoi {

/// Gaussian belief N(mean, cov) of the digital twin. Dynamically sized so the
/// filter algebra also serves the scalar and random-system checks.
struct Belief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Required per-feature error variances xi_k^2.
struct Requirements {
  Eigen::VectorXd xi_sq;

  static Requirements pos_vel(double xi_sq_pos, double xi_sq_vel);
  void validate() const;
};

/// Observations of the scheduled agents stacked in schedule order.
struct StackedObservation {
  Eigen::MatrixXd h;       // (D q) x K
  Eigen::MatrixXd cov;     // block-diagonal (D q) x (D q)
  Eigen::VectorXd values;  // (D q)
  std::vector<AgentId> agent_order;

  bool empty() const { return h.rows() == 0; }
};

struct FilterOptions {
  // Add 1e-12 I to an ill-conditioned innovation covariance instead of throwing.
  bool regularize = false;
};

inline constexpr double kMaxInnovationCondition = 1e12;

/// cov <- (cov + cov^T) / 2
void symmetrize(Eigen::MatrixXd& cov);

/// mean' = P mean + mu_u + control, cov' = P cov P^T + C_u.
Belief predict(const Belief& b, const Eigen::MatrixXd& transition, const Eigen::VectorXd& noise_mean,
               const Eigen::MatrixXd& noise_cov, const Eigen::VectorXd* control = nullptr);
Belief predict(const Belief& b, const ProcessModel& pm, const Eigen::VectorXd* control = nullptr);

/// Vertical concatenation of H_m, block-diagonal C_w_m and observation values.
StackedObservation stack(std::span<const SensingAgent> scheduled, std::span<const Vec2> observations);

/// Structural stack (no observation values), used to predict covariances.
StackedObservation stack_models(std::span<const SensingAgent> scheduled);

/// Generic stack from explicit blocks; block i contributes h_blocks[i].rows() rows.
StackedObservation stack_blocks(std::span<const Eigen::MatrixXd> h_blocks,
                                std::span<const Eigen::MatrixXd> cov_blocks,
                                std::span<const Eigen::VectorXd> values);

/// prior_cov H^T S^-1, S = H prior_cov H^T + C_w. Throws SingularInnovation when
/// cond(S) > kMaxInnovationCondition unless options.regularize.
Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& prior_cov, const StackedObservation& so,
                            const FilterOptions& options = {});

/// (I - K H) prior_cov, symmetrized. Identity on an empty stack.
Eigen::MatrixXd posterior_cov(const Eigen::MatrixXd& prior_cov, const StackedObservation& so,
                              const FilterOptions& options = {});

/// Measurement update; leaves the belief untouched for an empty stack.
Belief update(const Belief& prior, const StackedObservation& so, const FilterOptions& options = {});

/// 0-based indices k with diag(cov)_k > xi_k^2, ascending.
std::vector<int> violated_features(const Eigen::MatrixXd& cov, const Requirements& req);

inline bool compliant(const Eigen::MatrixXd& cov, const Requirements& req) {
  return violated_features(cov, req).empty();
}

}  // namespace dtvoi
