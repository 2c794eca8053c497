#include "dtvoi/estimator.hpp"

#include <string>

namespace dtvoi {

Requirements Requirements::pos_vel(double xi_sq_pos, double xi_sq_vel) {
  Requirements r;
  r.xi_sq = Eigen::VectorXd(kFeatures);
  r.xi_sq << xi_sq_pos, xi_sq_pos, xi_sq_vel, xi_sq_vel;
  r.validate();
  return r;
}

void Requirements::validate() const {
  if (xi_sq.size() == 0 || (xi_sq.array() <= 0.0).any()) {
    throw ConfigError("required error variances must all be > 0");
  }
}

void symmetrize(Eigen::MatrixXd& cov) { cov = 0.5 * (cov + cov.transpose()).eval(); }

Belief predict(const Belief& b, const Eigen::MatrixXd& transition, const Eigen::VectorXd& noise_mean,
               const Eigen::MatrixXd& noise_cov, const Eigen::VectorXd* control) {
  Belief out;
  out.mean = transition * b.mean + noise_mean;
  if (control != nullptr) out.mean += *control;
  out.cov = transition * b.cov * transition.transpose() + noise_cov;
  symmetrize(out.cov);
  return out;
}

Belief predict(const Belief& b, const ProcessModel& pm, const Eigen::VectorXd* control) {
  return predict(b, pm.transition, pm.noise_mean, pm.noise_cov, control);
}

StackedObservation stack_blocks(std::span<const Eigen::MatrixXd> h_blocks,
                                std::span<const Eigen::MatrixXd> cov_blocks,
                                std::span<const Eigen::VectorXd> values) {
  if (h_blocks.size() != cov_blocks.size() || (!values.empty() && values.size() != h_blocks.size())) {
    throw ContractViolation("stack: " + std::to_string(h_blocks.size()) + " observation models, " +
                            std::to_string(cov_blocks.size()) + " covariances, " +
                            std::to_string(values.size()) + " observations");
  }
  Eigen::Index rows = 0;
  Eigen::Index cols = h_blocks.empty() ? 0 : h_blocks.front().cols();
  for (std::size_t i = 0; i < h_blocks.size(); ++i) {
    const auto d = h_blocks[i].rows();
    if (h_blocks[i].cols() != cols || cov_blocks[i].rows() != d || cov_blocks[i].cols() != d ||
        (!values.empty() && values[i].size() != d)) {
      throw ContractViolation("stack: block " + std::to_string(i) + " has inconsistent dimensions");
    }
    rows += d;
  }

  StackedObservation so;
  so.h = Eigen::MatrixXd::Zero(rows, cols);
  so.cov = Eigen::MatrixXd::Zero(rows, rows);
  so.values = Eigen::VectorXd::Zero(rows);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < h_blocks.size(); ++i) {
    const auto d = h_blocks[i].rows();
    so.h.middleRows(r, d) = h_blocks[i];
    so.cov.block(r, r, d, d) = cov_blocks[i];
    if (!values.empty()) so.values.segment(r, d) = values[i];
    r += d;
  }
  return so;
}

namespace {

StackedObservation stack_agents(std::span<const SensingAgent> scheduled,
                                std::span<const Vec2> observations, bool with_values) {
  if (with_values && observations.size() != scheduled.size()) {
    throw ContractViolation("stack: " + std::to_string(scheduled.size()) + " agents but " +
                            std::to_string(observations.size()) + " observations");
  }
  const auto q = static_cast<Eigen::Index>(scheduled.size());
  StackedObservation so;
  so.h = Eigen::MatrixXd::Zero(kObsDim * q, kFeatures);
  so.cov = Eigen::MatrixXd::Zero(kObsDim * q, kObsDim * q);
  so.values = Eigen::VectorXd::Zero(kObsDim * q);
  so.agent_order.reserve(scheduled.size());
  for (Eigen::Index i = 0; i < q; ++i) {
    const auto& a = scheduled[static_cast<std::size_t>(i)];
    so.h.middleRows<kObsDim>(kObsDim * i) = a.obs_matrix();
    so.cov.block<kObsDim, kObsDim>(kObsDim * i, kObsDim * i) = a.meas_cov;
    if (with_values) so.values.segment<kObsDim>(kObsDim * i) = observations[static_cast<std::size_t>(i)];
    so.agent_order.push_back(a.id);
  }
  return so;
}

}  // namespace

StackedObservation stack(std::span<const SensingAgent> scheduled, std::span<const Vec2> observations) {
  return stack_agents(scheduled, observations, true);
}

StackedObservation stack_models(std::span<const SensingAgent> scheduled) {
  return stack_agents(scheduled, {}, false);
}

Eigen::MatrixXd kalman_gain(const Eigen::MatrixXd& prior_cov, const StackedObservation& so,
                            const FilterOptions& options) {
  if (so.h.cols() != prior_cov.rows()) {
    throw ContractViolation("kalman_gain: observation model has " + std::to_string(so.h.cols()) +
                            " columns for a state of dimension " + std::to_string(prior_cov.rows()));
  }
  if (so.empty()) return Eigen::MatrixXd::Zero(prior_cov.rows(), 0);

  Eigen::MatrixXd s = so.h * prior_cov * so.h.transpose() + so.cov;
  symmetrize(s);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxInnovationCondition) {
    if (!options.regularize) {
      throw SingularInnovation("innovation covariance ill-conditioned (eigenvalues " +
                               std::to_string(lo) + " .. " + std::to_string(hi) + ")");
    }
    s.diagonal().array() += 1e-12;
  }
  // K = P H^T S^-1  <=>  S K^T = H P (S and P symmetric).
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
  return ldlt.solve(so.h * prior_cov).transpose();
}

Eigen::MatrixXd posterior_cov(const Eigen::MatrixXd& prior_cov, const StackedObservation& so,
                              const FilterOptions& options) {
  if (so.empty()) return prior_cov;
  const Eigen::MatrixXd gain = kalman_gain(prior_cov, so, options);
  const auto n = prior_cov.rows();
  Eigen::MatrixXd cov = (Eigen::MatrixXd::Identity(n, n) - gain * so.h) * prior_cov;
  symmetrize(cov);
  return cov;
}

Belief update(const Belief& prior, const StackedObservation& so, const FilterOptions& options) {
  if (so.empty()) return prior;
  const Eigen::MatrixXd gain = kalman_gain(prior.cov, so, options);
  const auto n = prior.cov.rows();
  Belief out;
  out.mean = prior.mean + gain * (so.values - so.h * prior.mean);
  out.cov = (Eigen::MatrixXd::Identity(n, n) - gain * so.h) * prior.cov;
  symmetrize(out.cov);
  return out;
}

std::vector<int> violated_features(const Eigen::MatrixXd& cov, const Requirements& req) {
  if (cov.rows() != req.xi_sq.size()) {
    throw ContractViolation("violated_features: covariance dimension does not match requirements");
  }
  std::vector<int> out;
  for (Eigen::Index k = 0; k < cov.rows(); ++k) {
    if (cov(k, k) > req.xi_sq(k)) out.push_back(static_cast<int>(k));
  }
  return out;
}

}  // namespace dtvoi
