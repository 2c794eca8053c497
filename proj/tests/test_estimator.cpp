#include "dtvoi/estimator.hpp"

#include "kalman_check.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace dtvoi;
using doctest::Approx;

namespace {

SensingAgent agent(AgentId id, SensorKind kind, double var) {
  SensingAgent a;
  a.id = id;
  a.kind = kind;
  a.meas_cov = var * Mat2::Identity();
  return a;
}

Eigen::MatrixXd diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

}  // namespace

TEST_CASE("predict") {
  Belief b{Eigen::VectorXd::Ones(4), diag({0.5, 0.4, 0.3, 0.2})};
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);

  auto same = predict(b, eye, zero, Eigen::MatrixXd::Zero(4, 4));
  CHECK(same.mean.isApprox(b.mean));
  CHECK(same.cov.isApprox(b.cov));

  auto grown = predict(b, eye, zero, diag({0.1, 0.2, 0.3, 0.4}));
  CHECK(grown.cov.isApprox(diag({0.6, 0.6, 0.6, 0.6})));

  DynamicsConfig cfg;
  cfg.known_input = true;
  cfg.sigma_sq_pos = cfg.sigma_sq_vel = 0.0;
  const auto pm = linearize(cfg);
  const auto moved = predict(Belief{Eigen::VectorXd::Zero(4), diag({0, 0, 1, 1})}, pm);
  CHECK(moved.cov(0, 0) == Approx(0.04));
  CHECK(moved.cov(1, 1) == Approx(0.04));
  CHECK(moved.cov(0, 2) == Approx(0.2));

  const Eigen::VectorXd u = Eigen::VectorXd::Constant(4, 0.5);
  CHECK(predict(b, eye, zero, Eigen::MatrixXd::Zero(4, 4), &u).mean.isApprox(b.mean + u));
}

TEST_CASE("stacking") {
  const std::vector<SensingAgent> none;
  const auto empty = stack_models(none);
  CHECK(empty.empty());
  CHECK(empty.values.size() == 0);

  const std::vector<SensingAgent> one{agent(1, SensorKind::Position, 0.02)};
  CHECK(stack_models(one).h.isApprox(Eigen::MatrixXd(observation_matrix(SensorKind::Position))));

  std::vector<SensingAgent> two{agent(4, SensorKind::Position, 0.02), agent(2, SensorKind::Velocity, 0.005)};
  const std::vector<Vec2> obs{{1.0, 2.0}, {3.0, 4.0}};
  const auto so = stack(two, obs);
  CHECK(so.h.rows() == 4);
  CHECK(so.h.isIdentity());
  CHECK(so.cov.isApprox(diag({0.02, 0.02, 0.005, 0.005})));
  CHECK(so.values.isApprox(Eigen::Vector4d(1, 2, 3, 4)));
  CHECK(so.agent_order == std::vector<AgentId>{4, 2});

  CHECK_THROWS_AS(stack(two, std::vector<Vec2>{{1.0, 2.0}}), ContractViolation);
}

TEST_CASE("gain and posterior") {
  const std::vector<SensingAgent> both{agent(1, SensorKind::Position, 0.02), agent(2, SensorKind::Velocity, 0.005)};
  const auto so = stack_models(both);

  CHECK(kalman_gain(Eigen::MatrixXd::Zero(4, 4), so, {.regularize = true}).isZero());
  auto noiseless = so;
  noiseless.cov.setZero();
  CHECK_THROWS_AS(kalman_gain(Eigen::MatrixXd::Zero(4, 4), noiseless), SingularInnovation);
  CHECK(kalman_gain(Eigen::MatrixXd::Zero(4, 4), noiseless, {.regularize = true}).isZero());

  auto noisy = so;
  noisy.cov *= 1e12;
  CHECK(kalman_gain(Eigen::MatrixXd::Identity(4, 4), noisy).cwiseAbs().maxCoeff() < 1e-6);

  // Scalar reference: unit prior, unit noise -> gain 1/2, variance 1/2.
  std::vector<Eigen::MatrixXd> h{Eigen::MatrixXd::Identity(1, 1)}, r{Eigen::MatrixXd::Identity(1, 1)};
  std::vector<Eigen::VectorXd> v{Eigen::VectorXd::Constant(1, 2.0)};
  const auto scalar = stack_blocks(h, r, v);
  const Belief post = update(Belief{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)}, scalar);
  CHECK(post.mean(0) == Approx(1.0));
  CHECK(post.cov(0, 0) == Approx(0.5));

  const Belief prior{Eigen::Vector4d(1, 1, 1, 1), diag({1, 1, 1, 1})};
  const Belief same = update(prior, stack_models(std::vector<SensingAgent>{}));
  CHECK(same.mean == prior.mean);
  CHECK(same.cov == prior.cov);

  std::vector<SensingAgent> exact{agent(1, SensorKind::Position, 1e-12), agent(2, SensorKind::Velocity, 1e-12)};
  const Belief sharp = update(prior, stack(exact, std::vector<Vec2>{{5.0, 6.0}, {7.0, 8.0}}));
  CHECK((sharp.mean - Eigen::Vector4d(5, 6, 7, 8)).norm() < 1e-9);
  CHECK(sharp.cov.diagonal().maxCoeff() < 1e-9);
}

TEST_CASE("posterior algebra on random instances") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd p = oracle::random_spd(4, rng, 1e-3);
    std::vector<SensingAgent> chosen;
    for (int i = 0; i <= trial % 5; ++i) {
      chosen.push_back(agent(i + 1, i % 2 ? SensorKind::Velocity : SensorKind::Position, 0.01 * (i + 1)));
    }
    const auto so = stack_models(chosen);
    const Eigen::MatrixXd k = kalman_gain(p, so);
    const Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(4, 4) - k * so.h;
    const Eigen::MatrixXd joseph = ikh * p * ikh.transpose() + k * so.cov * k.transpose();
    const Eigen::MatrixXd post = posterior_cov(p, so);
    CHECK(oracle::rel_err(post, joseph) < 1e-9);
    CHECK(post.isApprox(post.transpose()));
    CHECK((post.diagonal().array() <= p.diagonal().array() + 1e-12).all());
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(post).eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("filter matches joint-Gaussian conditioning") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 5; ++i) {
    const auto sys = oracle::random_system(rng, 20, 5);
    const auto worst = filter_vs_joint(sys, 20);
    CHECK(worst.mean < 1e-8);
    CHECK(worst.cov < 1e-8);
  }
}

TEST_CASE("requirement violations") {
  const auto req = Requirements::pos_vel(0.015, 0.005);
  CHECK(violated_features(diag({0.014, 0.014, 0.004, 0.004}), req).empty());
  CHECK(violated_features(diag({0.015, 0.015, 0.005, 0.005}), req).empty());
  CHECK(violated_features(diag({0.016, 0.01, 0.004, 0.004}), req) == std::vector<int>{0});
  CHECK(violated_features(diag({0.1, 0.1, 0.1, 0.1}), req) == std::vector<int>{0, 1, 2, 3});
  CHECK_THROWS_AS(violated_features(diag({0.1, 0.1}), req), ContractViolation);
  CHECK_THROWS_AS(Requirements::pos_vel(0.0, 0.005).validate(), ConfigError);
}
