#include "dtvoi/dynamics.hpp"

#include <doctest.h>

#include <cmath>

using namespace dtvoi;
using doctest::Approx;

namespace {

DynamicsConfig quiet() {
  DynamicsConfig cfg;
  cfg.sigma_sq_pos = 0.0;
  cfg.sigma_sq_vel = 0.0;
  cfg.force.amp = Vec2::Zero();
  return cfg;
}

}  // namespace

TEST_CASE("driving force follows the two cosines") {
  ForceConfig f;
  f.amp = {100.0, 100.0};
  CHECK(driving_force(0, f).isApprox(Vec2(100.0, 100.0)));

  f.freq = {0.01, 0.01};
  CHECK(driving_force(25, f).norm() < 1e-9);

  f.amp = {100.0, 80.0};
  f.freq = {0.005, 0.004};
  const Vec2 v = driving_force(50, f);
  // 40-digit reference values of 100 cos(pi/2) and 80 cos(0.4 pi).
  CHECK(std::abs(v.x() - 0.0) < 1e-12);
  CHECK(v.y() == Approx(24.72135954999579392818).epsilon(1e-14));
}

TEST_CASE("restoring force") {
  ForceConfig f;
  f.restore_gain = -1.0;
  CHECK(restoring_force({10.0, 0.0}, {0.0, 0.0}, f).isZero());
  CHECK(restoring_force({0.0, 0.0}, {3.0, 1.0}, f).isZero());

  const Vec2 g = restoring_force({10.0, 0.0}, {1.0, 0.0}, f);
  CHECK(g.x() == Approx(-1.0 / 15.0).epsilon(1e-14));
  CHECK(g.y() == 0.0);

  // Magnitude grows without bound toward the boundary; undefined on it.
  CHECK(restoring_force({24.9, 0.0}, {1.0, 0.0}, f).norm() > restoring_force({20.0, 0.0}, {1.0, 0.0}, f).norm());
  CHECK_THROWS_AS(restoring_force({25.0, 0.0}, {1.0, 0.0}, f), DegenerateGeometry);
  CHECK_THROWS_AS(restoring_force({30.0, 40.0}, {1.0, 0.0}, f), DegenerateGeometry);
}

TEST_CASE("true-state step") {
  Rng rng(7);
  SUBCASE("pure drift") {
    DynamicsConfig cfg = quiet();
    cfg.step = 1.0;
    cfg.force.restore_gain = 0.0;
    const StateVector s{0.0, 0.0, 1.0, 0.0};
    const auto next = step_true_state(s, 1, cfg, rng).state;
    CHECK(next.isApprox(StateVector(1.0, 0.0, 1.0, 0.0)));
  }
  SUBCASE("fixed point") {
    const DynamicsConfig cfg = quiet();
    const StateVector s{2.0, -3.0, 0.0, 0.0};
    CHECK(step_true_state(s, 1, cfg, rng).state.isApprox(s));
  }
  SUBCASE("single step from rest under the driving force") {
    DynamicsConfig cfg = quiet();
    cfg.force.amp = {100.0, 100.0};
    const auto out = step_true_state(StateVector::Zero(), 1, cfg, rng);
    // f(0) = (100, 100) N on 100 kg: a = (1, 1), x = a T^2 / 2, v = a T.
    CHECK(out.accel.isApprox(Vec2(1.0, 1.0)));
    CHECK(out.state(0) == Approx(0.02));
    CHECK(out.state(1) == Approx(0.02));
    CHECK(out.state(2) == Approx(0.2));
    CHECK(out.state(3) == Approx(0.2));
  }
  SUBCASE("a stray position is clamped back inside before the step") {
    DynamicsConfig cfg = quiet();
    const StateVector s{40.0, 0.0, 0.0, 0.0};
    const auto out = step_true_state(s, 1, cfg, rng).state;
    CHECK(out.head<2>().norm() <= cfg.force.region_radius);
  }
}

TEST_CASE("noise sample covariance matches the declared process noise") {
  DynamicsConfig cfg = quiet();
  cfg.sigma_sq_pos = 0.04;
  cfg.sigma_sq_vel = 0.01;
  cfg.force.restore_gain = 0.0;
  Rng rng(11);
  const int n = 200000;
  Vec4 sum = Vec4::Zero();
  Mat4 outer = Mat4::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec4 d = step_true_state(StateVector::Zero(), 1, cfg, rng).state;
    sum += d;
    outer += d * d.transpose();
  }
  const Vec4 mean = sum / n;
  const Mat4 cov = outer / n - mean * mean.transpose();
  CHECK(mean.norm() < 0.003);
  CHECK(cov(0, 0) == Approx(0.04).epsilon(0.02));
  CHECK(cov(1, 1) == Approx(0.04).epsilon(0.02));
  CHECK(cov(2, 2) == Approx(0.01).epsilon(0.02));
  CHECK(cov(3, 3) == Approx(0.01).epsilon(0.02));
  CHECK(std::abs(cov(0, 2)) < 5e-4);
}

TEST_CASE("linearized process model") {
  DynamicsConfig cfg;
  cfg.known_input = true;
  cfg.step = 0.0;
  CHECK(linearize(cfg).transition.isIdentity());

  cfg.step = 0.2;
  const auto pm = linearize(cfg);
  CHECK(pm.transition(0, 2) == Approx(0.2));
  CHECK(pm.transition(1, 3) == Approx(0.2));
  CHECK(pm.transition(0, 3) == 0.0);
  CHECK(pm.noise_cov.isApprox(Vec4(0.04, 0.04, 0.01, 0.01).asDiagonal().toDenseMatrix()));
  CHECK(pm.noise_mean.isZero());

  // Without the input term the model inflates the noise by the worst-case
  // acceleration, so it stays PSD and dominates the pure process noise.
  cfg.known_input = false;
  const auto inflated = linearize(cfg);
  CHECK((inflated.noise_cov.diagonal().array() > pm.noise_cov.diagonal().array()).all());
  CHECK(Eigen::SelfAdjointEigenSolver<Mat4>(inflated.noise_cov).eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("config validation") {
  DynamicsConfig cfg;
  cfg.step = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.force.mass = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  CHECK_NOTHROW(cfg.validate());
}
