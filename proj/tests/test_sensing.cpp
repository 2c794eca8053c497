#include "dtvoi/sensing.hpp"

#include <doctest.h>

#include <algorithm>
#include <vector>

using namespace dtvoi;

namespace {

SensingAgent make(AgentId id, SensorKind kind, Vec2 loc, double var) {
  SensingAgent a;
  a.id = id;
  a.kind = kind;
  a.location = loc;
  a.meas_cov = var * Mat2::Identity();
  a.ap_distance = std::max(1.0, loc.norm());
  return a;
}

}  // namespace

TEST_CASE("observation matrices select positions or velocities") {
  const StateVector s{3.0, 4.0, 1.0, 2.0};
  CHECK((observation_matrix(SensorKind::Position) * s).isApprox(Vec2(3.0, 4.0)));
  CHECK((observation_matrix(SensorKind::Velocity) * s).isApprox(Vec2(1.0, 2.0)));

  const auto a = make(1, SensorKind::Velocity, {0, 0}, 0.01);
  CHECK(a.measures(2));
  CHECK(a.measures(3));
  CHECK_FALSE(a.measures(0));
  CHECK(sensor_kind_from_string(to_string(SensorKind::Position)) == SensorKind::Position);
  CHECK_THROWS(sensor_kind_from_string("thermal"));
}

TEST_CASE("noiseless observation returns the selected features") {
  Rng rng(3);
  const StateVector s{3.0, 4.0, 1.0, 2.0};
  auto pos = make(1, SensorKind::Position, {0, 0}, 0.0);
  pos.meas_cov.setZero();
  auto vel = pos;
  vel.kind = SensorKind::Velocity;
  CHECK(observe(pos, s, rng).isApprox(Vec2(3.0, 4.0)));
  CHECK(observe(vel, s, rng).isApprox(Vec2(1.0, 2.0)));
}

TEST_CASE("observation noise has the agent covariance") {
  Rng rng(5);
  auto a = make(1, SensorKind::Position, {0, 0}, 0.0);
  a.meas_cov << 0.05, 0.02, 0.02, 0.03;
  const int n = 200000;
  Vec2 sum = Vec2::Zero();
  Mat2 outer = Mat2::Zero();
  for (int i = 0; i < n; ++i) {
    const Vec2 o = observe(a, StateVector::Zero(), rng);
    sum += o;
    outer += o * o.transpose();
  }
  const Mat2 cov = outer / n - (sum / n) * (sum / n).transpose();
  CHECK((cov - a.meas_cov).cwiseAbs().maxCoeff() < 1.5e-3);
}

TEST_CASE("fleet placement") {
  FleetSpec spec;
  Rng rng(9);
  const Fleet fleet = place_fleet(spec, 25.0, Vec2::Zero(), 20.0, rng);
  REQUIRE(fleet.size() == 60);
  int pos = 0;
  for (const auto& a : fleet.agents()) {
    CHECK(a.location.norm() <= 25.0);
    CHECK(a.ap_distance >= 1.0);
    if (a.kind == SensorKind::Position) {
      ++pos;
      CHECK(a.meas_cov(0, 0) >= 0.01);
      CHECK(a.meas_cov(0, 0) <= 0.09);
    } else {
      CHECK(a.meas_cov(0, 0) >= 0.0025);
      CHECK(a.meas_cov(0, 0) <= 0.0225);
    }
  }
  CHECK(pos == 30);

  spec.m_pos = spec.m_vel = 0;
  CHECK(place_fleet(spec, 25.0, Vec2::Zero(), 20.0, rng).empty());

  FleetSpec again;
  Rng r1(42), r2(42);
  const Fleet a = place_fleet(again, 25.0, Vec2::Zero(), 20.0, r1);
  const Fleet b = place_fleet(again, 25.0, Vec2::Zero(), 20.0, r2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.agents()[i].location == b.agents()[i].location);
    CHECK(a.agents()[i].meas_cov == b.agents()[i].meas_cov);
  }

  FleetSpec bad;
  bad.pos_var = {0.0, 0.1};
  CHECK_THROWS_AS(place_fleet(bad, 25.0, Vec2::Zero(), 20.0, rng), ConfigError);
}

TEST_CASE("fleet rejects malformed agent lists") {
  std::vector<SensingAgent> agents{make(1, SensorKind::Position, {1, 0}, 0.01),
                                   make(3, SensorKind::Position, {2, 0}, 0.01)};
  CHECK_THROWS_AS(Fleet(agents, 20.0), ConfigError);
  agents[1].id = 2;
  agents[1].meas_cov(0, 0) = -1.0;
  CHECK_THROWS_AS(Fleet(agents, 20.0), ConfigError);
}

TEST_CASE("reachable set") {
  std::vector<SensingAgent> agents{make(1, SensorKind::Position, {19.99, 0.0}, 0.01),
                                   make(2, SensorKind::Position, {20.01, 0.0}, 0.01),
                                   make(3, SensorKind::Velocity, {0.0, -20.0}, 0.01)};
  const Fleet fleet(agents, 20.0);
  CHECK(reachable_set(fleet, Vec2::Zero()) == std::vector<AgentId>{1, 3});
  CHECK(reachable_set(Fleet({}, 20.0), Vec2::Zero()).empty());

  // Default scenario against a plain distance scan.
  Rng rng(17);
  const Fleet big = place_fleet(FleetSpec{}, 25.0, Vec2::Zero(), 20.0, rng);
  for (const Vec2 pa : {Vec2(0, 0), Vec2(10, -5), Vec2(-20, 3)}) {
    std::vector<AgentId> scan;
    for (const auto& a : big.agents()) {
      const double dx = a.location.x() - pa.x(), dy = a.location.y() - pa.y();
      if (dx * dx + dy * dy <= 400.0) scan.push_back(a.id);
    }
    CHECK(reachable_set(big, pa) == scan);
  }

  const std::vector<AgentId> ids{3, 1};
  const auto picked = select_agents(fleet, ids);
  REQUIRE(picked.size() == 2);
  CHECK(picked[0].id == 3);
  CHECK_THROWS_AS(fleet.agent(4), ContractViolation);
}
