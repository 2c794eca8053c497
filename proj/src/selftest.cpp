#include "dtvoi/selftest.hpp"

#include "dtvoi/channel.hpp"
#include "dtvoi/estimator.hpp"
#include "dtvoi/experiment.hpp"
#include "dtvoi/scheduler.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace dtvoi {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

Eigen::MatrixXd random_spd(int n, Rng& rng, double floor) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  return a * a.transpose() / n + floor * Eigen::MatrixXd::Identity(n, n);
}

Fleet random_fleet(int m, Rng& rng) {
  FleetSpec spec;
  spec.m_pos = m / 2;
  spec.m_vel = m - m / 2;
  return place_fleet(spec, 25.0, Vec2::Zero(), 20.0, rng);
}

CheckResult filter_algebra(Rng& rng) {
  CheckResult r{"kalman: Joseph form and measurements-never-hurt", true, ""};
  double worst_joseph = 0.0;
  double worst_growth = -1.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd prior = random_spd(kFeatures, rng, 1e-3);
    const Fleet fleet = random_fleet(6, rng);
    std::vector<SensingAgent> chosen(fleet.agents().begin(), fleet.agents().begin() + 1 + trial % 6);
    const auto so = stack_models(chosen);
    const Eigen::MatrixXd k = kalman_gain(prior, so);
    const Eigen::MatrixXd ikh = Eigen::MatrixXd::Identity(kFeatures, kFeatures) - k * so.h;
    const Eigen::MatrixXd joseph = ikh * prior * ikh.transpose() + k * so.cov * k.transpose();
    const Eigen::MatrixXd post = posterior_cov(prior, so);
    worst_joseph = std::max(worst_joseph, (joseph - post).norm() / post.norm());
    worst_growth = std::max(worst_growth, (post.diagonal() - prior.diagonal()).maxCoeff());
  }
  r.passed = worst_joseph <= 1e-8 && worst_growth <= 1e-9;
  r.detail = fmt("max Joseph rel diff %.3g, max diag growth %.3g", worst_joseph, worst_growth);
  return r;
}

CheckResult link_outage(unsigned seed) {
  CheckResult r{"link: outage at closed-form power <= 5 eps (1e6 trials)", true, ""};
  const LinkParams lp;
  double worst = 0.0;
  for (double d : {5.0, 10.0, 20.0}) {
    const double p = required_tx_power(d, lp);
    worst = std::max(worst, outage_probability_mc_parallel(p, d, lp, 1'000'000, seed + static_cast<unsigned>(d), 2));
  }
  r.passed = worst <= 5.0 * lp.outage_eps;
  r.detail = fmt("worst outage %.3g vs bound %.3g", worst, 5.0 * lp.outage_eps);
  return r;
}

CheckResult scheduler_bounds(Rng& rng) {
  CheckResult r{"scheduler: |Q| <= C, Q within P, VoI early exit and monotone", true, ""};
  const LinkParams lp;
  const Requirements req = Requirements::pos_vel(0.015, 0.005);
  std::uniform_int_distribution<int> slots_dist(0, 10);
  std::uniform_real_distribution<double> pos_dist(-20.0, 20.0);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Fleet fleet = random_fleet(20, rng);
    SchedulerParams params;
    params.slots = slots_dist(rng);
    const auto reachable = reachable_set(fleet, Vec2{pos_dist(rng), pos_dist(rng)});
    Belief prior{Eigen::VectorXd::Zero(kFeatures), random_spd(kFeatures, rng, 1e-4) * 0.02};

    const auto voi = voi_schedule(prior, fleet, reachable, req, params, lp);
    const auto& d = voi.decision;
    bool ok = d.iterations_used <= params.slots &&
              static_cast<int>(d.scheduled.size()) <= params.slots;
    if (compliant(prior.cov, req)) ok = ok && d.scheduled.empty() && d.total_power() == 0.0;
    Eigen::VectorXd last = prior.cov.diagonal();
    for (const auto& step : voi.steps) {
      ok = ok && (step.cov_diag.array() <= last.array() + 1e-9).all();
      last = step.cov_diag;
    }
    std::vector<ScheduleDecision> all{d, cost_bg_schedule(fleet, reachable, params, lp),
                                      confidence_bg_schedule(fleet, reachable, req, params, lp),
                                      random_schedule(fleet, reachable, params, lp, rng),
                                      bcs_schedule(fleet, reachable, req, params, lp)};
    for (const auto& s : all) {
      ok = ok && static_cast<int>(s.scheduled.size()) <= params.slots;
      for (AgentId id : s.scheduled) {
        ok = ok && std::find(reachable.begin(), reachable.end(), id) != reachable.end();
      }
    }
    if (!ok) ++failures;
  }
  r.passed = failures == 0;
  r.detail = fmt("%.0f of 1000 instances violated an invariant", failures);
  return r;
}

CheckResult determinism_and_csv() {
  CheckResult r{"harness: deterministic episodes and CSV round-trip", true, ""};
  SimConfig cfg;
  cfg.qis = 30;
  const auto a = run_episode(cfg, PolicyKind::Random, 3);
  const auto b = run_episode(cfg, PolicyKind::Random, 3);
  bool ok = a.records == b.records;
  for (const auto& rec : a.records) {
    const std::string row = trace_row(rec);
    ok = ok && trace_row(parse_trace_row(row)) == row;
  }
  r.passed = ok;
  r.detail = ok ? "30 QIs identical, rows round-trip" : "mismatch";
  return r;
}

}  // namespace

std::vector<CheckResult> run_selftest(unsigned seed) {
  Rng rng(seed);
  std::vector<CheckResult> out;
  out.push_back(filter_algebra(rng));
  out.push_back(link_outage(seed));
  out.push_back(scheduler_bounds(rng));
  out.push_back(determinism_and_csv());
  return out;
}

}  // namespace dtvoi
