#include "dtvoi/experiment.hpp"

#include "dtvoi/dynamics.hpp"
#include "dtvoi/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

namespace dtvoi {

namespace {

// Sub-stream tags of the scenario stream.
constexpr std::uint64_t kFleetStream = 1;
constexpr std::uint64_t kTruthStream = 2;

Belief initial_belief(const DynamicsConfig& d) {
  Belief b;
  b.mean = d.init_mean;
  b.cov = Eigen::MatrixXd(d.init_cov_diag.asDiagonal());
  return b;
}

ScheduleDecision schedule(PolicyKind policy, const Belief& prior, const Fleet& fleet,
                          const std::vector<AgentId>& reachable, const Requirements& req,
                          const SchedulerParams& params, const LinkParams& lp, Rng& rng) {
  switch (policy) {
    case PolicyKind::VoI: return voi_schedule(prior, fleet, reachable, req, params, lp).decision;
    case PolicyKind::CostBG: return cost_bg_schedule(fleet, reachable, params, lp);
    case PolicyKind::ConfidenceBG: return confidence_bg_schedule(fleet, reachable, req, params, lp);
    case PolicyKind::Random: return random_schedule(fleet, reachable, params, lp, rng);
    case PolicyKind::BCS: return bcs_schedule(fleet, reachable, req, params, lp);
  }
  throw ContractViolation("unhandled policy");
}

}  // namespace

std::uint64_t scenario_seed(std::uint64_t base_seed, int run) {
  return derive_seed({base_seed, 0x5ce7a710ULL, static_cast<std::uint64_t>(run)});
}

std::uint64_t policy_seed(std::uint64_t base_seed, PolicyKind policy, int run) {
  return derive_seed({base_seed, static_cast<std::uint64_t>(policy) + 1,
                      static_cast<std::uint64_t>(run)});
}

Fleet episode_fleet(const SimConfig& cfg, int run) {
  const Vec2 ap = cfg.dynamics.force.center;
  if (!cfg.agents_file.empty()) return read_fleet(cfg.agents_file, cfg.d_max, ap);
  Rng rng(derive_seed({scenario_seed(cfg.seed, run), kFleetStream}));
  return place_fleet(cfg.fleet, cfg.dynamics.force.region_radius, ap, cfg.d_max, rng);
}

Episode run_episode(const SimConfig& cfg, PolicyKind policy, int run) {
  Episode ep;
  ep.fleet = episode_fleet(cfg, run);
  const auto& dyn = cfg.dynamics;
  const ProcessModel pm = linearize(dyn);
  const Requirements req = cfg.requirements();
  const SchedulerParams params = cfg.scheduler();
  const LinkParams lp = cfg.link();

  Rng truth_rng(derive_seed({scenario_seed(cfg.seed, run), kTruthStream}));
  Rng policy_rng(policy_seed(cfg.seed, policy, run));
  std::normal_distribution<double> gauss(0.0, 1.0);

  Belief belief = initial_belief(dyn);
  StateVector truth;
  for (int k = 0; k < kFeatures; ++k) {
    truth(k) = dyn.init_mean(k) + std::sqrt(dyn.init_cov_diag(k)) * gauss(truth_rng);
  }

  ep.records.reserve(static_cast<std::size_t>(cfg.qis));
  for (int n = 1; n <= cfg.qis; ++n) {
    try {
      Eigen::VectorXd control;
      if (dyn.known_input) {
        const StateVector est = belief.mean;
        control = input_matrix(dyn.step) * acceleration(est, n - 1, dyn.force);
      }
      truth = step_true_state(truth, n, dyn, truth_rng).state;
      const Belief prior = predict(belief, pm, dyn.known_input ? &control : nullptr);

      const auto reachable = reachable_set(ep.fleet, truth.head<2>());
      ScheduleDecision d = schedule(policy, prior, ep.fleet, reachable, req, params, lp, policy_rng);

      const auto agents = select_agents(ep.fleet, d.scheduled);
      std::vector<Vec2> obs;
      obs.reserve(agents.size());
      for (const auto& a : agents) obs.push_back(observe(a, truth, policy_rng));
      belief = update(prior, stack(agents, obs), params.filter);

      QIRecord rec;
      rec.qi = n;
      rec.policy = policy;
      rec.run = run;
      rec.n_scheduled = static_cast<int>(d.scheduled.size());
      rec.total_power = d.total_power();
      rec.violated = !compliant(belief.cov, req);
      rec.sq_error = (truth - StateVector(belief.mean)).squaredNorm();
      rec.objective = objective_value(belief.cov, d, cfg.alpha, req);
      rec.agents = std::move(d.scheduled);
      rec.n_reachable = static_cast<int>(reachable.size());
      rec.prior_compliant = compliant(prior.cov, req);
      rec.iterations_used = d.iterations_used;
      ep.records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      std::throw_with_nested(EpisodeError("episode policy=" + std::string(to_string(policy)) +
                                          " run=" + std::to_string(run) + " failed at qi " +
                                          std::to_string(n) + ": " + e.what()));
    }
  }
  return ep;
}

const PolicyAggregate& AggregateMetrics::of(PolicyKind p) const {
  for (const auto& pa : policies) {
    if (pa.policy == p) return pa;
  }
  throw ContractViolation("no aggregate for policy " + std::string(to_string(p)));
}

AggregateMetrics aggregate(const std::vector<QIRecord>& records) {
  struct Acc {
    double n = 0, power = 0, violated = 0, sq = 0;
    int count = 0;
  };
  std::vector<PolicyKind> order;
  std::map<PolicyKind, std::map<int, Acc>> acc;
  for (const auto& r : records) {
    if (std::find(order.begin(), order.end(), r.policy) == order.end()) order.push_back(r.policy);
    auto& a = acc[r.policy][r.qi];
    a.n += r.n_scheduled;
    a.power += r.total_power;
    a.violated += r.violated ? 1.0 : 0.0;
    a.sq += r.sq_error;
    ++a.count;
  }

  AggregateMetrics out;
  for (auto p : order) {
    PolicyAggregate pa;
    pa.policy = p;
    double rmse_sum = 0.0;
    for (const auto& [qi, a] : acc[p]) {
      QIAggregate q;
      q.qi = qi;
      q.mean_n_scheduled = a.n / a.count;
      q.mean_total_power = a.power / a.count;
      q.violation_prob = a.violated / a.count;
      q.rmse = std::sqrt(a.sq / a.count);
      rmse_sum += q.rmse;
      pa.per_qi.push_back(q);
    }
    pa.mrmse = pa.per_qi.empty() ? 0.0 : rmse_sum / static_cast<double>(pa.per_qi.size());
    out.policies.push_back(std::move(pa));
  }
  return out;
}

MonteCarloResult run_monte_carlo(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n_pol = cfg.policies.size();
  const std::size_t n_runs = static_cast<std::size_t>(cfg.runs);
  const std::size_t n_tasks = n_pol * n_runs;

  std::vector<Episode> episodes(n_tasks);
  std::vector<std::exception_ptr> errors(n_tasks);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t t = next++; t < n_tasks; t = next++) {
      try {
        episodes[t] = run_episode(cfg, cfg.policies[t / n_runs], static_cast<int>(t % n_runs));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_tasks));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  MonteCarloResult result;
  result.records.reserve(n_tasks * static_cast<std::size_t>(cfg.qis));
  for (std::size_t t = 0; t < n_tasks; ++t) {
    auto& ep = episodes[t];
    const int run = static_cast<int>(t % n_runs);
    if (!result.fleets.contains(run)) result.fleets.emplace(run, std::move(ep.fleet));
    for (auto& r : ep.records) result.records.push_back(std::move(r));
  }
  result.metrics = aggregate(result.records);
  return result;
}

}  // namespace dtvoi
