#include "dtvoi/scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>

namespace dtvoi {

std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::VoI: return "voi";
    case PolicyKind::CostBG: return "cost_bg";
    case PolicyKind::ConfidenceBG: return "confidence_bg";
    case PolicyKind::Random: return "random";
    case PolicyKind::BCS: return "bcs";
  }
  return "?";
}

PolicyKind policy_from_string(std::string_view name) {
  for (auto p : kAllPolicies) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown policy '" + std::string(name) +
                    "' (expected voi, cost_bg, confidence_bg, random or bcs)");
}

double ScheduleDecision::total_power() const {
  return std::accumulate(powers.begin(), powers.end(), 0.0);
}

double confidence(const SensingAgent& agent, const Requirements& req) {
  double normalised = 0.0;
  const int first = first_feature(agent.kind);
  for (int j = 0; j < kObsDim; ++j) normalised += agent.meas_cov(j, j) / req.xi_sq(first + j);
  return 1.0 / normalised;
}

namespace {

void assign_powers(ScheduleDecision& d, const Fleet& fleet, const SchedulerParams& params,
                   const LinkParams& lp) {
  d.powers.clear();
  d.budget_exceeded = 0;
  for (AgentId id : d.scheduled) {
    const double p = required_tx_power(fleet.agent(id).ap_distance, lp);
    if (p > params.power_budget) ++d.budget_exceeded;
    d.powers.push_back(p);
  }
  d.objective_power_term = d.total_power();
}

std::size_t slot_limit(const SchedulerParams& params, std::size_t available) {
  return std::min(static_cast<std::size_t>(std::max(params.slots, 0)), available);
}

// Takes the first min(C, |P|) reachable agents under `less`.
template <typename Less>
ScheduleDecision take_sorted(const Fleet& fleet, std::span<const AgentId> reachable,
                             const SchedulerParams& params, const LinkParams& lp, Less less) {
  std::vector<AgentId> order(reachable.begin(), reachable.end());
  const auto n = slot_limit(params, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](AgentId a, AgentId b) { return less(fleet.agent(a), fleet.agent(b)); });
  ScheduleDecision d;
  d.scheduled.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
  assign_powers(d, fleet, params, lp);
  return d;
}

}  // namespace

std::optional<int> most_uncertain_feature(const Eigen::MatrixXd& cov, const Requirements& req,
                                          std::span<const SensingAgent> available) {
  std::optional<int> best;
  double best_ratio = 0.0;
  for (int k = 0; k < static_cast<int>(cov.rows()); ++k) {
    const bool measurable = std::any_of(available.begin(), available.end(),
                                        [k](const SensingAgent& a) { return a.measures(k); });
    if (!measurable) continue;
    const double ratio = cov(k, k) / req.xi_sq(k);
    if (!best || ratio > best_ratio) {
      best = k;
      best_ratio = ratio;
    }
  }
  return best;
}

AgentId best_agent_for_feature(int feature, std::span<const SensingAgent> available) {
  const SensingAgent* best = nullptr;
  auto key = [feature](const SensingAgent& a) {
    return std::make_tuple(a.feature_variance(feature), a.ap_distance, a.id);
  };
  for (const auto& a : available) {
    if (!a.measures(feature)) continue;
    if (best == nullptr || key(a) < key(*best)) best = &a;
  }
  if (best == nullptr) {
    throw ContractViolation("best_agent_for_feature: no available agent measures feature " +
                            std::to_string(feature + 1));
  }
  return best->id;
}

VoIResult voi_schedule(const Belief& prior, const Fleet& fleet, std::span<const AgentId> reachable,
                       const Requirements& req, const SchedulerParams& params, const LinkParams& lp) {
  VoIResult result;
  result.predicted_cov = prior.cov;
  if (compliant(prior.cov, req)) {
    result.decision.objective_accuracy_term = 0.0;
    return result;
  }

  std::vector<SensingAgent> available = select_agents(fleet, reachable);
  std::vector<SensingAgent> chosen;
  auto& d = result.decision;
  const auto slots = static_cast<std::size_t>(std::max(params.slots, 0));

  while (chosen.size() < slots && !compliant(result.predicted_cov, req)) {
    const auto feature = most_uncertain_feature(result.predicted_cov, req, available);
    if (!feature) break;
    const AgentId id = best_agent_for_feature(*feature, available);

    VoIStep step;
    step.feature = *feature;
    step.agent = id;
    step.ratio = result.predicted_cov(*feature, *feature) / req.xi_sq(*feature);

    auto it = std::find_if(available.begin(), available.end(),
                           [id](const SensingAgent& a) { return a.id == id; });
    chosen.push_back(*it);
    available.erase(it);
    d.scheduled.push_back(id);
    ++d.iterations_used;

    // Restack over the whole scheduled set and recompute from the prior.
    result.predicted_cov = posterior_cov(prior.cov, stack_models(chosen), params.filter);
    step.cov_diag = result.predicted_cov.diagonal();
    result.steps.push_back(std::move(step));
  }

  assign_powers(d, fleet, params, lp);
  d.objective_accuracy_term = accuracy_term(result.predicted_cov, req);
  return result;
}

ScheduleDecision cost_bg_schedule(const Fleet& fleet, std::span<const AgentId> reachable,
                                  const SchedulerParams& params, const LinkParams& lp) {
  return take_sorted(fleet, reachable, params, lp, [](const SensingAgent& a, const SensingAgent& b) {
    return std::tie(a.ap_distance, a.id) < std::tie(b.ap_distance, b.id);
  });
}

ScheduleDecision confidence_bg_schedule(const Fleet& fleet, std::span<const AgentId> reachable,
                                        const Requirements& req, const SchedulerParams& params,
                                        const LinkParams& lp) {
  return take_sorted(fleet, reachable, params, lp,
                     [&req](const SensingAgent& a, const SensingAgent& b) {
                       const double ca = confidence(a, req);
                       const double cb = confidence(b, req);
                       if (ca != cb) return ca > cb;
                       return a.id < b.id;
                     });
}

ScheduleDecision random_schedule(const Fleet& fleet, std::span<const AgentId> reachable,
                                 const SchedulerParams& params, const LinkParams& lp, Rng& rng) {
  std::vector<AgentId> pool(reachable.begin(), reachable.end());
  const auto n = slot_limit(params, pool.size());
  // Partial Fisher-Yates over the first n positions.
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  ScheduleDecision d;
  d.scheduled.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
  assign_powers(d, fleet, params, lp);
  return d;
}

ScheduleDecision bcs_schedule(const Fleet& fleet, std::span<const AgentId> reachable,
                              const Requirements& req, const SchedulerParams& params,
                              const LinkParams& lp) {
  SchedulerParams one = params;
  one.slots = std::min(params.slots, 1);
  return confidence_bg_schedule(fleet, reachable, req, one, lp);
}

double accuracy_term(const Eigen::MatrixXd& cov, const Requirements& req) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < cov.rows(); ++k) sum += std::max(cov(k, k) / req.xi_sq(k) - 1.0, 0.0);
  return sum;
}

double objective_value(const Eigen::MatrixXd& posterior_cov, const ScheduleDecision& decision,
                       double alpha, const Requirements& req) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ContractViolation("objective_value: alpha must lie in [0, 1]");
  }
  return (1.0 - alpha) * accuracy_term(posterior_cov, req) + alpha * decision.total_power();
}

}  // namespace dtvoi
