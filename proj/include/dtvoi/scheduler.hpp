#pragma once

#include "dtvoi/channel.hpp"
#include "dtvoi/common.hpp"
#include "dtvoi/estimator.hpp"
#include "dtvoi/rng.hpp"
#include "dtvoi/sensing.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dtvoi {

enum class PolicyKind { VoI, CostBG, ConfidenceBG, Random, BCS };

inline constexpr std::array<PolicyKind, 5> kAllPolicies{
    PolicyKind::VoI, PolicyKind::CostBG, PolicyKind::ConfidenceBG, PolicyKind::Random,
    PolicyKind::BCS};

std::string_view to_string(PolicyKind p);
PolicyKind policy_from_string(std::string_view name);

/// Scheduling inputs shared by every policy.
struct SchedulerParams {
  int slots = 10;                 // C
  double power_budget = 1000.0;   // W, per-agent sanity limit
  FilterOptions filter;
};

struct ScheduleDecision {
  std::vector<AgentId> scheduled;  // in selection order
  std::vector<double> powers;      // W, aligned with scheduled
  double objective_accuracy_term = 0.0;
  double objective_power_term = 0.0;
  int iterations_used = 0;
  int budget_exceeded = 0;  // agents whose power exceeds power_budget

  double total_power() const;
};

/// Diagnostics of one greedy iteration, for invariant checks.
struct VoIStep {
  int feature = -1;
  AgentId agent = 0;
  double ratio = 0.0;         // diag(cov)_k / xi_k^2 of the chosen feature
  Eigen::VectorXd cov_diag;   // predicted diagonal after adding the agent
};

struct VoIResult {
  ScheduleDecision decision;
  Eigen::MatrixXd predicted_cov;  // predicted posterior covariance of the schedule
  std::vector<VoIStep> steps;
};

/// Requirement-normalised confidence: 1 / sum_k var_k / xi_k^2 over the
/// features the agent measures.
double confidence(const SensingAgent& agent, const Requirements& req);

/// argmax_k diag(cov)_k / xi_k^2 over features some available agent measures.
/// Ties go to the lowest index; nullopt when no feature is measurable.
std::optional<int> most_uncertain_feature(const Eigen::MatrixXd& cov, const Requirements& req,
                                          std::span<const SensingAgent> available);

/// The available agent measuring `feature` with the smallest variance on it;
/// ties by AP distance, then id. ContractViolation when none measures it.
AgentId best_agent_for_feature(int feature, std::span<const SensingAgent> available);

/// Greedy VoI scheduling on the predicted (prior) belief. Empty when the prior
/// already meets every requirement; otherwise adds the best agent for the most
/// uncertain measurable feature until the predicted posterior complies, the C
/// slots are used, or nothing measurable is left.
VoIResult voi_schedule(const Belief& prior, const Fleet& fleet, std::span<const AgentId> reachable,
                       const Requirements& req, const SchedulerParams& params, const LinkParams& lp);

/// min(C, |P|) agents nearest to the AP.
ScheduleDecision cost_bg_schedule(const Fleet& fleet, std::span<const AgentId> reachable,
                                  const SchedulerParams& params, const LinkParams& lp);

/// min(C, |P|) agents of highest confidence.
ScheduleDecision confidence_bg_schedule(const Fleet& fleet, std::span<const AgentId> reachable,
                                        const Requirements& req, const SchedulerParams& params,
                                        const LinkParams& lp);

/// min(C, |P|) agents drawn uniformly without replacement.
ScheduleDecision random_schedule(const Fleet& fleet, std::span<const AgentId> reachable,
                                 const SchedulerParams& params, const LinkParams& lp, Rng& rng);

/// The single highest-confidence agent, or nothing.
ScheduleDecision bcs_schedule(const Fleet& fleet, std::span<const AgentId> reachable,
                              const Requirements& req, const SchedulerParams& params,
                              const LinkParams& lp);

/// (1 - alpha) sum_k max(diag_k / xi_k^2 - 1, 0) + alpha sum powers.
double objective_value(const Eigen::MatrixXd& posterior_cov, const ScheduleDecision& decision,
                       double alpha, const Requirements& req);

/// Hinge sum over features, the accuracy half of objective_value.
double accuracy_term(const Eigen::MatrixXd& cov, const Requirements& req);

}  // namespace dtvoi
