#pragma once

#include "dtvoi/common.hpp"
#include "dtvoi/rng.hpp"

#include <cstdint>

namespace dtvoi {

/// Uplink parameters for the AP-SA Rician block-fading channel.
struct LinkParams {
  double carrier_hz = 2.4e9;          // provenance only; enters through mu0
  double bandwidth = 5e6;             // W, Hz
  double noise_power = 7.079457843841379e-5;  // W*N0 in watts (-11.5 dBm in-band)
  double rician_g = 31.622776601683793;       // linear (15 dB)
  double mu0 = 1e-4;                  // channel power gain at 1 m
  double path_loss_exp = 2.5;
  double rate_threshold = 250e3;      // bit/s
  double outage_eps = 1e-4;

  /// Throws ConfigError on non-positive fields or eps outside (0, 0.5), and
  /// InfeasibleLink when sqrt(2G) <= Q^-1(eps).
  void validate() const;
};

double db_to_linear(double db);
double dbm_to_watts(double dbm);

/// Gaussian tail Q(x) = P[N(0,1) > x].
double q_function(double x);

/// Inverse of q_function on (0, 1). Throws std::domain_error outside.
double q_inv(double p);

/// y_Q = sqrt(2G) + ln(sqrt(2G) / (sqrt(2G) - q)) / (2q) - q with q = Q^-1(eps).
/// Throws InfeasibleLink unless sqrt(2G) > q.
double y_q(double rician_g, double eps);

/// Large-scale gain mu0 * d^-alpha.
double path_gain(double d_ap, const LinkParams& lp);

/// Closed-form transmit power for outage <= eps at rate R_th:
///   2 W N0 (1+G) (2^(R_th/W) - 1) / (y_Q^2 mu0 d^-alpha).
/// Requires d_ap >= 1 (ContractViolation otherwise).
double required_tx_power(double d_ap, const LinkParams& lp);

/// Monte Carlo estimate of P[W log2(1 + SNR) < R_th] at transmit power p_tx.
double outage_probability_mc(double p_tx, double d_ap, const LinkParams& lp,
                             std::uint64_t trials, Rng& rng);

/// Same estimate split across `workers` threads with independent streams
/// derived from `seed`. The result depends on (seed, workers), not on timing.
double outage_probability_mc_parallel(double p_tx, double d_ap, const LinkParams& lp,
                                      std::uint64_t trials, std::uint64_t seed,
                                      unsigned workers);

}  // namespace dtvoi
