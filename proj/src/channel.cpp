#include "dtvoi/channel.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dtvoi {

void LinkParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("link.") + name + " must be > 0");
  };
  positive(bandwidth, "bandwidth_hz");
  positive(noise_power, "noise_power");
  positive(rician_g, "rician_factor");
  positive(mu0, "mu0");
  positive(path_loss_exp, "path_loss_exp");
  positive(rate_threshold, "rate_threshold_bps");
  if (!(outage_eps > 0.0 && outage_eps < 0.5)) throw ConfigError("link.outage_eps must be in (0, 0.5)");
  (void)y_q(rician_g, outage_eps);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_watts(double dbm) { return 1e-3 * db_to_linear(dbm); }

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("q_inv: probability " + std::to_string(p) + " outside (0, 1)");
  }
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double y_q(double rician_g, double eps) {
  const double q = q_inv(eps);
  const double root = std::sqrt(2.0 * rician_g);
  if (!(root > q)) {
    throw InfeasibleLink("Rician factor " + std::to_string(rician_g) +
                         " too small for outage target " + std::to_string(eps) +
                         ": need sqrt(2G) > Q^-1(eps) = " + std::to_string(q));
  }
  // log(root/(root-q))/(2q) -> 1/(2 root) as q -> 0; log1p keeps it accurate there.
  const double correction = -std::log1p(-q / root) / (2.0 * q);
  return root + correction - q;
}

double path_gain(double d_ap, const LinkParams& lp) {
  return lp.mu0 * std::pow(d_ap, -lp.path_loss_exp);
}

double required_tx_power(double d_ap, const LinkParams& lp) {
  if (!(d_ap >= 1.0)) {
    throw ContractViolation("required_tx_power: AP distance " + std::to_string(d_ap) +
                            " m is below the 1 m reference distance");
  }
  const double y = y_q(lp.rician_g, lp.outage_eps);
  const double snr_factor = std::exp2(lp.rate_threshold / lp.bandwidth) - 1.0;
  return 2.0 * lp.noise_power * (1.0 + lp.rician_g) * snr_factor / (y * y * path_gain(d_ap, lp));
}

double outage_probability_mc(double p_tx, double d_ap, const LinkParams& lp,
                             std::uint64_t trials, Rng& rng) {
  if (trials == 0) throw ContractViolation("outage_probability_mc: trials must be >= 1");
  // R < R_th  <=>  |g|^2 < (2^(R_th/W) - 1) W N0 / (p mu_m)
  const double snr_needed = std::exp2(lp.rate_threshold / lp.bandwidth) - 1.0;
  const double mean_snr = p_tx * path_gain(d_ap, lp) / lp.noise_power;
  const double los = std::sqrt(lp.rician_g / (lp.rician_g + 1.0));
  const double scatter = std::sqrt(1.0 / (lp.rician_g + 1.0));
  // g~ ~ CN(0, 1): real and imaginary parts each N(0, 1/2).
  std::normal_distribution<double> gauss(0.0, std::numbers::sqrt2 / 2.0);

  std::uint64_t failures = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const double re = los + scatter * gauss(rng);
    const double im = scatter * gauss(rng);
    const double gain = re * re + im * im;
    if (mean_snr * gain < snr_needed) ++failures;
  }
  return static_cast<double>(failures) / static_cast<double>(trials);
}

double outage_probability_mc_parallel(double p_tx, double d_ap, const LinkParams& lp,
                                      std::uint64_t trials, std::uint64_t seed,
                                      unsigned workers) {
  if (workers == 0) workers = 1;
  std::vector<double> fractions(workers, 0.0);
  std::vector<std::uint64_t> counts(workers, trials / workers);
  for (unsigned w = 0; w < trials % workers; ++w) ++counts[w];

  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    if (counts[w] == 0) continue;
    pool.emplace_back([&, w] {
      Rng rng(derive_seed({seed, w}));
      fractions[w] = outage_probability_mc(p_tx, d_ap, lp, counts[w], rng);
    });
  }
  pool.clear();

  double failures = 0.0;
  for (unsigned w = 0; w < workers; ++w)
    failures += std::round(fractions[w] * static_cast<double>(counts[w]));
  return failures / static_cast<double>(trials);
}

}  // namespace dtvoi
