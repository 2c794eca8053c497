#pragma once
// Runs the library filter over an oracle::LinearSystem and reports the worst
// per-step relative error against direct joint-Gaussian conditioning.

#include "dtvoi/estimator.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <vector>

struct KalmanDiscrepancy {
  double mean = 0.0;
  double cov = 0.0;
};

inline KalmanDiscrepancy filter_vs_joint(const oracle::LinearSystem& sys, int steps) {
  KalmanDiscrepancy worst;
  dtvoi::Belief b{sys.m0, sys.p0};
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sys.m0.size());
  for (int n = 1; n <= steps; ++n) {
    b = dtvoi::predict(b, sys.f, zero, sys.q);
    std::vector<Eigen::MatrixXd> hb, rb;
    std::vector<Eigen::VectorXd> vb;
    int at = 0;
    for (int d : sys.dims[n - 1]) {
      hb.push_back(sys.h[n - 1].middleRows(at, d));
      rb.push_back(sys.r[n - 1].block(at, at, d, d));
      vb.push_back(sys.obs[n - 1].segment(at, d));
      at += d;
    }
    b = dtvoi::update(b, dtvoi::stack_blocks(hb, rb, vb));
    const auto want = oracle::joint_conditioning(sys, n);
    worst.mean = std::max(worst.mean, oracle::rel_err(b.mean, want.mean));
    worst.cov = std::max(worst.cov, oracle::rel_err(b.cov, want.cov));
  }
  return worst;
}
