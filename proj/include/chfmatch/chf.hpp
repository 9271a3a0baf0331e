#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "chfmatch/models.hpp"

namespace chfmatch {

// Empirical chf (1/n) sum_j exp(i <t, X_j>) of the blocks.
std::complex<double> empirical_chf(const BlockSet& blocks,
                                   const Eigen::Ref<const Vector>& t);

// Same average over simulated blocks (the Monte Carlo approximation).
std::complex<double> mc_chf(const BlockSet& sim_blocks,
                            const Eigen::Ref<const Vector>& t);

// Centered control functions (h1, h2) = (<t,x>^nu - E<t,X>^nu), nu = 1,2,
// with E<t,X> = t'mean and E<t,X>^2 = (t'mean)^2 + t'cov t.
Eigen::Vector2d control_values(const Eigen::Ref<const Vector>& t,
                               const Eigen::Ref<const Vector>& block_row,
                               const BlockMoments& moments);

struct CvDiagnostics {
  Eigen::Vector2cd beta_hat = Eigen::Vector2cd::Zero();
  Eigen::Vector2d control_mean = Eigen::Vector2d::Zero();
  double gram_condition = std::numeric_limits<double>::infinity();
  bool fallback_used = false;
};

struct CvChfResult {
  std::complex<double> value;
  CvDiagnostics diagnostics;
};

// Control-variates-corrected chf: P_H(f_t) - beta_hat' P_H(h), with beta_hat
// solving the centered 2x2 Gram system separately for the real and imaginary
// right-hand sides. Falls back to the plain Monte Carlo average when t = 0 or
// det(G) <= 1e-12 trace(G)^2. Requires H >= 3.
CvChfResult cv_chf(const BlockSet& sim_blocks, const Eigen::Ref<const Vector>& t,
                   const BlockMoments& moments);

// Batch versions sharing the per-block inner products; O(H*M) for M points.
// Summation order within each t is fixed, independent of any partitioning.
std::vector<std::complex<double>> chf_batch(const BlockSet& blocks,
                                            const BlockMatrix& ts);
std::vector<CvChfResult> cv_chf_batch(const BlockSet& sim_blocks,
                                      const BlockMatrix& ts,
                                      const BlockMoments& moments);

}  // namespace chfmatch
