#pragma once

#include <Eigen/Dense>

#include "antcv/rng.hpp"

namespace antcv {

// K jointly Gaussian randomization vectors with marginal variance
// sigma2 * I and pairwise cross-covariance -sigma2/(K-1) * I.  The rows
// sum to zero; the estimator relies on that cancellation, so the
// constructor re-centers once to push the residual to machine precision.
struct AntitheticDraws {
  Eigen::MatrixXd draws;  // K x d, row k = omega^(k)
  int k_folds = 0;
  int dim = 0;
  double sigma2 = 1.0;
};

// Centering construction: draw z^(1..K) i.i.d. N(0, sigma2*I) and return
// sqrt(K/(K-1)) * (z^(k) - zbar).  Matches the marginal variance and the
// -sigma2/(K-1) cross-covariance exactly, with exact zero sum.
AntitheticDraws sample_antithetic(int k_folds, int dim, double sigma2,
                                  const RngSpec& rng);

// K i.i.d. N(0, sigma2*I) rows, used by the coupled-bootstrap baseline.
Eigen::MatrixXd sample_independent(int k_reps, int dim, double sigma2,
                                   const RngSpec& rng);

// Row-wise map omega -> L*omega for a factor L with L*L^T = H.  Marginal
// covariance becomes sigma2*H, cross-covariance -sigma2*H/(K-1); the
// zero-sum constraint is preserved exactly.
AntitheticDraws scale_draws(const AntitheticDraws& draws,
                            const Eigen::MatrixXd& sqrt_factor);

}  // namespace antcv
