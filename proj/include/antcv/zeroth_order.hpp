#pragma once

#include <Eigen/Dense>
#include <functional>

#include "antcv/rng.hpp"

namespace antcv {

struct GradEstimate {
  Eigen::VectorXd grad;
  double sigma = 0.0;
  int k = 0;
  int batches = 0;
};

// Simultaneous-perturbation estimate of the gradient of the
// sigma-smoothed objective:
//   (1 / (B K sigma)) sum_{b,k} F(theta + sigma omega^(k,b)) omega^(k,b)
// with antithetic perturbations (unit marginal variance, cross-covariance
// -I/(K-1)).  The zero-sum constraint cancels the F(theta)-level term,
// removing the O(1/sigma) variance component.  Set antithetic=false for
// the independent-perturbation baseline.
GradEstimate antithetic_grad(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& theta, double sigma, int k, int batches,
    const RngSpec& rng, bool antithetic = true);

}  // namespace antcv
