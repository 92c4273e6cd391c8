#pragma once

#include <Eigen/Dense>

#include "antcv/predictors.hpp"
#include "antcv/rng.hpp"
#include "antcv/sampler.hpp"

namespace antcv {

// Response vector with known noise variance.
struct NormalMeansData {
  Eigen::VectorXd y;
  double sigma2 = 1.0;
};

enum class Method { AntitheticCV, CoupledBootstrap, SURE, KFoldCV };

struct RiskEstimate {
  double value = 0.0;
  Eigen::VectorXd fold_values;  // length K for randomized methods
  Method method = Method::AntitheticCV;
  double alpha = 0.0;
  int k_folds = 0;
  RngSpec seed;
};

// Values of alpha below this floor make the ||omega||^2/alpha correction
// numerically meaningless.
inline constexpr double kAlphaFloor = 1e-8;

// Antithetic cross-validated estimator of PE(g) = E||g(Y) - Ytilde||^2.
// Fold k evaluates
//   ||Y - omega^(k)/sqrt(alpha) - g(Y + sqrt(alpha) omega^(k))||^2
//     - ||omega^(k)||^2 / alpha
// with antithetic draws of marginal variance sigma2.
RiskEstimate cv_alpha(const NormalMeansData& data, const Predictor& g,
                      double alpha, int k_folds, const RngSpec& rng);

// Coupled-bootstrap baseline: same fold formula with independent draws;
// unbiased for the noise-inflated target PE_alpha(g).
RiskEstimate cb_alpha(const NormalMeansData& data, const Predictor& g,
                      double alpha, int k_reps, const RngSpec& rng);

// ||Y - g(Y)||^2 + 2 sigma2 div g(Y).  Requires an analytic divergence;
// callers without one compose smoothed_divergence_mc explicitly.
double sure(const NormalMeansData& data, const Predictor& g);

// Monte Carlo estimate of div(g * phi_{alpha sigma2})(y):
//   (1 / (K sqrt(alpha) sigma2)) sum_k <omega^(k), g(y + sqrt(alpha) omega^(k))>
// with antithetic draws of marginal variance sigma2.
double smoothed_divergence_mc(const Predictor& g, const Eigen::VectorXd& y,
                              double sigma2, double alpha, int k_folds,
                              const RngSpec& rng);

// Classic K-fold CV with a random partition into contiguous blocks of a
// uniform permutation (sizes differ by at most one, earlier folds
// larger).  Fold test error is rescaled by n/|fold| so the estimate is
// on the same sum-over-n-coordinates scale as cv_alpha.
RiskEstimate kfold_cv(const Eigen::MatrixXd& design,
                      const Eigen::VectorXd& responses, const Learner& learner,
                      int k_folds, const RngSpec& rng);

// Randomized estimate of E[theta^T g(Y)] for an exponential family with
// base measure h, via Stein's identity:
//   -div(g)(y) - g(y)^T grad log h(y),
// with the divergence replaced by its smoothed Monte Carlo estimate
// using unit-variance draws.
double expfam_cross_term(
    const Predictor& g, const Eigen::VectorXd& y,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad_log_h,
    double alpha, int k_folds, const RngSpec& rng);

}  // namespace antcv
