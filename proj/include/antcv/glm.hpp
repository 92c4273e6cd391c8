#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

#include "antcv/estimators.hpp"
#include "antcv/rng.hpp"

namespace antcv {

// Loss ingredients for an exponential-family model with sqrt(n)-scaled
// sufficient statistics:
//   L(theta, Y) = A_n(theta) - theta^T S_n(Y) - n^{-1/2} log h_n(Y).
struct ExpFamilyModel {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> suff_stat;
  std::function<double(const Eigen::VectorXd&)> log_partition;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_log_partition;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess_log_partition;
  std::function<double(const Eigen::VectorXd&)> log_base;
  int dim_p = 0;
  int n_obs = 0;
};

// Symmetric PSD scaling matrix H with factor L (L L^T = H) and inverse
// factor, built from a symmetric eigendecomposition with an eigenvalue
// floor of 1e-10 * lambda_max so near-singular plug-in estimates stay
// usable.
struct ScalingFactor {
  Eigen::MatrixXd h_matrix;
  Eigen::MatrixXd sqrt;
  Eigen::MatrixXd inv_sqrt;
};

ScalingFactor make_scaling(const Eigen::MatrixXd& h);

// Estimator of theta_n depending on the data only through S_n.
using SuffStatLearner = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// IRLS hit the iteration or norm guard without meeting the gradient
// tolerance; carries the iteration trace in what().
class SeparationError : public std::runtime_error {
 public:
  SeparationError(const std::string& msg, int iterations)
      : std::runtime_error(msg), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

// Bernoulli model with S_n = X^T Y / sqrt(n),
// A_n(theta) = n^{-1/2} sum log(1 + exp(x_i^T theta)), log h_n = 0.
ExpFamilyModel logistic_model(const Eigen::MatrixXd& design);

// Newton/IRLS for the logistic MLE; stops when the score inf-norm drops
// below tol.  Reports separation instead of returning an unbounded
// estimate.
Eigen::VectorXd fit_logistic_irls(const Eigen::MatrixXd& design,
                                  const Eigen::VectorXd& responses,
                                  double tol = 1e-8, int max_iter = 100);

// Solves grad A_n(theta) + ridge * theta = s by damped Newton; with
// ridge = 0 this is the logistic MLE seen as a function of the
// (possibly randomized) sufficient statistic.  A small positive ridge
// keeps the map defined for statistics on or outside the boundary of
// the achievable set, where the unpenalized MLE diverges.
SuffStatLearner logistic_suffstat_learner(const Eigen::MatrixXd& design,
                                          double tol = 1e-8,
                                          int max_iter = 100,
                                          double ridge = 0.0);

// Plug-in scaling H = (1/n) X^T W X with W_ii = pi_i (1 - pi_i) at
// theta_hat.
ScalingFactor plugin_H(const Eigen::MatrixXd& design,
                       const Eigen::VectorXd& theta_hat);

enum class Randomization { Antithetic, Independent };

// Randomized CV for the exponential-family loss.  Draws omega^(k) with
// unit marginal covariance in the whitened coordinates T = H^{-1/2} S;
// fold k evaluates
//   A_n(g(S + sqrt(alpha) L omega)) - g(...)^T (S - L omega / sqrt(alpha))
//     - n^{-1/2} log h_n(Y).
// The independent-randomization baseline reuses the same path with
// i.i.d. draws.
RiskEstimate cv_glm(const ExpFamilyModel& model, const Eigen::VectorXd& y,
                    const SuffStatLearner& learner,
                    const ScalingFactor& scaling, double alpha, int k_folds,
                    const RngSpec& rng,
                    Randomization scheme = Randomization::Antithetic);

// Classic K-fold CV on the same loss scale: the learner is refit on the
// complement rows and the held-out negative log-likelihood is rescaled
// by n/|fold| and the 1/sqrt(n) loss convention.
RiskEstimate kfold_cv_logistic(const Eigen::MatrixXd& design,
                               const Eigen::VectorXd& responses, int k_folds,
                               const RngSpec& rng, double ridge = 0.0);

// Monte Carlo ground truth for PE_n(g): averages
// A_n(g(S_n)) - g(S_n)^T S_tilde - n^{-1/2} log h_n(Y_tilde) over
// independent response pairs from the generator.
double oracle_pe_glm(
    const ExpFamilyModel& model, const SuffStatLearner& learner,
    const std::function<Eigen::VectorXd(const RngSpec&)>& generator, int n_mc,
    const RngSpec& rng);

}  // namespace antcv
