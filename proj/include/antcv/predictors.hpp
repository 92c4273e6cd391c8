#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "antcv/rng.hpp"

namespace antcv {

// A fitted prediction rule on a fixed set of n evaluation points:
// evaluate maps a response vector of length n to fitted values of
// length n.  divergence, when present, is tr of the Jacobian of
// evaluate wherever differentiable.
struct Predictor {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> evaluate;
  std::function<double(const Eigen::VectorXd&)> divergence;  // optional

  bool has_divergence() const { return static_cast<bool>(divergence); }
};

// Out-of-sample prediction rule: covariate rows -> predictions.
using PredictFn = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

// Trains a prediction rule on (design, responses); used by classic
// K-fold cross-validation.
struct Learner {
  std::function<PredictFn(const Eigen::MatrixXd&, const Eigen::VectorXd&)> fit;
};

// Weighted isotonic least-squares fit.
struct IsotonicFit {
  Eigen::VectorXd knots;    // sorted distinct covariate values
  Eigen::VectorXd fitted;   // nondecreasing fitted value at each knot
  Eigen::VectorXd weights;  // pooled weight at each knot

  // Piecewise-constant, right-continuous step extension, clamped
  // outside the training range.
  double predict(double x) const;
};

// Pool-adjacent-violators on pre-sorted covariates.  Equal covariates
// are pre-pooled by weighted mean so the fit is a function of x.
IsotonicFit pava(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& w);

// Isotonic learner: sorts by covariate, runs PAVA, predicts by step
// extension at arbitrary covariates.
Learner isotonic_learner();

// g(Y) = S*Y with constant divergence tr(S).
struct LinearSmoother {
  Eigen::MatrixXd smoothing_matrix;

  Predictor predictor() const;
};

// Ridge smoother S = X (X^T X + lambda I)^{-1} X^T.
LinearSmoother ridge_smoother(const Eigen::MatrixXd& design, double lambda);

// Coordinate-wise soft threshold sign(y)*max(|y|-lambda, 0);
// divergence counts the active coordinates.
Predictor soft_threshold_predictor(double lambda);

// Constant predictor g(Y) = c.
Predictor constant_predictor(const Eigen::VectorXd& c);

// Identity map, divergence n.
Predictor identity_predictor();

// Learner that predicts the training mean everywhere.
Learner mean_learner();

// Ridge regression learner; an intercept column is appended internally
// and penalized along with the coefficients.
Learner ridge_learner(double lambda);

// Wraps an arbitrary vector->vector function as a Predictor without a
// divergence, so black-box learners remain pluggable.
Predictor black_box_predictor(
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn);

// Self-training predictor on fixed covariates: input responses are fit
// by the learner and evaluated back at the same covariates.  This is
// the map whose prediction error the randomized estimators target.
Predictor self_predictor(const Learner& learner, const Eigen::MatrixXd& design);

}  // namespace antcv
