#include "antcv/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace antcv {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("alpha must be positive");
  if (alpha < kAlphaFloor)
    throw std::invalid_argument("alpha below the 1e-8 floor");
}

// Shared fold loop for cv_alpha / cb_alpha.
Eigen::VectorXd fold_values(const NormalMeansData& data, const Predictor& g,
                            double alpha, const Eigen::MatrixXd& omegas) {
  const auto n = data.y.size();
  const double sqrt_alpha = std::sqrt(alpha);
  const int k = static_cast<int>(omegas.rows());
  Eigen::VectorXd values(k);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd omega = omegas.row(j).transpose();
    Eigen::VectorXd fitted = g.evaluate(data.y + sqrt_alpha * omega);
    if (fitted.size() != n)
      throw std::runtime_error("predictor output length != n");
    Eigen::VectorXd test = data.y - omega / sqrt_alpha;
    values(j) = (test - fitted).squaredNorm() - omega.squaredNorm() / alpha;
  }
  return values;
}

}  // namespace

RiskEstimate cv_alpha(const NormalMeansData& data, const Predictor& g,
                      double alpha, int k_folds, const RngSpec& rng) {
  check_alpha(alpha);
  if (k_folds < 2) throw std::invalid_argument("cv_alpha: k_folds must be >= 2");
  AntitheticDraws draws = sample_antithetic(
      k_folds, static_cast<int>(data.y.size()), data.sigma2, rng);
  RiskEstimate est;
  est.fold_values = fold_values(data, g, alpha, draws.draws);
  est.value = est.fold_values.mean();
  est.method = Method::AntitheticCV;
  est.alpha = alpha;
  est.k_folds = k_folds;
  est.seed = rng;
  return est;
}

RiskEstimate cb_alpha(const NormalMeansData& data, const Predictor& g,
                      double alpha, int k_reps, const RngSpec& rng) {
  check_alpha(alpha);
  if (k_reps < 1) throw std::invalid_argument("cb_alpha: k_reps must be >= 1");
  Eigen::MatrixXd omegas = sample_independent(
      k_reps, static_cast<int>(data.y.size()), data.sigma2, rng);
  RiskEstimate est;
  est.fold_values = fold_values(data, g, alpha, omegas);
  est.value = est.fold_values.mean();
  est.method = Method::CoupledBootstrap;
  est.alpha = alpha;
  est.k_folds = k_reps;
  est.seed = rng;
  return est;
}

double sure(const NormalMeansData& data, const Predictor& g) {
  if (!g.has_divergence())
    throw std::runtime_error(
        "sure: predictor supplies no analytic divergence; use "
        "smoothed_divergence_mc instead");
  Eigen::VectorXd fitted = g.evaluate(data.y);
  if (fitted.size() != data.y.size())
    throw std::runtime_error("predictor output length != n");
  return (data.y - fitted).squaredNorm() +
         2.0 * data.sigma2 * g.divergence(data.y);
}

double smoothed_divergence_mc(const Predictor& g, const Eigen::VectorXd& y,
                              double sigma2, double alpha, int k_folds,
                              const RngSpec& rng) {
  check_alpha(alpha);
  if (k_folds < 2)
    throw std::invalid_argument("smoothed_divergence_mc: k_folds must be >= 2");
  AntitheticDraws draws =
      sample_antithetic(k_folds, static_cast<int>(y.size()), sigma2, rng);
  const double sqrt_alpha = std::sqrt(alpha);
  double acc = 0.0;
  for (int k = 0; k < k_folds; ++k) {
    Eigen::VectorXd omega = draws.draws.row(k).transpose();
    acc += omega.dot(g.evaluate(y + sqrt_alpha * omega));
  }
  return acc / (k_folds * sqrt_alpha * sigma2);
}

RiskEstimate kfold_cv(const Eigen::MatrixXd& design,
                      const Eigen::VectorXd& responses, const Learner& learner,
                      int k_folds, const RngSpec& rng) {
  const auto n = responses.size();
  if (design.rows() != n)
    throw std::invalid_argument("kfold_cv: design/response length mismatch");
  if (k_folds < 2 || k_folds > n)
    throw std::invalid_argument("kfold_cv: k_folds must be in [2, n]");

  // Uniform permutation, contiguous blocks; earlier folds take the
  // remainder so sizes differ by at most one.
  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  auto eng = make_engine(rng);
  std::shuffle(perm.begin(), perm.end(), eng);

  const Eigen::Index base = n / k_folds;
  const Eigen::Index extra = n % k_folds;

  RiskEstimate est;
  est.fold_values.resize(k_folds);
  Eigen::Index offset = 0;
  for (int k = 0; k < k_folds; ++k) {
    const Eigen::Index fold_size = base + (k < extra ? 1 : 0);
    const Eigen::Index train_size = n - fold_size;
    Eigen::MatrixXd xtr(train_size, design.cols()), xte(fold_size, design.cols());
    Eigen::VectorXd ytr(train_size), yte(fold_size);
    Eigen::Index itr = 0, ite = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index row = perm[i];
      if (i >= offset && i < offset + fold_size) {
        xte.row(ite) = design.row(row);
        yte(ite++) = responses(row);
      } else {
        xtr.row(itr) = design.row(row);
        ytr(itr++) = responses(row);
      }
    }
    offset += fold_size;
    Eigen::VectorXd pred;
    try {
      pred = learner.fit(xtr, ytr)(xte);
    } catch (const std::exception& e) {
      throw std::runtime_error("kfold_cv: learner failed on fold " +
                               std::to_string(k) + ": " + e.what());
    }
    est.fold_values(k) =
        (yte - pred).squaredNorm() * double(n) / double(fold_size);
  }
  est.value = est.fold_values.mean();
  est.method = Method::KFoldCV;
  est.alpha = 0.0;
  est.k_folds = k_folds;
  est.seed = rng;
  return est;
}

double expfam_cross_term(
    const Predictor& g, const Eigen::VectorXd& y,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad_log_h,
    double alpha, int k_folds, const RngSpec& rng) {
  double div = smoothed_divergence_mc(g, y, 1.0, alpha, k_folds, rng);
  return -div - g.evaluate(y).dot(grad_log_h(y));
}

}  // namespace antcv
