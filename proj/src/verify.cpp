#include "antcv/verify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "antcv/estimators.hpp"
#include "antcv/glm.hpp"
#include "antcv/harness.hpp"
#include "antcv/predictors.hpp"
#include "antcv/sampler.hpp"
#include "antcv/zeroth_order.hpp"

namespace antcv {

namespace {

CheckResult check(const std::string& name, double observed, double expected,
                  double tol) {
  return CheckResult{name, observed, expected, tol,
                     std::abs(observed - expected) <= tol};
}

}  // namespace

std::vector<CheckResult> verify_sampler() {
  std::vector<CheckResult> out;
  const int k = 5, d = 3, draws = 200000;
  const RngSpec rng{20240901, 0};

  double max_residual = 0.0;
  double var_acc = 0.0, cross_acc = 0.0;
  for (int i = 0; i < draws; ++i) {
    AntitheticDraws a = sample_antithetic(k, d, 1.0, rng.substream(i));
    max_residual = std::max(
        max_residual, a.draws.colwise().sum().cwiseAbs().maxCoeff());
    var_acc += a.draws.row(0).squaredNorm() / d;
    cross_acc += a.draws.row(0).dot(a.draws.row(1)) / d;
  }
  out.push_back(check("zero_sum_residual", max_residual, 0.0, 1e-10 * k));
  out.push_back(check("marginal_variance", var_acc / draws, 1.0, 0.02));
  out.push_back(check("cross_covariance", cross_acc / draws, -0.25, 0.02));

  AntitheticDraws a1 = sample_antithetic(4, 6, 2.0, rng);
  AntitheticDraws a2 = sample_antithetic(4, 6, 2.0, rng);
  out.push_back(check("determinism", (a1.draws - a2.draws).norm(), 0.0, 0.0));
  return out;
}

std::vector<CheckResult> verify_stein() {
  // E[(Y - theta)^T g(Y)] = sigma2 E[div g(Y)] for soft-threshold g
  std::vector<CheckResult> out;
  const int n = 20, datasets = 20000;
  const RngSpec rng{7, 0};
  Predictor g = soft_threshold_predictor(1.0);
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < datasets; ++i) {
    auto eng = make_engine(rng.substream(i));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd y(n);
    for (int j = 0; j < n; ++j) y(j) = normal(eng);
    double diff = y.dot(g.evaluate(y)) - g.divergence(y);
    sum += diff;
    sumsq += diff * diff;
  }
  double mean = sum / datasets;
  double se = std::sqrt((sumsq / datasets - mean * mean) / datasets);
  out.push_back(check("stein_identity_gap", mean, 0.0, 3.0 * se));
  return out;
}

std::vector<CheckResult> verify_variance() {
  // E[Var(CV_alpha | Y)] vs 4 sigma^4 / (K-1) * (||S||_F^2 + tr(S^2))
  std::vector<CheckResult> out;
  const RngSpec rng{42, 0};
  auto xeng = make_engine(rng.substream(0));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(20, 5);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 5; ++j) x(i, j) = normal(xeng);
  LinearSmoother smoother = ridge_smoother(x, 0.7);
  const Eigen::MatrixXd& s = smoother.smoothing_matrix;
  Predictor g = smoother.predictor();
  const double target =
      4.0 / 3.0 * (s.squaredNorm() + (s * s).trace());  // K=4, sigma2=1

  const int outer = 2000, inner = 100, k = 4;
  const double alpha = 1e-3;
  double acc = 0.0;
  for (int o = 0; o < outer; ++o) {
    auto eng = make_engine(rng.substream(1 + o));
    Eigen::VectorXd y(20);
    for (int j = 0; j < 20; ++j) y(j) = normal(eng);
    NormalMeansData data{y, 1.0};
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < inner; ++i) {
      double v =
          cv_alpha(data, g, alpha, k, rng.substream(100000 + o).substream(i))
              .value;
      sum += v;
      sumsq += v * v;
    }
    acc += (sumsq - sum * sum / inner) / (inner - 1);
  }
  out.push_back(check("reducible_variance", acc / outer, target, 0.10 * target));
  return out;
}

std::vector<CheckResult> verify_sure() {
  // randomization mean of the CV quantity vs SURE at alpha = 0.01
  std::vector<CheckResult> out;
  const int n = 50, batches = 20000, k = 2;
  const double alpha = 0.01;
  const RngSpec rng{11, 0};
  auto eng = make_engine(rng.substream(0));
  std::normal_distribution<double> normal(0.0, 2.0);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    y(i) = normal(eng);
    // keep coordinates away from the threshold kink so the smoothing
    // bias at alpha=0.01 stays below the tolerance
    if (std::abs(std::abs(y(i)) - 1.0) < 0.3)
      y(i) += y(i) > 0 ? (std::abs(y(i)) > 1.0 ? 0.3 : -0.3)
                       : (std::abs(y(i)) > 1.0 ? -0.3 : 0.3);
  }
  Predictor g = soft_threshold_predictor(1.0);
  NormalMeansData data{y, 1.0};
  const double sure_value = sure(data, g);

  const double sqrt_alpha = std::sqrt(alpha);
  double acc = 0.0;
  for (int b = 0; b < batches; ++b) {
    RngSpec brng = rng.substream(1 + b);
    AntitheticDraws draws = sample_antithetic(k, n, 1.0, brng);
    double fit_term = 0.0, div_term = 0.0;
    for (int j = 0; j < k; ++j) {
      Eigen::VectorXd omega = draws.draws.row(j).transpose();
      Eigen::VectorXd fitted = g.evaluate(y + sqrt_alpha * omega);
      fit_term += (y - fitted).squaredNorm();
      div_term += omega.dot(fitted);
    }
    acc += fit_term / k + 2.0 * div_term / (k * sqrt_alpha);
  }
  out.push_back(check("sure_equivalence", acc / batches, sure_value,
                      0.02 * std::abs(sure_value)));
  return out;
}

std::vector<CheckResult> verify_glm() {
  std::vector<CheckResult> out;
  const RngSpec rng{99, 0};

  // rescaling consistency on a random PSD matrix
  auto eng = make_engine(rng.substream(0));
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd b(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) b(i, j) = normal(eng);
  Eigen::MatrixXd h = b * b.transpose() + Eigen::MatrixXd::Identity(6, 6);
  ScalingFactor sf = make_scaling(h);
  Eigen::VectorXd v(6);
  for (int i = 0; i < 6; ++i) v(i) = normal(eng);
  out.push_back(check("rescaling_roundtrip",
                      (sf.sqrt * (sf.inv_sqrt * v) - v).norm(), 0.0, 1e-8));
  out.push_back(check("factor_reconstruction",
                      (sf.sqrt * sf.sqrt.transpose() - h).norm(), 0.0, 1e-8));

  // constant learner: zero-sum reduces cv_glm to the plug-in loss
  ScenarioSpec spec{Scenario::Logistic62, 40, 1.0, rng.substream(1)};
  LogisticSample sample = gen_logistic(spec);
  ExpFamilyModel model = logistic_model(sample.design);
  Eigen::VectorXd theta0 = Eigen::VectorXd::Constant(model.dim_p, 0.3);
  SuffStatLearner constant = [theta0](const Eigen::VectorXd&) { return theta0; };
  Eigen::VectorXd theta_hat = fit_logistic_irls(sample.design, sample.y);
  ScalingFactor scaling = plugin_H(sample.design, theta_hat);
  double cv = cv_glm(model, sample.y, constant, scaling, 0.1, 8,
                     rng.substream(2)).value;
  double plug_in = model.log_partition(theta0) -
                   theta0.dot(model.suff_stat(sample.y));
  out.push_back(check("constant_learner_plugin_loss", cv, plug_in,
                      1e-8 * std::abs(plug_in)));

  // Gaussian family: cv_glm reproduces cv_alpha up to the loss scale
  const int n = 10;
  auto geng = make_engine(rng.substream(3));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = normal(geng);
  ExpFamilyModel gauss;
  gauss.dim_p = n;
  gauss.n_obs = 1;
  gauss.suff_stat = [](const Eigen::VectorXd& yy) { return yy; };
  gauss.log_partition = [](const Eigen::VectorXd& t) {
    return 0.5 * t.squaredNorm();
  };
  gauss.log_base = [](const Eigen::VectorXd& yy) {
    return -0.5 * yy.squaredNorm();
  };
  Predictor shrink = soft_threshold_predictor(0.5);
  SuffStatLearner shrink_learner = [shrink](const Eigen::VectorXd& s) {
    return shrink.evaluate(s);
  };
  ScalingFactor identity_scaling =
      make_scaling(Eigen::MatrixXd::Identity(n, n));
  RngSpec shared = rng.substream(4);
  double glm_value =
      cv_glm(gauss, y, shrink_learner, identity_scaling, 0.05, 6, shared).value;
  double nm_value =
      cv_alpha(NormalMeansData{y, 1.0}, shrink, 0.05, 6, shared).value;
  out.push_back(check("gaussian_family_reduction", 2.0 * glm_value, nm_value,
                      1e-8 * std::abs(nm_value)));
  return out;
}

std::vector<CheckResult> verify_zograd() {
  std::vector<CheckResult> out;
  const int d = 5;
  Eigen::VectorXd theta = Eigen::VectorXd::Ones(d);
  auto objective = [](const Eigen::VectorXd& t) {
    return 0.5 * t.squaredNorm();
  };
  const RngSpec rng{3, 0};

  GradEstimate est =
      antithetic_grad(objective, theta, 0.1, 2, 20000, rng.substream(0));
  out.push_back(check("quadratic_mean", (est.grad - theta).norm(), 0.0, 0.05));

  // variance comparison at sigma = 0.01
  const int batches = 2000;
  double var_anti = 0.0, var_ind = 0.0;
  Eigen::VectorXd mean_anti = Eigen::VectorXd::Zero(d),
                  mean_ind = Eigen::VectorXd::Zero(d);
  std::vector<Eigen::VectorXd> anti, ind;
  for (int b = 0; b < batches; ++b) {
    anti.push_back(
        antithetic_grad(objective, theta, 0.01, 2, 1, rng.substream(10 + b))
            .grad);
    ind.push_back(antithetic_grad(objective, theta, 0.01, 2, 1,
                                  rng.substream(100000 + b), false)
                      .grad);
    mean_anti += anti.back();
    mean_ind += ind.back();
  }
  mean_anti /= batches;
  mean_ind /= batches;
  for (int b = 0; b < batches; ++b) {
    var_anti += (anti[b] - mean_anti).squaredNorm();
    var_ind += (ind[b] - mean_ind).squaredNorm();
  }
  out.push_back(
      check("variance_ratio", var_anti / var_ind, 0.0, 0.05));
  return out;
}

std::vector<CheckResult> run_verify_suite(const std::string& suite) {
  if (suite == "sampler") return verify_sampler();
  if (suite == "stein") return verify_stein();
  if (suite == "variance") return verify_variance();
  if (suite == "sure") return verify_sure();
  if (suite == "glm") return verify_glm();
  if (suite == "zograd") return verify_zograd();
  throw std::invalid_argument("unknown verify suite: " + suite);
}

}  // namespace antcv
