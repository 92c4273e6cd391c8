#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "antcv/estimators.hpp"
#include "antcv/glm.hpp"
#include "antcv/predictors.hpp"

using namespace antcv;

namespace {

// Gaussian location family on a single observation: S(y) = y,
// A(theta) = ||theta||^2/2, log h(y) = -||y||^2/2.
ExpFamilyModel gaussian_family(int p) {
  ExpFamilyModel m;
  m.dim_p = p;
  m.n_obs = 1;
  m.suff_stat = [](const Eigen::VectorXd& y) { return y; };
  m.log_partition = [](const Eigen::VectorXd& t) {
    return 0.5 * t.squaredNorm();
  };
  m.grad_log_partition = [](const Eigen::VectorXd& t) { return t; };
  m.hess_log_partition = [p](const Eigen::VectorXd&) {
    return Eigen::MatrixXd(Eigen::MatrixXd::Identity(p, p));
  };
  m.log_base = [](const Eigen::VectorXd& y) { return -0.5 * y.squaredNorm(); };
  return m;
}

Eigen::MatrixXd random_design(int n, int p, std::uint64_t seed) {
  std::mt19937_64 eng = make_engine(RngSpec{seed, 0});
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = nd(eng);
  return x;
}

Eigen::VectorXd bernoulli_responses(const Eigen::VectorXd& eta,
                                    std::uint64_t seed) {
  std::mt19937_64 eng = make_engine(RngSpec{seed, 1});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd y(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    y(i) = u(eng) < 1.0 / (1.0 + std::exp(-eta(i))) ? 1.0 : 0.0;
  return y;
}

}  // namespace

TEST_CASE("make_scaling: SPD round trip") {
  Eigen::MatrixXd h(3, 3);
  h << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  ScalingFactor f = make_scaling(h);
  CHECK((f.sqrt * f.sqrt - h).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((f.sqrt * f.inv_sqrt - Eigen::MatrixXd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  CHECK((f.h_matrix - h).norm() == 0.0);
}

TEST_CASE("make_scaling: eigenvalue floor keeps singular matrices usable") {
  Eigen::MatrixXd h(2, 2);
  h << 1, 1, 1, 1;  // rank 1
  ScalingFactor f = make_scaling(h);
  CHECK(f.sqrt.allFinite());
  CHECK(f.inv_sqrt.allFinite());
  // sqrt and inv_sqrt come from the same floored spectrum
  CHECK((f.sqrt * f.inv_sqrt - Eigen::MatrixXd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-6);
}

TEST_CASE("make_scaling rejects bad input") {
  CHECK_THROWS_AS(make_scaling(Eigen::MatrixXd::Zero(2, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_scaling(Eigen::MatrixXd::Zero(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("logistic model: hand-checked sufficient statistic and base") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 0, 1, 1, 1, 2, 1, 3;
  ExpFamilyModel m = logistic_model(x);
  Eigen::VectorXd y(4);
  y << 1, 0, 1, 1;
  Eigen::VectorXd s = m.suff_stat(y);
  CHECK(s(0) == doctest::Approx(3.0 / 2.0));
  CHECK(s(1) == doctest::Approx(5.0 / 2.0));
  CHECK(m.log_base(y) == 0.0);
  CHECK(m.dim_p == 2);
  CHECK(m.n_obs == 4);
}

TEST_CASE("logistic model: gradient and hessian match finite differences") {
  Eigen::MatrixXd x = random_design(15, 3, 301);
  ExpFamilyModel m = logistic_model(x);
  Eigen::VectorXd theta(3);
  theta << 0.3, -0.8, 0.5;
  const double h = 1e-6;
  Eigen::VectorXd grad = m.grad_log_partition(theta);
  Eigen::MatrixXd hess = m.hess_log_partition(theta);
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(j) += h;
    tm(j) -= h;
    double fd = (m.log_partition(tp) - m.log_partition(tm)) / (2 * h);
    CHECK(grad(j) == doctest::Approx(fd).epsilon(1e-5));
    Eigen::VectorXd gfd = (m.grad_log_partition(tp) - m.grad_log_partition(tm)) / (2 * h);
    for (int i = 0; i < 3; ++i)
      CHECK(hess(i, j) == doctest::Approx(gfd(i)).epsilon(1e-4));
  }
}

TEST_CASE("intercept-only logistic MLE is the empirical logit") {
  const int n = 10;
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(n, 1);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < 3; ++i) y(i) = 1.0;
  Eigen::VectorXd theta = fit_logistic_irls(x, y);
  CHECK(theta(0) == doctest::Approx(std::log(3.0 / 7.0)).epsilon(1e-8));
}

TEST_CASE("logistic MLE satisfies the score equation on random data") {
  Eigen::MatrixXd x = random_design(60, 4, 302);
  Eigen::VectorXd eta = x * Eigen::Vector4d(0.5, -0.3, 0.8, 0.0);
  Eigen::VectorXd y = bernoulli_responses(eta, 303);
  ExpFamilyModel m = logistic_model(x);
  Eigen::VectorXd theta = fit_logistic_irls(x, y);
  Eigen::VectorXd score = m.suff_stat(y) - m.grad_log_partition(theta);
  // the solver may stop at numerical stationarity slightly above its
  // internal tolerance when the objective is flat to machine precision
  CHECK(score.lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("perfect separation raises SeparationError") {
  Eigen::MatrixXd x(4, 1);
  x << -2, -1, 1, 2;
  Eigen::VectorXd y(4);
  y << 0, 0, 1, 1;
  CHECK_THROWS_AS(fit_logistic_irls(x, y), SeparationError);
}

TEST_CASE("non-binary responses are rejected") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(3, 1);
  Eigen::VectorXd y(3);
  y << 0, 0.5, 1;
  CHECK_THROWS_AS(fit_logistic_irls(x, y), std::invalid_argument);
}

TEST_CASE("sufficient-statistic learner inverts the mean map") {
  Eigen::MatrixXd x = random_design(50, 3, 304);
  ExpFamilyModel m = logistic_model(x);
  SuffStatLearner learner = logistic_suffstat_learner(x);
  // pick a reachable s by pushing a theta through the mean map
  Eigen::VectorXd theta0(3);
  theta0 << 0.4, -0.2, 0.1;
  Eigen::VectorXd s = m.grad_log_partition(theta0);
  Eigen::VectorXd theta = learner(s);
  CHECK((m.grad_log_partition(theta) - s).lpNorm<Eigen::Infinity>() < 1e-8);
  CHECK((theta - theta0).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("duplicated columns: fitted probabilities are invariant") {
  Eigen::MatrixXd x1 = random_design(80, 2, 305);
  Eigen::MatrixXd x2(80, 3);
  x2 << x1, x1.col(1);  // third column collinear with the second
  Eigen::VectorXd eta = x1 * Eigen::Vector2d(0.3, -0.6);
  Eigen::VectorXd y = bernoulli_responses(eta, 306);
  Eigen::VectorXd t1 = fit_logistic_irls(x1, y);
  Eigen::VectorXd t2 = fit_logistic_irls(x2, y);
  CHECK(t2.allFinite());
  CHECK((x1 * t1 - x2 * t2).lpNorm<Eigen::Infinity>() < 1e-6);
  // the minimal-norm solve splits the shared coefficient evenly
  CHECK(t2(1) == doctest::Approx(t2(2)).epsilon(1e-6));
  ScalingFactor f = plugin_H(x2, t2);
  CHECK(f.sqrt.allFinite());
  RiskEstimate est =
      cv_glm(logistic_model(x2), y, logistic_suffstat_learner(x2), f, 0.1, 4,
             RngSpec{307, 0});
  CHECK(std::isfinite(est.value));
}

TEST_CASE("plugin_H: intercept-only model gives pi(1-pi)") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(6, 1);
  Eigen::VectorXd theta(1);
  theta << 0.7;
  const double pi = 1.0 / (1.0 + std::exp(-0.7));
  ScalingFactor f = plugin_H(x, theta);
  CHECK(f.h_matrix(0, 0) == doctest::Approx(pi * (1 - pi)).epsilon(1e-12));
}

TEST_CASE("cv_glm with a constant learner is exact by zero-sum") {
  Eigen::MatrixXd x = random_design(30, 3, 308);
  Eigen::VectorXd y = bernoulli_responses(Eigen::VectorXd::Zero(30), 309);
  ExpFamilyModel m = logistic_model(x);
  Eigen::VectorXd c(3);
  c << 0.2, -0.1, 0.4;
  SuffStatLearner constant = [c](const Eigen::VectorXd&) { return c; };
  ScalingFactor f = make_scaling(Eigen::MatrixXd::Identity(3, 3));
  RiskEstimate est = cv_glm(m, y, constant, f, 0.05, 5, RngSpec{310, 0});
  const double expect = m.log_partition(c) - c.dot(m.suff_stat(y));
  CHECK(est.value == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("gaussian family reduction: squared-error estimator is twice the loss form") {
  const int n = 8;
  Eigen::MatrixXd design = random_design(n, 2, 311);
  Eigen::MatrixXd S = ridge_smoother(design, 0.5).smoothing_matrix;
  Eigen::VectorXd y = Eigen::VectorXd::Random(n) * 2.0;

  ExpFamilyModel m = gaussian_family(n);
  SuffStatLearner lin = [S](const Eigen::VectorXd& s) {
    return Eigen::VectorXd(S * s);
  };
  ScalingFactor f = make_scaling(Eigen::MatrixXd::Identity(n, n));
  const double alpha = 0.2;
  const int k = 4;
  const RngSpec rng{312, 9};

  RiskEstimate glm_est = cv_glm(m, y, lin, f, alpha, k, rng);
  NormalMeansData data{y, 1.0};
  RiskEstimate sq_est =
      cv_alpha(data, LinearSmoother{S}.predictor(), alpha, k, rng);
  // identical draws; the linear cross term cancels only in the K-average
  CHECK(sq_est.value == doctest::Approx(2.0 * glm_est.value).epsilon(1e-9));
}

TEST_CASE("independent randomization differs from antithetic but agrees in mean") {
  Eigen::MatrixXd x = random_design(40, 2, 313);
  Eigen::VectorXd y = bernoulli_responses(Eigen::VectorXd::Zero(40), 314);
  ExpFamilyModel m = logistic_model(x);
  SuffStatLearner learner = logistic_suffstat_learner(x);
  Eigen::VectorXd theta_hat = fit_logistic_irls(x, y);
  ScalingFactor f = plugin_H(x, theta_hat);
  const int reps = 2000;
  double anti = 0.0, indep = 0.0;
  for (int r = 0; r < reps; ++r) {
    anti += cv_glm(m, y, learner, f, 0.3, 4, RngSpec{315, unsigned(r)},
                   Randomization::Antithetic)
                .value;
    indep += cv_glm(m, y, learner, f, 0.3, 4, RngSpec{316, unsigned(r)},
                    Randomization::Independent)
                 .value;
  }
  anti /= reps;
  indep /= reps;
  CHECK(anti == doctest::Approx(indep).epsilon(0.05));
}

TEST_CASE("kfold logistic CV: deterministic, finite, column-duplication invariant") {
  Eigen::MatrixXd x1 = random_design(60, 2, 317);
  Eigen::MatrixXd x2(60, 3);
  x2 << x1, x1.col(0);
  Eigen::VectorXd y = bernoulli_responses(x1 * Eigen::Vector2d(0.5, -0.5), 318);
  RiskEstimate a = kfold_cv_logistic(x1, y, 5, RngSpec{319, 0});
  RiskEstimate b = kfold_cv_logistic(x1, y, 5, RngSpec{319, 0});
  RiskEstimate c = kfold_cv_logistic(x2, y, 5, RngSpec{319, 0});
  CHECK(a.value == b.value);
  CHECK(std::isfinite(a.value));
  CHECK(a.value > 0.0);
  CHECK(c.value == doctest::Approx(a.value).epsilon(1e-6));
  CHECK_THROWS_AS(kfold_cv_logistic(x1, y, 1, RngSpec{}), std::invalid_argument);
}

TEST_CASE("oracle_pe_glm: constant learner against a fixed generator") {
  const int p = 3;
  ExpFamilyModel m = gaussian_family(p);
  Eigen::VectorXd y0(p);
  y0 << 1.0, -1.0, 2.0;
  Eigen::VectorXd c(p);
  c << 0.5, 0.0, 1.0;
  SuffStatLearner constant = [c](const Eigen::VectorXd&) { return c; };
  auto generator = [y0](const RngSpec&) { return y0; };
  double pe = oracle_pe_glm(m, constant, generator, 50, RngSpec{320, 0});
  CHECK(pe == doctest::Approx(0.5 * (c - y0).squaredNorm()).epsilon(1e-12));
}

TEST_CASE("oracle_pe_glm: all-diverging learner raises") {
  ExpFamilyModel m = gaussian_family(1);
  SuffStatLearner diverge = [](const Eigen::VectorXd&) -> Eigen::VectorXd {
    throw SeparationError("forced", 1);
  };
  auto generator = [](const RngSpec&) { return Eigen::VectorXd::Zero(1).eval(); };
  CHECK_THROWS_AS(oracle_pe_glm(m, diverge, generator, 5, RngSpec{321, 0}),
                  std::runtime_error);
}

TEST_CASE("cv_glm argument validation") {
  ExpFamilyModel m = gaussian_family(2);
  SuffStatLearner id = [](const Eigen::VectorXd& s) { return s; };
  ScalingFactor f = make_scaling(Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(cv_glm(m, y, id, f, 0.0, 2, RngSpec{}), std::invalid_argument);
  CHECK_THROWS_AS(cv_glm(m, y, id, f, 0.1, 1, RngSpec{}), std::invalid_argument);
}
