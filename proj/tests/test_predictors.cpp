#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "antcv/predictors.hpp"
#include "antcv/rng.hpp"

using namespace antcv;

namespace {

// Exact weighted isotonic LS by enumerating all partitions of the knots
// into consecutive blocks and keeping the best one with nondecreasing
// block means.  Exponential in n; used only as a small-n oracle.
Eigen::VectorXd isotonic_bruteforce(const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& w) {
  const int n = int(y.size());
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_fit = y;
  for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
    Eigen::VectorXd fit(n);
    double sse = 0.0, prev_mean = -std::numeric_limits<double>::infinity();
    bool feasible = true;
    int start = 0;
    for (int i = 0; i < n; ++i) {
      bool boundary = (i == n - 1) || (mask & (1 << i));
      if (!boundary) continue;
      double sw = 0.0, swy = 0.0;
      for (int j = start; j <= i; ++j) {
        sw += w(j);
        swy += w(j) * y(j);
      }
      double mean = swy / sw;
      if (mean < prev_mean) {
        feasible = false;
        break;
      }
      prev_mean = mean;
      for (int j = start; j <= i; ++j) {
        fit(j) = mean;
        sse += w(j) * (y(j) - mean) * (y(j) - mean);
      }
      start = i + 1;
    }
    if (feasible && sse < best) {
      best = sse;
      best_fit = fit;
    }
  }
  return best_fit;
}

}  // namespace

TEST_CASE("pava matches brute-force isotonic regression on random inputs") {
  std::mt19937_64 eng = make_engine(RngSpec{101, 0});
  std::uniform_int_distribution<int> grid(-2, 2);
  std::uniform_real_distribution<double> wdist(0.5, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 6;
    Eigen::VectorXd x(n), y(n), w(n);
    for (int i = 0; i < n; ++i) {
      x(i) = i;
      y(i) = grid(eng);
      w(i) = trial % 2 == 0 ? 1.0 : wdist(eng);
    }
    IsotonicFit fit = pava(x, y, w);
    Eigen::VectorXd oracle = isotonic_bruteforce(y, w);
    REQUIRE(fit.fitted.size() == n);
    CHECK((fit.fitted - oracle).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("pava: already monotone data is returned unchanged") {
  Eigen::VectorXd x(4), y(4);
  x << 0, 1, 2, 3;
  y << -1, 0, 2, 5;
  IsotonicFit fit = pava(x, y, Eigen::VectorXd::Ones(4));
  CHECK((fit.fitted - y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pava: strictly decreasing data pools to the weighted mean") {
  Eigen::VectorXd x(3), y(3), w(3);
  x << 0, 1, 2;
  y << 3, 2, 1;
  w << 1, 2, 1;
  IsotonicFit fit = pava(x, y, w);
  const double wm = (3 + 4 + 1) / 4.0;
  for (int i = 0; i < 3; ++i) CHECK(fit.fitted(i) == doctest::Approx(wm));
}

TEST_CASE("pava: hand-worked example with one violation") {
  // y = (1, 3, 2): pool the last two to 2.5
  Eigen::VectorXd x(3), y(3);
  x << 0, 1, 2;
  y << 1, 3, 2;
  IsotonicFit fit = pava(x, y, Eigen::VectorXd::Ones(3));
  CHECK(fit.fitted(0) == doctest::Approx(1.0));
  CHECK(fit.fitted(1) == doctest::Approx(2.5));
  CHECK(fit.fitted(2) == doctest::Approx(2.5));
}

TEST_CASE("pava: equal covariates are pre-pooled to one knot") {
  Eigen::VectorXd x(4), y(4), w(4);
  x << 0, 1, 1, 2;
  y << 0, 4, 2, 5;
  w << 1, 1, 3, 1;
  IsotonicFit fit = pava(x, y, w);
  REQUIRE(fit.knots.size() == 3);
  CHECK(fit.knots(1) == 1.0);
  CHECK(fit.weights(1) == doctest::Approx(4.0));
  // pooled value (4 + 6)/4 = 2.5, still monotone overall
  CHECK(fit.fitted(1) == doctest::Approx(2.5));
}

TEST_CASE("step prediction clamps and is right-continuous") {
  Eigen::VectorXd x(3), y(3);
  x << 0, 1, 2;
  y << 1, 2, 3;
  IsotonicFit fit = pava(x, y, Eigen::VectorXd::Ones(3));
  CHECK(fit.predict(-5.0) == doctest::Approx(1.0));
  CHECK(fit.predict(0.0) == doctest::Approx(1.0));
  CHECK(fit.predict(0.99) == doctest::Approx(1.0));
  CHECK(fit.predict(1.0) == doctest::Approx(2.0));
  CHECK(fit.predict(1.5) == doctest::Approx(2.0));
  CHECK(fit.predict(2.0) == doctest::Approx(3.0));
  CHECK(fit.predict(10.0) == doctest::Approx(3.0));
}

TEST_CASE("pava rejects bad inputs") {
  Eigen::VectorXd x(2), y(2), w(2);
  x << 1, 0;
  y << 0, 0;
  w << 1, 1;
  CHECK_THROWS_AS(pava(x, y, w), std::invalid_argument);
  x << 0, 1;
  w << 1, 0;
  CHECK_THROWS_AS(pava(x, y, w), std::invalid_argument);
  CHECK_THROWS_AS(pava(x, Eigen::VectorXd::Zero(3), w), std::invalid_argument);
}

TEST_CASE("isotonic learner sorts internally and reproduces the fit") {
  Eigen::MatrixXd design(4, 1);
  design << 0.7, 0.1, 0.4, 0.9;
  Eigen::VectorXd y(4);
  y << 2.0, -1.0, 0.5, 3.0;
  PredictFn f = isotonic_learner().fit(design, y);
  // monotone after sorting, so training points are interpolated exactly
  Eigen::VectorXd at_train = f(design);
  CHECK((at_train - y).cwiseAbs().maxCoeff() < 1e-12);
  // predictions are nondecreasing in x
  Eigen::MatrixXd grid(5, 1);
  grid << 0.0, 0.25, 0.5, 0.75, 1.0;
  Eigen::VectorXd g = f(grid);
  for (int i = 0; i + 1 < 5; ++i) CHECK(g(i) <= g(i + 1));
}

TEST_CASE("ridge smoother matches the SVD shrinkage formula") {
  std::mt19937_64 eng = make_engine(RngSpec{102, 0});
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(12, 4);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 4; ++j) x(i, j) = nd(eng);
  const double lambda = 0.8;
  LinearSmoother s = ridge_smoother(x, lambda);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU);
  Eigen::VectorXd d = svd.singularValues();
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(12, 12);
  double tr = 0.0;
  for (int j = 0; j < 4; ++j) {
    double shrink = d(j) * d(j) / (d(j) * d(j) + lambda);
    expect += shrink * svd.matrixU().col(j) * svd.matrixU().col(j).transpose();
    tr += shrink;
  }
  CHECK((s.smoothing_matrix - expect).cwiseAbs().maxCoeff() < 1e-10);
  Predictor p = s.predictor();
  REQUIRE(p.has_divergence());
  CHECK(p.divergence(Eigen::VectorXd::Zero(12)) == doctest::Approx(tr));
  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) y(i) = nd(eng);
  CHECK((p.evaluate(y) - expect * y).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ridge smoother at lambda=0 on full-rank design projects") {
  Eigen::MatrixXd x(5, 2);
  x << 1, 0, 0, 1, 1, 1, 2, -1, 0.5, 0.5;
  LinearSmoother s = ridge_smoother(x, 0.0);
  Eigen::MatrixXd S = s.smoothing_matrix;
  CHECK((S * S - S).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(S.trace() == doctest::Approx(2.0));
  Eigen::MatrixXd degenerate(3, 2);
  degenerate << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(ridge_smoother(degenerate, 0.0), std::invalid_argument);
}

TEST_CASE("soft threshold values and divergence") {
  Predictor p = soft_threshold_predictor(1.0);
  Eigen::VectorXd y(5);
  y << -3.0, -0.5, 0.0, 0.5, 2.0;
  Eigen::VectorXd out = p.evaluate(y);
  Eigen::VectorXd expect(5);
  expect << -2.0, 0.0, 0.0, 0.0, 1.0;
  CHECK((out - expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.divergence(y) == doctest::Approx(2.0));
  CHECK_THROWS_AS(soft_threshold_predictor(-0.1), std::invalid_argument);
}

TEST_CASE("soft threshold divergence matches finite differences off the kink") {
  Predictor p = soft_threshold_predictor(0.7);
  std::mt19937_64 eng = make_engine(RngSpec{103, 0});
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd y(8);
    for (int i = 0; i < 8; ++i) {
      do {
        y(i) = 2.0 * nd(eng);
      } while (std::abs(std::abs(y(i)) - 0.7) < 0.05);
    }
    const double h = 1e-6;
    double div_fd = 0.0;
    for (int i = 0; i < 8; ++i) {
      Eigen::VectorXd yp = y, ym = y;
      yp(i) += h;
      ym(i) -= h;
      div_fd += (p.evaluate(yp)(i) - p.evaluate(ym)(i)) / (2 * h);
    }
    CHECK(p.divergence(y) == doctest::Approx(div_fd).epsilon(1e-6));
  }
}

TEST_CASE("constant and identity predictors") {
  Eigen::VectorXd c(3);
  c << 1, 2, 3;
  Predictor pc = constant_predictor(c);
  Eigen::VectorXd y = Eigen::VectorXd::Random(3);
  CHECK((pc.evaluate(y) - c).norm() == 0.0);
  CHECK(pc.divergence(y) == 0.0);
  Predictor pi = identity_predictor();
  CHECK((pi.evaluate(y) - y).norm() == 0.0);
  CHECK(pi.divergence(y) == 3.0);
}

TEST_CASE("mean learner predicts the training mean everywhere") {
  Eigen::MatrixXd design(4, 2);
  design.setRandom();
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 6;
  PredictFn f = mean_learner().fit(design, y);
  Eigen::MatrixXd xnew(2, 2);
  xnew.setRandom();
  Eigen::VectorXd out = f(xnew);
  CHECK(out(0) == doctest::Approx(3.0));
  CHECK(out(1) == doctest::Approx(3.0));
}

TEST_CASE("ridge learner solves the penalized normal equations") {
  std::mt19937_64 eng = make_engine(RngSpec{104, 0});
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(20, 3);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = nd(eng);
    y(i) = nd(eng);
  }
  const double lambda = 1.3;
  PredictFn f = ridge_learner(lambda).fit(x, y);
  Eigen::MatrixXd aug(20, 4);
  aug << x, Eigen::VectorXd::Ones(20);
  Eigen::MatrixXd gram = aug.transpose() * aug;
  gram.diagonal().array() += lambda;
  Eigen::VectorXd beta = gram.ldlt().solve(aug.transpose() * y);
  CHECK((f(x) - aug * beta).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("self predictor composes learner fit and evaluation") {
  Eigen::MatrixXd design(5, 1);
  design << 1, 2, 3, 4, 5;
  Predictor p = self_predictor(mean_learner(), design);
  Eigen::VectorXd y(5);
  y << 0, 0, 5, 5, 5;
  Eigen::VectorXd out = p.evaluate(y);
  for (int i = 0; i < 5; ++i) CHECK(out(i) == doctest::Approx(3.0));
  CHECK_FALSE(p.has_divergence());
}

TEST_CASE("black box predictor carries no divergence") {
  Predictor p = black_box_predictor(
      [](const Eigen::VectorXd& y) { return Eigen::VectorXd(2.0 * y); });
  CHECK_FALSE(p.has_divergence());
  Eigen::VectorXd y(2);
  y << 1, -1;
  CHECK((p.evaluate(y) - 2.0 * y).norm() == 0.0);
}
