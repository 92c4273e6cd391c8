#include "antcv/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace antcv {

double IsotonicFit::predict(double x) const {
  const auto n = knots.size();
  if (n == 0) throw std::invalid_argument("IsotonicFit::predict: empty fit");
  if (x < knots(0)) return fitted(0);
  if (x >= knots(n - 1)) return fitted(n - 1);
  // last knot <= x
  const double* begin = knots.data();
  const double* it = std::upper_bound(begin, begin + n, x);
  return fitted(static_cast<Eigen::Index>(it - begin) - 1);
}

IsotonicFit pava(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& w) {
  const auto n = x.size();
  if (y.size() != n || w.size() != n)
    throw std::invalid_argument("pava: length mismatch");
  if (n == 0) throw std::invalid_argument("pava: empty input");
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (x(i) > x(i + 1))
      throw std::invalid_argument("pava: covariates must be sorted ascending");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(w(i) > 0.0)) throw std::invalid_argument("pava: weights must be positive");

  // Pre-pool equal covariates by weighted mean.
  std::vector<double> kx, ky, kw;
  kx.reserve(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    double sw = 0.0, swy = 0.0;
    while (j < n && x(j) == x(i)) {
      sw += w(j);
      swy += w(j) * y(j);
      ++j;
    }
    kx.push_back(x(i));
    ky.push_back(swy / sw);
    kw.push_back(sw);
    i = j;
  }

  // Stack of blocks (mean, weight, count of knots pooled).
  struct Block {
    double mean, weight;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(kx.size());
  for (std::size_t i = 0; i < kx.size(); ++i) {
    blocks.push_back({ky[i], kw[i], 1});
    while (blocks.size() > 1 &&
           blocks[blocks.size() - 2].mean >= blocks.back().mean) {
      Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      double tw = a.weight + b.weight;
      a.mean = (a.mean * a.weight + b.mean * b.weight) / tw;
      a.weight = tw;
      a.count += b.count;
    }
  }

  IsotonicFit fit;
  const auto m = static_cast<Eigen::Index>(kx.size());
  fit.knots = Eigen::Map<const Eigen::VectorXd>(kx.data(), m);
  fit.fitted.resize(m);
  fit.weights = Eigen::Map<const Eigen::VectorXd>(kw.data(), m);
  Eigen::Index pos = 0;
  for (const Block& b : blocks)
    for (std::size_t c = 0; c < b.count; ++c) fit.fitted(pos++) = b.mean;
  return fit;
}

Learner isotonic_learner() {
  Learner l;
  l.fit = [](const Eigen::MatrixXd& design, const Eigen::VectorXd& responses) {
    if (design.rows() == 0)
      throw std::invalid_argument("isotonic_learner: empty training set");
    if (design.cols() != 1)
      throw std::invalid_argument("isotonic_learner: expects one covariate");
    const auto n = design.rows();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return design(a, 0) < design(b, 0);
    });
    Eigen::VectorXd xs(n), ys(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      xs(i) = design(order[i], 0);
      ys(i) = responses(order[i]);
    }
    auto fit = std::make_shared<IsotonicFit>(
        pava(xs, ys, Eigen::VectorXd::Ones(n)));
    return PredictFn([fit](const Eigen::MatrixXd& xnew) {
      Eigen::VectorXd out(xnew.rows());
      for (Eigen::Index i = 0; i < xnew.rows(); ++i)
        out(i) = fit->predict(xnew(i, 0));
      return out;
    });
  };
  return l;
}

Predictor LinearSmoother::predictor() const {
  Eigen::MatrixXd S = smoothing_matrix;
  const double tr = S.trace();
  Predictor p;
  p.evaluate = [S](const Eigen::VectorXd& y) { return Eigen::VectorXd(S * y); };
  p.divergence = [tr](const Eigen::VectorXd&) { return tr; };
  return p;
}

LinearSmoother ridge_smoother(const Eigen::MatrixXd& design, double lambda) {
  if (lambda < 0.0)
    throw std::invalid_argument("ridge_smoother: lambda must be nonnegative");
  const auto p = design.cols();
  Eigen::MatrixXd gram = design.transpose() * design;
  gram.diagonal().array() += lambda;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (lambda == 0.0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(design.transpose() * design);
    if (lu.rank() < p)
      throw std::invalid_argument(
          "ridge_smoother: singular system at lambda=0; design is rank "
          "deficient");
  }
  LinearSmoother s;
  s.smoothing_matrix = design * ldlt.solve(design.transpose());
  return s;
}

Predictor soft_threshold_predictor(double lambda) {
  if (lambda < 0.0)
    throw std::invalid_argument("soft_threshold_predictor: lambda must be >= 0");
  Predictor p;
  p.evaluate = [lambda](const Eigen::VectorXd& y) {
    Eigen::VectorXd out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      double a = std::abs(y(i)) - lambda;
      out(i) = a > 0.0 ? (y(i) > 0.0 ? a : -a) : 0.0;
    }
    return out;
  };
  p.divergence = [lambda](const Eigen::VectorXd& y) {
    double count = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (std::abs(y(i)) > lambda) count += 1.0;
    return count;
  };
  return p;
}

Predictor constant_predictor(const Eigen::VectorXd& c) {
  Predictor p;
  Eigen::VectorXd cc = c;
  p.evaluate = [cc](const Eigen::VectorXd&) { return cc; };
  p.divergence = [](const Eigen::VectorXd&) { return 0.0; };
  return p;
}

Predictor identity_predictor() {
  Predictor p;
  p.evaluate = [](const Eigen::VectorXd& y) { return y; };
  p.divergence = [](const Eigen::VectorXd& y) {
    return static_cast<double>(y.size());
  };
  return p;
}

Learner mean_learner() {
  Learner l;
  l.fit = [](const Eigen::MatrixXd&, const Eigen::VectorXd& responses) {
    if (responses.size() == 0)
      throw std::invalid_argument("mean_learner: empty training set");
    const double mean = responses.mean();
    return PredictFn([mean](const Eigen::MatrixXd& xnew) {
      return Eigen::VectorXd::Constant(xnew.rows(), mean).eval();
    });
  };
  return l;
}

Learner ridge_learner(double lambda) {
  if (lambda < 0.0)
    throw std::invalid_argument("ridge_learner: lambda must be nonnegative");
  Learner l;
  l.fit = [lambda](const Eigen::MatrixXd& design,
                   const Eigen::VectorXd& responses) {
    if (design.rows() == 0)
      throw std::invalid_argument("ridge_learner: empty training set");
    const auto p = design.cols();
    Eigen::MatrixXd x(design.rows(), p + 1);
    x << design, Eigen::VectorXd::Ones(design.rows());
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += lambda;
    Eigen::VectorXd beta =
        gram.ldlt().solve(x.transpose() * responses);
    return PredictFn([beta, p](const Eigen::MatrixXd& xnew) {
      Eigen::MatrixXd aug(xnew.rows(), p + 1);
      aug << xnew, Eigen::VectorXd::Ones(xnew.rows());
      return Eigen::VectorXd(aug * beta);
    });
  };
  return l;
}

Predictor black_box_predictor(
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> fn) {
  Predictor p;
  p.evaluate = std::move(fn);
  return p;
}

Predictor self_predictor(const Learner& learner,
                         const Eigen::MatrixXd& design) {
  Predictor p;
  auto fit = learner.fit;
  Eigen::MatrixXd X = design;
  p.evaluate = [fit, X](const Eigen::VectorXd& y) { return fit(X, y)(X); };
  return p;
}

}  // namespace antcv
