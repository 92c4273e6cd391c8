#include "antcv/glm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace antcv {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + exp(x)) without overflow
double log1pexp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// Newton solve of grad A_n(theta) = s.  The normal equations can be
// rank deficient (full one-hot encodings); the minimal-norm step keeps
// the iterates finite along null directions where the score is zero.
// Fitted logits beyond this are numerically saturated probabilities;
// the score can vanish in floating point even though no finite
// stationary point exists.
constexpr double kSaturatedLogit = 30.0;

Eigen::VectorXd newton_suffstat(const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& s, double tol,
                                int max_iter, double ridge = 0.0) {
  const auto n = X.rows();
  const auto p = X.cols();
  const double sqrt_n = std::sqrt(double(n));

  // Components of s outside the row space of X are unreachable by
  // grad A_n (rank-deficient designs, or randomization leaking into the
  // null space through a floored scaling factor), so convergence is
  // judged on the projected score; the result is the minimal-norm
  // least-squares stationary point.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram(X.transpose() * X);
  const Eigen::VectorXd& evals = gram.eigenvalues();
  const double cutoff = evals.maxCoeff() * 1e-12;
  Eigen::MatrixXd range_proj = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j)
    if (evals(j) > cutoff)
      range_proj += gram.eigenvectors().col(j) *
                    gram.eigenvectors().col(j).transpose();

  // Convex objective whose stationary point solves
  // grad A_n(theta) + ridge * theta = s.  With ridge > 0 the objective
  // is strongly convex, so a finite minimizer exists even when s lies
  // outside the closure of the achievable statistics.
  auto objective = [&](const Eigen::VectorXd& theta) {
    Eigen::VectorXd eta = X * theta;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) acc += log1pexp(eta(i));
    return acc / sqrt_n - s.dot(theta) + 0.5 * ridge * theta.squaredNorm();
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  double fval = objective(theta);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    Eigen::VectorXd eta = X * theta;
    Eigen::VectorXd pi = eta.unaryExpr([](double v) { return sigmoid(v); });
    Eigen::VectorXd score =
        range_proj * (s - X.transpose() * pi / sqrt_n) - ridge * theta;
    auto accept = [&]() -> Eigen::VectorXd {
      const double worst = eta.cwiseAbs().maxCoeff();
      if (ridge == 0.0 && worst > kSaturatedLogit) {
        std::ostringstream msg;
        msg << "separation suspected: fitted logit " << worst
            << " is numerically saturated after " << iter << " iterations";
        throw SeparationError(msg.str(), iter);
      }
      return theta;
    };
    if (score.lpNorm<Eigen::Infinity>() <= tol) return accept();
    Eigen::VectorXd w = pi.array() * (1.0 - pi.array());
    Eigen::MatrixXd hess =
        X.transpose() * w.asDiagonal() * X / sqrt_n;  // hessian of A_n
    hess.diagonal().array() += ridge;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(hess);
    Eigen::VectorXd step = cod.solve(score);
    // Backtracking keeps plain Newton from overshooting into the
    // saturated region; score is the negative gradient of the objective.
    const double slope = -score.dot(step);  // <= 0 for a descent direction
    double t = 1.0;
    double cand = objective(theta + step);
    for (int back = 0; back < 60 && cand > fval + 1e-4 * t * slope; ++back) {
      t *= 0.5;
      cand = objective(theta + t * step);
    }
    // The score can plateau a hair above tol when the objective is
    // already flat to machine precision; accept numerical stationarity
    // instead of spinning until the iteration cap.
    if (!(cand < fval)) return accept();
    theta += t * step;
    fval = cand;
    if (ridge == 0.0 && theta.norm() > 1e3) {
      std::ostringstream msg;
      msg << "separation suspected: ||theta|| = " << theta.norm()
          << " after " << iter + 1 << " iterations";
      throw SeparationError(msg.str(), iter + 1);
    }
  }
  std::ostringstream msg;
  msg << "IRLS did not converge in " << max_iter << " iterations";
  throw SeparationError(msg.str(), max_iter);
}

}  // namespace

ScalingFactor make_scaling(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("make_scaling: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  Eigen::VectorXd evals = eig.eigenvalues();
  const double lmax = evals.maxCoeff();
  if (!(lmax > 0.0)) {
    std::ostringstream msg;
    msg << "make_scaling: matrix numerically singular, lambda_max = " << lmax;
    throw std::invalid_argument(msg.str());
  }
  const double floor = 1e-10 * lmax;
  Eigen::VectorXd clipped = evals.cwiseMax(floor);
  Eigen::VectorXd sqrt_vals = clipped.cwiseSqrt();
  const Eigen::MatrixXd& v = eig.eigenvectors();
  ScalingFactor out;
  out.h_matrix = h;
  out.sqrt = v * sqrt_vals.asDiagonal() * v.transpose();
  out.inv_sqrt = v * sqrt_vals.cwiseInverse().asDiagonal() * v.transpose();
  return out;
}

ExpFamilyModel logistic_model(const Eigen::MatrixXd& design) {
  const auto n = design.rows();
  const auto p = design.cols();
  if (n < 1 || p < 1)
    throw std::invalid_argument("logistic_model: empty design");
  const double sqrt_n = std::sqrt(double(n));
  Eigen::MatrixXd X = design;

  ExpFamilyModel m;
  m.dim_p = static_cast<int>(p);
  m.n_obs = static_cast<int>(n);
  m.suff_stat = [X, sqrt_n](const Eigen::VectorXd& y) {
    return Eigen::VectorXd(X.transpose() * y / sqrt_n);
  };
  m.log_partition = [X, sqrt_n](const Eigen::VectorXd& theta) {
    Eigen::VectorXd eta = X * theta;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) acc += log1pexp(eta(i));
    return acc / sqrt_n;
  };
  m.grad_log_partition = [X, sqrt_n](const Eigen::VectorXd& theta) {
    Eigen::VectorXd pi =
        (X * theta).unaryExpr([](double v) { return sigmoid(v); });
    return Eigen::VectorXd(X.transpose() * pi / sqrt_n);
  };
  m.hess_log_partition = [X, sqrt_n](const Eigen::VectorXd& theta) {
    Eigen::VectorXd pi =
        (X * theta).unaryExpr([](double v) { return sigmoid(v); });
    Eigen::VectorXd w = pi.array() * (1.0 - pi.array());
    return Eigen::MatrixXd(X.transpose() * w.asDiagonal() * X / sqrt_n);
  };
  // Bernoulli in natural parametrization has unit base measure.
  m.log_base = [](const Eigen::VectorXd&) { return 0.0; };
  return m;
}

Eigen::VectorXd fit_logistic_irls(const Eigen::MatrixXd& design,
                                  const Eigen::VectorXd& responses,
                                  double tol, int max_iter) {
  if (design.rows() != responses.size())
    throw std::invalid_argument("fit_logistic_irls: length mismatch");
  for (Eigen::Index i = 0; i < responses.size(); ++i)
    if (responses(i) != 0.0 && responses(i) != 1.0)
      throw std::invalid_argument("fit_logistic_irls: responses must be 0/1");
  const double sqrt_n = std::sqrt(double(design.rows()));
  Eigen::VectorXd s = design.transpose() * responses / sqrt_n;
  return newton_suffstat(design, s, tol, max_iter);
}

SuffStatLearner logistic_suffstat_learner(const Eigen::MatrixXd& design,
                                          double tol, int max_iter,
                                          double ridge) {
  if (ridge < 0.0)
    throw std::invalid_argument(
        "logistic_suffstat_learner: ridge must be >= 0");
  Eigen::MatrixXd X = design;
  return [X, tol, max_iter, ridge](const Eigen::VectorXd& s) {
    return newton_suffstat(X, s, tol, max_iter, ridge);
  };
}

ScalingFactor plugin_H(const Eigen::MatrixXd& design,
                       const Eigen::VectorXd& theta_hat) {
  if (!theta_hat.allFinite())
    throw std::invalid_argument("plugin_H: theta_hat must be finite");
  Eigen::VectorXd pi =
      (design * theta_hat).unaryExpr([](double v) { return sigmoid(v); });
  Eigen::VectorXd w = pi.array() * (1.0 - pi.array());
  Eigen::MatrixXd h = design.transpose() * w.asDiagonal() * design /
                      double(design.rows());
  return make_scaling(h);
}

RiskEstimate cv_glm(const ExpFamilyModel& model, const Eigen::VectorXd& y,
                    const SuffStatLearner& learner,
                    const ScalingFactor& scaling, double alpha, int k_folds,
                    const RngSpec& rng, Randomization scheme) {
  if (!(alpha > 0.0) || alpha < kAlphaFloor)
    throw std::invalid_argument("cv_glm: invalid alpha");
  if (k_folds < 2) throw std::invalid_argument("cv_glm: k_folds must be >= 2");

  const Eigen::VectorXd s = model.suff_stat(y);
  if (s.size() != model.dim_p)
    throw std::runtime_error("cv_glm: sufficient statistic dimension mismatch");

  Eigen::MatrixXd omegas;  // unit-variance draws in whitened coordinates
  if (scheme == Randomization::Antithetic)
    omegas = sample_antithetic(k_folds, model.dim_p, 1.0, rng).draws;
  else
    omegas = sample_independent(k_folds, model.dim_p, 1.0, rng);

  const double sqrt_alpha = std::sqrt(alpha);
  const double log_base_term =
      model.log_base(y) / std::sqrt(double(model.n_obs));

  RiskEstimate est;
  est.fold_values.resize(k_folds);
  for (int k = 0; k < k_folds; ++k) {
    Eigen::VectorXd noise = scaling.sqrt * omegas.row(k).transpose();
    Eigen::VectorXd theta = learner(s + sqrt_alpha * noise);
    if (theta.size() != model.dim_p)
      throw std::runtime_error("cv_glm: learner output dimension != p");
    est.fold_values(k) = model.log_partition(theta) -
                         theta.dot(s - noise / sqrt_alpha) - log_base_term;
  }
  est.value = est.fold_values.mean();
  est.method = scheme == Randomization::Antithetic ? Method::AntitheticCV
                                                   : Method::CoupledBootstrap;
  est.alpha = alpha;
  est.k_folds = k_folds;
  est.seed = rng;
  return est;
}

RiskEstimate kfold_cv_logistic(const Eigen::MatrixXd& design,
                               const Eigen::VectorXd& responses, int k_folds,
                               const RngSpec& rng, double ridge) {
  const auto n = responses.size();
  if (design.rows() != n)
    throw std::invalid_argument("kfold_cv_logistic: length mismatch");
  if (k_folds < 2 || k_folds > n)
    throw std::invalid_argument("kfold_cv_logistic: k_folds must be in [2, n]");
  const double sqrt_n = std::sqrt(double(n));

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
    Eigen::VectorXd theta;
    try {
      const double sqrt_tr = std::sqrt(double(train_size));
      Eigen::VectorXd s_tr = xtr.transpose() * ytr / sqrt_tr;
      theta = newton_suffstat(xtr, s_tr, 1e-8, ridge > 0.0 ? 5000 : 100,
                              ridge);
    } catch (const SeparationError& e) {
      throw std::runtime_error("kfold_cv_logistic: fold " + std::to_string(k) +
                               ": " + e.what());
    }
    Eigen::VectorXd eta = xte * theta;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < fold_size; ++i)
      loss += log1pexp(eta(i)) - yte(i) * eta(i);
    est.fold_values(k) = loss / sqrt_n * double(n) / double(fold_size);
  }
  est.value = est.fold_values.mean();
  est.method = Method::KFoldCV;
  est.alpha = 0.0;
  est.k_folds = k_folds;
  est.seed = rng;
  return est;
}

double oracle_pe_glm(
    const ExpFamilyModel& model, const SuffStatLearner& learner,
    const std::function<Eigen::VectorXd(const RngSpec&)>& generator, int n_mc,
    const RngSpec& rng) {
  const double sqrt_n = std::sqrt(double(model.n_obs));
  double acc = 0.0;
  int used = 0;
  for (int i = 0; i < n_mc; ++i) {
    Eigen::VectorXd y = generator(rng.substream(2 * i));
    Eigen::VectorXd y_tilde = generator(rng.substream(2 * i + 1));
    try {
      Eigen::VectorXd theta = learner(model.suff_stat(y));
      acc += model.log_partition(theta) -
             theta.dot(model.suff_stat(y_tilde)) -
             model.log_base(y_tilde) / sqrt_n;
      ++used;
    } catch (const SeparationError&) {
      // drop diverging fits; the harness logs drop counts separately
    }
  }
  if (used == 0) throw std::runtime_error("oracle_pe_glm: all fits diverged");
  return acc / used;
}

}  // namespace antcv
