#include "antcv/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace antcv {

namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, double sd,
                                std::mt19937_64& eng) {
  std::normal_distribution<double> normal(0.0, sd);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = normal(eng);
  return m;
}

}  // namespace

AntitheticDraws sample_antithetic(int k_folds, int dim, double sigma2,
                                  const RngSpec& rng) {
  if (k_folds < 2)
    throw std::invalid_argument(
        "sample_antithetic: k_folds must be >= 2 (cross-covariance "
        "-sigma2/(K-1) is undefined at K=1)");
  if (dim < 1) throw std::invalid_argument("sample_antithetic: dim must be >= 1");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("sample_antithetic: sigma2 must be positive");

  auto eng = make_engine(rng);
  Eigen::MatrixXd z = gaussian_matrix(k_folds, dim, std::sqrt(sigma2), eng);
  const double scale = std::sqrt(double(k_folds) / double(k_folds - 1));
  Eigen::RowVectorXd mean = z.colwise().mean();
  Eigen::MatrixXd omega = scale * (z.rowwise() - mean);
  // one more centering pass so the column sums are zero to machine precision
  omega.rowwise() -= Eigen::RowVectorXd(omega.colwise().mean());

  AntitheticDraws out;
  out.draws = std::move(omega);
  out.k_folds = k_folds;
  out.dim = dim;
  out.sigma2 = sigma2;
  return out;
}

Eigen::MatrixXd sample_independent(int k_reps, int dim, double sigma2,
                                   const RngSpec& rng) {
  if (k_reps < 1)
    throw std::invalid_argument("sample_independent: k_reps must be >= 1");
  if (dim < 1) throw std::invalid_argument("sample_independent: dim must be >= 1");
  if (!(sigma2 > 0.0))
    throw std::invalid_argument("sample_independent: sigma2 must be positive");
  auto eng = make_engine(rng);
  return gaussian_matrix(k_reps, dim, std::sqrt(sigma2), eng);
}

AntitheticDraws scale_draws(const AntitheticDraws& draws,
                            const Eigen::MatrixXd& sqrt_factor) {
  if (sqrt_factor.rows() != sqrt_factor.cols() ||
      sqrt_factor.cols() != draws.dim)
    throw std::invalid_argument("scale_draws: factor dimension mismatch");
  AntitheticDraws out = draws;
  out.draws = draws.draws * sqrt_factor.transpose();
  return out;
}

}  // namespace antcv
