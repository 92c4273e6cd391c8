#include "antcv/zeroth_order.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "antcv/sampler.hpp"

namespace antcv {

GradEstimate antithetic_grad(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& theta, double sigma, int k, int batches,
    const RngSpec& rng, bool antithetic) {
  if (k < 2) throw std::invalid_argument("antithetic_grad: k must be >= 2");
  if (!(sigma > 0.0))
    throw std::invalid_argument("antithetic_grad: sigma must be positive");
  if (batches < 1)
    throw std::invalid_argument("antithetic_grad: batches must be >= 1");

  const int d = static_cast<int>(theta.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
  for (int b = 0; b < batches; ++b) {
    Eigen::MatrixXd omegas =
        antithetic ? sample_antithetic(k, d, 1.0, rng.substream(b)).draws
                   : sample_independent(k, d, 1.0, rng.substream(b));
    for (int j = 0; j < k; ++j) {
      Eigen::VectorXd omega = omegas.row(j).transpose();
      double value = objective(theta + sigma * omega);
      if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "antithetic_grad: non-finite objective value at batch " << b
            << ", perturbation " << j;
        throw std::runtime_error(msg.str());
      }
      acc += value * omega;
    }
  }

  GradEstimate est;
  est.grad = acc / (double(batches) * double(k) * sigma);
  est.sigma = sigma;
  est.k = k;
  est.batches = batches;
  return est;
}

}  // namespace antcv
