#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "antcv/estimators.hpp"
#include "antcv/glm.hpp"
#include "antcv/predictors.hpp"
#include "antcv/rng.hpp"

namespace antcv {

enum class Scenario { Isotonic61, Logistic62, Friedman63 };

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

struct ScenarioSpec {
  Scenario scenario = Scenario::Isotonic61;
  int n = 0;          // 0 = scenario default
  double sigma2 = 1.0;
  RngSpec seed;

  int effective_n() const;
};

// One generated dataset.  Covariates are a function of the scenario
// seed only; responses come from the response stream, so replications
// redraw responses over fixed covariates.
struct IsotonicSample {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd truth;
};

struct LogisticSample {
  Eigen::MatrixXd design;  // 4 continuous + 2x3 one-hot columns
  Eigen::VectorXd y;
  Eigen::VectorXd eta;
};

struct FriedmanSample {
  Eigen::MatrixXd design;  // n x 10, features 6-10 pure noise
  Eigen::VectorXd y;
  Eigen::VectorXd truth;
};

// Step function 2*ceil(5x) - 6 on (0,1).
double isotonic_truth(double x);
// Friedman #1: 10 sin(pi x1 x2) + 20 (x3 - 1/2)^2 + 10 x4 + 5 x5.
double friedman1_truth(const Eigen::RowVectorXd& x);

IsotonicSample gen_isotonic(const ScenarioSpec& spec);
IsotonicSample gen_isotonic(const ScenarioSpec& spec, const RngSpec& response_rng);
LogisticSample gen_logistic(const ScenarioSpec& spec);
LogisticSample gen_logistic(const ScenarioSpec& spec, const RngSpec& response_rng);
FriedmanSample gen_friedman1(const ScenarioSpec& spec);
FriedmanSample gen_friedman1(const ScenarioSpec& spec, const RngSpec& response_rng);

// Marginal prediction error E||g(Y) - Ytilde||^2 by Monte Carlo over Y,
// with the test expectation taken in closed form given the Gaussian
// truth: mean of ||g(Y) - truth||^2 + n sigma2.
double oracle_pe_normal(const Predictor& g, const Eigen::VectorXd& truth,
                        double sigma2, int n_mc, const RngSpec& rng);

// Same target with a fresh learner fit per response draw; fits are
// capped at 2000 since they dominate cost.
double oracle_pe_normal(const Learner& learner, const Eigen::MatrixXd& design,
                        const Eigen::VectorXd& truth, double sigma2, int n_mc,
                        const RngSpec& rng);

struct MethodSpec {
  std::string method;  // "antithetic" | "cb" | "kfold"
  double alpha = 0.0;
  int k = 0;
};

struct MseReport {
  std::string scenario;
  std::string method;
  double alpha = 0.0;
  int k = 0;
  int replications = 0;  // effective count after drops
  double mse = 0.0;
  double mc_stderr = 0.0;
  int dropped = 0;
};

// For each replication, draws fresh responses, runs every estimator,
// and aggregates squared deviations from the scenario's oracle PE.
// Deterministic given the seed regardless of worker count.
std::vector<MseReport> run_mse_grid(const ScenarioSpec& spec,
                                    const std::vector<MethodSpec>& methods,
                                    int replications, int workers = 1,
                                    int oracle_n_mc = 2000);

inline constexpr const char* kCsvHeader =
    "scenario,method,alpha,k,replications,mse,stderr,dropped";

void write_csv(const std::vector<MseReport>& reports, std::ostream& out);

}  // namespace antcv
