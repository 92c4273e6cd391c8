#include "antcv/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>

namespace antcv {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " +
                                  where);
}

}  // namespace

ScenarioSpec RunConfig::scenario_spec() const {
  ScenarioSpec spec;
  spec.scenario = scenario_from_name(scenario);
  spec.n = n;
  spec.sigma2 = sigma2;
  spec.seed = RngSpec{seed, 0};
  return spec;
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  reject_unknown_keys(j,
                      {"schema", "scenario", "n", "sigma2", "methods",
                       "replications", "seed", "workers", "oracle_n_mc",
                       "output"},
                      "top level");
  RunConfig c;
  if (!j.contains("schema") || !j["schema"].is_number_integer() ||
      j["schema"].get<int>() != 1)
    throw std::invalid_argument("config: field 'schema' must be 1");
  if (!j.contains("scenario"))
    throw std::invalid_argument("config: missing field 'scenario'");
  c.scenario = j["scenario"].get<std::string>();
  scenario_from_name(c.scenario);  // validates

  if (j.contains("n")) c.n = j["n"].get<int>();
  if (c.n < 0) throw std::invalid_argument("config: field 'n' must be >= 0");
  if (j.contains("sigma2")) c.sigma2 = j["sigma2"].get<double>();
  if (!(c.sigma2 > 0.0))
    throw std::invalid_argument("config: field 'sigma2' must be positive");
  if (j.contains("replications")) c.replications = j["replications"].get<int>();
  if (c.replications < 2)
    throw std::invalid_argument("config: field 'replications' must be >= 2");
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) c.workers = j["workers"].get<int>();
  if (c.workers < 1)
    throw std::invalid_argument("config: field 'workers' must be >= 1");
  if (j.contains("oracle_n_mc")) c.oracle_n_mc = j["oracle_n_mc"].get<int>();
  if (c.oracle_n_mc < 1)
    throw std::invalid_argument("config: field 'oracle_n_mc' must be >= 1");
  if (j.contains("output")) c.output = j["output"].get<std::string>();

  if (!j.contains("methods") || !j["methods"].is_array() ||
      j["methods"].empty())
    throw std::invalid_argument(
        "config: field 'methods' must be a non-empty array");
  for (const auto& mj : j["methods"]) {
    reject_unknown_keys(mj, {"method", "alpha", "k"}, "methods entry");
    MethodSpec m;
    if (!mj.contains("method"))
      throw std::invalid_argument("config: methods entry missing 'method'");
    m.method = mj["method"].get<std::string>();
    if (m.method != "antithetic" && m.method != "cb" && m.method != "kfold")
      throw std::invalid_argument("config: field 'method' must be one of "
                                  "antithetic, cb, kfold; got '" +
                                  m.method + "'");
    if (mj.contains("alpha")) m.alpha = mj["alpha"].get<double>();
    if (m.method != "kfold" && !(m.alpha > 0.0))
      throw std::invalid_argument("config: field 'alpha' must be positive for "
                                  "method '" + m.method + "'");
    if (!mj.contains("k"))
      throw std::invalid_argument("config: methods entry missing 'k'");
    m.k = mj["k"].get<int>();
    if (m.k < (m.method == "cb" ? 1 : 2))
      throw std::invalid_argument("config: field 'k' too small for method '" +
                                  m.method + "'");
    c.methods.push_back(std::move(m));
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: parse error: ") + e.what());
  }
  return parse_run_config(j);
}

json to_json(const RunConfig& c) {
  json methods = json::array();
  for (const auto& m : c.methods)
    methods.push_back({{"method", m.method}, {"alpha", m.alpha}, {"k", m.k}});
  return json{{"schema", c.schema},
              {"scenario", c.scenario},
              {"n", c.n},
              {"sigma2", c.sigma2},
              {"methods", methods},
              {"replications", c.replications},
              {"seed", c.seed},
              {"workers", c.workers},
              {"oracle_n_mc", c.oracle_n_mc},
              {"output", c.output}};
}

}  // namespace antcv
