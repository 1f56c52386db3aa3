#include "dax/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "dax/errors.hpp"
#include "dax/rng.hpp"

namespace dax {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for key '" + key + "': " + value);
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for key '" + key + "': " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("invalid seed for key '" + key + "': " + value);
  }
}

std::vector<Method> parse_methods(const std::string& value) {
  std::vector<Method> methods;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item == "all") {
      return {Method::kSeqEnkf, Method::kFourdEnkf, Method::kQpcaEndcf};
    }
    const auto method = parse_method(item);
    if (!method) throw ConfigError("unknown method '" + item + "' for key 'methods'");
    if (std::find(methods.begin(), methods.end(), *method) == methods.end())
      methods.push_back(*method);
  }
  if (methods.empty()) throw ConfigError("key 'methods' must name at least one method");
  return methods;
}

}  // namespace

ModelParams ExperimentConfig::model_params() const {
  ModelParams mp;
  mp.n = n;
  mp.forcing = forcing;
  mp.dt = dt;
  mp.t_obs = t_obs;
  return mp;
}

void ExperimentConfig::validate() const {
  try {
    model_params().validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string("invalid model parameters (keys n/dt/t_obs): ") + e.what());
  }
  if (m != ObsOperator::every_second(n).m())
    throw ConfigError("key 'm' must equal ceil(n/2) for the every-second observation layout");
  if (ensemble_size < 2) throw ConfigError("key 'N' must be >= 2");
  if (window_len < 1) throw ConfigError("key 'L' must be >= 1");
  if (n_windows < 1) throw ConfigError("key 'W' must be >= 1");
  if (!(sigma_obs > 0.0)) throw ConfigError("key 'sigma_obs' must be positive");
  if (lambda_infl < 1.0) throw ConfigError("key 'lambda_infl' must be >= 1");
  if (lambda_infl_qpca < 1.0) throw ConfigError("key 'lambda_infl_qpca' must be >= 1");
  const int kappa_cap = std::min(m * window_len, ensemble_size - 1);
  if (kappa < 1 || kappa > kappa_cap)
    throw ConfigError("key 'kappa' must be in [1, min(m*L, N-1)]");
  if (gain.reg == GainOptions::Regularization::kTikhonov && !(gain.tikhonov_eps > 0.0))
    throw ConfigError("key 'tikhonov_eps' must be positive");
  if (n_trials < 1) throw ConfigError("key 'n_trials' must be >= 1");
  if (methods.empty()) throw ConfigError("key 'methods' must name at least one method");
  if (sigma_init < 0.0) throw ConfigError("key 'sigma_init' must be nonnegative");
  if (spinup_time < 0.0) throw ConfigError("key 'spinup_time' must be nonnegative");
  if (output_dir.empty()) throw ConfigError("key 'output_dir' must not be empty");
}

FilterConfig ExperimentConfig::filter_config(Method method, int trial) const {
  FilterConfig fc;
  fc.method = method;
  fc.n = n;
  fc.m = m;
  fc.ensemble_size = ensemble_size;
  fc.window_len = window_len;
  fc.n_windows = n_windows;
  fc.sigma_obs = sigma_obs;
  fc.lambda_infl = method == Method::kQpcaEndcf ? lambda_infl_qpca : lambda_infl;
  fc.kappa = kappa;
  fc.gain = gain;
  fc.model = model_params();
  fc.seed = mix_seed(base_seed, static_cast<std::uint64_t>(trial),
                     stream_tag::kPerturbations + static_cast<std::uint64_t>(method));
  return fc;
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");

    if (key == "n") cfg.n = parse_int(key, value);
    else if (key == "m") cfg.m = parse_int(key, value);
    else if (key == "N") cfg.ensemble_size = parse_int(key, value);
    else if (key == "L") cfg.window_len = parse_int(key, value);
    else if (key == "W") cfg.n_windows = parse_int(key, value);
    else if (key == "sigma_obs") cfg.sigma_obs = parse_double(key, value);
    else if (key == "lambda_infl") cfg.lambda_infl = parse_double(key, value);
    else if (key == "lambda_infl_qpca") cfg.lambda_infl_qpca = parse_double(key, value);
    else if (key == "kappa") cfg.kappa = parse_int(key, value);
    else if (key == "dt") cfg.dt = parse_double(key, value);
    else if (key == "t_obs") cfg.t_obs = parse_double(key, value);
    else if (key == "forcing") cfg.forcing = parse_double(key, value);
    else if (key == "gain_reg") {
      if (value == "pinv") cfg.gain.reg = GainOptions::Regularization::kPinv;
      else if (value == "tikhonov") cfg.gain.reg = GainOptions::Regularization::kTikhonov;
      else throw ConfigError("key 'gain_reg' must be 'pinv' or 'tikhonov'");
    }
    else if (key == "tikhonov_eps") cfg.gain.tikhonov_eps = parse_double(key, value);
    else if (key == "pinv_rtol") cfg.gain.pinv_rtol = parse_double(key, value);
    else if (key == "n_trials") cfg.n_trials = parse_int(key, value);
    else if (key == "methods") cfg.methods = parse_methods(value);
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "seed") cfg.base_seed = parse_u64(key, value);
    else if (key == "sigma_init") cfg.sigma_init = parse_double(key, value);
    else if (key == "spinup_time") cfg.spinup_time = parse_double(key, value);
    else throw ConfigError("unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace dax
