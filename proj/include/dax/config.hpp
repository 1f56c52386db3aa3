#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dax/filters.hpp"

namespace dax {

/// Stream tags for substream seed derivation (see mix_seed). Perturbation and
/// rank-tie streams are offset by the method index so methods never share a
/// stream.
namespace stream_tag {
constexpr std::uint64_t kTruthObs = 1;
constexpr std::uint64_t kInitEnsemble = 2;
constexpr std::uint64_t kPerturbations = 3;  // + method index
constexpr std::uint64_t kRankTies = 16;      // + method index
}  // namespace stream_tag

struct ExperimentConfig {
  // model and filter parameters
  int n = 40;
  int m = 20;
  int ensemble_size = 10;  // key: N
  int window_len = 5;      // key: L
  int n_windows = 50;      // key: W
  double sigma_obs = 1.5;
  double lambda_infl = 1.05;       // stochastic methods
  double lambda_infl_qpca = 1.00;  // deterministic method
  int kappa = 1;
  double dt = 0.01;
  double t_obs = 0.1;
  double forcing = 8.0;
  GainOptions gain;

  // experiment layout
  int n_trials = 5;
  std::vector<Method> methods = {Method::kSeqEnkf, Method::kFourdEnkf, Method::kQpcaEndcf};
  std::string output_dir = "out";
  std::uint64_t base_seed = 42;
  double sigma_init = 1.0;
  double spinup_time = 10.0;

  int total_obs_times() const { return window_len * n_windows; }
  ModelParams model_params() const;
  void validate() const;

  /// Per-method, per-trial filter configuration. The seed drives the
  /// observation-perturbation stream of that run only.
  FilterConfig filter_config(Method method, int trial) const;
};

/// Flat `key = value` text with `#` comments. Unknown keys are rejected.
/// Missing keys keep the baseline defaults above.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace dax
