#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dax/config.hpp"
#include "dax/diagnostics.hpp"
#include "dax/filters.hpp"

namespace dax {

struct TruthAndObs {
  std::vector<Eigen::VectorXd> truth;         // states at k = 0..K
  std::vector<Eigen::VectorXd> observations;  // z_k at k = 1..K (index k-1)
  std::uint64_t obs_hash = 0;
};

/// Spin up onto the attractor, record the truth at all observation times, and
/// synthesize noisy observations from the truth-observation stream. The same
/// truth and observations are shared by every trial and method, so trials
/// differ only through their initial-ensemble and perturbation draws.
TruthAndObs generate_truth_and_obs(const ExperimentConfig& cfg);

/// Initial ensemble for one trial: truth at time zero plus N(0, sigma_init^2 I)
/// member perturbations from the trial's init stream. Shared across methods
/// within the trial.
EnsembleMatrix initial_ensemble(const ExperimentConfig& cfg, const Eigen::VectorXd& truth0,
                                int trial);

struct TrialResult {
  Method method = Method::kSeqEnkf;
  int trial = 0;
  AssimilationRun run;
  WindowSeries series;  // valid only when usable
  bool usable = false;  // false when the trial diverged
};

struct MethodAggregate {
  Method method = Method::kSeqEnkf;
  int trials_used = 0;
  double spread_mean = 0.0, spread_std = 0.0;
  double rmse_mean = 0.0, rmse_std = 0.0;
  double gamma_bar_mean = 0.0, gamma_bar_std = 0.0;
  double rho_mean = 0.0, rho_std = 0.0;
  RankHistogram ranks;           // native analysis times, pooled over trials
  RankHistogram ranks_endpoint;  // window endpoints only, matched across methods
  BiasVarianceTable biasvar;     // valid only when has_biasvar
  bool has_biasvar = false;
};

struct ResultBundle {
  ExperimentConfig config;
  TruthAndObs data;
  std::vector<TrialResult> trials;  // method-major, then trial order
  std::vector<MethodAggregate> aggregates;
};

/// Runs every (method, trial) job, in parallel across jobs, and aggregates
/// deterministically. Diverged trials are excluded from aggregates with a
/// warning on stderr.
ResultBundle run_experiment(const ExperimentConfig& cfg);

/// Writes series.csv, summary.csv, ranks.csv, biasvar.csv, and
/// truth_obs_hash.txt under out_dir (created if needed).
void write_outputs(const ResultBundle& bundle, const std::string& out_dir);

void print_summary(const ResultBundle& bundle, std::ostream& out);

/// 17-significant-digit float formatting shared by all CSV writers.
std::string csv_float(double v);

}  // namespace dax
