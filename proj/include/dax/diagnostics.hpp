#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "dax/filters.hpp"
#include "dax/rng.hpp"

namespace dax {

/// Per-window calibration series evaluated at window endpoints. gamma_w is NaN
/// where RMSE_w is zero; such windows are excluded from gamma_bar and rho.
struct WindowSeries {
  std::vector<double> sigma_w;
  std::vector<double> rmse_w;
  std::vector<double> gamma_w;
  double gamma_bar = 0.0;
  double rho = 0.0;  // Pearson correlation between spread and RMSE series
  double spread_rms = 0.0;  // root-mean-of-squares aggregate, headline value
  double rmse_rms = 0.0;
  double spread_mean = 0.0;  // plain per-window means, emitted alongside
  double rmse_mean = 0.0;
};

WindowSeries window_series(const AssimilationRun& run,
                           const std::vector<Eigen::VectorXd>& truth);

double pearson(const std::vector<double>& a, const std::vector<double>& b);

struct RankHistogram {
  std::vector<std::uint64_t> counts;  // N+1 bins; counts[r-1] holds rank r
  std::uint64_t total = 0;
  double chi2 = 0.0;
  double flatness = 0.0;
};

/// Rank of the truth within each analysis ensemble, per state component, at
/// the run's native analysis times (or window endpoints only when requested).
/// Ties against members are broken by a fair coin from rng.
void accumulate_ranks(const AssimilationRun& run, const std::vector<Eigen::VectorXd>& truth,
                      RngStream& rng, RankHistogram& hist, bool endpoints_only = false);

/// chi-squared against the uniform histogram and the normalized frequency
/// standard deviation (flatness).
std::pair<double, double> rank_stats(const std::vector<std::uint64_t>& counts);

void finalize_rank_stats(RankHistogram& hist);

/// Across-trial decomposition of the window-endpoint analysis-mean error into
/// squared bias and variance. Norms are total (summed over components); the
/// variance divisor is 1/N_trial so mse_w == bias2_w + var_w holds exactly.
struct BiasVarianceTable {
  std::vector<double> bias2_w;
  std::vector<double> var_w;
  std::vector<double> mse_w;
  double bias2 = 0.0;     // time averages over windows
  double variance = 0.0;
  double mse = 0.0;
  double bias2_over_mse = 0.0;
};

/// All runs must come from trials sharing the same truth and observations and
/// must expose identical endpoint times. Requires at least two trials.
BiasVarianceTable bias_variance(const std::vector<const AssimilationRun*>& trial_runs,
                                const std::vector<Eigen::VectorXd>& truth);

}  // namespace dax
