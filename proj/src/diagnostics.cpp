#include "dax/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "dax/ensemble.hpp"
#include "dax/errors.hpp"

namespace dax {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n != b.size() || n < 2) return kNan;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return kNan;
  return sab / std::sqrt(saa * sbb);
}

WindowSeries window_series(const AssimilationRun& run,
                           const std::vector<Eigen::VectorXd>& truth) {
  const std::vector<int> pos = run.endpoint_positions();
  const int n_win = static_cast<int>(pos.size());
  if (n_win < 2)
    throw InvalidInputError("window_series: need at least two windows for the correlation");

  WindowSeries ws;
  ws.sigma_w.reserve(n_win);
  ws.rmse_w.reserve(n_win);
  ws.gamma_w.reserve(n_win);

  std::vector<double> valid_sigma, valid_rmse;
  double gamma_sum = 0.0;
  int gamma_count = 0;
  double ss_spread = 0.0, ss_rmse = 0.0, sum_spread = 0.0, sum_rmse = 0.0;

  for (int w = 0; w < n_win; ++w) {
    const EnsembleMatrix& x = run.analyses[pos[w]];
    const int k = run.analysis_times[pos[w]];
    if (k >= static_cast<int>(truth.size()))
      throw InvalidInputError("window_series: truth trajectory too short");
    const EnsembleStats st = stats(x);
    const double n_state = static_cast<double>(x.rows());
    const double sigma = std::sqrt(st.covariance.trace() / n_state);
    const double rmse = (st.mean - truth[k]).norm() / std::sqrt(n_state);
    ws.sigma_w.push_back(sigma);
    ws.rmse_w.push_back(rmse);
    ss_spread += sigma * sigma;
    ss_rmse += rmse * rmse;
    sum_spread += sigma;
    sum_rmse += rmse;
    if (rmse > 0.0) {
      const double gamma = sigma / rmse;
      ws.gamma_w.push_back(gamma);
      gamma_sum += gamma;
      ++gamma_count;
      valid_sigma.push_back(sigma);
      valid_rmse.push_back(rmse);
    } else {
      ws.gamma_w.push_back(kNan);
    }
  }

  ws.gamma_bar = gamma_count > 0 ? gamma_sum / gamma_count : kNan;
  ws.rho = pearson(valid_sigma, valid_rmse);
  ws.spread_rms = std::sqrt(ss_spread / n_win);
  ws.rmse_rms = std::sqrt(ss_rmse / n_win);
  ws.spread_mean = sum_spread / n_win;
  ws.rmse_mean = sum_rmse / n_win;
  return ws;
}

void accumulate_ranks(const AssimilationRun& run, const std::vector<Eigen::VectorXd>& truth,
                      RngStream& rng, RankHistogram& hist, bool endpoints_only) {
  if (run.analyses.empty()) return;
  const int members = static_cast<int>(run.analyses.front().cols());
  if (hist.counts.empty()) hist.counts.assign(members + 1, 0);
  if (static_cast<int>(hist.counts.size()) != members + 1)
    throw InvalidInputError("accumulate_ranks: histogram bin count mismatch");

  std::vector<int> positions;
  if (endpoints_only) {
    positions = run.endpoint_positions();
  } else {
    positions.resize(run.analyses.size());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = static_cast<int>(i);
  }

  for (int p : positions) {
    const EnsembleMatrix& x = run.analyses[p];
    const int k = run.analysis_times[p];
    const Eigen::VectorXd& t = truth.at(k);
    for (int i = 0; i < x.rows(); ++i) {
      int below = 0;
      for (int j = 0; j < members; ++j) {
        if (x(i, j) < t[i]) {
          ++below;
        } else if (x(i, j) == t[i] && rng.uniform() < 0.5) {
          ++below;
        }
      }
      ++hist.counts[below];  // rank = below + 1
      ++hist.total;
    }
  }
}

std::pair<double, double> rank_stats(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total == 0) throw InvalidInputError("rank_stats: histogram is empty");
  const double bins = static_cast<double>(counts.size());
  const double expected = static_cast<double>(total) / bins;
  const double f_bar = 1.0 / bins;
  double chi2 = 0.0, var = 0.0;
  for (std::uint64_t c : counts) {
    const double o = static_cast<double>(c);
    chi2 += (o - expected) * (o - expected) / expected;
    const double f = o / static_cast<double>(total);
    var += (f - f_bar) * (f - f_bar);
  }
  var /= bins;  // population standard deviation over bins
  return {chi2, std::sqrt(var) / f_bar};
}

void finalize_rank_stats(RankHistogram& hist) {
  const auto [chi2, flatness] = rank_stats(hist.counts);
  hist.chi2 = chi2;
  hist.flatness = flatness;
}

BiasVarianceTable bias_variance(const std::vector<const AssimilationRun*>& trial_runs,
                                const std::vector<Eigen::VectorXd>& truth) {
  const int trials = static_cast<int>(trial_runs.size());
  if (trials < 2) throw InvalidInputError("bias_variance: need at least two trials");

  const std::vector<int> pos0 = trial_runs.front()->endpoint_positions();
  const int n_win = static_cast<int>(pos0.size());
  for (const AssimilationRun* run : trial_runs) {
    const std::vector<int> pos = run->endpoint_positions();
    if (static_cast<int>(pos.size()) != n_win)
      throw InvalidInputError("bias_variance: trials disagree on window count");
    for (int w = 0; w < n_win; ++w)
      if (run->analysis_times[pos[w]] != trial_runs.front()->analysis_times[pos0[w]])
        throw InvalidInputError("bias_variance: trials disagree on endpoint times");
  }

  BiasVarianceTable table;
  table.bias2_w.resize(n_win);
  table.var_w.resize(n_win);
  table.mse_w.resize(n_win);

  for (int w = 0; w < n_win; ++w) {
    std::vector<Eigen::VectorXd> means;
    means.reserve(trials);
    int k = 0;
    for (const AssimilationRun* run : trial_runs) {
      const std::vector<int> pos = run->endpoint_positions();
      k = run->analysis_times[pos[w]];
      means.push_back(stats(run->analyses[pos[w]]).mean);
    }
    Eigen::VectorXd center = Eigen::VectorXd::Zero(means.front().size());
    for (const auto& mu : means) center += mu;
    center /= static_cast<double>(trials);

    const double bias2 = (center - truth.at(k)).squaredNorm();
    double var = 0.0;
    for (const auto& mu : means) var += (mu - center).squaredNorm();
    var /= static_cast<double>(trials);

    table.bias2_w[w] = bias2;
    table.var_w[w] = var;
    table.mse_w[w] = bias2 + var;
    table.bias2 += bias2;
    table.variance += var;
    table.mse += bias2 + var;
  }
  table.bias2 /= n_win;
  table.variance /= n_win;
  table.mse /= n_win;
  table.bias2_over_mse = table.mse > 0.0 ? table.bias2 / table.mse : kNan;
  return table;
}

}  // namespace dax
