#include "dax/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <limits>

#include "dax/errors.hpp"
#include "dax/hashing.hpp"
#include "dax/rng.hpp"

namespace dax {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct MeanStd {
  double mean = kNan;
  double std = kNan;
};

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  const int count = static_cast<int>(values.size());
  if (count == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / count;
  if (count < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / (count - 1));
  return out;
}

}  // namespace

TruthAndObs generate_truth_and_obs(const ExperimentConfig& cfg) {
  const ModelParams mp = cfg.model_params();
  const int total = cfg.total_obs_times();
  const int steps = mp.steps_per_obs();

  Eigen::VectorXd x = Eigen::VectorXd::Constant(cfg.n, cfg.forcing);
  x[0] += 0.01;  // nudge off the fixed point, then spin up onto the attractor
  const int spinup_steps = static_cast<int>(std::lround(cfg.spinup_time / mp.dt));
  x = propagate(x, spinup_steps, mp);

  TruthAndObs data;
  data.truth.reserve(total + 1);
  data.truth.push_back(x);
  for (int k = 1; k <= total; ++k) {
    x = propagate(x, steps, mp);
    data.truth.push_back(x);
  }

  const ObsOperator h = ObsOperator::every_second(cfg.n);
  RngStream obs_rng(mix_seed(cfg.base_seed, 0, stream_tag::kTruthObs));
  Fnv1a hasher;
  data.observations.reserve(total);
  for (int k = 1; k <= total; ++k) {
    data.observations.push_back(synthesize_obs(h, data.truth[k], cfg.sigma_obs, obs_rng));
    hasher.add_vector(data.observations.back());
  }
  data.obs_hash = hasher.value();
  return data;
}

EnsembleMatrix initial_ensemble(const ExperimentConfig& cfg, const Eigen::VectorXd& truth0,
                                int trial) {
  RngStream rng(mix_seed(cfg.base_seed, static_cast<std::uint64_t>(trial),
                         stream_tag::kInitEnsemble));
  EnsembleMatrix members =
      cfg.sigma_init * rng.normal_matrix(cfg.n, cfg.ensemble_size);
  members.colwise() += truth0;
  return members;
}

ResultBundle run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultBundle bundle;
  bundle.config = cfg;
  bundle.data = generate_truth_and_obs(cfg);

  struct Job {
    Method method;
    int trial;
  };
  std::vector<Job> jobs;
  for (Method method : cfg.methods)
    for (int t = 0; t < cfg.n_trials; ++t) jobs.push_back({method, t});

  auto run_one = [&](const Job& job) {
    TrialResult result;
    result.method = job.method;
    result.trial = job.trial;
    const EnsembleMatrix x0 = initial_ensemble(cfg, bundle.data.truth[0], job.trial);
    result.run = run_filter(cfg.filter_config(job.method, job.trial), x0,
                            bundle.data.observations);
    result.usable = !result.run.diverged;
    if (result.usable) result.series = window_series(result.run, bundle.data.truth);
    return result;
  };

  std::vector<std::future<TrialResult>> futures;
  futures.reserve(jobs.size());
  for (const Job& job : jobs)
    futures.push_back(std::async(std::launch::async, run_one, job));
  bundle.trials.reserve(jobs.size());
  for (auto& f : futures) bundle.trials.push_back(f.get());

  for (Method method : cfg.methods) {
    MethodAggregate agg;
    agg.method = method;

    std::vector<double> spreads, rmses, gammas, rhos;
    std::vector<const AssimilationRun*> usable_runs;
    for (const TrialResult& tr : bundle.trials) {
      if (tr.method != method) continue;
      if (!tr.usable) {
        std::cerr << "warning: " << method_name(method) << " trial " << tr.trial
                  << " diverged at observation time " << tr.run.diverged_at
                  << "; excluded from aggregates\n";
        continue;
      }
      spreads.push_back(tr.series.spread_rms);
      rmses.push_back(tr.series.rmse_rms);
      gammas.push_back(tr.series.gamma_bar);
      rhos.push_back(tr.series.rho);
      usable_runs.push_back(&tr.run);

      RngStream tie_rng(mix_seed(cfg.base_seed, static_cast<std::uint64_t>(tr.trial),
                                 stream_tag::kRankTies + static_cast<std::uint64_t>(method)));
      accumulate_ranks(tr.run, bundle.data.truth, tie_rng, agg.ranks);
      RngStream tie_rng_ep(mix_seed(cfg.base_seed, static_cast<std::uint64_t>(tr.trial),
                                    stream_tag::kRankTies + 8 +
                                        static_cast<std::uint64_t>(method)));
      accumulate_ranks(tr.run, bundle.data.truth, tie_rng_ep, agg.ranks_endpoint, true);
    }
    agg.trials_used = static_cast<int>(usable_runs.size());

    const MeanStd spread = mean_std(spreads), rmse = mean_std(rmses);
    const MeanStd gamma = mean_std(gammas), rho = mean_std(rhos);
    agg.spread_mean = spread.mean;
    agg.spread_std = spread.std;
    agg.rmse_mean = rmse.mean;
    agg.rmse_std = rmse.std;
    agg.gamma_bar_mean = gamma.mean;
    agg.gamma_bar_std = gamma.std;
    agg.rho_mean = rho.mean;
    agg.rho_std = rho.std;

    if (agg.trials_used > 0) {
      finalize_rank_stats(agg.ranks);
      finalize_rank_stats(agg.ranks_endpoint);
    }
    if (agg.trials_used >= 2) {
      agg.biasvar = bias_variance(usable_runs, bundle.data.truth);
      agg.has_biasvar = true;
    }
    bundle.aggregates.push_back(std::move(agg));
  }
  return bundle;
}

std::string csv_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_outputs(const ResultBundle& bundle, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const ExperimentConfig& cfg = bundle.config;

  {
    std::ofstream out(fs::path(out_dir) / "series.csv");
    out << "method,trial,window,k_w,sigma_w,rmse_w,gamma_w\n";
    for (const TrialResult& tr : bundle.trials) {
      if (!tr.usable) continue;
      for (std::size_t w = 0; w < tr.series.sigma_w.size(); ++w) {
        out << method_name(tr.method) << ',' << tr.trial + 1 << ',' << w + 1 << ','
            << (w + 1) * cfg.window_len << ',' << csv_float(tr.series.sigma_w[w]) << ','
            << csv_float(tr.series.rmse_w[w]) << ',' << csv_float(tr.series.gamma_w[w]) << '\n';
      }
    }
  }

  {
    std::ofstream out(fs::path(out_dir) / "summary.csv");
    out << "method,spread_mean,spread_std,rmse_mean,rmse_std,"
           "gamma_bar_mean,gamma_bar_std,rho_mean,rho_std\n";
    for (const MethodAggregate& agg : bundle.aggregates) {
      out << method_name(agg.method) << ',' << csv_float(agg.spread_mean) << ','
          << csv_float(agg.spread_std) << ',' << csv_float(agg.rmse_mean) << ','
          << csv_float(agg.rmse_std) << ',' << csv_float(agg.gamma_bar_mean) << ','
          << csv_float(agg.gamma_bar_std) << ',' << csv_float(agg.rho_mean) << ','
          << csv_float(agg.rho_std) << '\n';
    }
  }

  {
    std::ofstream out(fs::path(out_dir) / "ranks.csv");
    out << "method,rank_bin,count,total,chi2,flatness\n";
    for (const MethodAggregate& agg : bundle.aggregates) {
      if (agg.trials_used == 0) continue;
      for (std::size_t b = 0; b < agg.ranks.counts.size(); ++b) {
        out << method_name(agg.method) << ',' << b + 1 << ',' << agg.ranks.counts[b] << ','
            << agg.ranks.total << ',' << csv_float(agg.ranks.chi2) << ','
            << csv_float(agg.ranks.flatness) << '\n';
      }
    }
  }

  {
    std::ofstream out(fs::path(out_dir) / "biasvar.csv");
    out << "method,window,bias2,variance,mse\n";
    for (const MethodAggregate& agg : bundle.aggregates) {
      if (!agg.has_biasvar) continue;
      const BiasVarianceTable& bv = agg.biasvar;
      for (std::size_t w = 0; w < bv.bias2_w.size(); ++w) {
        out << method_name(agg.method) << ',' << w + 1 << ',' << csv_float(bv.bias2_w[w]) << ','
            << csv_float(bv.var_w[w]) << ',' << csv_float(bv.mse_w[w]) << '\n';
      }
      out << method_name(agg.method) << ",avg," << csv_float(bv.bias2) << ','
          << csv_float(bv.variance) << ',' << csv_float(bv.mse) << '\n';
    }
  }

  {
    std::ofstream out(fs::path(out_dir) / "truth_obs_hash.txt");
    out << "trial,method,obs_hash\n";
    for (const TrialResult& tr : bundle.trials) {
      char hex[32];
      std::snprintf(hex, sizeof hex, "%016llx",
                    static_cast<unsigned long long>(tr.run.obs_hash));
      out << tr.trial + 1 << ',' << method_name(tr.method) << ',' << hex << '\n';
    }
  }
}

void print_summary(const ResultBundle& bundle, std::ostream& out) {
  out << std::left << std::setw(12) << "method" << std::setw(20) << "spread" << std::setw(20)
      << "rmse" << std::setw(20) << "gamma_bar" << std::setw(20) << "rho" << "trials\n";
  auto cell = [](double mean, double std) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f +- %.3f", mean, std);
    return std::string(buf);
  };
  for (const MethodAggregate& agg : bundle.aggregates) {
    out << std::left << std::setw(12) << method_name(agg.method) << std::setw(20)
        << cell(agg.spread_mean, agg.spread_std) << std::setw(20)
        << cell(agg.rmse_mean, agg.rmse_std) << std::setw(20)
        << cell(agg.gamma_bar_mean, agg.gamma_bar_std) << std::setw(20)
        << cell(agg.rho_mean, agg.rho_std) << agg.trials_used << "\n";
  }
}

}  // namespace dax
