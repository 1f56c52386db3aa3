#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dax/dynamics.hpp"
#include "dax/ensemble.hpp"
#include "dax/observation.hpp"
#include "dax/rng.hpp"

namespace dax {

enum class Method { kSeqEnkf = 0, kFourdEnkf = 1, kQpcaEndcf = 2 };

std::string method_name(Method method);
std::optional<Method> parse_method(const std::string& name);

struct FilterConfig {
  Method method = Method::kSeqEnkf;
  int n = 40;
  int m = 20;
  int ensemble_size = 10;
  int window_len = 5;   // L
  int n_windows = 50;   // W
  double sigma_obs = 1.5;
  double lambda_infl = 1.05;  // 1.00 for the deterministic method
  int kappa = 1;
  GainOptions gain;
  ModelParams model;
  std::uint64_t seed = 0;  // seeds the observation-perturbation stream

  int total_obs_times() const { return window_len * n_windows; }
  void validate() const;
};

/// Analyses recorded at a method's native analysis times: every observation
/// time for the sequential filter, window endpoints k_w = w*L for windowed
/// methods.
struct AssimilationRun {
  Method method = Method::kSeqEnkf;
  int window_len = 1;
  std::vector<int> analysis_times;         // global observation-time indices
  std::vector<EnsembleMatrix> analyses;    // one ensemble per analysis time
  std::vector<double> qpca_projected_residuals;  // per window, deterministic path only
  std::vector<int> qpca_effective_kappa;         // per window, deterministic path only
  std::uint64_t perturbation_draws = 0;    // raw RNG outputs consumed by the update
  std::uint64_t obs_hash = 0;              // fingerprint of the consumed observations
  bool diverged = false;
  int diverged_at = -1;                    // global index of the failed step

  /// Positions (into analyses) of the window-endpoint analyses k_w = w*L.
  std::vector<int> endpoint_positions() const;
};

/// One perturbed-observation analysis step. The forecast must already sit at
/// the observation time. Fresh perturbations ~ N(0, R) are drawn per member;
/// multiplicative inflation is applied about the analysis mean afterwards.
EnsembleMatrix seq_enkf_step(const EnsembleMatrix& forecast, const Eigen::VectorXd& z,
                             const ObsOperator& h, const Eigen::MatrixXd& r,
                             double lambda_infl, RngStream& rng);

/// Windowed stochastic update: propagate members through L observation times,
/// stack their predicted observations, update the endpoint ensemble with
/// per-member perturbed stacked innovations and gain P_xz (P_zz + R^(L))^{-1},
/// then inflate.
EnsembleMatrix fourd_enkf_window(const EnsembleMatrix& window_initial,
                                 const ObservationWindow& obs, const FilterConfig& cfg,
                                 RngStream& rng);

struct QpcaWindowResult {
  EnsembleMatrix analysis;
  double projected_residual_norm = 0.0;  // ||V_k^T (E + Delta_white)||_F
  int effective_kappa = 0;
  bool skipped = false;  // residual covariance had numerical rank zero
};

/// Deterministic windowed update: whiten residuals, project onto the leading
/// kappa eigenmodes of their centered covariance, unwhiten, and map to state
/// space through the data-consistent gain. Consumes no RNG draws.
QpcaWindowResult qpca_endcf_window(const EnsembleMatrix& window_initial,
                                   const ObservationWindow& obs, const FilterConfig& cfg);

/// Full cycling driver. Observations are indexed by global time k = 1..W*L
/// (observations[k-1]). A diverged trial is returned with `diverged` set and
/// the analyses completed so far.
AssimilationRun run_filter(const FilterConfig& cfg, const EnsembleMatrix& initial_ensemble,
                           const std::vector<Eigen::VectorXd>& observations);

}  // namespace dax
