#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dax/linalg.hpp"
#include "dax/rng.hpp"

namespace dax {

/// Synthetic Gaussian residual model with known population mean, covariance,
/// eigenpairs, and rank-kappa projector. Monte Carlo validators draw finite
/// samples from it and compare empirical quantities against exact ones.
struct GaussianResidualModel {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd sigma_sqrt;
  SymEig eig;  // population eigenpairs, descending
  int kappa = 1;

  int dim() const { return static_cast<int>(mu.size()); }
  /// lambda_kappa - lambda_{kappa+1}, with lambda_{d+1} := 0.
  double cutoff_gap() const;
  Eigen::MatrixXd population_projector() const;  // rank-kappa
  /// d x N sample with iid N(mu, sigma) columns.
  Eigen::MatrixXd sample(int n_members, RngStream& rng) const;

  static GaussianResidualModel make(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma,
                                    int kappa);
  /// Diagonal spectrum conjugated by a seeded random orthogonal basis; mu = 0.
  static GaussianResidualModel with_spectrum(const std::vector<double>& eigenvalues_desc,
                                             int kappa, std::uint64_t rotation_seed);
};

struct CheckReport {
  std::string name;
  bool passed = false;
  std::vector<std::string> lines;
};

/// Entrywise average of the sample covariance over replications must sit
/// within 4 standard errors of the population covariance.
CheckReport cov_unbiasedness_check(const GaussianResidualModel& model, int n_members, int reps,
                                   RngStream& rng);

/// Gaussian identity: E ||C_E - Sigma||_F^2 = ((tr Sigma)^2 + tr(Sigma^2)) / (N-1).
double wishart_frobenius_exact(const Eigen::MatrixXd& sigma, int n_members);
CheckReport wishart_frobenius_check(const GaussianResidualModel& model, int n_members, int reps,
                                    RngStream& rng);

/// Deterministic spectral bounds checked on every replication: eigenvalue
/// perturbations are bounded by ||C_E - Sigma||_2, and the rank-kappa
/// projector error by sqrt(2 kappa)/gap * ||C_E - Sigma||_2. Zero violations
/// tolerated; comparisons carry a small floating-point slack.
CheckReport eigen_perturbation_check(const GaussianResidualModel& model, int n_members, int reps,
                                     RngStream& rng);

/// Monte Carlo variance of the mean perturbation (1/N) sum_j K eps_j against
/// the exact value tr(K R K^T) / N, within 5 percent.
CheckReport enkf_perturbation_variance_check(const Eigen::MatrixXd& gain,
                                             const Eigen::MatrixXd& r_stacked, int n_members,
                                             int reps, RngStream& rng);

/// E ||e_bar - mu||^4 scales as 1/N^2: the ratio between estimates at N and
/// 2N members must fall in [3.0, 5.3] (ideal 4).
CheckReport sample_mean_fourth_moment_check(const GaussianResidualModel& model, int n_members,
                                            int reps, RngStream& rng);

}  // namespace dax
