#pragma once

#include <Eigen/Dense>

namespace dax {

/// Columns are members; rows are state (or observation) components.
using EnsembleMatrix = Eigen::MatrixXd;

struct EnsembleStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd anomalies;   // members minus mean, rows sum to ~0
  Eigen::MatrixXd covariance;  // anomalies * anomalies^T / (N - 1)
};

/// Sample mean, anomalies, and Bessel-corrected covariance. Requires N >= 2.
EnsembleStats stats(const EnsembleMatrix& members);

struct GainOptions {
  enum class Regularization { kPinv, kTikhonov };
  Regularization reg = Regularization::kPinv;
  double pinv_rtol = -1.0;     // < 0 selects the pinv default
  double tikhonov_eps = 1e-8;  // ridge added to P_zz when reg == kTikhonov
};

/// Data-consistent gain built from the window-endpoint ensemble and the
/// stacked predicted observations: K = P_xz pinv(P_zz) (or a Tikhonov
/// stabilized inverse).
struct DcGain {
  Eigen::MatrixXd p_xz;  // n x d
  Eigen::MatrixXd p_zz;  // d x d, symmetric PSD
  Eigen::MatrixXd gain;  // n x d
};

DcGain dc_gain(const EnsembleMatrix& x_end, const Eigen::MatrixXd& z_stack,
               const GainOptions& opts = {});

/// Multiplicative inflation about the ensemble mean. lambda_infl == 1 returns
/// the input unchanged.
EnsembleMatrix inflate(const EnsembleMatrix& members, double lambda_infl);

}  // namespace dax
