#pragma once

#include <Eigen/Dense>

#include "dax/observation.hpp"

namespace dax {

/// Whitened forecast-observation residuals for one window, with their sample
/// mean, centered form, and covariance C_E = E_c E_c^T / (N - 1).
struct ResidualSet {
  Eigen::MatrixXd e;         // d x N
  Eigen::VectorXd e_bar;     // d
  Eigen::MatrixXd centered;  // d x N
  Eigen::MatrixXd cov;       // d x d, symmetric PSD, rank <= min(d, N-1)
};

/// E = R^(L)^{-1/2} (Z_stack - z_window 1^T).
ResidualSet residual_set(const Eigen::MatrixXd& z_stack, const Eigen::VectorXd& z_window,
                         const ObservationWindow& window);

/// Leading eigenmodes of the centered residual covariance. The retained rank
/// may be clamped below the request when C_E is numerically rank deficient
/// (eigenvalues <= 1e-12 * lambda_1 are treated as zero); kappa == 0 then
/// signals that no usable mode exists. Negative roundoff eigenvalues are
/// clamped to zero.
struct TruncatedBasis {
  int kappa = 0;               // effective retained rank
  Eigen::MatrixXd vectors;     // d x kappa, orthonormal columns
  Eigen::VectorXd values;      // kappa leading eigenvalues, nonincreasing
  Eigen::MatrixXd projector;   // d x d, vectors * vectors^T
};

TruncatedBasis truncated_basis(const ResidualSet& rs, int kappa);

/// Whitened correction -V_k V_k^T E. The coordinate map applies to the
/// uncentered residuals, so the mean mismatch is corrected only inside the
/// retained span.
Eigen::MatrixXd qpca_delta_white(const ResidualSet& rs, const TruncatedBasis& basis);

/// Observation-space increment: unwhiten(-V_k V_k^T E).
Eigen::MatrixXd qpca_increment(const ResidualSet& rs, const TruncatedBasis& basis,
                               const ObservationWindow& window);

}  // namespace dax
