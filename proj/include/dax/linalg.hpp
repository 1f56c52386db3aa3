#pragma once

#include <Eigen/Dense>

namespace dax {

/// Eigenpairs of a symmetric matrix in nonincreasing eigenvalue order.
/// Column i of `vectors` pairs with `values[i]`. Each eigenvector is
/// sign-normalized so its largest-magnitude component is positive, which
/// fixes the otherwise arbitrary eigenvector signs.
struct SymEig {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Input is symmetrized as (M + M^T)/2 before decomposition; asymmetry beyond
/// 1e-10 (relative to the largest entry) is rejected. Ties between equal
/// eigenvalues keep the solver's original ordering.
SymEig sym_eig_desc(const Eigen::MatrixXd& m);

/// Moore-Penrose pseudoinverse via SVD. Singular values below rtol * sigma_max
/// are treated as zero; rtol < 0 selects the default max(p, q) * eps.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rtol = -1.0);

struct SpdSqrtPair {
  Eigen::MatrixXd sqrt;
  Eigen::MatrixXd inv_sqrt;
};

/// Symmetric square root and inverse square root of an SPD matrix.
/// Exactly diagonal inputs reduce to elementwise sqrt and 1/sqrt.
SpdSqrtPair spd_sqrt_pair(const Eigen::MatrixXd& m);

/// Spectral norm of a symmetric matrix (largest absolute eigenvalue).
double sym_spectral_norm(const Eigen::MatrixXd& m);

}  // namespace dax
