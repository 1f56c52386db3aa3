#include "dax/spectral.hpp"

#include <algorithm>

#include "dax/errors.hpp"
#include "dax/linalg.hpp"

namespace dax {

ResidualSet residual_set(const Eigen::MatrixXd& z_stack, const Eigen::VectorXd& z_window,
                         const ObservationWindow& window) {
  if (z_stack.rows() != window.dim() || z_window.size() != window.dim())
    throw InvalidInputError("residual_set: dimensions do not match the window");
  if (z_stack.cols() < 2) throw InvalidInputError("residual_set: need at least two members");
  ResidualSet rs;
  rs.e = whiten(window, z_stack.colwise() - z_window);
  rs.e_bar = rs.e.rowwise().mean();
  rs.centered = rs.e.colwise() - rs.e_bar;
  rs.cov = rs.centered * rs.centered.transpose() / static_cast<double>(z_stack.cols() - 1);
  rs.cov = 0.5 * (rs.cov + rs.cov.transpose()).eval();
  return rs;
}

TruncatedBasis truncated_basis(const ResidualSet& rs, int kappa) {
  const int d = static_cast<int>(rs.e.rows());
  const int members = static_cast<int>(rs.e.cols());
  const int rank_cap = std::min(d, members - 1);
  if (kappa < 1 || kappa > rank_cap)
    throw InvalidInputError("truncated_basis: kappa must be in [1, min(d, N-1)]");

  SymEig eig = sym_eig_desc(rs.cov);
  Eigen::VectorXd values = eig.values.cwiseMax(0.0);

  int numerical_rank = 0;
  if (values[0] > 0.0) {
    const double floor = 1e-12 * values[0];
    while (numerical_rank < d && values[numerical_rank] > floor) ++numerical_rank;
  }

  TruncatedBasis basis;
  basis.kappa = std::min(kappa, numerical_rank);
  basis.vectors = eig.vectors.leftCols(basis.kappa);
  basis.values = values.head(basis.kappa);
  basis.projector = basis.vectors * basis.vectors.transpose();
  if (basis.kappa == 0) basis.projector = Eigen::MatrixXd::Zero(d, d);
  basis.projector = 0.5 * (basis.projector + basis.projector.transpose()).eval();
  return basis;
}

Eigen::MatrixXd qpca_delta_white(const ResidualSet& rs, const TruncatedBasis& basis) {
  if (basis.kappa == 0) return Eigen::MatrixXd::Zero(rs.e.rows(), rs.e.cols());
  return -(basis.vectors * (basis.vectors.transpose() * rs.e));
}

Eigen::MatrixXd qpca_increment(const ResidualSet& rs, const TruncatedBasis& basis,
                               const ObservationWindow& window) {
  return unwhiten(window, qpca_delta_white(rs, basis));
}

}  // namespace dax
