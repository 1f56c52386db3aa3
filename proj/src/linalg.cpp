#include "dax/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "dax/errors.hpp"

namespace dax {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* op) {
  if (m.size() == 0) throw InvalidInputError(std::string(op) + ": empty matrix");
  if (!m.allFinite()) throw InvalidInputError(std::string(op) + ": non-finite entries");
}

void require_symmetric(const Eigen::MatrixXd& m, const char* op) {
  if (m.rows() != m.cols()) throw InvalidInputError(std::string(op) + ": matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw InvalidInputError(std::string(op) + ": matrix not symmetric within tolerance");
}

}  // namespace

SymEig sym_eig_desc(const Eigen::MatrixXd& m) {
  require_finite(m, "sym_eig_desc");
  require_symmetric(m, "sym_eig_desc");
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw InvalidInputError("sym_eig_desc: eigensolver did not converge");

  const Eigen::VectorXd& asc_values = solver.eigenvalues();
  const Eigen::MatrixXd& asc_vectors = solver.eigenvectors();
  const int p = static_cast<int>(asc_values.size());

  // Stable sort keeps the solver's order among exactly equal eigenvalues.
  std::vector<int> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return asc_values[a] > asc_values[b]; });

  SymEig out;
  out.values.resize(p);
  out.vectors.resize(p, p);
  for (int i = 0; i < p; ++i) {
    out.values[i] = asc_values[order[i]];
    Eigen::VectorXd v = asc_vectors.col(order[i]);
    int lead = 0;
    for (int r = 1; r < p; ++r)
      if (std::abs(v[r]) > std::abs(v[lead])) lead = r;
    if (v[lead] < 0.0) v = -v;
    out.vectors.col(i) = v;
  }
  return out;
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rtol) {
  require_finite(m, "pinv");
  if (rtol < 0.0)
    rtol = static_cast<double>(std::max(m.rows(), m.cols())) *
           std::numeric_limits<double>::epsilon();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  const double cutoff = rtol * smax;

  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > 0.0 && sv[i] >= cutoff) inv_sv[i] = 1.0 / sv[i];

  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

SpdSqrtPair spd_sqrt_pair(const Eigen::MatrixXd& m) {
  require_finite(m, "spd_sqrt_pair");
  require_symmetric(m, "spd_sqrt_pair");
  const int p = static_cast<int>(m.rows());

  if (m.isDiagonal(0.0)) {
    Eigen::VectorXd d = m.diagonal();
    if ((d.array() <= 0.0).any())
      throw NotSpdError("spd_sqrt_pair: nonpositive diagonal entry");
    SpdSqrtPair out;
    out.sqrt = d.array().sqrt().matrix().asDiagonal();
    out.inv_sqrt = d.array().sqrt().inverse().matrix().asDiagonal();
    return out;
  }

  const SymEig eig = sym_eig_desc(m);
  if (eig.values[p - 1] <= 0.0)
    throw NotSpdError("spd_sqrt_pair: matrix not positive definite");

  const Eigen::VectorXd roots = eig.values.array().sqrt();
  SpdSqrtPair out;
  out.sqrt = eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
  out.inv_sqrt =
      eig.vectors * roots.array().inverse().matrix().asDiagonal() * eig.vectors.transpose();
  out.sqrt = 0.5 * (out.sqrt + out.sqrt.transpose()).eval();
  out.inv_sqrt = 0.5 * (out.inv_sqrt + out.inv_sqrt.transpose()).eval();
  return out;
}

double sym_spectral_norm(const Eigen::MatrixXd& m) {
  const SymEig eig = sym_eig_desc(m);
  return std::max(std::abs(eig.values[0]), std::abs(eig.values[eig.values.size() - 1]));
}

}  // namespace dax
