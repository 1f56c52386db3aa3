#include "dax/ensemble.hpp"

#include "dax/errors.hpp"
#include "dax/linalg.hpp"

namespace dax {

EnsembleStats stats(const EnsembleMatrix& members) {
  const Eigen::Index count = members.cols();
  if (count < 2) throw InvalidInputError("stats: need at least two members");
  if (!members.allFinite()) throw InvalidInputError("stats: non-finite entries");
  EnsembleStats s;
  s.mean = members.rowwise().mean();
  s.anomalies = members.colwise() - s.mean;
  s.covariance = s.anomalies * s.anomalies.transpose() / static_cast<double>(count - 1);
  s.covariance = 0.5 * (s.covariance + s.covariance.transpose()).eval();
  return s;
}

DcGain dc_gain(const EnsembleMatrix& x_end, const Eigen::MatrixXd& z_stack,
               const GainOptions& opts) {
  if (x_end.cols() != z_stack.cols())
    throw InvalidInputError("dc_gain: member counts differ between state and observations");
  const double denom = static_cast<double>(x_end.cols() - 1);
  const EnsembleStats sx = stats(x_end);
  const EnsembleStats sz = stats(z_stack);

  DcGain g;
  g.p_xz = sx.anomalies * sz.anomalies.transpose() / denom;
  g.p_zz = sz.covariance;
  if (opts.reg == GainOptions::Regularization::kTikhonov) {
    const Eigen::MatrixXd ridge =
        g.p_zz + opts.tikhonov_eps * Eigen::MatrixXd::Identity(g.p_zz.rows(), g.p_zz.cols());
    Eigen::LLT<Eigen::MatrixXd> llt(ridge);
    if (llt.info() != Eigen::Success)
      throw InvalidInputError("dc_gain: Tikhonov-regularized covariance is not SPD");
    g.gain = llt.solve(g.p_xz.transpose()).transpose();
  } else {
    g.gain = g.p_xz * pinv(g.p_zz, opts.pinv_rtol);
  }
  return g;
}

EnsembleMatrix inflate(const EnsembleMatrix& members, double lambda_infl) {
  if (lambda_infl < 1.0) throw InvalidInputError("inflate: lambda_infl must be >= 1");
  if (lambda_infl == 1.0) return members;
  const EnsembleStats s = stats(members);
  return (lambda_infl * s.anomalies).colwise() + s.mean;
}

}  // namespace dax
