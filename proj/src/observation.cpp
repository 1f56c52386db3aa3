#include "dax/observation.hpp"

#include <string>

#include "dax/errors.hpp"
#include "dax/linalg.hpp"

namespace dax {

void ObsOperator::validate() const {
  if (n < 1) throw InvalidInputError("ObsOperator: n must be positive");
  if (selected_indices.empty()) throw InvalidInputError("ObsOperator: no selected indices");
  int prev = -1;
  for (int idx : selected_indices) {
    if (idx <= prev || idx >= n)
      throw InvalidInputError("ObsOperator: indices must be strictly increasing in [0, n)");
    prev = idx;
  }
}

ObsOperator ObsOperator::every_second(int n) {
  ObsOperator h;
  h.n = n;
  for (int i = 0; i < n; i += 2) h.selected_indices.push_back(i);
  return h;
}

Eigen::VectorXd observe(const ObsOperator& h, const Eigen::VectorXd& x) {
  if (static_cast<int>(x.size()) != h.n)
    throw InvalidInputError("observe: state length does not match operator");
  Eigen::VectorXd z(h.m());
  for (int j = 0; j < h.m(); ++j) z[j] = x[h.selected_indices[j]];
  return z;
}

Eigen::MatrixXd observe_members(const ObsOperator& h, const Eigen::MatrixXd& members) {
  if (static_cast<int>(members.rows()) != h.n)
    throw InvalidInputError("observe_members: state dimension does not match operator");
  Eigen::MatrixXd z(h.m(), members.cols());
  for (int j = 0; j < h.m(); ++j) z.row(j) = members.row(h.selected_indices[j]);
  return z;
}

Eigen::MatrixXd obs_matrix(const ObsOperator& h) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(h.m(), h.n);
  for (int j = 0; j < h.m(); ++j) m(j, h.selected_indices[j]) = 1.0;
  return m;
}

Eigen::VectorXd synthesize_obs(const ObsOperator& h, const Eigen::VectorXd& x_true,
                               double sigma_obs, RngStream& rng) {
  if (sigma_obs < 0.0) throw InvalidInputError("synthesize_obs: sigma_obs must be nonnegative");
  Eigen::VectorXd z = observe(h, x_true);
  if (sigma_obs == 0.0) return z;
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] += sigma_obs * rng.normal();
  return z;
}

namespace {

ObservationWindow stack_impl(const std::vector<Eigen::VectorXd>& obs) {
  if (obs.empty()) throw InvalidInputError("stack_window: need at least one observation");
  const int m = static_cast<int>(obs.front().size());
  const int len = static_cast<int>(obs.size());
  ObservationWindow w;
  w.per_time = obs;
  w.stacked.resize(static_cast<Eigen::Index>(m) * len);
  for (int ell = 0; ell < len; ++ell) {
    if (static_cast<int>(obs[ell].size()) != m)
      throw InvalidInputError("stack_window: observation length mismatch at position " +
                              std::to_string(ell));
    w.stacked.segment(static_cast<Eigen::Index>(ell) * m, m) = obs[ell];
  }
  return w;
}

}  // namespace

ObservationWindow stack_window(const std::vector<Eigen::VectorXd>& obs, double sigma_obs) {
  if (sigma_obs < 0.0) throw InvalidInputError("stack_window: sigma_obs must be nonnegative");
  ObservationWindow w = stack_impl(obs);
  w.sigma_obs = sigma_obs;
  return w;
}

ObservationWindow stack_window(const std::vector<Eigen::VectorXd>& obs,
                               const Eigen::MatrixXd& r_per_time) {
  ObservationWindow w = stack_impl(obs);
  const int m = static_cast<int>(obs.front().size());
  if (r_per_time.rows() != m || r_per_time.cols() != m)
    throw InvalidInputError("stack_window: r_per_time must be m x m");
  const int len = static_cast<int>(obs.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(w.dim(), w.dim());
  for (int ell = 0; ell < len; ++ell)
    r.block(static_cast<Eigen::Index>(ell) * m, static_cast<Eigen::Index>(ell) * m, m, m) =
        r_per_time;
  w.r_general = std::move(r);
  return w;
}

Eigen::MatrixXd ObservationWindow::r_stacked() const {
  if (r_general) return *r_general;
  return sigma_obs * sigma_obs * Eigen::MatrixXd::Identity(dim(), dim());
}

Eigen::MatrixXd whiten(const ObservationWindow& w, const Eigen::MatrixXd& d) {
  if (d.rows() != w.dim())
    throw InvalidInputError("whiten: row count does not match window dimension");
  if (w.r_general) return spd_sqrt_pair(*w.r_general).inv_sqrt * d;
  if (!(w.sigma_obs > 0.0)) throw NotSpdError("whiten: sigma_obs must be positive");
  return d / w.sigma_obs;
}

Eigen::MatrixXd unwhiten(const ObservationWindow& w, const Eigen::MatrixXd& delta_white) {
  if (delta_white.rows() != w.dim())
    throw InvalidInputError("unwhiten: row count does not match window dimension");
  if (w.r_general) return spd_sqrt_pair(*w.r_general).sqrt * delta_white;
  if (!(w.sigma_obs > 0.0)) throw NotSpdError("unwhiten: sigma_obs must be positive");
  return w.sigma_obs * delta_white;
}

Eigen::MatrixXd stacked_operator(const ObsOperator& h, const TangentLinearOperator& tlm) {
  const int len = static_cast<int>(tlm.matrices.size());
  if (len == 0) throw InvalidInputError("stacked_operator: empty tangent linear operator");
  const Eigen::MatrixXd hd = obs_matrix(h);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(h.m()) * len, h.n);
  for (int ell = 0; ell < len; ++ell)
    out.middleRows(static_cast<Eigen::Index>(ell) * h.m(), h.m()) = hd * tlm.matrices[ell];
  return out;
}

}  // namespace dax
