#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dax/dynamics.hpp"
#include "dax/rng.hpp"

namespace dax {

/// Linear selector that extracts a fixed subset of state components.
struct ObsOperator {
  int n = 0;
  std::vector<int> selected_indices;  // strictly increasing, in [0, n)

  int m() const { return static_cast<int>(selected_indices.size()); }
  void validate() const;

  /// Every second component starting at index 0 (0, 2, 4, ...).
  static ObsOperator every_second(int n);
};

Eigen::VectorXd observe(const ObsOperator& h, const Eigen::VectorXd& x);

/// Column-wise observe; members are columns.
Eigen::MatrixXd observe_members(const ObsOperator& h, const Eigen::MatrixXd& members);

/// Dense m x n 0/1 matrix form of the selector.
Eigen::MatrixXd obs_matrix(const ObsOperator& h);

/// Noisy observation: observe(h, x) plus sigma_obs * iid standard normals,
/// drawn component 0..m-1 in order.
Eigen::VectorXd synthesize_obs(const ObsOperator& h, const Eigen::VectorXd& x_true,
                               double sigma_obs, RngStream& rng);

/// L per-time observations stacked into a single vector of length d = m*L,
/// with the stacked error covariance R^(L). The isotropic case stores only
/// sigma_obs; a general SPD R^(L) is kept explicitly.
struct ObservationWindow {
  std::vector<Eigen::VectorXd> per_time;
  Eigen::VectorXd stacked;
  double sigma_obs = 0.0;
  std::optional<Eigen::MatrixXd> r_general;

  int dim() const { return static_cast<int>(stacked.size()); }
  Eigen::MatrixXd r_stacked() const;
};

ObservationWindow stack_window(const std::vector<Eigen::VectorXd>& obs, double sigma_obs);

/// General per-time error covariance; R^(L) is block diagonal with r_per_time
/// repeated L times.
ObservationWindow stack_window(const std::vector<Eigen::VectorXd>& obs,
                               const Eigen::MatrixXd& r_per_time);

/// Scale columns by R^(L)^{-1/2}; scalar division by sigma_obs in the
/// isotropic case.
Eigen::MatrixXd whiten(const ObservationWindow& w, const Eigen::MatrixXd& d);

/// Inverse transform, R^(L)^{1/2} times the input.
Eigen::MatrixXd unwhiten(const ObservationWindow& w, const Eigen::MatrixXd& delta_white);

/// Stacked linear map from a window-initial perturbation to the stacked
/// observation perturbation: rows [H M_1; ...; H M_L].
Eigen::MatrixXd stacked_operator(const ObsOperator& h, const TangentLinearOperator& tlm);

}  // namespace dax
