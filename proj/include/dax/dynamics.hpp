#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dax {

struct ModelParams {
  int n = 40;
  double forcing = 8.0;
  double dt = 0.01;
  double t_obs = 0.1;

  /// Number of integrator steps between consecutive observation times.
  int steps_per_obs() const;
  /// Throws if n < 4, dt <= 0, or t_obs is not an integer multiple of dt.
  void validate() const;
};

/// Cyclic advection-damping-forcing vector field. Component i evaluates to
/// (x_{i+1} - x_{i-2}) x_{i-1} - x_i + F with indices modulo n.
Eigen::VectorXd l96_rhs(const Eigen::VectorXd& x, const ModelParams& params);

/// Classical fourth-order Runge-Kutta update with step params.dt.
Eigen::VectorXd rk4_step(const Eigen::VectorXd& x, const ModelParams& params);

/// n_steps RK4 steps. Throws DivergenceError if any component exceeds 1e6
/// in magnitude or becomes non-finite.
Eigen::VectorXd propagate(const Eigen::VectorXd& x, int n_steps, const ModelParams& params);

Eigen::MatrixXd l96_jacobian(const Eigen::VectorXd& x, const ModelParams& params);

/// Jacobian of the discrete RK4 map at x (differentiate the discretization).
Eigen::MatrixXd rk4_step_jacobian(const Eigen::VectorXd& x, const ModelParams& params);

/// Linearized propagators M_1..M_L about a reference trajectory. M_ell maps a
/// perturbation at the window-initial time to the perturbation at the ell-th
/// observation time.
struct TangentLinearOperator {
  std::vector<Eigen::MatrixXd> matrices;
};

/// reference must hold L+1 states at consecutive observation times, starting
/// at the window-initial time.
TangentLinearOperator tlm_propagate(const std::vector<Eigen::VectorXd>& reference,
                                    int window_len, const ModelParams& params);

}  // namespace dax
