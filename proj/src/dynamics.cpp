#include "dax/dynamics.hpp"

#include <cmath>
#include <string>

#include "dax/errors.hpp"

namespace dax {

namespace {
constexpr double kDivergenceThreshold = 1e6;
}

int ModelParams::steps_per_obs() const {
  return static_cast<int>(std::lround(t_obs / dt));
}

void ModelParams::validate() const {
  if (n < 4) throw InvalidInputError("n must be at least 4");
  if (!(dt > 0.0)) throw InvalidInputError("dt must be positive");
  if (!(t_obs > 0.0)) throw InvalidInputError("t_obs must be positive");
  const int steps = steps_per_obs();
  if (steps < 1 || std::abs(steps * dt - t_obs) > 1e-9)
    throw InvalidInputError("t_obs must be an integer multiple of dt");
}

Eigen::VectorXd l96_rhs(const Eigen::VectorXd& x, const ModelParams& params) {
  const int n = static_cast<int>(x.size());
  if (n != params.n)
    throw InvalidInputError("l96_rhs: state length does not match params.n");
  Eigen::VectorXd dx(n);
  for (int i = 0; i < n; ++i) {
    const int ip1 = (i + 1) % n;
    const int im1 = (i + n - 1) % n;
    const int im2 = (i + n - 2) % n;
    dx[i] = (x[ip1] - x[im2]) * x[im1] - x[i] + params.forcing;
  }
  return dx;
}

Eigen::VectorXd rk4_step(const Eigen::VectorXd& x, const ModelParams& params) {
  if (!x.allFinite()) throw DivergenceError("rk4_step: non-finite state");
  const double dt = params.dt;
  const Eigen::VectorXd k1 = l96_rhs(x, params);
  const Eigen::VectorXd k2 = l96_rhs(x + (0.5 * dt) * k1, params);
  const Eigen::VectorXd k3 = l96_rhs(x + (0.5 * dt) * k2, params);
  const Eigen::VectorXd k4 = l96_rhs(x + dt * k3, params);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd propagate(const Eigen::VectorXd& x, int n_steps, const ModelParams& params) {
  if (n_steps < 0) throw InvalidInputError("propagate: n_steps must be nonnegative");
  Eigen::VectorXd cur = x;
  for (int s = 0; s < n_steps; ++s) {
    cur = rk4_step(cur, params);
    if (!cur.allFinite() || cur.cwiseAbs().maxCoeff() > kDivergenceThreshold)
      throw DivergenceError("propagate: trajectory diverged at step " + std::to_string(s + 1));
  }
  return cur;
}

Eigen::MatrixXd l96_jacobian(const Eigen::VectorXd& x, const ModelParams& params) {
  const int n = static_cast<int>(x.size());
  if (n != params.n)
    throw InvalidInputError("l96_jacobian: state length does not match params.n");
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int ip1 = (i + 1) % n;
    const int im1 = (i + n - 1) % n;
    const int im2 = (i + n - 2) % n;
    jac(i, im1) += x[ip1] - x[im2];
    jac(i, ip1) += x[im1];
    jac(i, im2) += -x[im1];
    jac(i, i) += -1.0;
  }
  return jac;
}

Eigen::MatrixXd rk4_step_jacobian(const Eigen::VectorXd& x, const ModelParams& params) {
  const int n = static_cast<int>(x.size());
  const double dt = params.dt;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

  const Eigen::VectorXd k1 = l96_rhs(x, params);
  const Eigen::MatrixXd a1 = l96_jacobian(x, params);
  const Eigen::VectorXd x2 = x + (0.5 * dt) * k1;
  const Eigen::VectorXd k2 = l96_rhs(x2, params);
  const Eigen::MatrixXd a2 = l96_jacobian(x2, params) * (id + (0.5 * dt) * a1);
  const Eigen::VectorXd x3 = x + (0.5 * dt) * k2;
  const Eigen::VectorXd k3 = l96_rhs(x3, params);
  const Eigen::MatrixXd a3 = l96_jacobian(x3, params) * (id + (0.5 * dt) * a2);
  const Eigen::VectorXd x4 = x + dt * k3;
  const Eigen::MatrixXd a4 = l96_jacobian(x4, params) * (id + dt * a3);

  return id + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
}

TangentLinearOperator tlm_propagate(const std::vector<Eigen::VectorXd>& reference,
                                    int window_len, const ModelParams& params) {
  if (static_cast<int>(reference.size()) != window_len + 1)
    throw InvalidInputError("tlm_propagate: reference trajectory must hold L+1 states");
  const int steps = params.steps_per_obs();
  TangentLinearOperator tlm;
  tlm.matrices.reserve(window_len);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(params.n, params.n);
  for (int ell = 1; ell <= window_len; ++ell) {
    Eigen::VectorXd cur = reference[ell - 1];
    for (int s = 0; s < steps; ++s) {
      acc = (rk4_step_jacobian(cur, params) * acc).eval();
      cur = rk4_step(cur, params);
    }
    tlm.matrices.push_back(acc);
  }
  return tlm;
}

}  // namespace dax
