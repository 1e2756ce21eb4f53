#pragma once

#include <functional>

#include <Eigen/Dense>

namespace rloc {

/// Residual callback: fills r(x) and, when `jacobian` is non-null, dr/dx.
using ResidualFunction = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& residual,
                                            Eigen::MatrixXd* jacobian)>;

struct SolverOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-10;
  /// Stop after this many consecutive trial steps that fail to lower the cost.
  int stall_limit = 10;
};

struct SolverReport {
  int iterations = 0;
  double initial_cost = 0.0;  // 0.5 * |r|^2
  double final_cost = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
  bool stalled = false;
};

/// Damped Gauss-Newton (Levenberg-Marquardt). Only cost-decreasing steps are
/// accepted, so the returned x is the best iterate seen. Converged when
/// |J^T r| < gradient_tolerance.
SolverReport minimize_least_squares(const ResidualFunction& f, Eigen::VectorXd& x, const SolverOptions& options = {});

}  // namespace rloc
