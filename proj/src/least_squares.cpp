#include "rloc/least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace rloc {

SolverReport minimize_least_squares(const ResidualFunction& f, Eigen::VectorXd& x, const SolverOptions& options) {
  SolverReport report;
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  f(x, r, &jac);
  double cost = 0.5 * r.squaredNorm();
  report.initial_cost = cost;
  report.final_cost = cost;
  if (x.size() == 0) {
    report.converged = true;
    return report;
  }

  double lambda = 1e-3;
  int stalled = 0;
  Eigen::VectorXd trial_r;
  Eigen::VectorXd g = jac.transpose() * r;
  Eigen::MatrixXd h = jac.transpose() * jac;
  while (report.iterations < options.max_iterations) {
    report.gradient_norm = g.norm();
    if (report.gradient_norm < options.gradient_tolerance) {
      report.converged = true;
      break;
    }
    ++report.iterations;

    Eigen::MatrixXd damped = h;
    for (Eigen::Index k = 0; k < damped.rows(); ++k) damped(k, k) += lambda * std::max(h(k, k), 1e-12);
    const Eigen::VectorXd step = damped.ldlt().solve(-g);
    if (!step.allFinite()) {
      lambda *= 10.0;
      if (++stalled >= options.stall_limit) break;
      continue;
    }
    const Eigen::VectorXd candidate = x + step;
    f(candidate, trial_r, nullptr);
    const double trial_cost = 0.5 * trial_r.squaredNorm();
    if (std::isfinite(trial_cost) && trial_cost < cost) {
      x = candidate;
      cost = trial_cost;
      f(x, r, &jac);
      g = jac.transpose() * r;
      h = jac.transpose() * jac;
      lambda = std::max(lambda * 0.3, 1e-12);
      stalled = 0;
    } else {
      // A step that no longer moves x, or whose model gain is below rounding
      // noise of the cost, means we sit at the floating-point optimum.
      const double predicted = -g.dot(step) - 0.5 * step.dot(h * step);
      if (step.norm() <= 1e-15 * (1.0 + x.norm()) || predicted <= 1e-14 * cost) {
        report.converged = true;
        break;
      }
      lambda *= 10.0;
      if (++stalled >= options.stall_limit) break;
    }
  }
  report.stalled = stalled >= options.stall_limit;
  report.gradient_norm = g.norm();
  report.final_cost = cost;
  if (report.gradient_norm < options.gradient_tolerance) report.converged = true;
  return report;
}

}  // namespace rloc
