#pragma once

// Small dense optimizers: Levenberg-Marquardt for nonlinear least squares, a
// finite-difference BFGS for smooth minimization and Nelder-Mead for kinked objectives.

#include <Eigen/Dense>
#include <functional>

namespace holomet {

/// Fills r for parameters x. Returns false when x is outside the evaluable region.
using ResidualFn = std::function<bool(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;
/// Fills J (rows = residuals, cols = parameters). Returns false if unavailable.
using JacobianFn = std::function<bool(const Eigen::VectorXd& x, Eigen::MatrixXd& J)>;

struct LmOptions {
  int max_iterations = 200;
  double tolerance = 1e-10;      // stop when |r| < tolerance
  double step_tolerance = 1e-16;  // relative step size considered stalled
  double initial_damping = 1e-3;
};

struct LmResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Central-difference Jacobian with step h * max(1, |x_i|).
bool fd_jacobian(const ResidualFn& f, const Eigen::VectorXd& x, Eigen::Index rows, Eigen::MatrixXd& J,
                 double h = 1e-7);

/// Levenberg-Marquardt with Nielsen damping updates. `jac` may be empty (finite differences are used);
/// if it returns false at some iterate the finite-difference Jacobian is used for that step.
LmResult levenberg_marquardt(const ResidualFn& f, const JacobianFn& jac, Eigen::VectorXd x0,
                             const LmOptions& options = {});

using ObjectiveFn = std::function<double(const Eigen::VectorXd& x)>;

struct BfgsOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-9;
  double fd_step = 1e-6;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
};

/// Minimizes f with BFGS, central-difference gradients and Armijo backtracking.
/// Non-finite objective values are treated as +inf.
BfgsResult bfgs_minimize(const ObjectiveFn& f, Eigen::VectorXd x0, const BfgsOptions& options = {});

struct NelderMeadOptions {
  int max_evaluations = 4000;
  double initial_step = 0.1;
  /// stop when the simplex values spread less than this
  double value_tolerance = 1e-14;
};

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2) with
/// one restart from the best vertex. Non-finite values are treated as +inf.
BfgsResult nelder_mead_minimize(const ObjectiveFn& f, Eigen::VectorXd x0, const NelderMeadOptions& options = {});

}  // namespace holomet
