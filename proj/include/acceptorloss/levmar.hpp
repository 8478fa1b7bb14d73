// levmar.hpp — small dense Levenberg-Marquardt solver
//
// Damped least squares with Marquardt diagonal scaling and a numerical
// Jacobian from central differences. Deterministic: no randomness, fixed
// iteration policy.

#pragma once

#include <functional>

#include <Eigen/Dense>

namespace acceptorloss {

struct LevMarOptions {
    int max_iterations = 300;
    double cost_tol = 1e-14;      // relative cost decrease considered converged
    double step_tol = 1e-12;      // relative parameter step considered converged
    double lambda0 = 1e-3;
    double lambda_max = 1e12;
};

struct LevMarResult {
    Eigen::VectorXd params;
    double rss = 0.0;            // final sum of squared residuals
    int iterations = 0;
    bool converged = false;
    Eigen::MatrixXd jacobian;    // at the optimum (finite-difference)
};

// residual: params -> residual vector (length >= params). steps: per-parameter
// finite-difference steps (absolute).
LevMarResult levmar_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                          const Eigen::VectorXd& p0, const Eigen::VectorXd& steps,
                          const LevMarOptions& options = {});

} // namespace acceptorloss
