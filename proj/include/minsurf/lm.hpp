#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

namespace minsurf::lm {

// Residual callback; returns nullopt when the point cannot be evaluated
// (the step is then rejected as if the cost were infinite).
using Residual = std::function<std::optional<Eigen::VectorXd>(const Eigen::VectorXd&)>;
using Trace = std::function<void(int iteration, double residual, double step)>;

struct Options {
    int max_iterations = 200;
    double tol = 1e-11;         // on max |r_i|
    double fd_step = 1e-6;      // forward-difference step in the unknowns
    double max_step = 2.0;      // cap on the infinity norm of a step
    Trace trace;
};

struct Result {
    Eigen::VectorXd x;
    Eigen::VectorXd r;
    double residual = 0;  // max |r_i|
    int iterations = 0;
    bool converged = false;
};

// Damped Gauss-Newton with a Levenberg-Marquardt fallback and a
// finite-difference Jacobian. Never throws on non-convergence; check
// Result::converged.
Result solve(const Residual& f, const Eigen::VectorXd& x0, const Options& options);

}  // namespace minsurf::lm
