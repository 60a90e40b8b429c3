#include "minsurf/lm.hpp"

#include <cmath>
#include <stdexcept>

namespace minsurf::lm {

namespace {

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

Result solve(const Residual& f, const Eigen::VectorXd& x0, const Options& options) {
    Result res;
    res.x = x0;
    auto r0 = f(x0);
    if (!r0) throw std::runtime_error("residual cannot be evaluated at the initial point");
    res.r = *r0;
    res.residual = max_abs(res.r);
    const Eigen::Index n = x0.size();
    if (n == 0) {
        res.converged = res.residual <= options.tol;
        return res;
    }

    double lambda = 0.0;
    for (int it = 0; it < options.max_iterations; ++it) {
        if (res.residual <= options.tol) {
            res.converged = true;
            return res;
        }
        res.iterations = it + 1;
        const Eigen::Index m = res.r.size();
        Eigen::MatrixXd jac(m, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::VectorXd xp = res.x;
            double h = options.fd_step;
            xp(j) += h;
            auto rp = f(xp);
            if (!rp) {
                h = -h;
                xp(j) = res.x(j) + h;
                rp = f(xp);
            }
            if (!rp) return res;
            jac.col(j) = (*rp - res.r) / h;
        }

        const double cost = res.r.squaredNorm();
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * res.r;
        bool accepted = false;
        for (int tries = 0; tries < 30 && !accepted; ++tries) {
            Eigen::VectorXd step;
            if (lambda == 0.0) {
                step = jac.colPivHouseholderQr().solve(-res.r);
            } else {
                Eigen::MatrixXd a = jtj;
                for (Eigen::Index k = 0; k < n; ++k) a(k, k) += lambda * (jtj(k, k) + 1e-12);
                step = a.ldlt().solve(-jtr);
            }
            if (!step.allFinite()) {
                lambda = lambda == 0.0 ? 1e-6 : lambda * 10.0;
                continue;
            }
            const double sn = max_abs(step);
            if (sn > options.max_step) step *= options.max_step / sn;
            const Eigen::VectorXd xn = res.x + step;
            auto rn = f(xn);
            if (rn && rn->allFinite() && rn->squaredNorm() < cost) {
                res.x = xn;
                res.r = *rn;
                res.residual = max_abs(res.r);
                accepted = true;
                if (options.trace) options.trace(it + 1, res.residual, max_abs(step));
                lambda = lambda < 1e-9 ? 0.0 : lambda / 10.0;
            } else {
                lambda = lambda == 0.0 ? 1e-6 : lambda * 10.0;
                if (lambda > 1e12) break;
            }
        }
        if (!accepted) break;
    }
    res.converged = res.residual <= options.tol;
    return res;
}

}  // namespace minsurf::lm
