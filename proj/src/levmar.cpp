#include "acceptorloss/levmar.hpp"

#include <cmath>
#include <stdexcept>

namespace acceptorloss {

namespace {

Eigen::MatrixXd numerical_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const Eigen::VectorXd& p, const Eigen::VectorXd& steps, Eigen::Index m) {
    Eigen::MatrixXd j(m, p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        Eigen::VectorXd hi = p, lo = p;
        hi(i) += steps(i);
        lo(i) -= steps(i);
        j.col(i) = (residual(hi) - residual(lo)) / (2.0 * steps(i));
    }
    return j;
}

} // namespace

LevMarResult levmar_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                          const Eigen::VectorXd& p0, const Eigen::VectorXd& steps,
                          const LevMarOptions& options) {
    if (steps.size() != p0.size())
        throw std::invalid_argument("levmar_solve: steps size mismatch");

    LevMarResult result;
    result.params = p0;
    Eigen::VectorXd r = residual(result.params);
    if (!r.allFinite()) throw std::invalid_argument("levmar_solve: residual not finite at start");
    double cost = r.squaredNorm();
    double lambda = options.lambda0;

    const Eigen::Index m = r.size();
    Eigen::MatrixXd j = numerical_jacobian(residual, result.params, steps, m);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        result.iterations = iter + 1;
        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::VectorXd jtr = j.transpose() * r;

        bool stepped = false;
        while (lambda <= options.lambda_max) {
            Eigen::MatrixXd a = jtj;
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                a(i, i) += lambda * (jtj(i, i) > 0.0 ? jtj(i, i) : 1.0);
            const Eigen::VectorXd delta = a.ldlt().solve(-jtr);
            const Eigen::VectorXd candidate = result.params + delta;
            const Eigen::VectorXd rc = residual(candidate);
            const double cost_c = rc.allFinite() ? rc.squaredNorm()
                                                 : std::numeric_limits<double>::infinity();
            if (cost_c < cost) {
                const double rel_step =
                    (delta.cwiseQuotient(steps.cwiseMax(1e-300))).cwiseAbs().maxCoeff();
                const double rel_drop = (cost - cost_c) / (cost > 0.0 ? cost : 1.0);
                result.params = candidate;
                r = rc;
                cost = cost_c;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel_drop < options.cost_tol || rel_step < options.step_tol)
                    result.converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            // No downhill step found at any damping: local optimum.
            result.converged = true;
            break;
        }
        if (result.converged) break;
        j = numerical_jacobian(residual, result.params, steps, m);
    }

    result.rss = cost;
    result.jacobian = numerical_jacobian(residual, result.params, steps, m);
    return result;
}

} // namespace acceptorloss
