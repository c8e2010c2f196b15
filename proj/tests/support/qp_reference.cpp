#include "qp_reference.hpp"

#include <cmath>
#include <stdexcept>

namespace ptsvm::testing {

namespace {

/// Exact Euclidean projection onto {0 <= p <= C, y . p = target} by bisection
/// on the hyperplane multiplier.
Eigen::VectorXd project(const Eigen::VectorXd& a, const std::vector<int>& y, double c) {
    const Eigen::Index n = a.size();
    const auto clipped = [&](double lambda) {
        Eigen::VectorXd p(n);
        for (Eigen::Index i = 0; i < n; ++i)
            p(i) = std::clamp(a(i) + lambda * y[static_cast<std::size_t>(i)], 0.0, c);
        return p;
    };
    const auto balance = [&](double lambda) {
        const Eigen::VectorXd p = clipped(lambda);
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += y[static_cast<std::size_t>(i)] * p(i);
        return s;
    };
    double lo = -(c + a.cwiseAbs().maxCoeff() + 1.0);
    double hi = -lo;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (balance(mid) > 0.0) hi = mid;
        else lo = mid;
    }
    return clipped(0.5 * (lo + hi));
}

} // namespace

QpResult train_reference_qp(const Eigen::MatrixXd& x, const std::vector<int>& y,
                            const TrainConfig& cfg, const KernelSpec& kernel) {
    const Eigen::Index n = x.rows();
    if (n > 50) throw std::invalid_argument("train_reference_qp: dense oracle limited to N <= 50");

    const Scaler scaler =
        cfg.standardize ? Scaler::fit(x) : Scaler::identity(static_cast<std::size_t>(x.cols()));
    const Eigen::MatrixXd xs = scaler.apply(x);

    Eigen::MatrixXd q(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            q(i, j) = y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)] *
                      kernel_eval(kernel, xs.row(i).transpose(), xs.row(j).transpose());

    // Step from a Gershgorin bound on the largest eigenvalue of Q.
    double lip = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) lip = std::max(lip, q.row(i).cwiseAbs().sum());
    const double step = 1.0 / std::max(lip, 1e-12);

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    const auto objective = [&](const Eigen::VectorXd& a) {
        return a.sum() - 0.5 * a.dot(q * a);
    };

    QpResult out;
    double prev_obj = 0.0;
    for (std::size_t it = 0; it < 2'000'000; ++it) {
        const Eigen::VectorXd grad = Eigen::VectorXd::Ones(n) - q * alpha;
        const Eigen::VectorXd next = project(alpha + step * grad, y, cfg.C);
        const double move = (next - alpha).cwiseAbs().maxCoeff();
        alpha = next;
        out.iterations = it + 1;
        if (move < 1e-12) {
            const double obj = objective(alpha);
            if (std::abs(obj - prev_obj) < 1e-14 * (1.0 + std::abs(obj))) {
                out.converged = true;
                break;
            }
            prev_obj = obj;
        }
    }
    if (!out.converged) {
        // Accept a stationary-enough iterate; the caller checks tolerances.
        out.converged = (project(alpha + step * (Eigen::VectorXd::Ones(n) - q * alpha), y, cfg.C) -
                         alpha)
                            .cwiseAbs()
                            .maxCoeff() < 1e-10;
    }

    out.objective = objective(alpha);
    out.alpha.assign(alpha.data(), alpha.data() + n);

    // Bias: mean over free support vectors, midpoint of the feasible
    // interval otherwise (the trainer's rule, recomputed independently).
    const auto f0 = [&](Eigen::Index i) {
        double g = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            g += alpha(j) * y[static_cast<std::size_t>(j)] *
                 kernel_eval(kernel, xs.row(j).transpose(), xs.row(i).transpose());
        return g;
    };
    double b = 0.0;
    int free_count = 0;
    const double bound_eps = 1e-9 * cfg.C;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (alpha(i) > bound_eps && alpha(i) < cfg.C - bound_eps) {
            b += y[static_cast<std::size_t>(i)] - f0(i);
            ++free_count;
        }
    }
    if (free_count > 0) {
        b /= free_count;
    } else {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double g = f0(i);
            const bool at_zero = alpha(i) <= bound_eps;
            if (y[static_cast<std::size_t>(i)] > 0) {
                if (at_zero) lo = std::max(lo, 1.0 - g);
                else hi = std::min(hi, 1.0 - g);
            } else {
                if (at_zero) hi = std::min(hi, -1.0 - g);
                else lo = std::max(lo, -1.0 - g);
            }
        }
        b = 0.5 * (lo + hi);
    }

    SvmModel& m = out.model;
    m.kernel = kernel;
    m.C = cfg.C;
    m.scaler = scaler;
    m.bias = b;
    m.converged = out.converged;
    m.n_features = static_cast<std::size_t>(x.cols());
    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < n; ++i)
        if (alpha(i) > bound_eps) sv.push_back(i);
    m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    m.coeffs.resize(sv.size());
    for (std::size_t k = 0; k < sv.size(); ++k) {
        m.support_vectors.row(static_cast<Eigen::Index>(k)) = xs.row(sv[k]);
        m.coeffs[k] = alpha(sv[k]) * y[static_cast<std::size_t>(sv[k])];
    }
    return out;
}

} // namespace ptsvm::testing
