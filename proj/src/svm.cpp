#include "ptsvm/svm.hpp"

#include "ptsvm/text_util.hpp"

#include <cmath>
#include <list>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ptsvm {

std::string KernelSpec::name() const {
    switch (kind) {
        case Kind::Linear: return "linear";
        case Kind::Polynomial: return "polynomial";
        case Kind::Sigmoid: return "sigmoid";
        case Kind::Rbf: return "rbf";
    }
    return "?";
}

double kernel_eval(const KernelSpec& k, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    switch (k.kind) {
        case KernelSpec::Kind::Linear: return a.dot(b);
        case KernelSpec::Kind::Polynomial: return std::pow(a.dot(b) + k.coef0, k.degree);
        case KernelSpec::Kind::Sigmoid: return std::tanh(k.gamma * a.dot(b) + k.coef0);
        case KernelSpec::Kind::Rbf: return std::exp(-k.gamma * (a - b).squaredNorm());
    }
    throw std::logic_error("unreachable kernel kind");
}

Scaler Scaler::identity(std::size_t dim) {
    Scaler s;
    s.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    s.sd = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dim));
    return s;
}

Scaler Scaler::fit(const Eigen::MatrixXd& x) {
    Scaler s;
    const Eigen::Index n = x.rows();
    s.mean = x.colwise().mean();
    Eigen::VectorXd var = Eigen::VectorXd::Zero(x.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd d = x.row(i).transpose() - s.mean;
        var += d.cwiseProduct(d);
    }
    var /= static_cast<double>(n);
    s.sd = var.cwiseSqrt();
    for (Eigen::Index j = 0; j < s.sd.size(); ++j)
        if (s.sd(j) <= 0.0) s.sd(j) = 1.0;
    return s;
}

Eigen::VectorXd Scaler::apply(const Eigen::VectorXd& row) const {
    return (row - mean).cwiseQuotient(sd);
}

Eigen::MatrixXd Scaler::apply(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd out = x;
    out.rowwise() -= mean.transpose();
    out.array().rowwise() /= sd.transpose().array();
    return out;
}

std::pair<Eigen::VectorXd, double> SvmModel::effective_linear_coeffs() const {
    if (kernel.kind != KernelSpec::Kind::Linear)
        throw std::logic_error("effective_linear_coeffs: linear kernel only");
    Eigen::VectorXd w_scaled = Eigen::VectorXd::Zero(support_vectors.cols());
    for (Eigen::Index i = 0; i < support_vectors.rows(); ++i)
        w_scaled += coeffs[static_cast<std::size_t>(i)] * support_vectors.row(i).transpose();
    Eigen::VectorXd w_raw = w_scaled.cwiseQuotient(scaler.sd);
    double b_raw = bias - w_scaled.cwiseQuotient(scaler.sd).dot(scaler.mean);
    return {w_raw, b_raw};
}

namespace {

/// Kernel row provider with an LRU cache sized in bytes. Rows are full
/// length; eviction never affects results, only speed.
class KernelCache {
public:
    KernelCache(const Eigen::MatrixXd& x, const KernelSpec& kernel, std::size_t cache_bytes)
        : x_(x), kernel_(kernel), n_(x.rows()) {
        max_rows_ = std::max<std::size_t>(
            2, cache_bytes / (static_cast<std::size_t>(n_) * sizeof(double)));
        if (kernel_.kind == KernelSpec::Kind::Rbf) sqnorm_ = x_.rowwise().squaredNorm();
    }

    const Eigen::VectorXd& row(Eigen::Index i) {
        auto it = index_.find(i);
        if (it != index_.end()) {
            lru_.splice(lru_.begin(), lru_, it->second.second);
            return it->second.first;
        }
        if (index_.size() >= max_rows_) {
            const Eigen::Index victim = lru_.back();
            lru_.pop_back();
            index_.erase(victim);
        }
        lru_.push_front(i);
        auto& slot = index_[i];
        slot.second = lru_.begin();
        slot.first = compute_row(i);
        return slot.first;
    }

private:
    Eigen::VectorXd compute_row(Eigen::Index i) const {
        const Eigen::VectorXd dots = x_ * x_.row(i).transpose();
        switch (kernel_.kind) {
            case KernelSpec::Kind::Linear: return dots;
            case KernelSpec::Kind::Polynomial:
                return (dots.array() + kernel_.coef0).pow(kernel_.degree).matrix();
            case KernelSpec::Kind::Sigmoid:
                return (kernel_.gamma * dots.array() + kernel_.coef0).tanh().matrix();
            case KernelSpec::Kind::Rbf:
                return (-kernel_.gamma *
                        (sqnorm_.array() + sqnorm_(i) - 2.0 * dots.array()).max(0.0))
                    .exp()
                    .matrix();
        }
        throw std::logic_error("unreachable kernel kind");
    }

    const Eigen::MatrixXd& x_;
    KernelSpec kernel_;
    Eigen::Index n_;
    Eigen::VectorXd sqnorm_;
    std::size_t max_rows_;
    std::list<Eigen::Index> lru_;
    std::unordered_map<Eigen::Index, std::pair<Eigen::VectorXd, std::list<Eigen::Index>::iterator>>
        index_;
};

struct SmoState {
    const Eigen::MatrixXd& x;
    const std::vector<int>& y;
    const TrainConfig& cfg;
    KernelCache cache;
    Eigen::Index n;
    std::vector<double> alpha;
    std::vector<double> error; // f(x_i) - y_i, maintained for every point
    double b = 0.0;
    std::size_t pair_updates = 0;
    double dual_objective = 0.0; // tracked incrementally in debug mode

    SmoState(const Eigen::MatrixXd& x_, const std::vector<int>& y_, const TrainConfig& cfg_,
             const KernelSpec& kernel)
        : x(x_), y(y_), cfg(cfg_), cache(x_, kernel, cfg_.cache_bytes), n(x_.rows()),
          alpha(static_cast<std::size_t>(n), 0.0), error(static_cast<std::size_t>(n)) {
        for (Eigen::Index i = 0; i < n; ++i)
            error[static_cast<std::size_t>(i)] = -static_cast<double>(y[static_cast<std::size_t>(i)]);
    }

    bool take_step(Eigen::Index i1, Eigen::Index i2) {
        if (i1 == i2) return false;
        const double a1_old = alpha[static_cast<std::size_t>(i1)];
        const double a2_old = alpha[static_cast<std::size_t>(i2)];
        const double y1 = y[static_cast<std::size_t>(i1)];
        const double y2 = y[static_cast<std::size_t>(i2)];
        const double e1 = error[static_cast<std::size_t>(i1)];
        const double e2 = error[static_cast<std::size_t>(i2)];
        const double s = y1 * y2;
        const double C = cfg.C;

        double lo, hi;
        if (s < 0.0) {
            lo = std::max(0.0, a2_old - a1_old);
            hi = std::min(C, C + a2_old - a1_old);
        } else {
            lo = std::max(0.0, a1_old + a2_old - C);
            hi = std::min(C, a1_old + a2_old);
        }
        if (lo >= hi) return false;

        const Eigen::VectorXd& row1 = cache.row(i1);
        const double k11 = row1(i1);
        const double k12 = row1(i2);
        const Eigen::VectorXd& row2 = cache.row(i2);
        const double k22 = row2(i2);
        const double eta = k11 + k22 - 2.0 * k12;

        // Along the feasible pair direction the dual gain is
        //   gain(d2) = d2 y2 (e1 - e2) - eta d2^2 / 2.
        const auto gain = [&](double d2) { return d2 * y2 * (e1 - e2) - 0.5 * eta * d2 * d2; };

        double a2_new;
        if (eta > 0.0) {
            a2_new = a2_old + y2 * (e1 - e2) / eta;
            a2_new = std::clamp(a2_new, lo, hi);
        } else {
            // Flat or concave along this direction; the maximum sits at an
            // endpoint of the clip interval.
            const double g_lo = gain(lo - a2_old);
            const double g_hi = gain(hi - a2_old);
            if (g_lo > g_hi + cfg.eps) a2_new = lo;
            else if (g_hi > g_lo + cfg.eps) a2_new = hi;
            else return false;
        }
        if (std::abs(a2_new - a2_old) < cfg.eps * (a2_new + a2_old + cfg.eps)) return false;

        double a1_new = a1_old + s * (a2_old - a2_new);
        if (a1_new < 0.0) a1_new = 0.0;
        else if (a1_new > C) a1_new = C;

        const double d1 = a1_new - a1_old;
        const double d2 = a2_new - a2_old;

        const double b_old = b;
        const double b1 = b - (e1 + y1 * d1 * k11 + y2 * d2 * k12);
        const double b2 = b - (e2 + y1 * d1 * k12 + y2 * d2 * k22);
        if (a1_new > 0.0 && a1_new < C) b = b1;
        else if (a2_new > 0.0 && a2_new < C) b = b2;
        else b = 0.5 * (b1 + b2);

        if (cfg.debug_objective) dual_objective += gain(d2);

        const double db = b - b_old;
        for (Eigen::Index j = 0; j < n; ++j)
            error[static_cast<std::size_t>(j)] += y1 * d1 * row1(j) + y2 * d2 * row2(j) + db;

        alpha[static_cast<std::size_t>(i1)] = a1_new;
        alpha[static_cast<std::size_t>(i2)] = a2_new;
        ++pair_updates;
        return true;
    }

    bool examine(Eigen::Index i2) {
        const double y2 = y[static_cast<std::size_t>(i2)];
        const double a2 = alpha[static_cast<std::size_t>(i2)];
        const double e2 = error[static_cast<std::size_t>(i2)];
        const double r2 = e2 * y2;
        const double tol = cfg.kkt_tol;
        if (!((r2 < -tol && a2 < cfg.C) || (r2 > tol && a2 > 0.0))) return false;

        // First choice: largest |E1 - E2| among free points, lowest index on ties.
        Eigen::Index best = -1;
        double best_gap = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = alpha[static_cast<std::size_t>(i)];
            if (a <= 0.0 || a >= cfg.C) continue;
            const double gap = std::abs(error[static_cast<std::size_t>(i)] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && take_step(best, i2)) return true;

        // Then all free points in deterministic wrap-around order, then all.
        for (Eigen::Index off = 0; off < n; ++off) {
            const Eigen::Index i = (i2 + 1 + off) % n;
            const double a = alpha[static_cast<std::size_t>(i)];
            if (a <= 0.0 || a >= cfg.C) continue;
            if (take_step(i, i2)) return true;
        }
        for (Eigen::Index off = 0; off < n; ++off) {
            const Eigen::Index i = (i2 + 1 + off) % n;
            if (take_step(i, i2)) return true;
        }
        return false;
    }
};

double recompute_bias(const std::vector<double>& alpha, const std::vector<int>& y,
                      const std::vector<double>& error, double b, double C) {
    // error[] already includes the running bias: f(x_i) - y_i. Strip it to
    // get g_i = f0(x_i) = f(x_i) - b.
    double sum = 0.0;
    int free_count = 0;
    const std::size_t n = alpha.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 0.0 && alpha[i] < C) {
            const double g = error[i] + y[i] - b;
            sum += y[i] - g;
            ++free_count;
        }
    }
    if (free_count > 0) return sum / free_count;

    // No free support vectors: the feasible interval for b is bounded by the
    // bound points; take its midpoint.
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double g = error[i] + y[i] - b;
        const bool at_zero = alpha[i] <= 0.0;
        const bool at_c = alpha[i] >= C;
        if (y[i] > 0) {
            if (at_zero) lo = std::max(lo, 1.0 - g);   // need g + b >= 1
            if (at_c) hi = std::min(hi, 1.0 - g);      // need g + b <= 1
        } else {
            if (at_zero) hi = std::min(hi, -1.0 - g);  // need g + b <= -1
            if (at_c) lo = std::max(lo, -1.0 - g);     // need g + b >= -1
        }
    }
    if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
    if (std::isfinite(lo)) return lo;
    if (std::isfinite(hi)) return hi;
    return b;
}

} // namespace

TrainResult train_smo_detailed(const Eigen::MatrixXd& x, const std::vector<int>& y,
                               const TrainConfig& cfg, const KernelSpec& kernel) {
    const Eigen::Index n = x.rows();
    if (n < 2) throw std::invalid_argument("train_smo: need at least two points");
    if (static_cast<Eigen::Index>(y.size()) != n)
        throw std::invalid_argument("train_smo: label count mismatch");
    if (cfg.C <= 0.0) throw std::invalid_argument("train_smo: C must be > 0");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        if (v == 1) has_pos = true;
        else if (v == -1) has_neg = true;
        else throw std::invalid_argument("train_smo: labels must be -1 or +1");
    }
    if (!has_pos || !has_neg)
        throw std::invalid_argument("train_smo: both classes must be present");
    if (kernel.kind == KernelSpec::Kind::Rbf && kernel.gamma <= 0.0)
        throw std::invalid_argument("train_smo: rbf gamma must be > 0");

    const Scaler scaler =
        cfg.standardize ? Scaler::fit(x) : Scaler::identity(static_cast<std::size_t>(x.cols()));
    const Eigen::MatrixXd xs = scaler.apply(x);

    SmoState state(xs, y, cfg, kernel);

    bool examine_all = true;
    bool converged = false;
    double last_objective = 0.0;
    while (state.pair_updates < cfg.max_passes) {
        std::size_t changed = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!examine_all) {
                const double a = state.alpha[static_cast<std::size_t>(i)];
                if (a <= 0.0 || a >= cfg.C) continue;
            }
            if (state.examine(i)) ++changed;
            if (state.pair_updates >= cfg.max_passes) break;
        }
        if (cfg.debug_objective) {
            if (state.dual_objective < last_objective - 1e-9)
                throw std::logic_error("train_smo: dual objective decreased");
            last_objective = state.dual_objective;
        }
        if (examine_all) {
            if (changed == 0) {
                converged = true;
                break;
            }
            examine_all = false;
        } else if (changed == 0) {
            examine_all = true;
        }
    }

    state.b = recompute_bias(state.alpha, y, state.error, state.b, cfg.C);

    TrainResult result;
    result.alpha = state.alpha;
    result.pair_updates = state.pair_updates;

    SvmModel& m = result.model;
    m.kernel = kernel;
    m.C = cfg.C;
    m.scaler = scaler;
    m.bias = state.b;
    m.converged = converged;
    m.n_features = static_cast<std::size_t>(x.cols());
    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < n; ++i)
        if (state.alpha[static_cast<std::size_t>(i)] > 0.0) sv.push_back(i);
    m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    m.coeffs.resize(sv.size());
    for (std::size_t k = 0; k < sv.size(); ++k) {
        m.support_vectors.row(static_cast<Eigen::Index>(k)) = xs.row(sv[k]);
        m.coeffs[k] = state.alpha[static_cast<std::size_t>(sv[k])] *
                      static_cast<double>(y[static_cast<std::size_t>(sv[k])]);
    }

    // Dual objective of the final iterate, for oracle comparisons.
    double obj = 0.0;
    for (std::size_t k = 0; k < sv.size(); ++k)
        obj += state.alpha[static_cast<std::size_t>(sv[k])];
    for (std::size_t a = 0; a < sv.size(); ++a) {
        const Eigen::VectorXd& row = state.cache.row(sv[a]);
        for (std::size_t b2 = 0; b2 < sv.size(); ++b2)
            obj -= 0.5 * m.coeffs[a] * m.coeffs[b2] * row(sv[b2]);
    }
    result.dual_objective = obj;
    return result;
}

SvmModel train_smo(const Eigen::MatrixXd& x, const std::vector<int>& y, const TrainConfig& cfg,
                   const KernelSpec& kernel) {
    return train_smo_detailed(x, y, cfg, kernel).model;
}

double decision_value(const SvmModel& m, const Eigen::VectorXd& x) {
    if (x.size() != static_cast<Eigen::Index>(m.n_features))
        throw std::invalid_argument("decision_value: feature dimension mismatch");
    const Eigen::VectorXd xs = m.scaler.apply(x);
    double f = m.bias;
    for (Eigen::Index i = 0; i < m.support_vectors.rows(); ++i)
        f += m.coeffs[static_cast<std::size_t>(i)] *
             kernel_eval(m.kernel, m.support_vectors.row(i).transpose(), xs);
    return f;
}

std::vector<double> decision_values(const SvmModel& m, const Eigen::MatrixXd& x) {
    std::vector<double> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        out[static_cast<std::size_t>(i)] = decision_value(m, x.row(i).transpose());
    return out;
}

int predict(const SvmModel& m, const Eigen::VectorXd& x) {
    return decision_value(m, x) > 0.0 ? 1 : 0;
}

double kkt_max_violation(const SvmModel& m, const Eigen::MatrixXd& x, const std::vector<int>& y,
                         const std::vector<double>& alpha) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double yf = y[static_cast<std::size_t>(i)] * decision_value(m, x.row(i).transpose());
        const double a = alpha[static_cast<std::size_t>(i)];
        double v = 0.0;
        if (a <= 0.0) v = std::max(0.0, 1.0 - yf);
        else if (a >= m.C) v = std::max(0.0, yf - 1.0);
        else v = std::abs(yf - 1.0);
        worst = std::max(worst, v);
    }
    return worst;
}

SrmDiagnostics srm_diagnostics(const SvmModel& m, std::size_t train_errors, std::size_t n,
                               double eta) {
    if (eta <= 0.0 || eta >= 1.0)
        throw std::invalid_argument("srm_diagnostics: eta must be in (0,1)");
    const Eigen::Index nsv = m.support_vectors.rows();
    if (nsv == 0) throw std::invalid_argument("srm_diagnostics: model has no support vectors");

    Eigen::MatrixXd k(nsv, nsv);
    for (Eigen::Index i = 0; i < nsv; ++i)
        for (Eigen::Index j = 0; j < nsv; ++j)
            k(i, j) = kernel_eval(m.kernel, m.support_vectors.row(i).transpose(),
                                  m.support_vectors.row(j).transpose());

    SrmDiagnostics d;
    for (Eigen::Index i = 0; i < nsv; ++i)
        for (Eigen::Index j = 0; j < nsv; ++j)
            d.w_norm_sq += m.coeffs[static_cast<std::size_t>(i)] *
                           m.coeffs[static_cast<std::size_t>(j)] * k(i, j);
    if (d.w_norm_sq <= 0.0)
        throw std::runtime_error("srm_diagnostics: degenerate model, ||w|| = 0");
    d.margin = 2.0 / std::sqrt(d.w_norm_sq);

    // Kernel-centroid bound on the radius of a ball containing the points.
    const double n_pts = static_cast<double>(nsv);
    const double grand = k.sum() / (n_pts * n_pts);
    double r2 = 0.0;
    for (Eigen::Index i = 0; i < nsv; ++i)
        r2 = std::max(r2, k(i, i) - 2.0 * k.row(i).sum() / n_pts + grand);
    d.ball_radius_sq = r2;

    const double dw = d.ball_radius_sq * d.w_norm_sq;
    if (m.kernel.kind == KernelSpec::Kind::Linear)
        d.h_bound = std::floor(std::min(static_cast<double>(m.n_features), dw)) + 1.0;
    else
        d.h_bound = std::floor(dw) + 1.0;

    const double h = d.h_bound;
    const double nn = static_cast<double>(n);
    d.risk_bound = static_cast<double>(train_errors) / nn +
                   std::sqrt((h * (std::log(2.0 * nn / h) + 1.0) - std::log(eta / 4.0)) / nn);
    return d;
}

std::string write_model(const SvmModel& m) {
    std::string out = "ptsvm-model v1\n";
    out += "kernel " + m.kernel.name();
    if (m.kernel.kind == KernelSpec::Kind::Rbf)
        out += " gamma=" + fmt_g17(m.kernel.gamma);
    else if (m.kernel.kind == KernelSpec::Kind::Polynomial)
        out += " degree=" + std::to_string(m.kernel.degree) + " coef0=" + fmt_g17(m.kernel.coef0);
    else if (m.kernel.kind == KernelSpec::Kind::Sigmoid)
        out += " gamma=" + fmt_g17(m.kernel.gamma) + " coef0=" + fmt_g17(m.kernel.coef0);
    out += "\n";
    out += "C " + fmt_g17(m.C) + "\n";
    out += "dim " + std::to_string(m.n_features) + "\n";
    out += "scaler_mean";
    for (Eigen::Index j = 0; j < m.scaler.mean.size(); ++j) out += " " + fmt_g17(m.scaler.mean(j));
    out += "\nscaler_sd";
    for (Eigen::Index j = 0; j < m.scaler.sd.size(); ++j) out += " " + fmt_g17(m.scaler.sd(j));
    out += "\nconverged " + std::string(m.converged ? "1" : "0") + "\n";
    out += "nsv " + std::to_string(m.support_vectors.rows()) + "\n";
    for (Eigen::Index i = 0; i < m.support_vectors.rows(); ++i) {
        out += fmt_g17(m.coeffs[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < m.support_vectors.cols(); ++j)
            out += "," + fmt_g17(m.support_vectors(i, j));
        out += "\n";
    }
    out += "b=" + fmt_g17(m.bias) + "\n";
    return out;
}

SvmModel parse_model(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    const auto next_line = [&](const char* what) {
        if (!std::getline(in, line))
            throw std::runtime_error(std::string("model file truncated before ") + what);
        return line;
    };
    if (next_line("header") != "ptsvm-model v1")
        throw std::runtime_error("model file: unrecognized header");

    SvmModel m;
    {
        const auto toks = split(next_line("kernel"), ' ');
        if (toks.size() < 2 || toks[0] != "kernel")
            throw std::runtime_error("model file: expected kernel line");
        const std::string& kind = toks[1];
        std::unordered_map<std::string, std::string> params;
        for (std::size_t i = 2; i < toks.size(); ++i) {
            const auto eq = toks[i].find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("model file: bad kernel parameter " + toks[i]);
            params[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
        }
        if (kind == "linear") m.kernel = KernelSpec::linear();
        else if (kind == "rbf") m.kernel = KernelSpec::rbf(std::stod(params.at("gamma")));
        else if (kind == "polynomial")
            m.kernel = KernelSpec::polynomial(std::stoi(params.at("degree")),
                                              std::stod(params.at("coef0")));
        else if (kind == "sigmoid")
            m.kernel = KernelSpec::sigmoid(std::stod(params.at("gamma")),
                                           std::stod(params.at("coef0")));
        else throw std::runtime_error("model file: unknown kernel " + kind);
    }
    {
        const auto toks = split(next_line("C"), ' ');
        if (toks.size() != 2 || toks[0] != "C") throw std::runtime_error("model file: expected C");
        m.C = std::stod(toks[1]);
    }
    {
        const auto toks = split(next_line("dim"), ' ');
        if (toks.size() != 2 || toks[0] != "dim")
            throw std::runtime_error("model file: expected dim");
        m.n_features = static_cast<std::size_t>(std::stoul(toks[1]));
    }
    const auto parse_vector = [&](const char* key) {
        const auto toks = split(next_line(key), ' ');
        if (toks.empty() || toks[0] != key)
            throw std::runtime_error(std::string("model file: expected ") + key);
        if (toks.size() != m.n_features + 1)
            throw std::runtime_error(std::string("model file: wrong arity for ") + key);
        Eigen::VectorXd v(static_cast<Eigen::Index>(m.n_features));
        for (std::size_t j = 1; j < toks.size(); ++j)
            v(static_cast<Eigen::Index>(j - 1)) = std::stod(toks[j]);
        return v;
    };
    m.scaler.mean = parse_vector("scaler_mean");
    m.scaler.sd = parse_vector("scaler_sd");
    {
        const auto toks = split(next_line("converged"), ' ');
        if (toks.size() != 2 || toks[0] != "converged")
            throw std::runtime_error("model file: expected converged");
        m.converged = toks[1] == "1";
    }
    std::size_t nsv = 0;
    {
        const auto toks = split(next_line("nsv"), ' ');
        if (toks.size() != 2 || toks[0] != "nsv")
            throw std::runtime_error("model file: expected nsv");
        nsv = static_cast<std::size_t>(std::stoul(toks[1]));
    }
    m.support_vectors.resize(static_cast<Eigen::Index>(nsv),
                             static_cast<Eigen::Index>(m.n_features));
    m.coeffs.resize(nsv);
    for (std::size_t i = 0; i < nsv; ++i) {
        const auto toks = split(next_line("support vector"), ',');
        if (toks.size() != m.n_features + 1)
            throw std::runtime_error("model file: support vector arity mismatch");
        m.coeffs[i] = std::stod(toks[0]);
        for (std::size_t j = 0; j < m.n_features; ++j)
            m.support_vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::stod(toks[j + 1]);
    }
    {
        const std::string b_line = next_line("bias");
        if (!starts_with(b_line, "b="))
            throw std::runtime_error("model file: expected b=<value>");
        m.bias = std::stod(b_line.substr(2));
    }
    return m;
}

} // namespace ptsvm
