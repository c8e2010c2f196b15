#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ptsvm {

struct KernelSpec {
    enum class Kind { Linear, Polynomial, Sigmoid, Rbf };
    Kind kind = Kind::Rbf;
    double gamma = 1.0; // rbf/sigmoid; must be > 0 for rbf
    int degree = 3;     // polynomial
    double coef0 = 1.0; // polynomial/sigmoid

    static KernelSpec linear() { return {Kind::Linear, 0.0, 0, 0.0}; }
    static KernelSpec polynomial(int degree, double coef0 = 1.0) {
        return {Kind::Polynomial, 0.0, degree, coef0};
    }
    static KernelSpec sigmoid(double gamma, double coef0 = 0.0) {
        return {Kind::Sigmoid, gamma, 0, coef0};
    }
    static KernelSpec rbf(double gamma) { return {Kind::Rbf, gamma, 0, 0.0}; }

    bool has_gamma() const { return kind == Kind::Rbf || kind == Kind::Sigmoid; }
    std::string name() const;
};

double kernel_eval(const KernelSpec& k, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct TrainConfig {
    double C = 1.0;
    double kkt_tol = 1e-3;
    std::size_t max_passes = 1'000'000; // accepted pair updates before giving up
    double eps = 1e-12;                 // numeric floor for progress checks
    bool standardize = true;            // z-score features inside the trainer
    bool debug_objective = false;       // assert the dual objective never decreases
    std::size_t cache_bytes = std::size_t(256) << 20;
};

/// Per-feature z-score parameters (population standard deviation). Features
/// with zero spread pass through unscaled.
struct Scaler {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;

    static Scaler identity(std::size_t dim);
    static Scaler fit(const Eigen::MatrixXd& x);
    Eigen::VectorXd apply(const Eigen::VectorXd& row) const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

struct SvmModel {
    KernelSpec kernel;
    double C = 1.0;
    Eigen::MatrixXd support_vectors; // rows, stored in scaled space
    std::vector<double> coeffs;      // alpha_i * y_i per support vector
    double bias = 0.0;
    Scaler scaler;
    bool converged = true;
    std::size_t n_features = 0;

    /// For linear kernels only: the equivalent raw-space (w, b) with the
    /// scaler folded in.
    std::pair<Eigen::VectorXd, double> effective_linear_coeffs() const;
};

/// Sequential minimal optimization on the soft-margin dual:
///   max sum a_i - 1/2 sum a_i a_j y_i y_j K(x_i,x_j),  0 <= a_i <= C,
///   sum a_i y_i = 0.
/// Deterministic: index-ordered scans, no randomized shuffling. Labels must
/// be -1/+1 with both classes present. The final bias is the mean of
/// y_i - f0(x_i) over free support vectors, or the midpoint of the feasible
/// interval when none are free.
SvmModel train_smo(const Eigen::MatrixXd& x, const std::vector<int>& y, const TrainConfig& cfg,
                   const KernelSpec& kernel);

double decision_value(const SvmModel& m, const Eigen::VectorXd& x);
std::vector<double> decision_values(const SvmModel& m, const Eigen::MatrixXd& x);

/// 1 when the decision value is positive (+1 was trained as the unstable
/// class); exact ties resolve to 0.
int predict(const SvmModel& m, const Eigen::VectorXd& x);

/// Worst KKT violation of a trained model over its training set, for audits:
/// alpha=0 wants y f >= 1, alpha=C wants y f <= 1, free wants y f = 1.
double kkt_max_violation(const SvmModel& m, const Eigen::MatrixXd& x, const std::vector<int>& y,
                         const std::vector<double>& alpha);

struct SrmDiagnostics {
    double w_norm_sq = 0.0;
    double margin = 0.0;         // 2 / ||w||
    double ball_radius_sq = 0.0; // kernel-centroid estimate over the SVs
    double h_bound = 0.0;        // VC-dimension upper estimate
    double risk_bound = 0.0;
};

SrmDiagnostics srm_diagnostics(const SvmModel& m, std::size_t train_errors, std::size_t n,
                               double eta);

std::string write_model(const SvmModel& m);
SvmModel parse_model(const std::string& text);

/// Training-set dual coefficients of the last train_smo call are not kept in
/// the model; trainers that need them for audits receive them through this
/// extended result.
struct TrainResult {
    SvmModel model;
    std::vector<double> alpha;       // per training row
    double dual_objective = 0.0;
    std::size_t pair_updates = 0;
};

TrainResult train_smo_detailed(const Eigen::MatrixXd& x, const std::vector<int>& y,
                               const TrainConfig& cfg, const KernelSpec& kernel);

} // namespace ptsvm
