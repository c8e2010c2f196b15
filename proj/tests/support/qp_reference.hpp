#pragma once

#include "ptsvm/svm.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ptsvm::testing {

struct QpResult {
    std::vector<double> alpha;
    double objective = 0.0;
    SvmModel model;
    bool converged = false;
    std::size_t iterations = 0;
};

/// Independent reference for the soft-margin dual: projected-gradient ascent
/// with exact projection onto {0 <= a <= C, sum a_i y_i = 0}. Dense, for
/// N <= 50; used only by tests to cross-check the SMO trainer.
QpResult train_reference_qp(const Eigen::MatrixXd& x, const std::vector<int>& y,
                            const TrainConfig& cfg, const KernelSpec& kernel);

} // namespace ptsvm::testing
