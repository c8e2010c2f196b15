#pragma once

#include "ptsvm/scenario.hpp"
#include "ptsvm/svm.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace ptsvm {

/// Positive class is "unstable" (label 1).
struct ConfusionMatrix {
    long tp = 0, tn = 0, fp = 0, fn = 0;
    long total() const { return tp + tn + fp + fn; }
};

ConfusionMatrix confusion(const std::vector<int>& pred, const std::vector<int>& truth);

double ca(const ConfusionMatrix& m); // (tp+tn)/N
double ce(const ConfusionMatrix& m); // (fp+fn)/N
double sensitivity(const ConfusionMatrix& m);
double specificity(const ConfusionMatrix& m);

struct RocCurve {
    std::vector<std::pair<double, double>> points; // (fpr, tpr), threshold high to low
    double auc = 0.0;
};

/// Thresholds descend over distinct score values; tied scores form a single
/// step so the trapezoidal area equals the Mann-Whitney statistic.
RocCurve roc_auc(const std::vector<double>& scores, const std::vector<int>& truth);

struct EvalReport {
    ConfusionMatrix pooled;
    double ca = 0.0, ce = 0.0;
    double sensitivity = 0.0, specificity = 0.0;
    RocCurve roc;
    std::vector<double> fold_ca;
    std::vector<std::size_t> fold_sizes;
    std::size_t n = 0;
    bool all_converged = true;
};

/// K-fold cross-validation with fold-local standardization (the trainer fits
/// its scaler on the training rows only). The confusion matrix is pooled
/// across folds; ROC/AUC come from the pooled out-of-fold decision values.
EvalReport cross_validate(const Dataset& ds, const KernelSpec& kernel, const TrainConfig& cfg,
                          const FoldAssignment& folds, unsigned jobs = 1);

std::string write_report_text(const EvalReport& report);
std::string write_roc_csv(const RocCurve& roc);

} // namespace ptsvm
