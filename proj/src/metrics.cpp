#include "ptsvm/metrics.hpp"

#include "ptsvm/parallel.hpp"
#include "ptsvm/text_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ptsvm {

ConfusionMatrix confusion(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size())
        throw std::invalid_argument("confusion: length mismatch");
    if (pred.empty()) throw std::invalid_argument("confusion: empty input");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] != 0 && pred[i] != 1)
            throw std::invalid_argument("confusion: predictions must be 0/1");
        if (truth[i] != 0 && truth[i] != 1)
            throw std::invalid_argument("confusion: truth labels must be 0/1");
        if (truth[i] == 1) (pred[i] == 1 ? m.tp : m.fn)++;
        else (pred[i] == 1 ? m.fp : m.tn)++;
    }
    return m;
}

double ca(const ConfusionMatrix& m) {
    if (m.total() == 0) throw std::invalid_argument("ca: empty confusion matrix");
    return static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
}

double ce(const ConfusionMatrix& m) {
    if (m.total() == 0) throw std::invalid_argument("ce: empty confusion matrix");
    return static_cast<double>(m.fp + m.fn) / static_cast<double>(m.total());
}

double sensitivity(const ConfusionMatrix& m) {
    return m.tp + m.fn == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
}

double specificity(const ConfusionMatrix& m) {
    return m.tn + m.fp == 0 ? 0.0 : static_cast<double>(m.tn) / static_cast<double>(m.tn + m.fp);
}

RocCurve roc_auc(const std::vector<double>& scores, const std::vector<int>& truth) {
    if (scores.size() != truth.size())
        throw std::invalid_argument("roc_auc: length mismatch");
    long n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!std::isfinite(scores[i]))
            throw std::invalid_argument("roc_auc: scores must be finite");
        (truth[i] == 1 ? n_pos : n_neg)++;
    }
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("roc_auc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    RocCurve roc;
    roc.points.emplace_back(0.0, 0.0);
    long tp = 0, fp = 0;
    double auc = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        // Group tied scores into a single ROC step (diagonal segment).
        std::size_t j = i;
        long d_tp = 0, d_fp = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (truth[order[j]] == 1 ? d_tp : d_fp)++;
            ++j;
        }
        const double fpr0 = static_cast<double>(fp) / static_cast<double>(n_neg);
        const double tpr0 = static_cast<double>(tp) / static_cast<double>(n_pos);
        tp += d_tp;
        fp += d_fp;
        const double fpr1 = static_cast<double>(fp) / static_cast<double>(n_neg);
        const double tpr1 = static_cast<double>(tp) / static_cast<double>(n_pos);
        auc += (fpr1 - fpr0) * 0.5 * (tpr0 + tpr1);
        roc.points.emplace_back(fpr1, tpr1);
        i = j;
    }
    roc.auc = auc;
    return roc;
}

EvalReport cross_validate(const Dataset& ds, const KernelSpec& kernel, const TrainConfig& cfg,
                          const FoldAssignment& folds, unsigned jobs) {
    if (folds.fold_of.size() != ds.n_rows)
        throw std::invalid_argument("cross_validate: fold assignment does not match the dataset");
    const int k = folds.k;
    const Eigen::MatrixXd x = ds.feature_matrix();

    struct FoldOutput {
        std::vector<std::size_t> test_rows;
        std::vector<int> pred;
        std::vector<double> scores;
        bool converged = true;
    };
    std::vector<FoldOutput> outputs(static_cast<std::size_t>(k));

    parallel_for(static_cast<std::size_t>(k), jobs, [&](std::size_t fold) {
        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < ds.n_rows; ++i)
            (folds.fold_of[i] == static_cast<int>(fold) ? test_rows : train_rows).push_back(i);
        if (train_rows.empty() || test_rows.empty())
            throw std::runtime_error("cross_validate: empty fold " + std::to_string(fold));

        Eigen::MatrixXd x_train(static_cast<Eigen::Index>(train_rows.size()), x.cols());
        std::vector<int> y_train(train_rows.size());
        bool has_pos = false, has_neg = false;
        for (std::size_t r = 0; r < train_rows.size(); ++r) {
            x_train.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(train_rows[r]));
            y_train[r] = ds.labels[train_rows[r]] == 1 ? 1 : -1;
            (y_train[r] == 1 ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg)
            throw std::runtime_error("cross_validate: fold " + std::to_string(fold) +
                                     " trains on a single class");

        const SvmModel model = train_smo(x_train, y_train, cfg, kernel);
        FoldOutput& out = outputs[fold];
        out.converged = model.converged;
        out.test_rows = test_rows;
        out.pred.reserve(test_rows.size());
        out.scores.reserve(test_rows.size());
        for (std::size_t r : test_rows) {
            const double f = decision_value(model, x.row(static_cast<Eigen::Index>(r)).transpose());
            out.scores.push_back(f);
            out.pred.push_back(f > 0.0 ? 1 : 0);
        }
    });

    EvalReport report;
    report.n = ds.n_rows;
    std::vector<double> pooled_scores(ds.n_rows, 0.0);
    std::vector<int> pooled_pred(ds.n_rows, 0);
    for (int fold = 0; fold < k; ++fold) {
        const FoldOutput& out = outputs[static_cast<std::size_t>(fold)];
        std::vector<int> truth;
        truth.reserve(out.test_rows.size());
        for (std::size_t idx = 0; idx < out.test_rows.size(); ++idx) {
            const std::size_t r = out.test_rows[idx];
            pooled_scores[r] = out.scores[idx];
            pooled_pred[r] = out.pred[idx];
            truth.push_back(ds.labels[r]);
        }
        report.fold_ca.push_back(ca(confusion(out.pred, truth)));
        report.fold_sizes.push_back(out.test_rows.size());
        report.all_converged = report.all_converged && out.converged;
    }
    report.pooled = confusion(pooled_pred, ds.labels);
    report.ca = ca(report.pooled);
    report.ce = ce(report.pooled);
    report.sensitivity = sensitivity(report.pooled);
    report.specificity = specificity(report.pooled);
    report.roc = roc_auc(pooled_scores, ds.labels);
    return report;
}

std::string write_report_text(const EvalReport& r) {
    const double n = static_cast<double>(r.pooled.total());
    std::string out;
    out += "samples " + std::to_string(r.n) + "\n";
    out += "tp " + std::to_string(r.pooled.tp) + " (" + fmt_g10(100.0 * r.pooled.tp / n) + "%)\n";
    out += "tn " + std::to_string(r.pooled.tn) + " (" + fmt_g10(100.0 * r.pooled.tn / n) + "%)\n";
    out += "fp " + std::to_string(r.pooled.fp) + " (" + fmt_g10(100.0 * r.pooled.fp / n) + "%)\n";
    out += "fn " + std::to_string(r.pooled.fn) + " (" + fmt_g10(100.0 * r.pooled.fn / n) + "%)\n";
    out += "ca " + fmt_g17(r.ca) + "\n";
    out += "ce " + fmt_g17(r.ce) + "\n";
    out += "sensitivity " + fmt_g17(r.sensitivity) + "\n";
    out += "specificity " + fmt_g17(r.specificity) + "\n";
    out += "auc " + fmt_g17(r.roc.auc) + "\n";
    out += "folds " + std::to_string(r.fold_ca.size()) + "\n";
    for (std::size_t i = 0; i < r.fold_ca.size(); ++i)
        out += "fold_" + std::to_string(i) + "_ca " + fmt_g17(r.fold_ca[i]) + " size " +
               std::to_string(r.fold_sizes[i]) + "\n";
    out += std::string("converged ") + (r.all_converged ? "1" : "0") + "\n";
    return out;
}

std::string write_roc_csv(const RocCurve& roc) {
    std::string out = "fpr,tpr\n";
    for (const auto& [fpr, tpr] : roc.points)
        out += fmt_g17(fpr) + "," + fmt_g17(tpr) + "\n";
    return out;
}

} // namespace ptsvm
