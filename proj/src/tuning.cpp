#include "ptsvm/tuning.hpp"

#include "ptsvm/parallel.hpp"
#include "ptsvm/rng.hpp"
#include "ptsvm/text_util.hpp"

#include <cmath>
#include <stdexcept>

namespace ptsvm {

SearchSpace SearchSpace::defaults() {
    SearchSpace s;
    for (double e = -5.0; e <= 15.0; e += 2.0) s.log2_C.push_back(e);
    for (double e = -15.0; e <= 3.0; e += 2.0) s.log2_gamma.push_back(e);
    s.kernels = {KernelSpec::rbf(1.0)};
    return s;
}

namespace {

struct CandidateSpec {
    KernelSpec kernel;
    double c;
};

std::vector<CandidateSpec> enumerate_candidates(const SearchSpace& space) {
    if (space.log2_C.empty()) throw std::invalid_argument("grid_search: empty C grid");
    std::vector<CandidateSpec> out;
    for (const auto& proto : space.kernels) {
        for (double lc : space.log2_C) {
            const double c = std::exp2(lc);
            if (c <= 0.0) throw std::invalid_argument("grid_search: C must be > 0");
            if (proto.has_gamma()) {
                if (space.log2_gamma.empty())
                    throw std::invalid_argument("grid_search: empty gamma grid");
                for (double lg : space.log2_gamma) {
                    KernelSpec k = proto;
                    k.gamma = std::exp2(lg);
                    out.push_back({k, c});
                }
            } else {
                out.push_back({proto, c});
            }
        }
    }
    return out;
}

TuneResult evaluate_candidates(const Dataset& ds, const std::vector<CandidateSpec>& candidates,
                               int k, std::uint64_t seed, const TrainConfig& base_cfg,
                               TuneObjective objective, unsigned jobs) {
    bool has_pos = false, has_neg = false;
    for (int label : ds.labels) (label == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg)
        throw std::invalid_argument("tuning: dataset must contain both classes");
    if (k < 2) throw std::invalid_argument("tuning: K must be >= 2");

    // One shared fold assignment: every candidate sees identical folds.
    const FoldAssignment folds = kfold_split(ds.labels, k, seed);

    TuneResult result;
    result.folds = k;
    result.objective = objective;
    result.table.resize(candidates.size());

    parallel_for(candidates.size(), jobs, [&](std::size_t idx) {
        const CandidateSpec& cand = candidates[idx];
        TrainConfig cfg = base_cfg;
        cfg.C = cand.c;
        const EvalReport report = cross_validate(ds, cand.kernel, cfg, folds, 1);
        TuneCandidate entry;
        entry.kernel = cand.kernel;
        entry.c = cand.c;
        entry.converged = report.all_converged;
        if (objective == TuneObjective::CA) {
            double mean = 0.0;
            for (double v : report.fold_ca) mean += v;
            mean /= static_cast<double>(report.fold_ca.size());
            double var = 0.0;
            for (double v : report.fold_ca) var += (v - mean) * (v - mean);
            const std::size_t nf = report.fold_ca.size();
            entry.mean_score = mean;
            entry.sd_score = nf > 1 ? std::sqrt(var / static_cast<double>(nf - 1)) : 0.0;
        } else {
            entry.mean_score = report.roc.auc;
            entry.sd_score = 0.0; // pooled AUC has no per-fold spread
        }
        result.table[idx] = entry;
    });

    bool any_converged = false;
    for (const auto& entry : result.table) any_converged = any_converged || entry.converged;
    if (!any_converged) {
        std::string diag = "tuning: no candidate converged;";
        for (const auto& entry : result.table)
            diag += " " + entry.kernel.name() + "(C=" + fmt_g10(entry.c) +
                    (entry.kernel.has_gamma() ? ",g=" + fmt_g10(entry.kernel.gamma) : "") +
                    ")=" + fmt_g10(entry.mean_score);
        throw std::runtime_error(diag);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < result.table.size(); ++i) {
        const auto& a = result.table[i];
        const auto& b = result.table[best];
        if (a.mean_score > b.mean_score) { best = i; continue; }
        if (a.mean_score < b.mean_score) continue;
        if (a.c < b.c) { best = i; continue; }
        if (a.c > b.c) continue;
        if (a.kernel.has_gamma() && b.kernel.has_gamma() && a.kernel.gamma < b.kernel.gamma)
            best = i;
    }
    result.best = result.table[best];
    return result;
}

} // namespace

TuneResult grid_search(const Dataset& ds, const SearchSpace& space, int k, std::uint64_t seed,
                       const TrainConfig& base_cfg, TuneObjective objective, unsigned jobs) {
    if (space.kernels.empty()) throw std::invalid_argument("grid_search: no kernels to sweep");
    return evaluate_candidates(ds, enumerate_candidates(space), k, seed, base_cfg, objective,
                               jobs);
}

TuneResult random_search(const Dataset& ds, const RandomSearchBounds& bounds,
                         std::size_t n_draws, int k, std::uint64_t seed,
                         const TrainConfig& base_cfg, TuneObjective objective, unsigned jobs) {
    if (n_draws == 0) throw std::invalid_argument("random_search: need n_draws >= 1");
    Rng rng(splitmix64(seed ^ 0x52414e44u));
    std::vector<CandidateSpec> candidates;
    candidates.reserve(n_draws);
    for (std::size_t i = 0; i < n_draws; ++i) {
        CandidateSpec cand;
        cand.c = std::exp2(rng.uniform(bounds.log2_C_lo, bounds.log2_C_hi));
        cand.kernel = bounds.kernel;
        if (cand.kernel.has_gamma())
            cand.kernel.gamma = std::exp2(rng.uniform(bounds.log2_gamma_lo, bounds.log2_gamma_hi));
        candidates.push_back(cand);
    }
    return evaluate_candidates(ds, candidates, k, seed, base_cfg, objective, jobs);
}

std::string write_tune_csv(const TuneResult& result) {
    std::string out = "kernel,log2C,log2gamma,mean_ca,sd_ca\n";
    const auto row = [](const TuneCandidate& c) {
        std::string line = c.kernel.name();
        if (c.kernel.kind == KernelSpec::Kind::Polynomial)
            line += std::to_string(c.kernel.degree);
        line += "," + fmt_g17(std::log2(c.c)) + ",";
        if (c.kernel.has_gamma()) line += fmt_g17(std::log2(c.kernel.gamma));
        line += "," + fmt_g17(c.mean_score) + "," + fmt_g17(c.sd_score);
        return line;
    };
    for (const auto& c : result.table) out += row(c) + "\n";
    out += "best," + row(result.best) + "\n";
    return out;
}

} // namespace ptsvm
