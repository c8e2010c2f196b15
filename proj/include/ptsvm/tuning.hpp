#pragma once

#include "ptsvm/metrics.hpp"
#include "ptsvm/scenario.hpp"
#include "ptsvm/svm.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ptsvm {

struct SearchSpace {
    std::vector<double> log2_C;       // default -5..15 step 2
    std::vector<double> log2_gamma;   // default -15..3 step 2
    std::vector<KernelSpec> kernels;  // gamma fields ignored; filled per candidate

    static SearchSpace defaults();
};

enum class TuneObjective { CA, AUC };

struct TuneCandidate {
    KernelSpec kernel; // gamma filled in for kernels that have one
    double c = 1.0;
    double mean_score = 0.0;
    double sd_score = 0.0;
    bool converged = true;
};

struct TuneResult {
    TuneCandidate best;
    std::vector<TuneCandidate> table; // candidate-definition order
    int folds = 0;
    TuneObjective objective = TuneObjective::CA;
};

/// Evaluates every (kernel, C[, gamma]) candidate by K-fold cross-validation
/// (standardization fit per training fold inside the trainer). Ties prefer
/// smaller C, then smaller gamma, then earlier kernel.
TuneResult grid_search(const Dataset& ds, const SearchSpace& space, int k, std::uint64_t seed,
                       const TrainConfig& base_cfg = {},
                       TuneObjective objective = TuneObjective::CA, unsigned jobs = 1);

struct RandomSearchBounds {
    double log2_C_lo = -5.0, log2_C_hi = 15.0;
    double log2_gamma_lo = -15.0, log2_gamma_hi = 3.0;
    KernelSpec kernel = KernelSpec::rbf(1.0);
};

/// Same objective and tie-breaking as grid_search over seeded log-uniform
/// draws.
TuneResult random_search(const Dataset& ds, const RandomSearchBounds& bounds,
                         std::size_t n_draws, int k, std::uint64_t seed,
                         const TrainConfig& base_cfg = {},
                         TuneObjective objective = TuneObjective::CA, unsigned jobs = 1);

std::string write_tune_csv(const TuneResult& result);

} // namespace ptsvm
