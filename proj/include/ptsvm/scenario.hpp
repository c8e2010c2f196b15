#pragma once

#include "ptsvm/dynamics.hpp"
#include "ptsvm/network.hpp"
#include "ptsvm/powerflow.hpp"
#include "ptsvm/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace ptsvm {

/// One Monte Carlo draw: which line faults, how, where along it, how long
/// until clearing, and the per-load scale factors in force.
struct Scenario {
    FaultEvent fault;
    int line_rank = 0;                  // 1-based rank among fault-eligible lines
    std::vector<double> load_scale;     // aligned with Network::load_bus_indices()
};

/// Inverse CDF of the fault-type mass function over the cumulative order
/// LLL [0,0.05), LL [0.05,0.15), LLG [0.15,0.30), LG [0.30,1).
FaultType sample_fault_type(double u);

/// Draws one scenario: lambda ~ U[0,1]; FCT ~ N(0.9 s, 0.1 s) resampled into
/// (0, t_end - t_fault); load multipliers ~ N(1.0, 0.1) resampled until
/// > 0.1. The draw order (fault type, lambda, FCT, loads in bus order) is a
/// reproducibility contract; do not reorder.
Scenario sample_scenario(const Network& net, int line_rank, Rng& rng,
                         const SimulationConfig& cfg = {});

struct Dataset {
    std::size_t n_rows = 0;
    std::size_t n_features = 0;
    std::vector<std::string> feature_names;
    std::vector<double> features; // row-major
    std::vector<int> labels;
    bool five_feature_mode = false;
    // provenance
    std::uint64_t seed = 0;
    std::size_t samples_per_line = 0;
    std::string network_fingerprint;
    std::size_t resample_count = 0;
    std::vector<Scenario> scenarios; // per row, in-memory only

    Eigen::MatrixXd feature_matrix() const;
    double feature(std::size_t row, std::size_t col) const {
        return features[row * n_features + col];
    }
};

/// Default 4-feature row: total system load (per-unit of the base total),
/// fault-type severity ordinal, global fault coordinate
/// (rank - 1 + lambda) / n_lines, and FCT in seconds. The 5-feature mode
/// splits the coordinate into the line rank and lambda.
std::vector<double> encode_features(const Scenario& s, const Network& net, bool five_mode);

std::vector<std::string> feature_names(bool five_mode);

struct GenerateOptions {
    bool five_feature_mode = false;
    SimulationConfig sim;
    PowerFlowOptions powerflow;
    unsigned jobs = 1;
    double max_resample_fraction = 0.01;
};

/// Runs the Monte Carlo loop: for every fault-eligible line draw
/// samples_per_line scenarios, re-solve the power flow under the scaled
/// loads, simulate, and record the feature row and stability label. Rows are
/// ordered (line, sample) and derive their random streams from
/// (seed, line, sample), so results do not depend on the worker count.
Dataset generate_dataset(const Network& net, std::size_t samples_per_line, std::uint64_t seed,
                         const GenerateOptions& opts = {});

struct FoldAssignment {
    int k = 0;
    std::vector<int> fold_of; // per row, in [0, k)
};

/// Seeded shuffle + round-robin dealing, stratified by label: per-fold sizes
/// and positive counts each differ by at most one.
FoldAssignment kfold_split(const std::vector<int>& labels, int k, std::uint64_t seed);
FoldAssignment kfold_split(std::size_t n, int k, std::uint64_t seed);

std::string write_dataset_csv(const Dataset& ds);
Dataset parse_dataset_csv(const std::string& text);
std::string write_dataset_meta(const Dataset& ds);

} // namespace ptsvm
