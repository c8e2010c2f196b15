#include "ptsvm/scenario.hpp"

#include "ptsvm/cdf.hpp"
#include "ptsvm/parallel.hpp"
#include "ptsvm/text_util.hpp"

#include <atomic>
#include <sstream>
#include <stdexcept>

namespace ptsvm {

FaultType sample_fault_type(double u) {
    if (u < 0.0 || u >= 1.0) throw std::invalid_argument("sample_fault_type: u outside [0,1)");
    if (u < 0.05) return FaultType::LLL;
    if (u < 0.15) return FaultType::LL;
    if (u < 0.30) return FaultType::LLG;
    return FaultType::LG;
}

Scenario sample_scenario(const Network& net, int line_rank, Rng& rng,
                         const SimulationConfig& cfg) {
    Scenario s;
    s.line_rank = line_rank;
    s.fault.line_index = net.line_index_for_rank(line_rank);
    s.fault.type = sample_fault_type(rng.uniform());
    s.fault.lambda = rng.uniform();
    const double fct_window = cfg.t_end - cfg.t_fault;
    double fct = rng.normal(0.9, 0.1);
    while (fct <= 0.0 || fct >= fct_window) fct = rng.normal(0.9, 0.1);
    s.fault.fct = fct;
    const auto load_buses = net.load_bus_indices();
    s.load_scale.reserve(load_buses.size());
    for (std::size_t i = 0; i < load_buses.size(); ++i) {
        double m = rng.normal(1.0, 0.1);
        while (m <= 0.1) m = rng.normal(1.0, 0.1);
        s.load_scale.push_back(m);
    }
    return s;
}

Eigen::MatrixXd Dataset::feature_matrix() const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_features));
    for (std::size_t i = 0; i < n_rows; ++i)
        for (std::size_t j = 0; j < n_features; ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = feature(i, j);
    return x;
}

std::vector<std::string> feature_names(bool five_mode) {
    if (five_mode) return {"load", "ftype", "line", "floc", "fct"};
    return {"load", "ftype", "floc", "fct"};
}

std::vector<double> encode_features(const Scenario& s, const Network& net, bool five_mode) {
    const auto load_buses = net.load_bus_indices();
    if (s.load_scale.size() != load_buses.size())
        throw std::invalid_argument("encode_features: load multiplier count mismatch");
    double base_total = 0.0, scaled_total = 0.0;
    for (std::size_t i = 0; i < load_buses.size(); ++i) {
        const double p = net.buses[static_cast<std::size_t>(load_buses[i])].load_P;
        base_total += p;
        scaled_total += p * s.load_scale[i];
    }
    const double load_feature = base_total > 0.0 ? scaled_total / base_total : 1.0;
    const double n_lines = static_cast<double>(net.fault_eligible_lines().size());
    const double severity = static_cast<double>(fault_type_severity(s.fault.type));
    if (five_mode)
        return {load_feature, severity, static_cast<double>(s.line_rank), s.fault.lambda,
                s.fault.fct};
    const double coordinate = (static_cast<double>(s.line_rank) - 1.0 + s.fault.lambda) / n_lines;
    return {load_feature, severity, coordinate, s.fault.fct};
}

Dataset generate_dataset(const Network& net, std::size_t samples_per_line, std::uint64_t seed,
                         const GenerateOptions& opts) {
    net.validate();
    if (samples_per_line == 0)
        throw std::invalid_argument("generate_dataset: samples_per_line must be >= 1");
    // The base case must be solvable before burning time on the full loop.
    (void)solve_power_flow(net, opts.powerflow);

    const auto lines = net.fault_eligible_lines();
    const std::size_t n_lines = lines.size();
    const std::size_t n_rows = n_lines * samples_per_line;

    Dataset ds;
    ds.n_rows = n_rows;
    ds.five_feature_mode = opts.five_feature_mode;
    ds.feature_names = feature_names(opts.five_feature_mode);
    ds.n_features = ds.feature_names.size();
    ds.features.assign(n_rows * ds.n_features, 0.0);
    ds.labels.assign(n_rows, 0);
    ds.scenarios.resize(n_rows);
    ds.seed = seed;
    ds.samples_per_line = samples_per_line;
    ds.network_fingerprint = hex64(network_fingerprint(net));

    std::atomic<std::size_t> resamples{0};

    parallel_for(n_rows, opts.jobs, [&](std::size_t row) {
        const std::size_t line_pos = row / samples_per_line;
        const std::size_t sample_pos = row % samples_per_line;
        Rng rng(derive_seed(seed, line_pos, sample_pos));
        const int rank = static_cast<int>(line_pos) + 1;

        // A scenario whose power flow diverges is redrawn from the same
        // stream; the retry count is part of the dataset metadata.
        for (int attempt = 0;; ++attempt) {
            if (attempt > 200)
                throw std::runtime_error("generate_dataset: row " + std::to_string(row) +
                                         " kept diverging after 200 redraws");
            Scenario s = sample_scenario(net, rank, rng, opts.sim);
            Network scaled = scale_loads(net, s.load_scale);
            PowerFlowSolution sol;
            try {
                sol = solve_power_flow(scaled, opts.powerflow);
            } catch (const PowerFlowError&) {
                resamples.fetch_add(1);
                continue;
            }
            const MachineInit init = init_machines(scaled, sol);
            const SimOutcome outcome = simulate(scaled, init, s.fault, opts.sim);
            const auto feats = encode_features(s, net, opts.five_feature_mode);
            for (std::size_t j = 0; j < feats.size(); ++j)
                ds.features[row * ds.n_features + j] = feats[j];
            ds.labels[row] = outcome.label;
            ds.scenarios[row] = std::move(s);
            break;
        }
    });

    ds.resample_count = resamples.load();
    if (static_cast<double>(ds.resample_count) >
        opts.max_resample_fraction * static_cast<double>(n_rows))
        throw std::runtime_error(
            "generate_dataset: " + std::to_string(ds.resample_count) +
            " power-flow resamples exceed " +
            std::to_string(opts.max_resample_fraction * 100.0) + "% of " +
            std::to_string(n_rows) + " rows; the sampled load range likely breaks the case");
    return ds;
}

FoldAssignment kfold_split(const std::vector<int>& labels, int k, std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (k < 2) throw std::invalid_argument("kfold_split: need K >= 2");
    if (static_cast<std::size_t>(k) > n)
        throw std::invalid_argument("kfold_split: K exceeds the row count");

    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < n; ++i)
        (labels[i] == 1 ? positives : negatives).push_back(i);

    Rng rng(splitmix64(seed ^ 0x6b66f01d9fb54321ULL));
    const auto shuffle = [&rng](std::vector<std::size_t>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
            std::swap(v[i - 1], v[j]);
        }
    };
    shuffle(positives);
    shuffle(negatives);

    FoldAssignment fa;
    fa.k = k;
    fa.fold_of.assign(n, 0);
    std::size_t counter = 0;
    for (std::size_t idx : positives) fa.fold_of[idx] = static_cast<int>(counter++ % k);
    for (std::size_t idx : negatives) fa.fold_of[idx] = static_cast<int>(counter++ % k);
    return fa;
}

FoldAssignment kfold_split(std::size_t n, int k, std::uint64_t seed) {
    return kfold_split(std::vector<int>(n, 0), k, seed);
}

std::string write_dataset_csv(const Dataset& ds) {
    std::string out;
    for (std::size_t j = 0; j < ds.feature_names.size(); ++j)
        out += (j ? "," : "") + ds.feature_names[j];
    out += ",label\n";
    for (std::size_t i = 0; i < ds.n_rows; ++i) {
        for (std::size_t j = 0; j < ds.n_features; ++j)
            out += (j ? "," : "") + fmt_g17(ds.feature(i, j));
        out += "," + std::to_string(ds.labels[i]) + "\n";
    }
    return out;
}

Dataset parse_dataset_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("dataset csv: empty file");
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    const auto header = split(line, ',');
    if (header.size() < 2 || header.back() != "label")
        throw std::runtime_error("dataset csv: header must end with 'label'");

    Dataset ds;
    ds.feature_names.assign(header.begin(), header.end() - 1);
    ds.n_features = ds.feature_names.size();
    ds.five_feature_mode = ds.n_features == 5;
    const auto expected4 = feature_names(false);
    const auto expected5 = feature_names(true);
    if (ds.feature_names != expected4 && ds.feature_names != expected5)
        throw std::runtime_error("dataset csv: unexpected header layout");

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != ds.n_features + 1)
            throw std::runtime_error("dataset csv: line " + std::to_string(line_no) + " has " +
                                     std::to_string(cells.size()) + " cells");
        for (std::size_t j = 0; j < ds.n_features; ++j) {
            const double v = std::stod(cells[j]);
            if (!std::isfinite(v))
                throw std::runtime_error("dataset csv: non-finite value at line " +
                                         std::to_string(line_no));
            ds.features.push_back(v);
        }
        const int label = std::stoi(cells.back());
        if (label != 0 && label != 1)
            throw std::runtime_error("dataset csv: label must be 0 or 1 at line " +
                                     std::to_string(line_no));
        ds.labels.push_back(label);
        ++ds.n_rows;
    }
    if (ds.n_rows == 0) throw std::runtime_error("dataset csv: no data rows");
    return ds;
}

std::string write_dataset_meta(const Dataset& ds) {
    std::string out;
    out += "seed " + std::to_string(ds.seed) + "\n";
    out += "samples_per_line " + std::to_string(ds.samples_per_line) + "\n";
    out += "rows " + std::to_string(ds.n_rows) + "\n";
    out += "features " + std::to_string(ds.n_features) + "\n";
    out += "feature_mode " + std::string(ds.five_feature_mode ? "extended" : "default") + "\n";
    out += "network_fingerprint " + ds.network_fingerprint + "\n";
    out += "resample_count " + std::to_string(ds.resample_count) + "\n";
    std::size_t unstable = 0;
    for (int v : ds.labels) unstable += static_cast<std::size_t>(v);
    out += "unstable_rows " + std::to_string(unstable) + "\n";
    return out;
}

} // namespace ptsvm
