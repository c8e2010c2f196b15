#include "ptsvm/dynamics.hpp"

#include "ptsvm/text_util.hpp"

#include <cmath>
#include <numbers>

namespace ptsvm {

const char* fault_type_name(FaultType t) {
    switch (t) {
        case FaultType::LLL: return "LLL";
        case FaultType::LLG: return "LLG";
        case FaultType::LL: return "LL";
        case FaultType::LG: return "LG";
    }
    return "?";
}

FaultType fault_type_from_name(const std::string& name) {
    if (name == "LLL") return FaultType::LLL;
    if (name == "LLG") return FaultType::LLG;
    if (name == "LL") return FaultType::LL;
    if (name == "LG") return FaultType::LG;
    throw std::invalid_argument("unknown fault type '" + name + "'");
}

int fault_type_severity(FaultType t) {
    switch (t) {
        case FaultType::LG: return 1;
        case FaultType::LL: return 2;
        case FaultType::LLG: return 3;
        case FaultType::LLL: return 4;
    }
    return 0;
}

FaultShunt effective_fault_admittance(FaultType type, Complex z_thev) {
    if (std::abs(z_thev) <= 0.0)
        throw std::invalid_argument("effective_fault_admittance: |z_thev| must be > 0");
    switch (type) {
        case FaultType::LLL: return {Complex(1e6, 0.0)};
        case FaultType::LLG: return {1.0 / (0.75 * z_thev)};
        case FaultType::LL: return {1.0 / z_thev};
        case FaultType::LG: return {1.0 / (4.0 * z_thev)};
    }
    throw std::logic_error("unreachable fault type");
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRad2Deg = 180.0 / kPi;

/// Network + loads-as-admittance + machine transient reactances, with one
/// extra node per machine for the internal EMF. Node order: buses of `net`
/// first, machine internal nodes after.
AdmittanceMatrix machine_augmented_y(const Network& net, const Network& base_for_machines,
                                     const Eigen::VectorXcd& voltages) {
    const int nb = static_cast<int>(net.buses.size());
    const int m = static_cast<int>(base_for_machines.generators.size());
    Eigen::VectorXcd v_ext(nb);
    for (int i = 0; i < nb; ++i)
        v_ext(i) = i < voltages.size() ? voltages(i) : Complex(1.0, 0.0);
    const AdmittanceMatrix y_net = build_admittance(net, LoadModel::AsAdmittance, &v_ext);

    AdmittanceMatrix y = AdmittanceMatrix::Zero(nb + m, nb + m);
    y.topLeftCorner(nb, nb) = y_net;
    for (int k = 0; k < m; ++k) {
        const Generator& gen = base_for_machines.generators[static_cast<std::size_t>(k)];
        const int t = net.bus_index(gen.bus);
        if (t < 0)
            throw SimulationError("machine bus " + std::to_string(gen.bus) +
                                      " missing from network",
                                  0.0);
        const Complex y_m = 1.0 / Complex(0.0, gen.xdp_system(net.system_MVA_base));
        const int g = nb + k;
        y(g, g) += y_m;
        y(t, t) += y_m;
        y(g, t) -= y_m;
        y(t, g) -= y_m;
    }
    return y;
}

AdmittanceMatrix reduce_to_machines(const AdmittanceMatrix& y, int n_buses, int m) {
    std::vector<int> keep(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) keep[static_cast<std::size_t>(k)] = n_buses + k;
    return kron_reduce(y, keep);
}

/// Thevenin impedance seen from `node` with machine EMFs shorted: the bus
/// block of the augmented matrix already carries x'_d as terminal shunts,
/// so one LU solve on it gives Z_kk.
Complex thevenin_at(const AdmittanceMatrix& y_aug, int n_buses, int node) {
    const AdmittanceMatrix y_bus = y_aug.topLeftCorner(n_buses, n_buses);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n_buses);
    e(node) = Complex(1.0, 0.0);
    Eigen::FullPivLU<AdmittanceMatrix> lu(y_bus);
    if (!lu.isInvertible())
        throw SimulationError("singular bus admittance while computing the fault Thevenin", 0.0);
    return lu.solve(e)(node);
}

void check_connected_after_trip(const Network& net) {
    try {
        net.validate_static();
    } catch (const std::exception& e) {
        throw SimulationError(std::string("islanded network after line trip: ") + e.what(), 0.0);
    }
}

struct SwingSystem {
    int m = 0;
    std::vector<double> M;   // 2 H_sys / omega_s
    std::vector<double> D;   // damping, pu torque per pu speed; divided by omega_s in use
    std::vector<double> E;
    std::vector<double> Pm;
    double omega_s = 0.0;
    const AdmittanceMatrix* y = nullptr;

    // state layout: [delta_0..delta_{m-1}, omega_0..omega_{m-1}]
    void deriv(const std::vector<double>& s, std::vector<double>& ds) const {
        std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            cs[static_cast<std::size_t>(i)] = std::cos(s[static_cast<std::size_t>(i)]);
            sn[static_cast<std::size_t>(i)] = std::sin(s[static_cast<std::size_t>(i)]);
        }
        for (int i = 0; i < m; ++i) {
            double pe = 0.0;
            for (int j = 0; j < m; ++j) {
                const double g = (*y)(i, j).real(), b = (*y)(i, j).imag();
                // cos(di-dj), sin(di-dj) via the angle-sum identities
                const double c = cs[static_cast<std::size_t>(i)] * cs[static_cast<std::size_t>(j)] +
                                 sn[static_cast<std::size_t>(i)] * sn[static_cast<std::size_t>(j)];
                const double sdiff =
                    sn[static_cast<std::size_t>(i)] * cs[static_cast<std::size_t>(j)] -
                    cs[static_cast<std::size_t>(i)] * sn[static_cast<std::size_t>(j)];
                pe += E[static_cast<std::size_t>(i)] * E[static_cast<std::size_t>(j)] *
                      (g * c + b * sdiff);
            }
            const double om = s[static_cast<std::size_t>(m + i)];
            ds[static_cast<std::size_t>(i)] = om;
            ds[static_cast<std::size_t>(m + i)] =
                (Pm[static_cast<std::size_t>(i)] - pe -
                 D[static_cast<std::size_t>(i)] * om / omega_s) /
                M[static_cast<std::size_t>(i)];
        }
    }
};

void rk4_step(const SwingSystem& sys, std::vector<double>& s, double dt,
              std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
              std::vector<double>& k4, std::vector<double>& tmp) {
    const std::size_t n = s.size();
    sys.deriv(s, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
    sys.deriv(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
    sys.deriv(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + dt * k3[i];
    sys.deriv(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        s[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
}

double max_pairwise_separation(const std::vector<double>& s, int m) {
    double worst = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            worst = std::max(worst, std::abs(s[static_cast<std::size_t>(i)] -
                                             s[static_cast<std::size_t>(j)]));
    return worst;
}

} // namespace

SimOutcome simulate(const Network& net, const MachineInit& init, const FaultEvent& fault,
                    const SimulationConfig& cfg, const TrajectorySink& sink) {
    if (cfg.dt <= 0.0 || cfg.t_fault <= 0.0 || cfg.t_fault >= cfg.t_end)
        throw std::invalid_argument("simulate: need 0 < t_fault < t_end and dt > 0");
    const int m = static_cast<int>(net.generators.size());
    if (m == 0) throw std::invalid_argument("simulate: network has no machines");
    if (static_cast<int>(init.machines.size()) != m)
        throw std::invalid_argument("simulate: init does not match the machine count");

    const bool has_fault = fault.fct > 0.0 && fault.line_index >= 0;
    const double t_clear = cfg.t_fault + (has_fault ? fault.fct : 0.0);
    const bool clears_in_window = t_clear < cfg.t_end;

    SwingSystem sys;
    sys.m = m;
    sys.omega_s = 2.0 * kPi * net.frequency_hz;
    for (int k = 0; k < m; ++k) {
        const Generator& gen = net.generators[static_cast<std::size_t>(k)];
        sys.M.push_back(2.0 * gen.h_system(net.system_MVA_base) / sys.omega_s);
        sys.D.push_back(gen.D * gen.MVA_base / net.system_MVA_base);
        sys.E.push_back(init.machines[static_cast<std::size_t>(k)].E_mag);
        sys.Pm.push_back(init.machines[static_cast<std::size_t>(k)].P_m);
    }

    const int nb = static_cast<int>(net.buses.size());
    AdmittanceMatrix y_pre, y_on, y_post;
    {
        const AdmittanceMatrix y_aug = machine_augmented_y(net, net, init.bus_voltage);
        y_pre = reduce_to_machines(y_aug, nb, m);
    }
    if (has_fault) {
        const FaultedNetwork faulted = insert_fault_node(net, fault.line_index, fault.lambda);
        const AdmittanceMatrix y_aug = machine_augmented_y(faulted.net, net, init.bus_voltage);
        const Complex z_thev = thevenin_at(y_aug, nb + 1, faulted.fault_bus_index);
        const FaultShunt shunt = effective_fault_admittance(fault.type, z_thev);
        AdmittanceMatrix y_flt = y_aug;
        y_flt(faulted.fault_bus_index, faulted.fault_bus_index) += shunt.y_f;
        y_on = reduce_to_machines(y_flt, nb + 1, m);
        if (clears_in_window) {
            const Network post = remove_branch(net, fault.line_index);
            check_connected_after_trip(post);
            const AdmittanceMatrix y_aug_post = machine_augmented_y(post, net, init.bus_voltage);
            y_post = reduce_to_machines(y_aug_post, nb, m);
        }
    }

    std::vector<double> state(static_cast<std::size_t>(2 * m), 0.0);
    for (int k = 0; k < m; ++k)
        state[static_cast<std::size_t>(k)] = init.machines[static_cast<std::size_t>(k)].delta0;

    SimOutcome out;
    out.delta_max_deg = max_pairwise_separation(state, m) * kRad2Deg;

    std::vector<double> k1(state.size()), k2(state.size()), k3(state.size()), k4(state.size()),
        tmp(state.size());

    const auto emit = [&](double t) {
        if (!sink) return;
        TrajectorySample sample;
        sample.t = t;
        sample.delta.assign(state.begin(), state.begin() + m);
        sample.omega.assign(state.begin() + m, state.end());
        sink(sample);
    };
    emit(0.0);

    struct Phase {
        double t_begin, t_end;
        const AdmittanceMatrix* y;
    };
    std::vector<Phase> phases;
    if (!has_fault) {
        phases.push_back({0.0, cfg.t_end, &y_pre});
    } else if (!clears_in_window) {
        phases.push_back({0.0, cfg.t_fault, &y_pre});
        phases.push_back({cfg.t_fault, cfg.t_end, &y_on});
    } else {
        phases.push_back({0.0, cfg.t_fault, &y_pre});
        phases.push_back({cfg.t_fault, t_clear, &y_on});
        phases.push_back({t_clear, cfg.t_end, &y_post});
    }

    bool done = false;
    for (const auto& phase : phases) {
        if (done) break;
        sys.y = phase.y;
        double t = phase.t_begin;
        while (t < phase.t_end - 1e-12 && !done) {
            const double step = std::min(cfg.dt, phase.t_end - t);
            rk4_step(sys, state, step, k1, k2, k3, k4, tmp);
            t += step;
            for (double v : state)
                if (!std::isfinite(v))
                    throw SimulationError("non-finite machine state at t = " + fmt_g10(t), t);
            emit(t);
            const double sep_deg = max_pairwise_separation(state, m) * kRad2Deg;
            out.delta_max_deg = std::max(out.delta_max_deg, sep_deg);
            if (sep_deg > cfg.angle_ceiling_deg) {
                out.early_exit = true;
                done = true;
            }
        }
    }

    out.tsi = compute_tsi(out.delta_max_deg);
    out.label = stability_label(out.tsi);
    return out;
}

double compute_tsi(double delta_max_deg) {
    if (delta_max_deg < 0.0) throw std::invalid_argument("compute_tsi: delta_max must be >= 0");
    return (360.0 - delta_max_deg) / (360.0 + delta_max_deg);
}

int stability_label(double tsi) { return tsi < 0.0 ? 1 : 0; }

std::string write_trajectory_csv(const std::vector<TrajectorySample>& samples) {
    std::string out = "t";
    if (!samples.empty()) {
        for (std::size_t i = 1; i <= samples.front().delta.size(); ++i)
            out += ",delta_" + std::to_string(i);
        for (std::size_t i = 1; i <= samples.front().omega.size(); ++i)
            out += ",omega_" + std::to_string(i);
    }
    out += "\n";
    for (const auto& s : samples) {
        out += fmt_g10(s.t);
        for (double d : s.delta) out += "," + fmt_g10(d);
        for (double w : s.omega) out += "," + fmt_g10(w);
        out += "\n";
    }
    return out;
}

} // namespace ptsvm
