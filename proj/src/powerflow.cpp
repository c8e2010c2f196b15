#include "ptsvm/powerflow.hpp"

#include "ptsvm/text_util.hpp"

#include <cmath>
#include <numbers>

namespace ptsvm {

namespace {

struct BusSpec {
    BusKind kind;
    double p_spec = 0.0; // net injection target, per-unit
    double q_spec = 0.0;
    double v_set = 1.0;
};

struct NewtonResult {
    Eigen::VectorXcd V;
    int iterations = 0;
    double max_mismatch = 0.0;
    std::vector<double> history;
    bool converged = false;
};

NewtonResult newton_solve(const AdmittanceMatrix& y, std::vector<BusSpec>& spec,
                          const Eigen::VectorXcd& v_start, const PowerFlowOptions& opts) {
    const int n = static_cast<int>(spec.size());
    Eigen::VectorXd vm(n), va(n);
    for (int i = 0; i < n; ++i) {
        vm(i) = std::abs(v_start(i));
        va(i) = std::arg(v_start(i));
    }

    std::vector<int> ang_idx, mag_idx;
    for (int i = 0; i < n; ++i) {
        if (spec[static_cast<std::size_t>(i)].kind != BusKind::Slack) ang_idx.push_back(i);
        if (spec[static_cast<std::size_t>(i)].kind == BusKind::PQ) mag_idx.push_back(i);
    }
    const int na = static_cast<int>(ang_idx.size());
    const int nm = static_cast<int>(mag_idx.size());
    const int unknowns = na + nm;

    Eigen::VectorXd p_calc(n), q_calc(n);
    const auto update_injections = [&] {
        for (int i = 0; i < n; ++i) {
            double p = 0.0, q = 0.0;
            for (int j = 0; j < n; ++j) {
                const double g = y(i, j).real(), b = y(i, j).imag();
                const double th = va(i) - va(j);
                const double c = std::cos(th), s = std::sin(th);
                p += vm(i) * vm(j) * (g * c + b * s);
                q += vm(i) * vm(j) * (g * s - b * c);
            }
            p_calc(i) = p;
            q_calc(i) = q;
        }
    };

    NewtonResult out;
    for (int iter = 0; iter <= opts.max_iter; ++iter) {
        update_injections();
        Eigen::VectorXd f(unknowns);
        for (int a = 0; a < na; ++a)
            f(a) = p_calc(ang_idx[a]) - spec[static_cast<std::size_t>(ang_idx[a])].p_spec;
        for (int m = 0; m < nm; ++m)
            f(na + m) = q_calc(mag_idx[m]) - spec[static_cast<std::size_t>(mag_idx[m])].q_spec;
        const double mismatch = unknowns == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
        out.history.push_back(mismatch);
        out.max_mismatch = mismatch;
        out.iterations = iter;
        if (mismatch <= opts.tol) {
            out.converged = true;
            break;
        }
        if (iter == opts.max_iter) break;

        // Polar Jacobian [dP/dth dP/dV; dQ/dth dQ/dV]
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(unknowns, unknowns);
        for (int a = 0; a < na; ++a) {
            const int i = ang_idx[a];
            for (int b2 = 0; b2 < na; ++b2) {
                const int j = ang_idx[b2];
                if (i == j) {
                    jac(a, b2) = -q_calc(i) - y(i, i).imag() * vm(i) * vm(i);
                } else {
                    const double th = va(i) - va(j);
                    jac(a, b2) = vm(i) * vm(j) *
                                 (y(i, j).real() * std::sin(th) - y(i, j).imag() * std::cos(th));
                }
            }
            for (int m = 0; m < nm; ++m) {
                const int j = mag_idx[m];
                if (i == j) {
                    jac(a, na + m) = p_calc(i) / vm(i) + y(i, i).real() * vm(i);
                } else {
                    const double th = va(i) - va(j);
                    jac(a, na + m) =
                        vm(i) * (y(i, j).real() * std::cos(th) + y(i, j).imag() * std::sin(th));
                }
            }
        }
        for (int m = 0; m < nm; ++m) {
            const int i = mag_idx[m];
            for (int b2 = 0; b2 < na; ++b2) {
                const int j = ang_idx[b2];
                if (i == j) {
                    jac(na + m, b2) = p_calc(i) - y(i, i).real() * vm(i) * vm(i);
                } else {
                    const double th = va(i) - va(j);
                    jac(na + m, b2) = -vm(i) * vm(j) *
                                      (y(i, j).real() * std::cos(th) + y(i, j).imag() * std::sin(th));
                }
            }
            for (int m2 = 0; m2 < nm; ++m2) {
                const int j = mag_idx[m2];
                if (i == j) {
                    jac(na + m, na + m2) = q_calc(i) / vm(i) - y(i, i).imag() * vm(i);
                } else {
                    const double th = va(i) - va(j);
                    jac(na + m, na + m2) =
                        vm(i) * (y(i, j).real() * std::sin(th) - y(i, j).imag() * std::cos(th));
                }
            }
        }

        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible())
            throw PowerFlowError("power flow: singular Jacobian at iteration " +
                                     std::to_string(iter),
                                 mismatch);
        const Eigen::VectorXd dx = lu.solve(-f);
        for (int a = 0; a < na; ++a) va(ang_idx[a]) += dx(a);
        for (int m = 0; m < nm; ++m) vm(mag_idx[m]) += dx(na + m);
    }

    out.V.resize(n);
    for (int i = 0; i < n; ++i) out.V(i) = std::polar(vm(i), va(i));
    return out;
}

} // namespace

PowerFlowSolution solve_power_flow(const Network& net, const PowerFlowOptions& opts) {
    if (opts.tol <= 0.0) throw std::invalid_argument("power flow: tol must be > 0");
    net.validate_static();
    const int n = static_cast<int>(net.buses.size());
    const AdmittanceMatrix y = build_admittance(net, LoadModel::Ignore);

    std::vector<BusSpec> spec(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Bus& bus = net.buses[static_cast<std::size_t>(i)];
        const Generator* gen = net.generator_at_bus(bus.id);
        auto& s = spec[static_cast<std::size_t>(i)];
        s.kind = bus.kind;
        s.p_spec = (gen ? gen->P_gen : 0.0) - bus.load_P;
        s.q_spec = -bus.load_Q;
        s.v_set = bus.V_set > 0.0 ? bus.V_set : 1.0;
    }

    // Flat start: magnitudes at setpoint (PV/slack) or 1.0, all angles zero.
    Eigen::VectorXcd v0(n);
    for (int i = 0; i < n; ++i)
        v0(i) = spec[static_cast<std::size_t>(i)].kind == BusKind::PQ
                    ? Complex(1.0, 0.0)
                    : Complex(spec[static_cast<std::size_t>(i)].v_set, 0.0);

    PowerFlowSolution sol;
    NewtonResult res;
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        res = newton_solve(y, spec, v0, opts);
        if (!res.converged)
            throw PowerFlowError("power flow: no convergence after " +
                                     std::to_string(res.iterations) + " iterations, mismatch " +
                                     fmt_g10(res.max_mismatch),
                                 res.max_mismatch);
        if (!opts.enforce_q_limits) break;

        // Check reactive limits at buses still operating as PV.
        bool switched = false;
        for (int i = 0; i < n; ++i) {
            auto& s = spec[static_cast<std::size_t>(i)];
            if (s.kind != BusKind::PV) continue;
            const Bus& bus = net.buses[static_cast<std::size_t>(i)];
            const Generator* gen = net.generator_at_bus(bus.id);
            if (gen == nullptr || gen->Q_max <= gen->Q_min) continue;
            double q_inj = 0.0;
            for (int j = 0; j < n; ++j) {
                const double th = std::arg(res.V(i)) - std::arg(res.V(j));
                q_inj += std::abs(res.V(i)) * std::abs(res.V(j)) *
                         (y(i, j).real() * std::sin(th) - y(i, j).imag() * std::cos(th));
            }
            const double q_gen = q_inj + bus.load_Q;
            if (q_gen > gen->Q_max || q_gen < gen->Q_min) {
                s.kind = BusKind::PQ;
                s.q_spec = std::clamp(q_gen, gen->Q_min, gen->Q_max) - bus.load_Q;
                sol.pv_switched_to_pq.push_back(i);
                switched = true;
            }
        }
        if (!switched) break;
        v0 = res.V; // warm start for the re-solve
    }

    sol.V = res.V;
    sol.iterations = res.iterations;
    sol.max_mismatch = res.max_mismatch;
    sol.mismatch_history = res.history;
    sol.P_inj.resize(n);
    sol.Q_inj.resize(n);
    for (int i = 0; i < n; ++i) {
        Complex s_inj(0.0, 0.0);
        for (int j = 0; j < n; ++j) s_inj += sol.V(i) * std::conj(y(i, j) * sol.V(j));
        sol.P_inj(i) = s_inj.real();
        sol.Q_inj(i) = s_inj.imag();
    }
    return sol;
}

MachineInit init_machines(const Network& net, const PowerFlowSolution& sol) {
    if (sol.V.size() != static_cast<Eigen::Index>(net.buses.size()))
        throw std::invalid_argument("init_machines: solution does not match the network");
    MachineInit init;
    init.bus_voltage = sol.V;
    init.machines.reserve(net.generators.size());
    for (const auto& gen : net.generators) {
        const int idx = net.bus_index(gen.bus);
        if (idx < 0)
            throw std::runtime_error("init_machines: machine terminal bus " +
                                     std::to_string(gen.bus) + " missing from solution");
        const Bus& bus = net.buses[static_cast<std::size_t>(idx)];
        const Complex v_t = sol.V(idx);
        // Machine output = bus injection plus the local load.
        const Complex s_gen(sol.P_inj(idx) + bus.load_P, sol.Q_inj(idx) + bus.load_Q);
        const Complex i_t = std::conj(s_gen / v_t);
        const double xdp = gen.xdp_system(net.system_MVA_base);
        const Complex e = v_t + Complex(0.0, xdp) * i_t;
        MachineInit::Machine m;
        m.bus_index = idx;
        m.E_mag = std::abs(e);
        m.delta0 = std::arg(e);
        m.P_m = s_gen.real();
        init.machines.push_back(m);
    }
    return init;
}

std::string write_solved_case(const Network& net, const PowerFlowSolution& sol) {
    std::string out = "bus |V|_pu angle_deg P_pu Q_pu\n";
    const double rad2deg = 180.0 / std::numbers::pi;
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out += std::to_string(net.buses[i].id);
        out += " " + fmt_g10(std::abs(sol.V(k)));
        out += " " + fmt_g10(std::arg(sol.V(k)) * rad2deg);
        out += " " + fmt_g10(sol.P_inj(k));
        out += " " + fmt_g10(sol.Q_inj(k));
        out += "\n";
    }
    return out;
}

} // namespace ptsvm
