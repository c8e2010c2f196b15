#pragma once

#include "ptsvm/cdf.hpp"
#include "ptsvm/network.hpp"

#include <string>

#ifndef PTSVM_DATA_DIR
#error "PTSVM_DATA_DIR must be defined by the build"
#endif

namespace ptsvm::testing {

inline std::string data_path(const std::string& name) {
    return std::string(PTSVM_DATA_DIR) + "/" + name;
}

inline Network load_ieee14() {
    return load_network(data_path("ieee14.cdf"), data_path("ieee14.dyn"));
}

inline Network load_threebus() {
    return load_network(data_path("threebus.cdf"), data_path("threebus.dyn"));
}

inline Bus make_bus(int id, BusKind kind, double v_set, double load_p = 0.0, double load_q = 0.0) {
    Bus b;
    b.id = id;
    b.name = "BUS " + std::to_string(id);
    b.kind = kind;
    b.base_kV = 100.0;
    b.V_set = v_set;
    b.solved_V = v_set > 0.0 ? v_set : 1.0;
    b.load_P = load_p;
    b.load_Q = load_q;
    return b;
}

inline Branch make_line(int from, int to, double r, double x, double b = 0.0, int circuit = 1) {
    Branch br;
    br.from = from;
    br.to = to;
    br.r = r;
    br.x = x;
    br.b_charging = b;
    br.circuit = circuit;
    return br;
}

inline Generator make_machine(int bus, double p_gen, double h, double xdp, double d = 0.0,
                              double mva = 100.0) {
    Generator g;
    g.bus = bus;
    g.P_gen = p_gen;
    g.Q_min = -9.99;
    g.Q_max = 9.99;
    g.H = h;
    g.x_d_prime = xdp;
    g.D = d;
    g.MVA_base = mva;
    return g;
}

/// Machine against a stiff bus over two parallel lines; the canonical
/// critical-clearing-time study case.
inline Network make_smib(double p_gen = 1.0, double h = 3.0, double xdp = 0.3,
                         double line_x = 0.4, double damping = 0.0) {
    Network net;
    net.buses.push_back(make_bus(1, BusKind::PV, 1.0));
    net.buses.push_back(make_bus(2, BusKind::Slack, 1.0));
    net.branches.push_back(make_line(1, 2, 0.0, line_x, 0.0, 1));
    net.branches.push_back(make_line(1, 2, 0.0, line_x, 0.0, 2));
    net.generators.push_back(make_machine(1, p_gen, h, xdp, damping));
    net.generators.push_back(make_machine(2, 0.0, 1e6, 1e-6, 0.0));
    return net;
}

/// Two identical machines joined by parallel lines, no loads; symmetric
/// under machine exchange.
inline Network make_twin_pair(double h = 2.0, double xdp = 0.3, double line_x = 0.5) {
    Network net;
    net.buses.push_back(make_bus(1, BusKind::Slack, 1.0));
    net.buses.push_back(make_bus(2, BusKind::PV, 1.0));
    net.branches.push_back(make_line(1, 2, 0.0, line_x, 0.0, 1));
    net.branches.push_back(make_line(1, 2, 0.0, line_x, 0.0, 2));
    net.generators.push_back(make_machine(1, 0.0, h, xdp));
    net.generators.push_back(make_machine(2, 0.0, h, xdp));
    return net;
}

} // namespace ptsvm::testing
