#include "ptsvm/admittance.hpp"

#include <algorithm>
#include <stdexcept>

namespace ptsvm {

AdmittanceMatrix build_admittance(const Network& net, LoadModel load_model,
                                  const Eigen::VectorXcd* voltages) {
    const int n = static_cast<int>(net.buses.size());
    AdmittanceMatrix y = AdmittanceMatrix::Zero(n, n);

    for (const auto& br : net.branches) {
        if (br.r == 0.0 && br.x == 0.0)
            throw std::runtime_error("admittance: branch " + std::to_string(br.from) + "-" +
                                     std::to_string(br.to) + " has r = x = 0");
        const int i = net.bus_index(br.from);
        const int j = net.bus_index(br.to);
        const Complex ys = 1.0 / Complex(br.r, br.x);
        const Complex ych(0.0, br.b_charging / 2.0);
        const double t = br.tap;
        y(i, i) += (ys + ych) / (t * t);
        y(j, j) += ys + ych;
        y(i, j) -= ys / t;
        y(j, i) -= ys / t;
    }

    for (int k = 0; k < n; ++k) {
        const Bus& bus = net.buses[static_cast<std::size_t>(k)];
        y(k, k) += Complex(bus.shunt_G, bus.shunt_B);
        if (load_model == LoadModel::AsAdmittance && (bus.load_P != 0.0 || bus.load_Q != 0.0)) {
            if (voltages == nullptr || voltages->size() != n)
                throw std::invalid_argument(
                    "admittance: load model needs one voltage per bus");
            const double vm2 = std::norm((*voltages)(k));
            if (vm2 <= 0.0)
                throw std::invalid_argument("admittance: zero voltage magnitude at bus " +
                                            std::to_string(bus.id));
            y(k, k) += Complex(bus.load_P, -bus.load_Q) / vm2;
        }
    }
    return y;
}

FaultedNetwork insert_fault_node(const Network& net, int line_index, double lambda) {
    if (line_index < 0 || line_index >= static_cast<int>(net.branches.size()))
        throw std::out_of_range("insert_fault_node: bad branch index");
    const Branch line = net.branches[static_cast<std::size_t>(line_index)];
    if (!line.is_line)
        throw std::invalid_argument("insert_fault_node: branch " + std::to_string(line.from) +
                                    "-" + std::to_string(line.to) + " is not fault-eligible");
    if (lambda < 0.0 || lambda > 1.0)
        throw std::invalid_argument("insert_fault_node: lambda outside [0,1]");
    const double lam = std::clamp(lambda, 0.01, 0.99);

    FaultedNetwork out;
    out.net = net;
    int max_id = 0;
    for (const auto& b : net.buses) max_id = std::max(max_id, b.id);

    Bus fault_bus;
    fault_bus.id = max_id + 1;
    fault_bus.name = "FAULT POINT";
    fault_bus.kind = BusKind::PQ;
    fault_bus.base_kV = net.bus_by_id(line.from).base_kV;
    out.fault_bus_id = fault_bus.id;
    out.fault_bus_index = static_cast<int>(out.net.buses.size());
    out.net.buses.push_back(fault_bus);

    Branch seg_a = line;
    seg_a.to = fault_bus.id;
    seg_a.r = line.r * lam;
    seg_a.x = line.x * lam;
    seg_a.b_charging = line.b_charging * lam;
    seg_a.is_line = false;

    Branch seg_b = line;
    seg_b.from = fault_bus.id;
    seg_b.r = line.r * (1.0 - lam);
    seg_b.x = line.x * (1.0 - lam);
    seg_b.b_charging = line.b_charging * (1.0 - lam);
    seg_b.is_line = false;

    out.net.branches[static_cast<std::size_t>(line_index)] = seg_a;
    out.segment_a = line_index;
    out.segment_b = static_cast<int>(out.net.branches.size());
    out.net.branches.push_back(seg_b);
    return out;
}

AdmittanceMatrix kron_reduce(const AdmittanceMatrix& y, const std::vector<int>& keep) {
    const int n = static_cast<int>(y.rows());
    std::vector<char> kept(static_cast<std::size_t>(n), 0);
    for (int k : keep) {
        if (k < 0 || k >= n) throw std::out_of_range("kron_reduce: keep index out of range");
        kept[static_cast<std::size_t>(k)] = 1;
    }
    std::vector<int> elim;
    for (int i = 0; i < n; ++i)
        if (!kept[static_cast<std::size_t>(i)]) elim.push_back(i);
    const int nk = static_cast<int>(keep.size());
    const int ne = static_cast<int>(elim.size());
    if (ne == 0) {
        AdmittanceMatrix out(nk, nk);
        for (int a = 0; a < nk; ++a)
            for (int b = 0; b < nk; ++b) out(a, b) = y(keep[a], keep[b]);
        return out;
    }

    AdmittanceMatrix ykk(nk, nk), yke(nk, ne), yek(ne, nk), yee(ne, ne);
    for (int a = 0; a < nk; ++a)
        for (int b = 0; b < nk; ++b) ykk(a, b) = y(keep[a], keep[b]);
    for (int a = 0; a < nk; ++a)
        for (int b = 0; b < ne; ++b) yke(a, b) = y(keep[a], elim[b]);
    for (int a = 0; a < ne; ++a)
        for (int b = 0; b < nk; ++b) yek(a, b) = y(elim[a], keep[b]);
    for (int a = 0; a < ne; ++a)
        for (int b = 0; b < ne; ++b) yee(a, b) = y(elim[a], elim[b]);

    Eigen::FullPivLU<AdmittanceMatrix> lu(yee);
    if (!lu.isInvertible())
        throw std::runtime_error("kron_reduce: eliminated block is singular (isolated node?)");
    return ykk - yke * lu.solve(yek);
}

} // namespace ptsvm
