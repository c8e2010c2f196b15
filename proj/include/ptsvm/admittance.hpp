#pragma once

#include "ptsvm/network.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace ptsvm {

using Complex = std::complex<double>;

/// Dense complex nodal admittance matrix, per-unit siemens. Row/column k
/// corresponds to net.buses[k] unless callers append nodes themselves.
using AdmittanceMatrix = Eigen::MatrixXcd;

enum class LoadModel { Ignore, AsAdmittance };

/// Standard nodal Y: series admittance with tap handling, half the line
/// charging at each terminal, bus shunts. With LoadModel::AsAdmittance each
/// bus load becomes the shunt (P - jQ)/|V|^2 evaluated at the given voltages
/// (one entry per bus, in network order).
AdmittanceMatrix build_admittance(const Network& net, LoadModel load_model,
                                  const Eigen::VectorXcd* voltages = nullptr);

struct FaultedNetwork {
    Network net;
    int fault_bus_id = 0;
    int fault_bus_index = 0; // always the last bus
    int segment_a = 0;       // branch indices of the two series segments
    int segment_b = 0;
};

/// Replaces a fault-eligible line by two series segments joined at a new
/// fault node. The location fraction is clamped to [0.01, 0.99] so neither
/// segment degenerates to zero impedance; charging splits proportionally.
FaultedNetwork insert_fault_node(const Network& net, int line_index, double lambda);

/// Y_red = Y_kk - Y_ke Y_ee^-1 Y_ek over the kept node indices (result rows
/// follow the order of `keep`). Throws if the eliminated block is singular.
AdmittanceMatrix kron_reduce(const AdmittanceMatrix& y, const std::vector<int>& keep);

} // namespace ptsvm
