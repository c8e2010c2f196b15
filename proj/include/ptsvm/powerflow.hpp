#pragma once

#include "ptsvm/admittance.hpp"
#include "ptsvm/network.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace ptsvm {

class PowerFlowError : public std::runtime_error {
public:
    PowerFlowError(const std::string& what, double final_mismatch)
        : std::runtime_error(what), final_mismatch_(final_mismatch) {}
    double final_mismatch() const { return final_mismatch_; }

private:
    double final_mismatch_ = 0.0;
};

struct PowerFlowOptions {
    double tol = 1e-8;     // per-unit
    int max_iter = 20;
    bool enforce_q_limits = true;
    int max_outer = 8;     // PV->PQ switching rounds
};

struct PowerFlowSolution {
    Eigen::VectorXcd V;     // per bus, network order
    Eigen::VectorXd P_inj;  // solved net injections, per-unit
    Eigen::VectorXd Q_inj;
    int iterations = 0;
    double max_mismatch = 0.0;
    std::vector<int> pv_switched_to_pq;      // bus indices
    std::vector<double> mismatch_history;    // final Newton pass, per iteration
};

/// Newton-Raphson on the polar mismatch equations, flat start. PV buses hold
/// voltage while reactive output stays inside the machine limits; a violated
/// limit converts the bus to PQ at the limit for the next round.
PowerFlowSolution solve_power_flow(const Network& net, const PowerFlowOptions& opts = {});

struct MachineInit {
    struct Machine {
        int bus_index = 0;
        double E_mag = 0.0;   // internal EMF magnitude, per-unit
        double delta0 = 0.0;  // internal angle, radians
        double P_m = 0.0;     // mechanical power, per-unit on system base
    };
    std::vector<Machine> machines;       // aligned with net.generators
    Eigen::VectorXcd bus_voltage;        // solved voltages, kept for load freezing
};

/// E /_ delta0 = V_t + j x'_d I_t from the solved terminal conditions;
/// mechanical power is set to the solved electrical output.
MachineInit init_machines(const Network& net, const PowerFlowSolution& sol);

/// Text dump of the solved case (bus id, |V|, angle in degrees, P, Q), 10
/// significant digits, for diffing against references.
std::string write_solved_case(const Network& net, const PowerFlowSolution& sol);

} // namespace ptsvm
