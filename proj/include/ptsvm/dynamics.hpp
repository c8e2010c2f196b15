#pragma once

#include "ptsvm/admittance.hpp"
#include "ptsvm/network.hpp"
#include "ptsvm/powerflow.hpp"

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptsvm {

enum class FaultType { LLL, LLG, LL, LG };

const char* fault_type_name(FaultType t);
FaultType fault_type_from_name(const std::string& name);

/// Ordinal severity used by the feature encoding: LG=1, LL=2, LLG=3, LLL=4.
int fault_type_severity(FaultType t);

struct FaultShunt {
    Complex y_f; // per-unit admittance applied at the fault node while on
};

/// Positive-sequence equivalent of the four shunt fault types, assuming
/// Z2 = z_thev and Z0 = 3 z_thev: a bolted three-phase fault is a large
/// conductance cap, LLG parallels Z2 and Z0, LL is Z2, LG is Z2 + Z0.
FaultShunt effective_fault_admittance(FaultType type, Complex z_thev);

struct FaultEvent {
    int line_index = -1;   // branch index of the faulted line
    FaultType type = FaultType::LLL;
    double lambda = 0.5;   // location fraction along the line
    double fct = 0.0;      // fault clearing time, s (<= 0 means no fault)
};

struct SimulationConfig {
    double t_end = 10.0;
    double t_fault = 1.0;
    double dt = 0.005;
    double angle_ceiling_deg = 2000.0; // early-exit separation threshold
};

struct SimOutcome {
    double delta_max_deg = 0.0; // max over time of max pairwise separation
    double tsi = 1.0;
    int label = 0;              // 1 = unstable
    bool early_exit = false;
};

class SimulationError : public std::runtime_error {
public:
    SimulationError(const std::string& what, double at_time)
        : std::runtime_error(what), at_time_(at_time) {}
    double at_time() const { return at_time_; }

private:
    double at_time_;
};

struct TrajectorySample {
    double t = 0.0;
    std::vector<double> delta; // radians
    std::vector<double> omega; // rad/s deviation from synchronous
};

using TrajectorySink = std::function<void(const TrajectorySample&)>;

/// Multi-machine classical-model transient simulation. The network must carry
/// the scenario's scaled loads and `init` the matching solved operating
/// point. Faults switch the reduced admittance matrix through pre-fault,
/// fault-on and post-fault (line tripped) topologies; swing equations are
/// integrated with fixed-step classical RK4.
SimOutcome simulate(const Network& net, const MachineInit& init, const FaultEvent& fault,
                    const SimulationConfig& cfg = {}, const TrajectorySink& sink = nullptr);

double compute_tsi(double delta_max_deg);
int stability_label(double tsi);

std::string write_trajectory_csv(const std::vector<TrajectorySample>& samples);

} // namespace ptsvm
