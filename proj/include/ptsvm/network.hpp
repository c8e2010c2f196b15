#pragma once

#include <string>
#include <vector>

namespace ptsvm {

enum class BusKind { PQ, PV, Slack };

struct Bus {
    int id = 0;
    std::string name;
    BusKind kind = BusKind::PQ;
    double base_kV = 0.0;
    double load_P = 0.0;   // per-unit on system MVA base
    double load_Q = 0.0;
    double shunt_G = 0.0;  // per-unit
    double shunt_B = 0.0;
    double V_set = 0.0;    // voltage setpoint, PV/slack only
    double solved_V = 0.0; // operating point recorded in the data file
    double solved_angle_deg = 0.0;
    int area = 1;
    int zone = 1;
};

struct Branch {
    int from = 0;          // bus ids
    int to = 0;
    double r = 0.0;        // per-unit
    double x = 0.0;
    double b_charging = 0.0; // total line charging, per-unit
    double tap = 1.0;        // 1.0 for lines
    bool is_line = true;     // fault-eligible transmission line vs transformer
    int circuit = 1;
};

struct Generator {
    int bus = 0;
    double P_gen = 0.0;  // per-unit on system base
    double Q_gen = 0.0;
    double Q_min = 0.0;
    double Q_max = 0.0;
    double H = 0.0;        // inertia constant, s, on machine base
    double x_d_prime = 0.0; // transient reactance, per-unit on machine base
    double D = 0.0;        // damping, pu torque per pu speed deviation
    double MVA_base = 0.0;

    double h_system(double system_mva) const { return H * MVA_base / system_mva; }
    double xdp_system(double system_mva) const { return x_d_prime * system_mva / MVA_base; }
};

/// Title-card metadata carried through so a parsed case can be re-emitted.
struct CaseInfo {
    std::string date = "01/01/00";
    std::string originator = "";
    int year = 0;
    std::string season = "W";
    std::string case_id = "";
};

struct Network {
    CaseInfo info;
    double system_MVA_base = 100.0;
    double frequency_hz = 60.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;

    int bus_index(int bus_id) const;             // -1 if absent
    const Bus& bus_by_id(int bus_id) const;      // throws if absent
    int slack_index() const;                     // -1 if absent

    /// Branch indices of fault-eligible lines, in file order. Rank r
    /// (1-based) maps to element r-1.
    std::vector<int> fault_eligible_lines() const;
    int line_index_for_rank(int rank) const;     // throws on bad rank
    int rank_for_line_index(int branch_index) const; // 0 if not eligible

    /// Indices of buses carrying load, in bus order; load scaling vectors
    /// align with this list.
    std::vector<int> load_bus_indices() const;
    double total_load_P() const;

    const Generator* generator_at_bus(int bus_id) const;

    /// Structural checks that do not need dynamic data.
    void validate_static() const;
    /// Full checks including generator dynamic parameters.
    void validate() const;
};

/// Returns a copy with bus loads (P and Q) multiplied per load bus;
/// multipliers align with load_bus_indices().
Network scale_loads(const Network& net, const std::vector<double>& multipliers);

/// Returns a copy with one branch removed.
Network remove_branch(const Network& net, int branch_index);

} // namespace ptsvm
