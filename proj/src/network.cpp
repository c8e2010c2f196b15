#include "ptsvm/network.hpp"

#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace ptsvm {

int Network::bus_index(int bus_id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == bus_id) return static_cast<int>(i);
    return -1;
}

const Bus& Network::bus_by_id(int bus_id) const {
    const int idx = bus_index(bus_id);
    if (idx < 0) throw std::out_of_range("network: no bus with id " + std::to_string(bus_id));
    return buses[static_cast<std::size_t>(idx)];
}

int Network::slack_index() const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].kind == BusKind::Slack) return static_cast<int>(i);
    return -1;
}

std::vector<int> Network::fault_eligible_lines() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < branches.size(); ++i)
        if (branches[i].is_line) out.push_back(static_cast<int>(i));
    return out;
}

int Network::line_index_for_rank(int rank) const {
    const auto lines = fault_eligible_lines();
    if (rank < 1 || rank > static_cast<int>(lines.size()))
        throw std::out_of_range("network: line rank " + std::to_string(rank) +
                                " outside 1.." + std::to_string(lines.size()));
    return lines[static_cast<std::size_t>(rank - 1)];
}

int Network::rank_for_line_index(int branch_index) const {
    const auto lines = fault_eligible_lines();
    for (std::size_t i = 0; i < lines.size(); ++i)
        if (lines[i] == branch_index) return static_cast<int>(i) + 1;
    return 0;
}

std::vector<int> Network::load_bus_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].load_P != 0.0 || buses[i].load_Q != 0.0) out.push_back(static_cast<int>(i));
    return out;
}

double Network::total_load_P() const {
    double total = 0.0;
    for (const auto& b : buses) total += b.load_P;
    return total;
}

const Generator* Network::generator_at_bus(int bus_id) const {
    for (const auto& g : generators)
        if (g.bus == bus_id) return &g;
    return nullptr;
}

void Network::validate_static() const {
    if (buses.empty()) throw std::runtime_error("network: missing slack bus (no buses)");
    std::unordered_set<int> ids;
    int slack_count = 0;
    for (const auto& b : buses) {
        if (!ids.insert(b.id).second)
            throw std::runtime_error("network: duplicate bus id " + std::to_string(b.id));
        if (b.kind == BusKind::Slack) ++slack_count;
        if (b.base_kV <= 0.0)
            throw std::runtime_error("network: bus " + std::to_string(b.id) + " base kV must be > 0");
        if ((b.kind == BusKind::PV || b.kind == BusKind::Slack) && b.V_set <= 0.0)
            throw std::runtime_error("network: bus " + std::to_string(b.id) +
                                     " needs a positive voltage setpoint");
    }
    if (slack_count == 0) throw std::runtime_error("network: missing slack bus");
    if (slack_count > 1) throw std::runtime_error("network: more than one slack bus");

    std::unordered_map<int, std::vector<int>> adjacency;
    for (const auto& br : branches) {
        if (br.from == br.to)
            throw std::runtime_error("network: branch endpoints coincide at bus " +
                                     std::to_string(br.from));
        if (!ids.count(br.from) || !ids.count(br.to))
            throw std::runtime_error("network: branch " + std::to_string(br.from) + "-" +
                                     std::to_string(br.to) + " references an unknown bus");
        if (br.x == 0.0 && br.r == 0.0)
            throw std::runtime_error("network: branch " + std::to_string(br.from) + "-" +
                                     std::to_string(br.to) + " has zero impedance");
        adjacency[br.from].push_back(br.to);
        adjacency[br.to].push_back(br.from);
    }

    if (buses.size() > 1) {
        std::unordered_set<int> seen;
        std::queue<int> queue;
        queue.push(buses.front().id);
        seen.insert(buses.front().id);
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop();
            for (int w : adjacency[v])
                if (seen.insert(w).second) queue.push(w);
        }
        if (seen.size() != buses.size())
            throw std::runtime_error("network: not a single connected island");
    }

    for (const auto& g : generators) {
        if (!ids.count(g.bus))
            throw std::runtime_error("network: generator at unknown bus " + std::to_string(g.bus));
    }
}

void Network::validate() const {
    validate_static();
    for (const auto& b : buses) {
        if (b.kind == BusKind::PV || b.kind == BusKind::Slack) {
            if (generator_at_bus(b.id) == nullptr)
                throw std::runtime_error("network: generator dynamic record missing for bus " +
                                         std::to_string(b.id));
        }
    }
    for (const auto& g : generators) {
        if (g.H <= 0.0)
            throw std::runtime_error("network: generator at bus " + std::to_string(g.bus) +
                                     " has H <= 0");
        if (g.x_d_prime <= 0.0)
            throw std::runtime_error("network: generator at bus " + std::to_string(g.bus) +
                                     " has x_d_prime <= 0");
        if (g.D < 0.0)
            throw std::runtime_error("network: generator at bus " + std::to_string(g.bus) +
                                     " has D < 0");
        if (g.MVA_base <= 0.0)
            throw std::runtime_error("network: generator at bus " + std::to_string(g.bus) +
                                     " has MVA base <= 0");
    }
}

Network scale_loads(const Network& net, const std::vector<double>& multipliers) {
    const auto load_buses = net.load_bus_indices();
    if (multipliers.size() != load_buses.size())
        throw std::invalid_argument("scale_loads: expected " + std::to_string(load_buses.size()) +
                                    " multipliers, got " + std::to_string(multipliers.size()));
    Network out = net;
    for (std::size_t k = 0; k < load_buses.size(); ++k) {
        if (multipliers[k] <= 0.0)
            throw std::invalid_argument("scale_loads: multiplier must be positive");
        auto& bus = out.buses[static_cast<std::size_t>(load_buses[k])];
        bus.load_P *= multipliers[k];
        bus.load_Q *= multipliers[k];
    }
    return out;
}

Network remove_branch(const Network& net, int branch_index) {
    if (branch_index < 0 || branch_index >= static_cast<int>(net.branches.size()))
        throw std::out_of_range("remove_branch: bad branch index");
    Network out = net;
    out.branches.erase(out.branches.begin() + branch_index);
    return out;
}

} // namespace ptsvm
