#include "ptsvm/cdf.hpp"

#include "ptsvm/text_util.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ptsvm {

namespace {

double parse_double(const Token& tok, int line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok.text, &used);
        if (used != tok.text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw CdfParseError("malformed numeric field '" + tok.text + "'", line_no,
                            tok.col_begin, tok.col_end);
    }
}

int parse_int(const Token& tok, int line_no) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok.text, &used);
        if (used != tok.text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw CdfParseError("malformed integer field '" + tok.text + "'", line_no,
                            tok.col_begin, tok.col_end);
    }
}

std::string_view slice(std::string_view line, std::size_t col_begin, std::size_t col_end) {
    // 1-based inclusive column span, tolerant of short lines
    if (line.size() < col_begin) return {};
    const std::size_t b = col_begin - 1;
    const std::size_t e = std::min(line.size(), col_end);
    return line.substr(b, e - b);
}

bool is_section_terminator(std::string_view t) {
    return t == "-999" || t == "-99" || t == "-9";
}

Bus parse_bus_record(const std::string& line, int line_no, double mva_base) {
    Bus bus;
    // Fixed columns for the id and the name (the name may contain blanks);
    // the numeric remainder is tokenized.
    const auto id_field = trim(slice(line, 1, 4));
    if (id_field.empty())
        throw CdfParseError("missing bus number", line_no, 1, 4);
    bus.id = parse_int({std::string(id_field), 1, 4}, line_no);
    std::string name(slice(line, 6, 17));
    while (!name.empty() && (name.back() == ' ' || name.back() == '\r')) name.pop_back();
    bus.name = name;

    const auto toks = tokenize_with_columns(line, 18);
    if (toks.size() < 16)
        throw CdfParseError("bus record has " + std::to_string(toks.size()) +
                            " fields after the name, expected 16",
                            line_no, 18, static_cast<int>(line.size()));
    bus.area = parse_int(toks[0], line_no);
    bus.zone = parse_int(toks[1], line_no);
    const int type = parse_int(toks[2], line_no);
    switch (type) {
        case 0: case 1: bus.kind = BusKind::PQ; break;
        case 2: bus.kind = BusKind::PV; break;
        case 3: bus.kind = BusKind::Slack; break;
        default:
            throw CdfParseError("unknown bus type " + std::to_string(type), line_no,
                                toks[2].col_begin, toks[2].col_end);
    }
    bus.solved_V = parse_double(toks[3], line_no);
    bus.solved_angle_deg = parse_double(toks[4], line_no);
    bus.load_P = parse_double(toks[5], line_no) / mva_base;
    bus.load_Q = parse_double(toks[6], line_no) / mva_base;
    const double gen_mw = parse_double(toks[7], line_no);
    const double gen_mvar = parse_double(toks[8], line_no);
    bus.base_kV = parse_double(toks[9], line_no);
    bus.V_set = parse_double(toks[10], line_no);
    const double q_max = parse_double(toks[11], line_no);
    const double q_min = parse_double(toks[12], line_no);
    bus.shunt_G = parse_double(toks[13], line_no);
    bus.shunt_B = parse_double(toks[14], line_no);

    if (bus.kind != BusKind::PQ) {
        if (bus.V_set <= 0.0) bus.V_set = bus.solved_V;
    } else if (gen_mw != 0.0 || gen_mvar != 0.0) {
        throw CdfParseError("generation on a PQ bus is not supported", line_no,
                            toks[7].col_begin, toks[8].col_end);
    }
    // Stash the generator card data in the bus record via a side channel:
    // handled by the caller, which sees the raw fields again.
    (void)q_max;
    (void)q_min;
    return bus;
}

struct GenCard {
    double p = 0.0, q = 0.0, q_max = 0.0, q_min = 0.0;
};

GenCard parse_gen_card(const std::string& line, int line_no, double mva_base) {
    const auto toks = tokenize_with_columns(line, 18);
    GenCard card;
    card.p = parse_double(toks[7], line_no) / mva_base;
    card.q = parse_double(toks[8], line_no) / mva_base;
    card.q_max = parse_double(toks[11], line_no) / mva_base;
    card.q_min = parse_double(toks[12], line_no) / mva_base;
    return card;
}

Branch parse_branch_record(const std::string& line, int line_no) {
    const auto toks = tokenize_with_columns(line, 1);
    if (toks.size() < 9)
        throw CdfParseError("branch record has " + std::to_string(toks.size()) +
                            " fields, expected at least 9",
                            line_no, 1, static_cast<int>(line.size()));
    Branch br;
    br.from = parse_int(toks[0], line_no);
    br.to = parse_int(toks[1], line_no);
    br.circuit = parse_int(toks[4], line_no);
    const int type = parse_int(toks[5], line_no);
    br.is_line = (type == 0);
    br.r = parse_double(toks[6], line_no);
    br.x = parse_double(toks[7], line_no);
    br.b_charging = parse_double(toks[8], line_no);
    double ratio = 0.0;
    if (toks.size() >= 15) ratio = parse_double(toks[14], line_no);
    br.tap = (!br.is_line && ratio > 0.0) ? ratio : 1.0;
    return br;
}

} // namespace

Network parse_cdf(const std::string& text) {
    Network net;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;

    // Title card
    if (!std::getline(in, line))
        throw CdfParseError("empty input", 1, 1, 1);
    ++line_no;
    {
        const auto mva_field = trim(slice(line, 32, 37));
        if (mva_field.empty())
            throw CdfParseError("title card has no MVA base in columns 32-37", line_no, 32, 37);
        net.system_MVA_base = parse_double({std::string(mva_field), 32, 37}, line_no);
        if (net.system_MVA_base <= 0.0)
            throw CdfParseError("MVA base must be positive", line_no, 32, 37);
        net.info.date = std::string(trim(slice(line, 2, 9)));
        net.info.originator = std::string(trim(slice(line, 11, 30)));
        const auto year = trim(slice(line, 39, 42));
        net.info.year = year.empty() ? 0 : std::stoi(std::string(year));
        net.info.season = std::string(trim(slice(line, 44, 44)));
        net.info.case_id = std::string(trim(slice(line, 46, line.size())));
    }

    enum class Section { None, Bus, Branch, Skip } section = Section::None;
    std::vector<GenCard> gen_cards;
    std::vector<int> gen_bus_ids;

    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (starts_with(t, "END OF DATA")) break;
        if (is_section_terminator(t)) {
            section = Section::None;
            continue;
        }
        if (starts_with(t, "BUS DATA FOLLOWS")) { section = Section::Bus; continue; }
        if (starts_with(t, "BRANCH DATA FOLLOWS")) { section = Section::Branch; continue; }
        if (starts_with(t, "LOSS ZONES FOLLOWS") || starts_with(t, "INTERCHANGE DATA FOLLOWS") ||
            starts_with(t, "TIE LINES FOLLOW")) {
            section = Section::Skip;
            continue;
        }
        switch (section) {
            case Section::Bus: {
                Bus bus = parse_bus_record(line, line_no, net.system_MVA_base);
                if (bus.kind != BusKind::PQ) {
                    gen_cards.push_back(parse_gen_card(line, line_no, net.system_MVA_base));
                    gen_bus_ids.push_back(bus.id);
                }
                net.buses.push_back(std::move(bus));
                break;
            }
            case Section::Branch:
                net.branches.push_back(parse_branch_record(line, line_no));
                break;
            case Section::Skip:
                break;
            case Section::None:
                throw CdfParseError("record outside any section", line_no, 1,
                                    static_cast<int>(line.size()));
        }
    }

    for (std::size_t k = 0; k < gen_bus_ids.size(); ++k) {
        Generator g;
        g.bus = gen_bus_ids[k];
        g.P_gen = gen_cards[k].p;
        g.Q_gen = gen_cards[k].q;
        g.Q_max = gen_cards[k].q_max;
        g.Q_min = gen_cards[k].q_min;
        net.generators.push_back(g);
    }

    net.validate_static();
    return net;
}

void merge_dynamics_sidecar(Network& net, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto toks = tokenize_with_columns(t, 1);
        int bus_id = -1;
        double h = 0.0, xdp = 0.0, d = -1.0, mva = 0.0;
        bool saw_h = false, saw_xdp = false, saw_d = false, saw_mva = false;
        for (const auto& tok : toks) {
            const auto eq = tok.text.find('=');
            if (eq == std::string::npos)
                throw CdfParseError("sidecar field '" + tok.text + "' is not key=value",
                                    line_no, tok.col_begin, tok.col_end);
            const std::string key = tok.text.substr(0, eq);
            const Token value{tok.text.substr(eq + 1), tok.col_begin + static_cast<int>(eq) + 1,
                              tok.col_end};
            if (key == "bus") bus_id = parse_int(value, line_no);
            else if (key == "H") { h = parse_double(value, line_no); saw_h = true; }
            else if (key == "xdp") { xdp = parse_double(value, line_no); saw_xdp = true; }
            else if (key == "D") { d = parse_double(value, line_no); saw_d = true; }
            else if (key == "mva") { mva = parse_double(value, line_no); saw_mva = true; }
            else
                throw CdfParseError("unknown sidecar key '" + key + "'", line_no,
                                    tok.col_begin, tok.col_end);
        }
        if (bus_id < 0 || !saw_h || !saw_xdp || !saw_d || !saw_mva)
            throw CdfParseError("sidecar record must provide bus, H, xdp, D and mva",
                                line_no, 1, static_cast<int>(line.size()));
        bool matched = false;
        for (auto& g : net.generators) {
            if (g.bus == bus_id) {
                g.H = h;
                g.x_d_prime = xdp;
                g.D = d;
                g.MVA_base = mva;
                matched = true;
                break;
            }
        }
        if (!matched)
            throw CdfParseError("sidecar references bus " + std::to_string(bus_id) +
                                " which has no machine", line_no, 1,
                                static_cast<int>(line.size()));
    }
    net.validate();
}

Network parse_network(const std::string& cdf_text, const std::string& sidecar_text) {
    Network net = parse_cdf(cdf_text);
    merge_dynamics_sidecar(net, sidecar_text);
    return net;
}

Network load_network(const std::string& cdf_path, const std::string& sidecar_path) {
    return parse_network(read_file(cdf_path), read_file(sidecar_path));
}

namespace {

void append_bus_card(std::string& out, const Network& net, const Bus& bus) {
    int type = 0;
    switch (bus.kind) {
        case BusKind::PQ: type = 0; break;
        case BusKind::PV: type = 2; break;
        case BusKind::Slack: type = 3; break;
    }
    const Generator* gen = net.generator_at_bus(bus.id);
    const double s = net.system_MVA_base;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%4d %-12s%4d%4d%4d %8.4f %9.4f %10.3f %10.3f %10.3f %10.3f %8.2f %8.4f"
                  " %9.3f %9.3f %9.4f %9.4f %5d\n",
                  bus.id, bus.name.c_str(), bus.area, bus.zone, type, bus.solved_V,
                  bus.solved_angle_deg, bus.load_P * s, bus.load_Q * s,
                  gen ? gen->P_gen * s : 0.0, gen ? gen->Q_gen * s : 0.0, bus.base_kV,
                  bus.kind == BusKind::PQ ? 0.0 : bus.V_set,
                  gen ? gen->Q_max * s : 0.0, gen ? gen->Q_min * s : 0.0,
                  bus.shunt_G, bus.shunt_B, 0);
    out += buf;
}

void append_branch_card(std::string& out, const Branch& br) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%4d %4d%4d%4d%3d%3d %10.5f %10.5f %10.5f %6.0f %6.0f %6.0f %5d%3d"
                  " %8.4f %8.2f\n",
                  br.from, br.to, 1, 1, br.circuit, br.is_line ? 0 : 1, br.r, br.x,
                  br.b_charging, 0.0, 0.0, 0.0, 0, 0, br.is_line ? 0.0 : br.tap, 0.0);
    out += buf;
}

} // namespace

std::string write_cdf(const Network& net) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof(buf), " %-8s %-20s %6.1f %4d %1s %s\n",
                  net.info.date.c_str(), net.info.originator.c_str(), net.system_MVA_base,
                  net.info.year, net.info.season.c_str(), net.info.case_id.c_str());
    out += buf;
    std::snprintf(buf, sizeof(buf), "BUS DATA FOLLOWS %33zu ITEMS\n", net.buses.size());
    out += buf;
    for (const auto& bus : net.buses) append_bus_card(out, net, bus);
    out += "-999\n";
    std::snprintf(buf, sizeof(buf), "BRANCH DATA FOLLOWS %30zu ITEMS\n", net.branches.size());
    out += buf;
    for (const auto& br : net.branches) append_branch_card(out, br);
    out += "-999\n";
    out += "END OF DATA\n";
    return out;
}

std::string write_dynamics_sidecar(const Network& net) {
    std::string out;
    for (const auto& g : net.generators) {
        out += "bus=" + std::to_string(g.bus);
        out += " H=" + fmt_g17(g.H);
        out += " xdp=" + fmt_g17(g.x_d_prime);
        out += " D=" + fmt_g17(g.D);
        out += " mva=" + fmt_g17(g.MVA_base);
        out += "\n";
    }
    return out;
}

std::uint64_t network_fingerprint(const Network& net) {
    std::uint64_t h = fnv1a64(write_cdf(net));
    return fnv1a64(write_dynamics_sidecar(net), h);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

} // namespace ptsvm
