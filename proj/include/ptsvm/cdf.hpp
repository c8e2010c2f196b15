#pragma once

#include "ptsvm/network.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ptsvm {

class CdfParseError : public std::runtime_error {
public:
    CdfParseError(const std::string& what, int line, int col_begin, int col_end)
        : std::runtime_error("line " + std::to_string(line) + ", cols " +
                             std::to_string(col_begin) + "-" + std::to_string(col_end) + ": " + what),
          line_(line), col_begin_(col_begin), col_end_(col_end) {}

    int line() const { return line_; }
    int col_begin() const { return col_begin_; }
    int col_end() const { return col_end_; }

private:
    int line_, col_begin_, col_end_;
};

/// Parses an IEEE Common Data Format case (bus + branch sections). Loads,
/// generation and MVAR limits are converted to per-unit on the title-card MVA
/// base. Generator dynamic parameters must be merged separately.
Network parse_cdf(const std::string& text);

/// Parses the dynamics sidecar (`bus=<id> H=<s> xdp=<pu> D=<pu> mva=<MVA>`,
/// one machine per line, '#' comments allowed) into net.generators, then runs
/// full validation.
void merge_dynamics_sidecar(Network& net, const std::string& text);

/// parse_cdf + merge_dynamics_sidecar over two text blobs.
Network parse_network(const std::string& cdf_text, const std::string& sidecar_text);

/// Reads both files from disk.
Network load_network(const std::string& cdf_path, const std::string& sidecar_path);

std::string write_cdf(const Network& net);
std::string write_dynamics_sidecar(const Network& net);

/// FNV-1a over the canonical writer output of both files; identifies the
/// network in downstream artifact metadata.
std::uint64_t network_fingerprint(const Network& net);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace ptsvm
