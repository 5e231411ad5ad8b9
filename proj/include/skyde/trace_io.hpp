#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "skyde/traffic.hpp"

namespace skyde {

/// JSON Lines trace format shared by every tool: one object per packet with
/// fields index, ts_us, truth ("voice" | "silence" | "signaling") and som
/// (base64 of the encoded datagram).

std::string truth_name(Truth truth);
Truth truth_from_name(const std::string& name);  // throws ConfigError

void write_trace(std::ostream& out, std::span<const PacketRecord> trace);
void write_trace_file(const std::string& path,
                      std::span<const PacketRecord> trace);

std::vector<PacketRecord> read_trace(std::istream& in);
std::vector<PacketRecord> read_trace_file(const std::string& path);

}  // namespace skyde
