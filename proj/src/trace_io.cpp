#include "skyde/trace_io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "skyde/base64.hpp"
#include "skyde/errors.hpp"
#include "skyde/som.hpp"

namespace skyde {

std::string truth_name(Truth truth) {
  switch (truth) {
    case Truth::Voice: return "voice";
    case Truth::Silence: return "silence";
    case Truth::Signaling: return "signaling";
  }
  return "silence";
}

Truth truth_from_name(const std::string& name) {
  if (name == "voice") return Truth::Voice;
  if (name == "silence") return Truth::Silence;
  if (name == "signaling") return Truth::Signaling;
  throw ConfigError("unknown truth label: " + name);
}

void write_trace(std::ostream& out, std::span<const PacketRecord> trace) {
  for (const PacketRecord& rec : trace) {
    nlohmann::json line = {
        {"index", rec.index},
        {"ts_us", rec.ts_us},
        {"truth", truth_name(rec.truth)},
        {"som", base64_encode(encode_som(rec.message))},
    };
    out << line.dump() << '\n';
  }
}

void write_trace_file(const std::string& path,
                      std::span<const PacketRecord> trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open trace file for writing: " + path);
  write_trace(out, trace);
}

std::vector<PacketRecord> read_trace(std::istream& in) {
  std::vector<PacketRecord> trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw ConfigError("trace line " + std::to_string(lineno) +
                        " is not valid JSON");
    }
    if (!obj.contains("index") || !obj.contains("ts_us") ||
        !obj.contains("truth") || !obj.contains("som")) {
      throw ConfigError("trace line " + std::to_string(lineno) +
                        " misses a required field");
    }
    PacketRecord rec;
    rec.index = obj.at("index").get<std::uint64_t>();
    rec.ts_us = obj.at("ts_us").get<std::uint64_t>();
    rec.truth = truth_from_name(obj.at("truth").get<std::string>());
    const std::vector<std::uint8_t> bytes =
        base64_decode(obj.at("som").get<std::string>());
    try {
      rec.message = decode_som(bytes);
    } catch (const MalformedMessageError&) {
      throw ConfigError("trace line " + std::to_string(lineno) +
                        " holds a malformed datagram");
    }
    trace.push_back(std::move(rec));
  }
  return trace;
}

std::vector<PacketRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace file: " + path);
  return read_trace(in);
}

}  // namespace skyde
