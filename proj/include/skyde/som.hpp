#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace skyde {

inline constexpr std::size_t kSomHeaderBytes = 3;

/// Largest payload that fits one UDP datagram alongside the 3-byte header.
inline constexpr std::size_t kMaxPayloadBytes = 65535 - kSomHeaderBytes;

/// The unencrypted Start-of-Message header plus opaque payload. ID travels
/// big-endian on the wire; Fun discriminates the payload type.
struct SomMessage {
  std::uint16_t id = 0;
  std::uint8_t fun = 0;
  std::vector<std::uint8_t> payload;

  bool operator==(const SomMessage&) const = default;

  std::size_t datagram_size() const { return kSomHeaderBytes + payload.size(); }
};

/// Serializes to ID (2 bytes, big-endian) ++ Fun (1 byte) ++ payload.
/// Throws std::invalid_argument if the payload is empty or oversized.
std::vector<std::uint8_t> encode_som(const SomMessage& m);

/// Inverse of encode_som. Throws MalformedMessageError on buffers shorter
/// than 4 bytes (header plus at least one payload byte).
SomMessage decode_som(std::span<const std::uint8_t> bytes);

/// CRC-16/CCITT-FALSE: polynomial 0x1021, initial value 0xFFFF, no
/// reflection, no final XOR. check("123456789") = 0x29B1.
std::uint16_t crc16(std::span<const std::uint8_t> data);

/// DATA messages carry low nibble 0xd in the Fun field (0x0d, 0x1d, ... 0x7d
/// observed in practice); everything else is treated as signaling.
constexpr bool is_data_fun(std::uint8_t fun) { return (fun & 0x0f) == 0x0d; }

}  // namespace skyde
