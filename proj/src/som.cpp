#include "skyde/som.hpp"

#include <stdexcept>

#include "skyde/errors.hpp"

namespace skyde {

std::vector<std::uint8_t> encode_som(const SomMessage& m) {
  if (m.payload.empty()) {
    throw std::invalid_argument("SoM payload must not be empty");
  }
  if (m.payload.size() > kMaxPayloadBytes) {
    throw std::invalid_argument("SoM payload exceeds one UDP datagram");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kSomHeaderBytes + m.payload.size());
  out.push_back(static_cast<std::uint8_t>(m.id >> 8));
  out.push_back(static_cast<std::uint8_t>(m.id & 0xff));
  out.push_back(m.fun);
  out.insert(out.end(), m.payload.begin(), m.payload.end());
  return out;
}

SomMessage decode_som(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSomHeaderBytes + 1) {
    throw MalformedMessageError("SoM datagram shorter than 4 bytes");
  }
  SomMessage m;
  m.id = static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
  m.fun = bytes[2];
  m.payload.assign(bytes.begin() + kSomHeaderBytes, bytes.end());
  return m;
}

std::uint16_t crc16(std::span<const std::uint8_t> data) {
  std::uint16_t crc = 0xFFFF;
  for (std::uint8_t byte : data) {
    crc ^= static_cast<std::uint16_t>(byte) << 8;
    for (int bit = 0; bit < 8; ++bit) {
      if (crc & 0x8000) {
        crc = static_cast<std::uint16_t>((crc << 1) ^ 0x1021);
      } else {
        crc = static_cast<std::uint16_t>(crc << 1);
      }
    }
  }
  return crc;
}

}  // namespace skyde
