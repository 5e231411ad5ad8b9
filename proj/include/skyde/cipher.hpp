#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

namespace skyde {

/// Shared secret plus per-call nonce. The nonce must be unique per
/// (key, call) pair; the scenario config carries both as hex strings.
struct KeyMaterial {
  std::array<std::uint8_t, 32> key{};
  std::array<std::uint8_t, 12> call_nonce{};

  bool operator==(const KeyMaterial&) const = default;

  /// Parses 64 and 24 hex digits respectively. Throws ConfigError.
  static KeyMaterial from_hex(std::string_view key_hex,
                              std::string_view nonce_hex);
};

/// Counter-addressable keystream primitive. Streams for distinct counters
/// are independent; identical (key, nonce, counter, length) inputs always
/// produce identical bytes.
class StreamCipher {
 public:
  virtual ~StreamCipher() = default;
  virtual void keystream(std::uint64_t counter,
                         std::span<std::uint8_t> out) const = 0;
};

/// ChaCha20 (RFC 8439 block function). The 64-bit stream counter is folded
/// into the last eight nonce bytes (little-endian XOR); the 32-bit block
/// counter then walks the requested stream from zero.
class ChaCha20Cipher final : public StreamCipher {
 public:
  explicit ChaCha20Cipher(const KeyMaterial& km) : km_(km) {}
  void keystream(std::uint64_t counter,
                 std::span<std::uint8_t> out) const override;

 private:
  KeyMaterial km_;
};

std::unique_ptr<StreamCipher> make_default_cipher(const KeyMaterial& km);

}  // namespace skyde
