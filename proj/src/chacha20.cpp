#include <algorithm>
#include <bit>
#include <cstring>

#include "skyde/cipher.hpp"
#include "skyde/errors.hpp"

namespace skyde {

namespace {

inline std::uint8_t hex_nibble(char c) {
  if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
  if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
  if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
  throw ConfigError("invalid hex digit in key material");
}

void parse_hex(std::string_view hex, std::span<std::uint8_t> out) {
  if (hex.size() != out.size() * 2) {
    throw ConfigError("hex string has wrong length");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((hex_nibble(hex[2 * i]) << 4) |
                                       hex_nibble(hex[2 * i + 1]));
  }
}

inline void quarter_round(std::uint32_t& a, std::uint32_t& b, std::uint32_t& c,
                          std::uint32_t& d) {
  a += b; d ^= a; d = std::rotl(d, 16);
  c += d; b ^= c; b = std::rotl(b, 12);
  a += b; d ^= a; d = std::rotl(d, 8);
  c += d; b ^= c; b = std::rotl(b, 7);
}

void chacha20_block(const std::uint32_t state[16], std::uint8_t out[64]) {
  std::uint32_t x[16];
  std::memcpy(x, state, sizeof(x));
  for (int i = 0; i < 10; ++i) {
    quarter_round(x[0], x[4], x[8], x[12]);
    quarter_round(x[1], x[5], x[9], x[13]);
    quarter_round(x[2], x[6], x[10], x[14]);
    quarter_round(x[3], x[7], x[11], x[15]);
    quarter_round(x[0], x[5], x[10], x[15]);
    quarter_round(x[1], x[6], x[11], x[12]);
    quarter_round(x[2], x[7], x[8], x[13]);
    quarter_round(x[3], x[4], x[9], x[14]);
  }
  for (int i = 0; i < 16; ++i) {
    const std::uint32_t word = x[i] + state[i];
    out[4 * i + 0] = static_cast<std::uint8_t>(word);
    out[4 * i + 1] = static_cast<std::uint8_t>(word >> 8);
    out[4 * i + 2] = static_cast<std::uint8_t>(word >> 16);
    out[4 * i + 3] = static_cast<std::uint8_t>(word >> 24);
  }
}

inline std::uint32_t load_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

KeyMaterial KeyMaterial::from_hex(std::string_view key_hex,
                                  std::string_view nonce_hex) {
  KeyMaterial km;
  parse_hex(key_hex, km.key);
  parse_hex(nonce_hex, km.call_nonce);
  return km;
}

void ChaCha20Cipher::keystream(std::uint64_t counter,
                               std::span<std::uint8_t> out) const {
  std::array<std::uint8_t, 12> nonce = km_.call_nonce;
  for (int i = 0; i < 8; ++i) {
    nonce[4 + i] ^= static_cast<std::uint8_t>(counter >> (8 * i));
  }

  std::uint32_t state[16];
  state[0] = 0x61707865;
  state[1] = 0x3320646e;
  state[2] = 0x79622d32;
  state[3] = 0x6b206574;
  for (int i = 0; i < 8; ++i) state[4 + i] = load_le32(km_.key.data() + 4 * i);
  state[12] = 0;  // block counter
  state[13] = load_le32(nonce.data());
  state[14] = load_le32(nonce.data() + 4);
  state[15] = load_le32(nonce.data() + 8);

  std::uint8_t block[64];
  std::size_t off = 0;
  while (off < out.size()) {
    chacha20_block(state, block);
    ++state[12];
    const std::size_t n = std::min<std::size_t>(64, out.size() - off);
    std::memcpy(out.data() + off, block, n);
    off += n;
  }
}

std::unique_ptr<StreamCipher> make_default_cipher(const KeyMaterial& km) {
  return std::make_unique<ChaCha20Cipher>(km);
}

}  // namespace skyde
