#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "skyde/cipher.hpp"
#include "skyde/rng.hpp"
#include "skyde/som.hpp"

namespace skyde {

/// One sequenced slice of the secret stream. seq is the chunk's index in the
/// stream (16-bit, wraps into epochs); data length tracks the payload it was
/// embedded into (payload length minus the 2-byte seq prefix).
struct Chunk {
  std::uint16_t seq = 0;
  std::vector<std::uint8_t> data;

  bool operator==(const Chunk&) const = default;
};

inline constexpr std::size_t kChunkSeqBytes = 2;

/// Keystream counter reserved for the seq prefix pad. seq values occupy
/// [0, 2^16), so this can never collide with a chunk counter.
inline constexpr std::uint64_t kSeqPadCounter = ~0ULL;

/// Deterministic pseudorandom bytes for (key, nonce, counter).
std::vector<std::uint8_t> keystream(const KeyMaterial& km,
                                    std::uint64_t counter, std::size_t len);

/// Encrypts seq ++ data into exactly payload_len ciphertext bytes. The data
/// bytes are XORed with keystream(km, counter=seq); the 2-byte seq prefix is
/// XORed with the reserved pad stream so the receiver can recover seq before
/// knowing it. Requires data.size() == payload_len - 2.
std::vector<std::uint8_t> seal_chunk(const KeyMaterial& km, std::uint16_t seq,
                                     std::span<const std::uint8_t> data,
                                     std::size_t payload_len);

/// Inverse of seal_chunk. Requires ciphertext length >= 2.
Chunk open_chunk(const KeyMaterial& km,
                 std::span<const std::uint8_t> ciphertext);

/// Returns packet with payload replaced by the chunk ciphertext and the ID
/// field set to crc16(ciphertext). Fun and total size are unchanged.
/// Requires ciphertext length == packet payload length.
SomMessage embed(const SomMessage& packet,
                 std::vector<std::uint8_t> chunk_ciphertext);

/// Recovers a chunk when crc16(payload) matches the ID field; a mismatch is
/// a normal outcome (cover packet), not an error.
std::optional<Chunk> try_extract(const SomMessage& packet,
                                 const KeyMaterial& km);

/// Places chunk data by seq order into a buffer of total_len bytes. The
/// bitmap holds one received flag per seq in [0, max seq seen]. Gaps are
/// zero-filled; a lost chunk's length is unknown at the receiver, so gaps
/// use the median received data length (exact whenever chunk sizes are
/// uniform, and immaterial on lossless runs). Duplicate seqs with equal data
/// are idempotent; with differing data they throw IntegrityConflictError.
std::pair<std::vector<std::uint8_t>, std::vector<bool>> reassemble(
    std::span<const Chunk> chunks, std::size_t total_len);

/// Transmitter-side counters. utilization() is the realized fraction of
/// identified silence packets actually used.
struct EmbedStats {
  std::uint64_t packets_seen = 0;
  std::uint64_t silence_identified = 0;
  std::uint64_t embedded = 0;
  std::uint64_t suspended_by_governor = 0;
  std::uint64_t secret_bits_sent = 0;

  double utilization() const {
    return silence_identified == 0
               ? 0.0
               : static_cast<double>(embedded) /
                     static_cast<double>(silence_identified);
  }
};

/// Byte source for the secret stream: a fixed buffer, or a seeded random
/// stream (bounded or unbounded) materialized on demand.
class SecretStream {
 public:
  static SecretStream from_bytes(std::vector<std::uint8_t> bytes);
  static SecretStream random(std::uint64_t seed,
                             std::optional<std::size_t> length);

  /// Copies up to n bytes into out; returns the count actually taken
  /// (0 once the stream is exhausted; unbounded streams never exhaust).
  std::size_t take(std::span<std::uint8_t> out);

  std::size_t consumed() const { return cursor_; }
  const std::vector<std::uint8_t>& sent() const { return sent_; }

 private:
  SecretStream() : rng_(0) {}

  std::vector<std::uint8_t> sent_;
  std::size_t cursor_ = 0;
  std::optional<std::size_t> limit_;
  bool random_ = false;
  Rng rng_;
};

/// Chunking + sealing side of the covert channel. Owns the chunk cursor.
class StegTransmitter {
 public:
  StegTransmitter(const KeyMaterial& km, SecretStream secret);

  /// Embeds the next chunk into the packet if secret bytes remain and the
  /// payload can hold the seq prefix. Returns the modified packet, or
  /// nothing when the stream is exhausted or the payload is too small.
  std::optional<SomMessage> embed_next(const SomMessage& packet);

  std::uint64_t chunks_sent() const { return chunks_sent_; }
  std::size_t bytes_consumed() const { return secret_.consumed(); }
  const std::vector<std::uint8_t>& secret_sent() const { return secret_.sent(); }

 private:
  KeyMaterial km_;
  SecretStream secret_;
  std::uint64_t chunks_sent_ = 0;
};

/// Extraction + reassembly side. Chunk seqs wrap every 2^16 chunks; the
/// receiver unwraps them into epochs (delivery order is preserved by the
/// channel, so a seq that jumps backwards by more than half the range marks
/// an epoch boundary).
class StegReceiver {
 public:
  explicit StegReceiver(const KeyMaterial& km);

  /// Runs try_extract; on success stores the chunk and returns its payload
  /// bit count (gross, seq prefix included).
  std::size_t try_accept(const SomMessage& packet);

  std::pair<std::vector<std::uint8_t>, std::vector<bool>> reassemble_all(
      std::size_t total_len) const;

  std::uint64_t chunks_received() const { return chunks_.size(); }
  std::uint64_t payload_bits_received() const { return payload_bits_; }

 private:
  KeyMaterial km_;
  std::vector<std::pair<std::uint64_t, Chunk>> chunks_;  // (absolute seq, chunk)
  std::uint64_t epoch_ = 0;
  std::uint16_t last_raw_seq_ = 0;
  bool any_ = false;
  std::uint64_t payload_bits_ = 0;
};

}  // namespace skyde
