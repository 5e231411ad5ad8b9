#include "skyde/steg.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "skyde/errors.hpp"

namespace skyde {

std::vector<std::uint8_t> keystream(const KeyMaterial& km,
                                    std::uint64_t counter, std::size_t len) {
  std::vector<std::uint8_t> out(len);
  ChaCha20Cipher(km).keystream(counter, out);
  return out;
}

std::vector<std::uint8_t> seal_chunk(const KeyMaterial& km, std::uint16_t seq,
                                     std::span<const std::uint8_t> data,
                                     std::size_t payload_len) {
  if (payload_len < kChunkSeqBytes || payload_len > kMaxPayloadBytes) {
    throw std::invalid_argument("chunk payload length out of range");
  }
  if (data.size() != payload_len - kChunkSeqBytes) {
    throw std::invalid_argument("chunk data must be payload length minus 2");
  }
  std::vector<std::uint8_t> ct(payload_len);
  const std::vector<std::uint8_t> pad = keystream(km, kSeqPadCounter, kChunkSeqBytes);
  ct[0] = static_cast<std::uint8_t>(seq >> 8) ^ pad[0];
  ct[1] = static_cast<std::uint8_t>(seq & 0xff) ^ pad[1];
  const std::vector<std::uint8_t> ks = keystream(km, seq, payload_len);
  for (std::size_t i = kChunkSeqBytes; i < payload_len; ++i) {
    ct[i] = data[i - kChunkSeqBytes] ^ ks[i];
  }
  return ct;
}

Chunk open_chunk(const KeyMaterial& km,
                 std::span<const std::uint8_t> ciphertext) {
  if (ciphertext.size() < kChunkSeqBytes) {
    throw std::invalid_argument("ciphertext too short for a chunk");
  }
  const std::vector<std::uint8_t> pad = keystream(km, kSeqPadCounter, kChunkSeqBytes);
  Chunk chunk;
  chunk.seq = static_cast<std::uint16_t>(
      ((ciphertext[0] ^ pad[0]) << 8) | (ciphertext[1] ^ pad[1]));
  const std::vector<std::uint8_t> ks = keystream(km, chunk.seq, ciphertext.size());
  chunk.data.resize(ciphertext.size() - kChunkSeqBytes);
  for (std::size_t i = kChunkSeqBytes; i < ciphertext.size(); ++i) {
    chunk.data[i - kChunkSeqBytes] = ciphertext[i] ^ ks[i];
  }
  return chunk;
}

SomMessage embed(const SomMessage& packet,
                 std::vector<std::uint8_t> chunk_ciphertext) {
  if (chunk_ciphertext.size() != packet.payload.size()) {
    throw std::invalid_argument("ciphertext must match payload length");
  }
  SomMessage out;
  out.id = crc16(chunk_ciphertext);
  out.fun = packet.fun;
  out.payload = std::move(chunk_ciphertext);
  return out;
}

std::optional<Chunk> try_extract(const SomMessage& packet,
                                 const KeyMaterial& km) {
  if (packet.payload.size() < kChunkSeqBytes) return std::nullopt;
  if (crc16(packet.payload) != packet.id) return std::nullopt;
  return open_chunk(km, packet.payload);
}

namespace {

std::pair<std::vector<std::uint8_t>, std::vector<bool>> reassemble_absolute(
    const std::map<std::uint64_t, const Chunk*>& by_seq, std::size_t total_len) {
  std::vector<std::uint8_t> out;
  std::vector<bool> bitmap;
  if (!by_seq.empty()) {
    std::vector<std::size_t> lengths;
    lengths.reserve(by_seq.size());
    for (const auto& [seq, chunk] : by_seq) lengths.push_back(chunk->data.size());
    std::sort(lengths.begin(), lengths.end());
    const std::size_t nominal = lengths[lengths.size() / 2];

    const std::uint64_t max_seq = by_seq.rbegin()->first;
    bitmap.resize(max_seq + 1, false);
    out.reserve(total_len);
    auto it = by_seq.begin();
    for (std::uint64_t seq = 0; seq <= max_seq; ++seq) {
      if (it != by_seq.end() && it->first == seq) {
        bitmap[seq] = true;
        out.insert(out.end(), it->second->data.begin(), it->second->data.end());
        ++it;
      } else {
        out.insert(out.end(), nominal, 0);
      }
    }
  }
  out.resize(total_len, 0);
  return {std::move(out), std::move(bitmap)};
}

void insert_checked(std::map<std::uint64_t, const Chunk*>& by_seq,
                    std::uint64_t seq, const Chunk& chunk) {
  auto [it, inserted] = by_seq.emplace(seq, &chunk);
  if (!inserted && it->second->data != chunk.data) {
    throw IntegrityConflictError("duplicate seq with differing data");
  }
}

}  // namespace

std::pair<std::vector<std::uint8_t>, std::vector<bool>> reassemble(
    std::span<const Chunk> chunks, std::size_t total_len) {
  std::map<std::uint64_t, const Chunk*> by_seq;
  for (const Chunk& chunk : chunks) insert_checked(by_seq, chunk.seq, chunk);
  return reassemble_absolute(by_seq, total_len);
}

SecretStream SecretStream::from_bytes(std::vector<std::uint8_t> bytes) {
  SecretStream s;
  s.sent_ = std::move(bytes);
  s.limit_ = s.sent_.size();
  return s;
}

SecretStream SecretStream::random(std::uint64_t seed,
                                  std::optional<std::size_t> length) {
  SecretStream s;
  s.random_ = true;
  s.limit_ = length;
  s.rng_ = Rng(seed);
  return s;
}

std::size_t SecretStream::take(std::span<std::uint8_t> out) {
  std::size_t n = out.size();
  if (limit_) n = std::min(n, *limit_ - cursor_);
  if (n == 0) return 0;
  if (random_) {
    sent_.resize(cursor_ + n);
    rng_.fill_bytes(std::span(sent_).subspan(cursor_, n));
  }
  std::copy_n(sent_.begin() + static_cast<std::ptrdiff_t>(cursor_), n, out.begin());
  cursor_ += n;
  return n;
}

StegTransmitter::StegTransmitter(const KeyMaterial& km, SecretStream secret)
    : km_(km), secret_(std::move(secret)) {}

std::optional<SomMessage> StegTransmitter::embed_next(const SomMessage& packet) {
  const std::size_t payload_len = packet.payload.size();
  if (payload_len < kChunkSeqBytes + 1) return std::nullopt;
  std::vector<std::uint8_t> data(payload_len - kChunkSeqBytes, 0);
  const std::size_t taken = secret_.take(data);
  if (taken == 0) return std::nullopt;  // exhausted; trailing zeros pad the last chunk
  const auto seq = static_cast<std::uint16_t>(chunks_sent_ & 0xffff);
  ++chunks_sent_;
  return embed(packet, seal_chunk(km_, seq, data, payload_len));
}

StegReceiver::StegReceiver(const KeyMaterial& km) : km_(km) {}

std::size_t StegReceiver::try_accept(const SomMessage& packet) {
  std::optional<Chunk> chunk = try_extract(packet, km_);
  if (!chunk) return 0;
  if (any_ && chunk->seq + 0x8000 < last_raw_seq_) ++epoch_;
  any_ = true;
  last_raw_seq_ = chunk->seq;
  const std::uint64_t absolute = epoch_ * 0x10000ULL + chunk->seq;
  const std::size_t bits = packet.payload.size() * 8;
  payload_bits_ += bits;
  chunks_.emplace_back(absolute, std::move(*chunk));
  return bits;
}

std::pair<std::vector<std::uint8_t>, std::vector<bool>>
StegReceiver::reassemble_all(std::size_t total_len) const {
  std::map<std::uint64_t, const Chunk*> by_seq;
  for (const auto& [absolute, chunk] : chunks_) {
    insert_checked(by_seq, absolute, chunk);
  }
  return reassemble_absolute(by_seq, total_len);
}

}  // namespace skyde
