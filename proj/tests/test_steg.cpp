#include <doctest.h>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "skyde/errors.hpp"
#include "skyde/rng.hpp"
#include "skyde/som.hpp"
#include "skyde/steg.hpp"

using namespace skyde;

namespace {

KeyMaterial test_keys() {
  KeyMaterial km;
  for (int i = 0; i < 32; ++i) km.key[i] = static_cast<std::uint8_t>(i);
  for (int i = 0; i < 12; ++i) km.call_nonce[i] = static_cast<std::uint8_t>(i);
  return km;
}

std::vector<std::uint8_t> from_hex(const std::string& hex) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(
        std::stoul(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

}  // namespace

TEST_CASE("keystream matches an independent ChaCha20 implementation") {
  // Frozen from Python `cryptography` (ChaCha20 with the counter folded
  // into the last eight nonce bytes, block counter from zero).
  const KeyMaterial km = test_keys();
  CHECK(keystream(km, 0, 8) == from_hex("103af111c18b549d"));
  CHECK(keystream(km, 0x0102, 8) == from_hex("aae3181378547eaf"));
  CHECK(keystream(km, kSeqPadCounter, 4) == from_hex("da62b07c"));
  // Crossing the 64-byte block boundary.
  CHECK(keystream(km, 0, 70) ==
        from_hex("103af111c18b549d39248fb07d60c29a95d1db88d892f7b4af709a5f"
                 "d47a9e4bd5ff9a658dd52c708bef1f0f622b3747040fa3551300b1f2"
                 "93150a88620d5fed89fb08002917"));
}

TEST_CASE("keystream basic contract") {
  const KeyMaterial km = test_keys();
  CHECK(keystream(km, 0, 0).empty());
  CHECK(keystream(km, 5, 33) == keystream(km, 5, 33));
  CHECK(keystream(km, 5, 33) != keystream(km, 6, 33));
}

TEST_CASE("keystream bytes are uniform by chi-square") {
  const KeyMaterial km = test_keys();
  std::array<std::uint64_t, 256> counts{};
  const std::size_t per_counter = 4096;
  const std::size_t counters = 256;  // 2^20 bytes total
  for (std::size_t c = 0; c < counters; ++c) {
    for (std::uint8_t b : keystream(km, 1000 + c, per_counter)) ++counts[b];
  }
  const double expected =
      static_cast<double>(per_counter * counters) / 256.0;
  double chi2 = 0.0;
  for (std::uint64_t count : counts) {
    const double d = static_cast<double>(count) - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 < 310.46);  // chi2 quantile, 0.99, 255 dof
}

TEST_CASE("seal and open round trip") {
  const KeyMaterial km = test_keys();
  Rng rng(404);
  for (int i = 0; i < 200; ++i) {
    const std::size_t payload_len = 2 + rng.below(60);
    std::vector<std::uint8_t> data(payload_len - 2);
    rng.fill_bytes(data);
    const auto seq = static_cast<std::uint16_t>(rng.below(0x10000));
    const std::vector<std::uint8_t> ct = seal_chunk(km, seq, data, payload_len);
    CHECK(ct.size() == payload_len);
    const Chunk back = open_chunk(km, ct);
    CHECK(back.seq == seq);
    CHECK(back.data == data);
  }
}

TEST_CASE("a 34-byte payload carries 32 secret bytes") {
  const KeyMaterial km = test_keys();
  std::vector<std::uint8_t> data(32, 0xab);
  CHECK(seal_chunk(km, 1, data, 34).size() == 34);
  CHECK_THROWS_AS(seal_chunk(km, 1, data, 33), std::invalid_argument);
  CHECK_THROWS_AS(seal_chunk(km, 1, data, 35), std::invalid_argument);
}

TEST_CASE("equal data under different seqs encrypts differently") {
  const KeyMaterial km = test_keys();
  const std::vector<std::uint8_t> data(30, 0x55);
  CHECK(seal_chunk(km, 1, data, 32) != seal_chunk(km, 2, data, 32));
}

TEST_CASE("embed preserves size and fun, tags the payload CRC") {
  const KeyMaterial km = test_keys();
  SomMessage cover;
  cover.id = 0xbeef;
  cover.fun = 0x3d;
  cover.payload.assign(31, 0x11);
  const std::vector<std::uint8_t> ct =
      seal_chunk(km, 7, std::vector<std::uint8_t>(29, 0x22), 31);
  const SomMessage stego = embed(cover, ct);
  CHECK(encode_som(stego).size() == encode_som(cover).size());
  CHECK(stego.fun == cover.fun);
  CHECK(stego.id == crc16(stego.payload));
  CHECK_THROWS_AS(embed(cover, std::vector<std::uint8_t>(30, 0)),
                  std::invalid_argument);
}

TEST_CASE("try_extract round trips and rejects tampering") {
  const KeyMaterial km = test_keys();
  SomMessage cover;
  cover.id = 0;
  cover.fun = 0x0d;
  cover.payload.assign(40, 0);
  std::vector<std::uint8_t> data(38);
  Rng rng(9);
  rng.fill_bytes(data);
  SomMessage stego = embed(cover, seal_chunk(km, 3, data, 40));

  const std::optional<Chunk> chunk = try_extract(stego, km);
  REQUIRE(chunk.has_value());
  CHECK(chunk->seq == 3);
  CHECK(chunk->data == data);

  SomMessage corrupted = stego;
  corrupted.payload[17] ^= 0x04;  // one bit flipped in transit
  CHECK_FALSE(try_extract(corrupted, km).has_value());
}

TEST_CASE("try_extract false-accept rate on cover packets is about 2^-16") {
  const KeyMaterial km = test_keys();
  Rng rng(0x5eed);
  const int trials = 1'000'000;
  int accepted = 0;
  SomMessage cover;
  cover.fun = 0x0d;
  cover.payload.resize(31);
  for (int i = 0; i < trials; ++i) {
    cover.id = static_cast<std::uint16_t>(rng.below(0x10000));
    rng.fill_bytes(cover.payload);
    if (try_extract(cover, km)) ++accepted;
  }
  const double rate = static_cast<double>(accepted) / trials;
  const double expected = 1.0 / 65536.0;
  CHECK(rate >= expected / 3.0);
  CHECK(rate <= expected * 3.0);
}

TEST_CASE("reassemble handles completeness, gaps and duplicates") {
  const std::vector<std::uint8_t> d0 = {1, 2, 3};
  const std::vector<std::uint8_t> d1 = {4, 5, 6};
  const std::vector<std::uint8_t> d2 = {7, 8, 9};

  SUBCASE("complete set restores the exact prefix") {
    const std::vector<Chunk> chunks = {{0, d0}, {2, d2}, {1, d1}};
    const auto [bytes, bitmap] = reassemble(chunks, 9);
    CHECK(bytes == std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(bitmap == std::vector<bool>{true, true, true});
  }

  SUBCASE("missing chunk leaves a zero-filled gap") {
    const std::vector<Chunk> chunks = {{0, d0}, {2, d2}};
    const auto [bytes, bitmap] = reassemble(chunks, 9);
    CHECK(bytes == std::vector<std::uint8_t>{1, 2, 3, 0, 0, 0, 7, 8, 9});
    CHECK(bitmap == std::vector<bool>{true, false, true});
  }

  SUBCASE("duplicate with equal data is idempotent") {
    const std::vector<Chunk> chunks = {{0, d0}, {0, d0}, {1, d1}};
    const auto [bytes, bitmap] = reassemble(chunks, 6);
    CHECK(bytes == std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6});
    CHECK(bitmap == std::vector<bool>{true, true});
  }

  SUBCASE("duplicate with differing data is an integrity conflict") {
    const std::vector<Chunk> chunks = {{0, d0}, {0, d1}};
    CHECK_THROWS_AS(reassemble(chunks, 6), IntegrityConflictError);
  }

  SUBCASE("empty set zero-fills") {
    const auto [bytes, bitmap] = reassemble({}, 4);
    CHECK(bytes == std::vector<std::uint8_t>{0, 0, 0, 0});
    CHECK(bitmap.empty());
  }
}

TEST_CASE("transmitter chunks the stream and pads the tail") {
  const KeyMaterial km = test_keys();
  std::vector<std::uint8_t> secret(70);
  Rng rng(31);
  rng.fill_bytes(secret);
  StegTransmitter tx(km, SecretStream::from_bytes(secret));

  SomMessage cover;
  cover.fun = 0x0d;
  cover.payload.assign(34, 0);  // 32 data bytes per chunk

  StegReceiver rx(km);
  int embedded = 0;
  for (int i = 0; i < 5; ++i) {
    if (std::optional<SomMessage> stego = tx.embed_next(cover)) {
      ++embedded;
      CHECK(rx.try_accept(*stego) == 34 * 8);
    }
  }
  CHECK(embedded == 3);  // 32 + 32 + 6(+padding)
  CHECK(tx.bytes_consumed() == 70);

  const auto [bytes, bitmap] = rx.reassemble_all(70);
  CHECK(bytes == secret);
  CHECK(bitmap == std::vector<bool>{true, true, true});
}

TEST_CASE("receiver unwraps seq epochs") {
  const KeyMaterial km = test_keys();
  SecretStream stream = SecretStream::random(1, std::nullopt);
  StegTransmitter tx(km, std::move(stream));
  StegReceiver rx(km);

  SomMessage cover;
  cover.fun = 0x0d;
  cover.payload.assign(3, 0);  // 1 data byte per chunk

  const int total = 0x10000 + 50;  // spills into a second epoch
  for (int i = 0; i < total; ++i) {
    const std::optional<SomMessage> stego = tx.embed_next(cover);
    REQUIRE(stego.has_value());
    rx.try_accept(*stego);
  }
  CHECK(rx.chunks_received() == static_cast<std::uint64_t>(total));
  const auto [bytes, bitmap] = rx.reassemble_all(tx.bytes_consumed());
  CHECK(bytes.size() == static_cast<std::size_t>(total));
  CHECK(bitmap.size() == static_cast<std::size_t>(total));
  CHECK(bytes == std::vector<std::uint8_t>(
                     tx.secret_sent().begin(),
                     tx.secret_sent().begin() + total));
}
