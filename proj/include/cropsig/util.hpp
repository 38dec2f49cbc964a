#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cropsig {

using Bytes = std::vector<uint8_t>;
using Digest32 = std::array<uint8_t, 32>;

// Big-endian integer framing used by every wire format in the project.
void put_u16be(Bytes& out, uint16_t v);
void put_u32be(Bytes& out, uint32_t v);
void put_u64be(Bytes& out, uint64_t v);
uint16_t get_u16be(const uint8_t* p);
uint32_t get_u32be(const uint8_t* p);
uint64_t get_u64be(const uint8_t* p);

void append(Bytes& out, std::span<const uint8_t> data);
void append(Bytes& out, std::string_view s);

std::string to_hex(std::span<const uint8_t> data);
Bytes from_hex(std::string_view hex);

// SHA-256 (libsodium).
Digest32 sha256(std::span<const uint8_t> data);

class Sha256 {
 public:
  Sha256();
  void update(std::span<const uint8_t> data);
  void update(std::string_view s);
  Digest32 finish();

 private:
  std::array<uint8_t, 128> state_;  // opaque crypto_hash_sha256_state storage
};

// Entropy source abstraction. The system source wraps libsodium's CSPRNG;
// the deterministic source exists for bench/test reproducibility only and
// must never be used for real signing keys.
class EntropySource {
 public:
  virtual ~EntropySource() = default;
  virtual void fill(std::span<uint8_t> out) = 0;
};

class SystemEntropy final : public EntropySource {
 public:
  void fill(std::span<uint8_t> out) override;
};

class DeterministicEntropy final : public EntropySource {
 public:
  explicit DeterministicEntropy(uint64_t seed);
  void fill(std::span<uint8_t> out) override;

 private:
  std::array<uint8_t, 32> seed_;
  uint64_t counter_ = 0;
};

Bytes read_file(const std::string& path);
void write_file(const std::string& path, std::span<const uint8_t> data);

}  // namespace cropsig
