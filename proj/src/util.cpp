#include "cropsig/util.hpp"

#include <sodium.h>

#include <cstring>
#include <fstream>

namespace cropsig {

namespace {
void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialization failed");
}
}  // namespace

void put_u16be(Bytes& out, uint16_t v) {
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v));
}

void put_u32be(Bytes& out, uint32_t v) {
  out.push_back(uint8_t(v >> 24));
  out.push_back(uint8_t(v >> 16));
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v));
}

void put_u64be(Bytes& out, uint64_t v) {
  put_u32be(out, uint32_t(v >> 32));
  put_u32be(out, uint32_t(v));
}

uint16_t get_u16be(const uint8_t* p) { return uint16_t(p[0]) << 8 | p[1]; }

uint32_t get_u32be(const uint8_t* p) {
  return uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 | p[3];
}

uint64_t get_u64be(const uint8_t* p) {
  return uint64_t(get_u32be(p)) << 32 | get_u32be(p + 4);
}

void append(Bytes& out, std::span<const uint8_t> data) {
  out.insert(out.end(), data.begin(), data.end());
}

void append(Bytes& out, std::string_view s) {
  out.insert(out.end(), s.begin(), s.end());
}

std::string to_hex(std::span<const uint8_t> data) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(data.size() * 2);
  for (uint8_t b : data) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xf]);
  }
  return s;
}

Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2) throw std::invalid_argument("odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit");
    out.push_back(uint8_t(hi << 4 | lo));
  }
  return out;
}

Digest32 sha256(std::span<const uint8_t> data) {
  ensure_sodium();
  Digest32 d;
  crypto_hash_sha256(d.data(), data.data(), data.size());
  return d;
}

Sha256::Sha256() {
  ensure_sodium();
  static_assert(sizeof(crypto_hash_sha256_state) <= sizeof(state_));
  crypto_hash_sha256_init(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()));
}

void Sha256::update(std::span<const uint8_t> data) {
  crypto_hash_sha256_update(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()),
                            data.data(), data.size());
}

void Sha256::update(std::string_view s) {
  update(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size()));
}

Digest32 Sha256::finish() {
  Digest32 d;
  crypto_hash_sha256_final(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()), d.data());
  return d;
}

void SystemEntropy::fill(std::span<uint8_t> out) {
  ensure_sodium();
  randombytes_buf(out.data(), out.size());
}

DeterministicEntropy::DeterministicEntropy(uint64_t seed) {
  Bytes m;
  append(m, std::string_view("cropsig:test-entropy"));
  put_u64be(m, seed);
  seed_ = sha256(m);
}

void DeterministicEntropy::fill(std::span<uint8_t> out) {
  size_t off = 0;
  while (off < out.size()) {
    Bytes m(seed_.begin(), seed_.end());
    put_u64be(m, counter_++);
    Digest32 block = sha256(m);
    size_t n = std::min(out.size() - off, block.size());
    std::memcpy(out.data() + off, block.data(), n);
    off += n;
  }
}

Bytes read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  return Bytes(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const uint8_t> data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace cropsig
