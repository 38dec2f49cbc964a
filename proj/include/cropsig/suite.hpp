#pragma once

#include <cstdint>

#include "cropsig/bls12_381.hpp"

namespace cropsig {

// Suite 0x01: BLS12-381 pairing groups with Ed25519 as the outer scheme.
// The wire formats carry this byte so alternative curve suites can be
// introduced without format changes.
inline constexpr uint8_t kSuiteBls12381Ed25519 = 0x01;

struct PairingSuite {
  uint8_t id;
  int security_bits;
  const bls::G1Point& g1_generator;
  const bls::G2Point& g2_generator;
  const mpz_class& group_order;
  size_t g1_compressed_size;
  size_t g2_compressed_size;
  size_t outer_signature_size;
  size_t outer_public_key_size;
};

const PairingSuite& default_suite();

}  // namespace cropsig
