#pragma once

// Outer (non-aggregatable) signature scheme: Ed25519 via libsodium. The
// signer's long-term key endorses per-image ephemeral keys and headers.

#include <optional>
#include <span>

#include "cropsig/util.hpp"

namespace cropsig {

inline constexpr size_t kOuterPublicKeySize = 32;
inline constexpr size_t kOuterSecretKeySize = 64;
inline constexpr size_t kOuterSignatureSize = 64;

struct OuterSignature {
  Bytes bytes;  // valid signatures are exactly kOuterSignatureSize long
};

struct OuterKeyPair {
  Bytes private_key;  // secret key, kOuterSecretKeySize
  Bytes public_key;   // kOuterPublicKeySize
};

OuterKeyPair outer_keygen(EntropySource& entropy);
OuterSignature outer_sign(const OuterKeyPair& key, std::span<const uint8_t> message);

// Total: malformed keys or signatures verify as false, never throw.
bool outer_verify(std::span<const uint8_t> public_key, const OuterSignature& sig,
                  std::span<const uint8_t> message);

}  // namespace cropsig
