#include "cropsig/outer_sig.hpp"

#include <sodium.h>

namespace cropsig {

OuterKeyPair outer_keygen(EntropySource& entropy) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
  std::array<uint8_t, crypto_sign_SEEDBYTES> seed;
  entropy.fill(seed);
  OuterKeyPair kp;
  kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
  kp.private_key.resize(crypto_sign_SECRETKEYBYTES);
  crypto_sign_seed_keypair(kp.public_key.data(), kp.private_key.data(), seed.data());
  return kp;
}

OuterSignature outer_sign(const OuterKeyPair& key, std::span<const uint8_t> message) {
  if (key.private_key.size() != kOuterSecretKeySize)
    throw std::invalid_argument("bad outer private key length");
  OuterSignature sig;
  sig.bytes.resize(crypto_sign_BYTES);
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                       key.private_key.data());
  return sig;
}

bool outer_verify(std::span<const uint8_t> public_key, const OuterSignature& sig,
                  std::span<const uint8_t> message) {
  if (public_key.size() != kOuterPublicKeySize) return false;
  if (sig.bytes.size() != kOuterSignatureSize) return false;
  return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                     public_key.data()) == 0;
}

}  // namespace cropsig
