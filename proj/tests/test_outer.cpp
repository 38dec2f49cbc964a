#include "doctest.h"

#include "cropsig/outer_sig.hpp"

using namespace cropsig;

namespace {
DeterministicEntropy rng(0x0e0e0e);
}

TEST_CASE("sign and verify round trip") {
  OuterKeyPair kp = outer_keygen(rng);
  Bytes msg = {'h', 'e', 'l', 'l', 'o'};
  OuterSignature sig = outer_sign(kp, msg);
  CHECK(sig.bytes.size() == kOuterSignatureSize);
  CHECK(outer_verify(kp.public_key, sig, msg));
}

TEST_CASE("every single message bit flip is rejected") {
  OuterKeyPair kp = outer_keygen(rng);
  Bytes msg = {0x12, 0x34, 0x56, 0x78};
  OuterSignature sig = outer_sign(kp, msg);
  for (size_t byte = 0; byte < msg.size(); ++byte)
    for (int bit = 0; bit < 8; ++bit) {
      Bytes tampered = msg;
      tampered[byte] ^= uint8_t(1u << bit);
      CHECK(!outer_verify(kp.public_key, sig, tampered));
    }
}

TEST_CASE("every single signature bit flip is rejected") {
  OuterKeyPair kp = outer_keygen(rng);
  Bytes msg = {0xde, 0xad};
  OuterSignature sig = outer_sign(kp, msg);
  for (size_t byte = 0; byte < sig.bytes.size(); ++byte)
    for (int bit = 0; bit < 8; ++bit) {
      OuterSignature t = sig;
      t.bytes[byte] ^= uint8_t(1u << bit);
      CHECK(!outer_verify(kp.public_key, t, msg));
    }
}

TEST_CASE("malformed inputs verify false without crashing") {
  OuterKeyPair kp = outer_keygen(rng);
  Bytes msg = {1, 2, 3};
  OuterSignature sig = outer_sign(kp, msg);
  OuterSignature truncated{Bytes(sig.bytes.begin(), sig.bytes.end() - 1)};
  CHECK(!outer_verify(kp.public_key, truncated, msg));
  OuterSignature empty;
  CHECK(!outer_verify(kp.public_key, empty, msg));
  Bytes short_pk(kp.public_key.begin(), kp.public_key.end() - 1);
  CHECK(!outer_verify(short_pk, sig, msg));
}

TEST_CASE("distinct keygens") {
  OuterKeyPair a = outer_keygen(rng);
  OuterKeyPair b = outer_keygen(rng);
  CHECK(a.public_key != b.public_key);
}
