#pragma once

// BLS12-381 group arithmetic, optimal ate pairing, hash-to-G1, and the
// fixed-length compressed encodings used by the wire formats.

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>

#include "cropsig/fields.hpp"
#include "cropsig/util.hpp"

namespace cropsig::bls {

inline constexpr size_t kG1CompressedSize = 48;
inline constexpr size_t kG2CompressedSize = 96;
inline constexpr size_t kScalarSize = 32;

// Scalar mod r. Signing keys additionally require a nonzero value.
struct Scalar {
  mpz_class v;

  Scalar() : v(0) {}
  explicit Scalar(const mpz_class& x);

  bool operator==(const Scalar&) const = default;
  Scalar operator+(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;

  std::array<uint8_t, kScalarSize> encode() const;
  static std::optional<Scalar> decode(std::span<const uint8_t> in);
};

// Uniform nonzero scalar (Z_r^*).
Scalar random_scalar(EntropySource& entropy);

// Affine short-Weierstrass point over field F with y^2 = x^3 + B.
template <typename F>
struct AffinePoint {
  F x, y;
  bool infinity = true;

  static AffinePoint identity() { return {}; }
  bool is_identity() const { return infinity; }
  bool operator==(const AffinePoint& o) const {
    if (infinity || o.infinity) return infinity == o.infinity;
    return x == o.x && y == o.y;
  }
  AffinePoint negate() const {
    if (infinity) return *this;
    return {x, -y, false};
  }
};

using G1Point = AffinePoint<Fp>;
using G2Point = AffinePoint<Fp2>;
using GtElement = Fp12;

const G1Point& g1_generator();
const G2Point& g2_generator();

bool g1_on_curve(const G1Point& p);
bool g2_on_curve(const G2Point& p);
bool g1_in_subgroup(const G1Point& p);
bool g2_in_subgroup(const G2Point& p);

G1Point g1_add(const G1Point& a, const G1Point& b);
G2Point g2_add(const G2Point& a, const G2Point& b);
G1Point g1_scalar_mul(const Scalar& k, const G1Point& p);
G2Point g2_scalar_mul(const Scalar& k, const G2Point& p);
G1Point g1_mul_mpz(const mpz_class& k, const G1Point& p);
G2Point g2_mul_mpz(const mpz_class& k, const G2Point& p);

// Compressed encodings (flags in the top bits of the first byte, big-endian
// x coordinate). Decoding enforces on-curve and prime-order-subgroup
// membership.
std::array<uint8_t, kG1CompressedSize> g1_encode(const G1Point& p);
std::array<uint8_t, kG2CompressedSize> g2_encode(const G2Point& p);
std::optional<G1Point> g1_decode(std::span<const uint8_t> in);
std::optional<G2Point> g2_decode(std::span<const uint8_t> in);

// Optimal ate pairing e: G1 x G2 -> GT. Total on valid points; the
// identity in either argument maps to the GT identity.
GtElement pairing(const G1Point& a, const G2Point& b);

// Number of pairing evaluations since process start (test instrumentation).
uint64_t pairing_call_count();
void reset_pairing_call_count();

// Deterministic hash onto the prime-order subgroup of G1 with domain
// separation. Try-and-increment construction over SHA-256 followed by
// cofactor clearing; not constant-time.
G1Point hash_to_g1(std::span<const uint8_t> domain_tag, std::span<const uint8_t> message);

}  // namespace cropsig::bls
