#include "doctest.h"

#include <set>

#include "cropsig/bls12_381.hpp"

using namespace cropsig;
using namespace cropsig::bls;

namespace {

DeterministicEntropy rng(0xb15b15);

Bytes sv(const char* s) { return Bytes(s, s + strlen(s)); }

}  // namespace

TEST_CASE("generators are on curve and in the subgroup") {
  CHECK(g1_in_subgroup(g1_generator()));
  CHECK(g2_in_subgroup(g2_generator()));
  CHECK(g1_mul_mpz(group_order(), g1_generator()).is_identity());
  CHECK(g2_mul_mpz(group_order(), g2_generator()).is_identity());
}

TEST_CASE("group laws") {
  Scalar a = random_scalar(rng), b = random_scalar(rng);
  const G1Point& g = g1_generator();
  CHECK(g1_scalar_mul(Scalar(mpz_class(1)), g) == g);
  CHECK(g1_add(g, G1Point::identity()) == g);
  CHECK(g1_add(g, g.negate()).is_identity());
  // distributivity of scalar mul over add
  G1Point lhs = g1_scalar_mul(a + b, g);
  G1Point rhs = g1_add(g1_scalar_mul(a, g), g1_scalar_mul(b, g));
  CHECK(lhs == rhs);
  // commutativity / associativity spot check
  G1Point p = g1_scalar_mul(a, g), q = g1_scalar_mul(b, g);
  CHECK(g1_add(p, q) == g1_add(q, p));
}

TEST_CASE("scalar_random is in range, nonzero and collision-free") {
  std::set<mpz_class> seen;
  for (int t = 0; t < 10000; ++t) {
    Scalar s = random_scalar(rng);
    CHECK(s.v > 0);
    CHECK(s.v < group_order());
    seen.insert(s.v);
  }
  CHECK(seen.size() == 10000);
}

TEST_CASE("G1 encoding round trip and rejection") {
  for (int t = 0; t < 20; ++t) {
    G1Point p = g1_scalar_mul(random_scalar(rng), g1_generator());
    auto enc = g1_encode(p);
    auto dec = g1_decode(enc);
    REQUIRE(dec.has_value());
    CHECK(*dec == p);
  }
  auto inf = g1_encode(G1Point::identity());
  auto dec = g1_decode(inf);
  REQUIRE(dec.has_value());
  CHECK(dec->is_identity());

  // Arbitrary bytes: either rejected or a point of order dividing r.
  int accepted = 0;
  for (int t = 0; t < 200; ++t) {
    std::array<uint8_t, kG1CompressedSize> buf;
    rng.fill(buf);
    buf[0] |= 0x80;
    buf[0] &= ~0x40;
    if (auto p = g1_decode(buf)) {
      ++accepted;
      CHECK(g1_mul_mpz(group_order(), *p).is_identity());
    }
  }
  // Random x rarely lands in the order-r subgroup after the cofactor check.
  CHECK(accepted <= 5);
}

TEST_CASE("G2 encoding round trip and rejection") {
  for (int t = 0; t < 10; ++t) {
    G2Point p = g2_scalar_mul(random_scalar(rng), g2_generator());
    auto enc = g2_encode(p);
    auto dec = g2_decode(enc);
    REQUIRE(dec.has_value());
    CHECK(*dec == p);
  }
  // Truncated input
  auto enc = g2_encode(g2_generator());
  CHECK(!g2_decode(std::span(enc).first(95)).has_value());
}

TEST_CASE("pairing is non-degenerate and maps identity to one") {
  GtElement e = pairing(g1_generator(), g2_generator());
  CHECK(!e.is_one());
  CHECK(e.pow(group_order()).is_one());
  CHECK(pairing(G1Point::identity(), g2_generator()).is_one());
  CHECK(pairing(g1_generator(), G2Point::identity()).is_one());
}

TEST_CASE("pairing bilinearity") {
  Scalar k = random_scalar(rng);
  GtElement lhs = pairing(g1_scalar_mul(k, g1_generator()), g2_generator());
  GtElement mid = pairing(g1_generator(), g2_scalar_mul(k, g2_generator()));
  GtElement rhs = pairing(g1_generator(), g2_generator()).pow(k.v);
  CHECK(lhs == mid);
  CHECK(lhs == rhs);
}

TEST_CASE("pairing is additive in the first argument") {
  G1Point a1 = g1_scalar_mul(random_scalar(rng), g1_generator());
  G1Point a2 = g1_scalar_mul(random_scalar(rng), g1_generator());
  const G2Point& q = g2_generator();
  CHECK(pairing(g1_add(a1, a2), q) == pairing(a1, q) * pairing(a2, q));
}

TEST_CASE("hash_to_g1 determinism and distinctness") {
  Bytes tag = sv("test-tag");
  Bytes m1 = sv("message one");
  Bytes m2 = sv("message two");
  G1Point p1 = hash_to_g1(tag, m1);
  CHECK(p1 == hash_to_g1(tag, m1));
  CHECK(g1_in_subgroup(p1));
  CHECK(!p1.is_identity());
  CHECK(!(p1 == hash_to_g1(tag, m2)));
  CHECK(!(p1 == hash_to_g1(sv("other-tag"), m1)));
  CHECK_THROWS(hash_to_g1(Bytes{}, m1));
}

TEST_CASE("hash_to_g1 no collisions over random message pairs") {
  Bytes tag = sv("collision-tag");
  std::set<std::array<uint8_t, kG1CompressedSize>> seen;
  for (int t = 0; t < 1000; ++t) {
    std::array<uint8_t, 16> msg;
    rng.fill(msg);
    seen.insert(g1_encode(hash_to_g1(tag, msg)));
  }
  CHECK(seen.size() == 1000);
}

TEST_CASE("pairing call counter") {
  reset_pairing_call_count();
  (void)pairing(g1_generator(), g2_generator());
  (void)pairing(g1_generator(), g2_generator());
  CHECK(pairing_call_count() == 2);
}
