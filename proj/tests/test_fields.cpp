#include "doctest.h"

#include "cropsig/fields.hpp"
#include "cropsig/util.hpp"

using namespace cropsig;
using namespace cropsig::bls;

namespace {

DeterministicEntropy rng(0xf1e1d5);

mpz_class random_mpz(size_t bytes) {
  std::vector<uint8_t> buf(bytes);
  rng.fill(buf);
  mpz_class v;
  mpz_import(v.get_mpz_t(), buf.size(), 1, 1, 1, 0, buf.data());
  return v;
}

Fp random_fp() { return Fp(random_mpz(48)); }
Fp2 random_fp2() { return {random_fp(), random_fp()}; }
Fp6 random_fp6() { return {random_fp2(), random_fp2(), random_fp2()}; }
Fp12 random_fp12() { return {random_fp6(), random_fp6()}; }

}  // namespace

TEST_CASE("Fp basic laws") {
  for (int t = 0; t < 50; ++t) {
    Fp a = random_fp(), b = random_fp(), c = random_fp();
    CHECK((a + b) * c == a * c + b * c);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    if (!a.is_zero()) CHECK(a * a.inv() == Fp::one());
    CHECK(a + (-a) == Fp::zero());
  }
}

TEST_CASE("Fp sqrt agrees with squaring") {
  for (int t = 0; t < 50; ++t) {
    Fp a = random_fp();
    Fp sq = a * a;
    auto s = sq.sqrt();
    REQUIRE(s.has_value());
    CHECK((*s == a || *s == -a));
  }
}

TEST_CASE("Fp2 field laws and inversion") {
  for (int t = 0; t < 50; ++t) {
    Fp2 a = random_fp2(), b = random_fp2(), c = random_fp2();
    CHECK((a + b) * c == a * c + b * c);
    CHECK((a * b) * c == a * (b * c));
    if (!a.is_zero()) CHECK(a * a.inv() == Fp2::one());
  }
  // u^2 == -1
  Fp2 u{Fp::zero(), Fp::one()};
  CHECK(u * u == Fp2{-Fp::one(), Fp::zero()});
}

TEST_CASE("Fp2 sqrt round trip") {
  for (int t = 0; t < 30; ++t) {
    Fp2 a = random_fp2();
    Fp2 sq = a * a;
    auto s = sq.sqrt();
    REQUIRE(s.has_value());
    CHECK(*s * *s == sq);
  }
  // Elements with a zero coefficient as well.
  for (int t = 0; t < 10; ++t) {
    Fp2 a{random_fp(), Fp::zero()};
    auto s = (a * a).sqrt();
    REQUIRE(s.has_value());
    CHECK(*s * *s == a * a);
  }
}

TEST_CASE("Fp6 field laws") {
  for (int t = 0; t < 25; ++t) {
    Fp6 a = random_fp6(), b = random_fp6(), c = random_fp6();
    CHECK((a + b) * c == a * c + b * c);
    CHECK((a * b) * c == a * (b * c));
    if (!a.is_zero()) CHECK(a * a.inv() == Fp6::one());
  }
  // v * v^2 == xi
  Fp6 v{Fp2::zero(), Fp2::one(), Fp2::zero()};
  Fp6 v3 = v * v * v;
  CHECK(v3 == Fp6{xi(), Fp2::zero(), Fp2::zero()});
}

TEST_CASE("Fp12 field laws") {
  for (int t = 0; t < 15; ++t) {
    Fp12 a = random_fp12(), b = random_fp12(), c = random_fp12();
    CHECK((a + b) * c == a * c + b * c);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a.square() == a * a);
    CHECK(a * a.inv() == Fp12::one());
  }
}

TEST_CASE("Frobenius matches exponentiation by p") {
  for (int t = 0; t < 3; ++t) {
    Fp12 a = random_fp12();
    CHECK(a.frobenius() == a.pow(field_modulus()));
  }
}

TEST_CASE("conj is Frobenius^6") {
  Fp12 a = random_fp12();
  Fp12 f = a;
  for (int k = 0; k < 6; ++k) f = f.frobenius();
  CHECK(f == a.conj());
}

TEST_CASE("cyclotomic square agrees with generic square on the subgroup") {
  // Map random elements into the cyclotomic subgroup via the easy part of
  // the final exponentiation, then compare squarings.
  for (int t = 0; t < 10; ++t) {
    Fp12 a = random_fp12();
    Fp12 e = a.conj() * a.inv();
    e = e.frobenius().frobenius() * e;
    CHECK(e.cyclotomic_square() == e.square());
  }
}
