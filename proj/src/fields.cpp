#include "cropsig/fields.hpp"

#include <array>
#include <stdexcept>

namespace cropsig::bls {

namespace {

const char* kModulusHex =
    "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f624"
    "1eabfffeb153ffffb9feffffffffaaab";
const char* kOrderHex =
    "73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001";

mpz_class mod_p(const mpz_class& x) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), field_modulus().get_mpz_t());
  return r;
}

}  // namespace

const mpz_class& field_modulus() {
  static const mpz_class p(kModulusHex, 16);
  return p;
}

const mpz_class& group_order() {
  static const mpz_class r(kOrderHex, 16);
  return r;
}

// ---------------------------------------------------------------- Fp

Fp::Fp(long x) : v(x) {
  if (x < 0) v = mod_p(v);
}

Fp::Fp(const mpz_class& x) : v(mod_p(x)) {}

Fp Fp::operator+(const Fp& o) const {
  Fp r;
  r.v = v + o.v;
  if (r.v >= field_modulus()) r.v -= field_modulus();
  return r;
}

Fp Fp::operator-(const Fp& o) const {
  Fp r;
  r.v = v - o.v;
  if (r.v < 0) r.v += field_modulus();
  return r;
}

Fp Fp::operator*(const Fp& o) const {
  Fp r;
  r.v = v * o.v;
  r.v = mod_p(r.v);
  return r;
}

Fp Fp::operator-() const {
  Fp r;
  if (v != 0) r.v = field_modulus() - v;
  return r;
}

Fp Fp::inv() const {
  if (is_zero()) throw std::domain_error("inverse of zero in Fp");
  Fp r;
  mpz_invert(r.v.get_mpz_t(), v.get_mpz_t(), field_modulus().get_mpz_t());
  return r;
}

Fp Fp::pow(const mpz_class& e) const {
  Fp r;
  mpz_powm(r.v.get_mpz_t(), v.get_mpz_t(), e.get_mpz_t(), field_modulus().get_mpz_t());
  return r;
}

std::optional<Fp> Fp::sqrt() const {
  // p == 3 (mod 4), so a^((p+1)/4) is a root whenever one exists.
  static const mpz_class e = (field_modulus() + 1) / 4;
  Fp cand = pow(e);
  if (cand * cand == *this) return cand;
  return std::nullopt;
}

// ---------------------------------------------------------------- Fp2

Fp2 xi() { return {Fp::one(), Fp::one()}; }

Fp2 Fp2::operator+(const Fp2& o) const { return {c0 + o.c0, c1 + o.c1}; }
Fp2 Fp2::operator-(const Fp2& o) const { return {c0 - o.c0, c1 - o.c1}; }
Fp2 Fp2::operator-() const { return {-c0, -c1}; }

Fp2 Fp2::operator*(const Fp2& o) const {
  // (a0 + a1 u)(b0 + b1 u), u^2 = -1
  Fp t0 = c0 * o.c0;
  Fp t1 = c1 * o.c1;
  Fp t2 = (c0 + c1) * (o.c0 + o.c1);
  return {t0 - t1, t2 - t0 - t1};
}

Fp2 Fp2::inv() const {
  Fp norm = c0 * c0 + c1 * c1;
  Fp n = norm.inv();
  return {c0 * n, -(c1 * n)};
}

Fp2 Fp2::pow(const mpz_class& e) const {
  if (e == 0) return Fp2::one();
  Fp2 r = Fp2::one();
  size_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = nbits; i-- > 0;) {
    r = r * r;
    if (mpz_tstbit(e.get_mpz_t(), i)) r = r * *this;
  }
  return r;
}

std::optional<Fp2> Fp2::sqrt() const {
  if (is_zero()) return Fp2::zero();
  if (c1.is_zero()) {
    if (auto s = c0.sqrt()) return Fp2{*s, Fp::zero()};
    // c0 is a non-residue in Fp; sqrt is s*u with s^2 = -c0.
    if (auto s = (-c0).sqrt()) return Fp2{Fp::zero(), *s};
    return std::nullopt;
  }
  // Complex method: norm = c0^2 + c1^2 must be a square in Fp.
  Fp norm = c0 * c0 + c1 * c1;
  auto s = norm.sqrt();
  if (!s) return std::nullopt;
  static const Fp half = Fp(2).inv();
  for (const Fp& sig : {*s, -*s}) {
    Fp lambda = (c0 + sig) * half;
    auto x = lambda.sqrt();
    if (!x) continue;
    if (x->is_zero()) continue;
    Fp y = c1 * half * x->inv();
    Fp2 cand{*x, y};
    if (cand * cand == *this) return cand;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- Fp6

Fp6 Fp6::operator+(const Fp6& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
Fp6 Fp6::operator-(const Fp6& o) const { return {c0 - o.c0, c1 - o.c1, c2 - o.c2}; }
Fp6 Fp6::operator-() const { return {-c0, -c1, -c2}; }

Fp6 Fp6::operator*(const Fp6& o) const {
  const Fp2 k = xi();
  Fp2 a0b0 = c0 * o.c0, a1b1 = c1 * o.c1, a2b2 = c2 * o.c2;
  Fp2 r0 = a0b0 + k * (c1 * o.c2 + c2 * o.c1);
  Fp2 r1 = c0 * o.c1 + c1 * o.c0 + k * a2b2;
  Fp2 r2 = c0 * o.c2 + a1b1 + c2 * o.c0;
  return {r0, r1, r2};
}

Fp6 Fp6::mul_by_v() const { return {xi() * c2, c0, c1}; }

Fp6 Fp6::inv() const {
  const Fp2 k = xi();
  Fp2 t0 = c0.square() - k * (c1 * c2);
  Fp2 t1 = k * c2.square() - c0 * c1;
  Fp2 t2 = c1.square() - c0 * c2;
  Fp2 d = c0 * t0 + k * (c1 * t2 + c2 * t1);
  Fp2 di = d.inv();
  return {t0 * di, t1 * di, t2 * di};
}

// ---------------------------------------------------------------- Fp12

Fp12 Fp12::operator+(const Fp12& o) const { return {c0 + o.c0, c1 + o.c1}; }
Fp12 Fp12::operator-(const Fp12& o) const { return {c0 - o.c0, c1 - o.c1}; }

Fp12 Fp12::operator*(const Fp12& o) const {
  // (a0 + a1 w)(b0 + b1 w), w^2 = v
  Fp6 a0b0 = c0 * o.c0;
  Fp6 a1b1 = c1 * o.c1;
  Fp6 mid = (c0 + c1) * (o.c0 + o.c1) - a0b0 - a1b1;
  return {a0b0 + a1b1.mul_by_v(), mid};
}

Fp12 Fp12::square() const {
  Fp6 a0b0 = c0 * c0;
  Fp6 a1b1 = c1 * c1;
  Fp6 mid = (c0 + c1) * (c0 + c1) - a0b0 - a1b1;
  return {a0b0 + a1b1.mul_by_v(), mid};
}

Fp12 Fp12::inv() const {
  Fp6 d = c0 * c0 - (c1 * c1).mul_by_v();
  Fp6 di = d.inv();
  return {c0 * di, -(c1 * di)};
}

Fp12 Fp12::pow(const mpz_class& e) const {
  if (e == 0) return Fp12::one();
  if (e < 0) return inv().pow(-e);
  Fp12 r = Fp12::one();
  size_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = nbits; i-- > 0;) {
    r = r.square();
    if (mpz_tstbit(e.get_mpz_t(), i)) r = r * *this;
  }
  return r;
}

namespace {

// Frobenius constants gamma_k = xi^(k(p-1)/6), k = 0..5, in the
// single-generator basis w^k with w^6 = xi.
const std::array<Fp2, 6>& frobenius_gammas() {
  static const std::array<Fp2, 6> g = [] {
    std::array<Fp2, 6> a;
    a[0] = Fp2::one();
    mpz_class e = (field_modulus() - 1) / 6;
    a[1] = xi().pow(e);
    for (int k = 2; k < 6; ++k) a[k] = a[k - 1] * a[1];
    return a;
  }();
  return g;
}

}  // namespace

Fp12 Fp12::frobenius() const {
  // Coefficients of w^0..w^5: (c0.c0, c1.c0, c0.c1, c1.c1, c0.c2, c1.c2)
  const auto& g = frobenius_gammas();
  std::array<Fp2, 6> c = {c0.c0, c1.c0, c0.c1, c1.c1, c0.c2, c1.c2};
  for (int k = 0; k < 6; ++k) c[k] = c[k].conj() * g[k];
  Fp12 r;
  r.c0 = {c[0], c[2], c[4]};
  r.c1 = {c[1], c[3], c[5]};
  return r;
}

namespace {

// (a + b t)^2 in Fp4 = Fp2[t]/(t^2 - xi): returns (a^2 + xi b^2, 2ab).
std::pair<Fp2, Fp2> fp4_square(const Fp2& a, const Fp2& b) {
  Fp2 a2 = a.square();
  Fp2 b2 = b.square();
  Fp2 ab2 = (a + b).square() - a2 - b2;
  return {a2 + xi() * b2, ab2};
}

Fp2 dbl(const Fp2& x) { return x + x; }

}  // namespace

Fp12 Fp12::cyclotomic_square() const {
  // Granger-Scott squaring; only valid for elements of the cyclotomic
  // subgroup (checked indirectly by tests against the generic square).
  Fp2 z0 = c0.c0, z4 = c0.c1, z3 = c0.c2;
  Fp2 z2 = c1.c0, z1 = c1.c1, z5 = c1.c2;

  auto [t0a, t1a] = fp4_square(z0, z1);
  z0 = t0a - z0;
  z0 = dbl(z0) + t0a;
  z1 = t1a + z1;
  z1 = dbl(z1) + t1a;

  auto [t0b, t1b] = fp4_square(z2, z3);
  auto [t2, t3] = fp4_square(z4, z5);
  z4 = t0b - z4;
  z4 = dbl(z4) + t0b;
  z5 = t1b + z5;
  z5 = dbl(z5) + t1b;

  Fp2 t = xi() * t3;
  z2 = t + z2;
  z2 = dbl(z2) + t;
  z3 = t2 - z3;
  z3 = dbl(z3) + t2;

  Fp12 r;
  r.c0 = {z0, z4, z3};
  r.c1 = {z2, z1, z5};
  return r;
}

}  // namespace cropsig::bls
