#include "cropsig/bls12_381.hpp"

#include <cassert>
#include <cstring>

namespace cropsig::bls {

namespace {

// |x| for the BLS parameter x = -0xd201000000010000.
const mpz_class& loop_count() {
  static const mpz_class t("d201000000010000", 16);
  return t;
}

// G1 cofactor (x-1)^2 / 3.
const mpz_class& g1_cofactor() {
  static const mpz_class h("396c8c005555e1568c00aaab0000aaab", 16);
  return h;
}

void export_be(const mpz_class& v, uint8_t* out, size_t width) {
  std::memset(out, 0, width);
  if (v == 0) return;
  size_t bytes = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  assert(bytes <= width);
  size_t count = 0;
  mpz_export(out + (width - bytes), &count, 1, 1, 1, 0, v.get_mpz_t());
}

mpz_class import_be(std::span<const uint8_t> in) {
  mpz_class v;
  mpz_import(v.get_mpz_t(), in.size(), 1, 1, 1, 0, in.data());
  return v;
}

bool sign_bit_fp(const Fp& y) { return 2 * y.v > field_modulus(); }

bool sign_bit_fp2(const Fp2& y) {
  if (!y.c1.is_zero()) return sign_bit_fp(y.c1);
  return sign_bit_fp(y.c0);
}

// Generic affine arithmetic for y^2 = x^3 + B.
template <typename F>
AffinePoint<F> point_double(const AffinePoint<F>& p) {
  if (p.infinity || p.y.is_zero()) return AffinePoint<F>::identity();
  F three_x2 = p.x * p.x;
  three_x2 = three_x2 + three_x2 + three_x2;
  F lambda = three_x2 * (p.y + p.y).inv();
  F x3 = lambda * lambda - p.x - p.x;
  F y3 = lambda * (p.x - x3) - p.y;
  return {x3, y3, false};
}

template <typename F>
AffinePoint<F> point_add(const AffinePoint<F>& a, const AffinePoint<F>& b) {
  if (a.infinity) return b;
  if (b.infinity) return a;
  if (a.x == b.x) {
    if (a.y == b.y) return point_double(a);
    return AffinePoint<F>::identity();
  }
  F lambda = (b.y - a.y) * (b.x - a.x).inv();
  F x3 = lambda * lambda - a.x - b.x;
  F y3 = lambda * (a.x - x3) - a.y;
  return {x3, y3, false};
}

template <typename F>
AffinePoint<F> point_mul(const mpz_class& k, const AffinePoint<F>& p) {
  if (k == 0 || p.infinity) return AffinePoint<F>::identity();
  mpz_class e = k;
  AffinePoint<F> base = p;
  if (e < 0) {
    e = -e;
    base = base.negate();
  }
  AffinePoint<F> r = AffinePoint<F>::identity();
  size_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = nbits; i-- > 0;) {
    r = point_double(r);
    if (mpz_tstbit(e.get_mpz_t(), i)) r = point_add(r, base);
  }
  return r;
}

template <typename F>
bool on_curve(const AffinePoint<F>& p, const F& b) {
  if (p.infinity) return true;
  return p.y * p.y == p.x * p.x * p.x + b;
}

const Fp& g1_b() {
  static const Fp b(4);
  return b;
}

const Fp2& g2_b() {
  static const Fp2 b = Fp2{Fp(4), Fp(4)};  // 4(1+u)
  return b;
}

std::atomic<uint64_t> g_pairing_calls{0};

}  // namespace

// ---------------------------------------------------------------- Scalar

Scalar::Scalar(const mpz_class& x) {
  mpz_mod(v.get_mpz_t(), x.get_mpz_t(), group_order().get_mpz_t());
}

Scalar Scalar::operator+(const Scalar& o) const { return Scalar(v + o.v); }
Scalar Scalar::operator*(const Scalar& o) const { return Scalar(v * o.v); }

std::array<uint8_t, kScalarSize> Scalar::encode() const {
  std::array<uint8_t, kScalarSize> out{};
  export_be(v, out.data(), out.size());
  return out;
}

std::optional<Scalar> Scalar::decode(std::span<const uint8_t> in) {
  if (in.size() != kScalarSize) return std::nullopt;
  mpz_class v = import_be(in);
  if (v >= group_order()) return std::nullopt;
  Scalar s;
  s.v = v;
  return s;
}

Scalar random_scalar(EntropySource& entropy) {
  // 48 uniform bytes reduced mod the 255-bit order leave negligible bias.
  for (int attempt = 0; attempt < 128; ++attempt) {
    std::array<uint8_t, 48> buf;
    entropy.fill(buf);
    Scalar s(import_be(buf));
    if (s.v != 0) return s;
  }
  throw std::runtime_error("entropy source failure: no nonzero scalar");
}

// ---------------------------------------------------------------- groups

const G1Point& g1_generator() {
  static const G1Point g = {
      Fp(mpz_class("17f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac58"
                   "6c55e83ff97a1aeffb3af00adb22c6bb",
                   16)),
      Fp(mpz_class("08b3f481e3aaa0f1a09e30ed741d8ae4fcf5e095d5d00af600db18cb2c04b3ed"
                   "d03cc744a2888ae40caa232946c5e7e1",
                   16)),
      false};
  return g;
}

const G2Point& g2_generator() {
  static const G2Point g = {
      Fp2{Fp(mpz_class("024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02b4510b647ae3d177"
                       "0bac0326a805bbefd48056c8c121bdb8",
                       16)),
          Fp(mpz_class("13e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc7f5049"
                       "334cf11213945d57e5ac7d055d042b7e",
                       16))},
      Fp2{Fp(mpz_class("0ce5d527727d6e118cc9cdc6da2e351aadfd9baa8cbdd3a76d429a695160d12c"
                       "923ac9cc3baca289e193548608b82801",
                       16)),
          Fp(mpz_class("0606c4a02ea734cc32acd2b02bc28b99cb3e287e85a763af267492ab572e99ab"
                       "3f370d275cec1da1aaa9075ff05f79be",
                       16))},
      false};
  return g;
}

bool g1_on_curve(const G1Point& p) { return on_curve(p, g1_b()); }
bool g2_on_curve(const G2Point& p) { return on_curve(p, g2_b()); }

bool g1_in_subgroup(const G1Point& p) {
  return g1_on_curve(p) && point_mul(group_order(), p).is_identity();
}

bool g2_in_subgroup(const G2Point& p) {
  return g2_on_curve(p) && point_mul(group_order(), p).is_identity();
}

G1Point g1_add(const G1Point& a, const G1Point& b) { return point_add(a, b); }
G2Point g2_add(const G2Point& a, const G2Point& b) { return point_add(a, b); }
G1Point g1_scalar_mul(const Scalar& k, const G1Point& p) { return point_mul(k.v, p); }
G2Point g2_scalar_mul(const Scalar& k, const G2Point& p) { return point_mul(k.v, p); }
G1Point g1_mul_mpz(const mpz_class& k, const G1Point& p) { return point_mul(k, p); }
G2Point g2_mul_mpz(const mpz_class& k, const G2Point& p) { return point_mul(k, p); }

// ---------------------------------------------------------------- encoding

namespace {
constexpr uint8_t kFlagCompressed = 0x80;
constexpr uint8_t kFlagInfinity = 0x40;
constexpr uint8_t kFlagSign = 0x20;
}  // namespace

std::array<uint8_t, kG1CompressedSize> g1_encode(const G1Point& p) {
  std::array<uint8_t, kG1CompressedSize> out{};
  if (p.infinity) {
    out[0] = kFlagCompressed | kFlagInfinity;
    return out;
  }
  export_be(p.x.v, out.data(), out.size());
  out[0] |= kFlagCompressed;
  if (sign_bit_fp(p.y)) out[0] |= kFlagSign;
  return out;
}

std::optional<G1Point> g1_decode(std::span<const uint8_t> in) {
  if (in.size() != kG1CompressedSize) return std::nullopt;
  uint8_t flags = in[0];
  if (!(flags & kFlagCompressed)) return std::nullopt;
  Bytes body(in.begin(), in.end());
  body[0] &= 0x1f;
  if (flags & kFlagInfinity) {
    if (flags & kFlagSign) return std::nullopt;
    for (uint8_t b : body)
      if (b != 0) return std::nullopt;
    return G1Point::identity();
  }
  mpz_class xv = import_be(body);
  if (xv >= field_modulus()) return std::nullopt;
  Fp x(xv);
  auto y = (x * x * x + g1_b()).sqrt();
  if (!y) return std::nullopt;
  Fp yy = *y;
  if (sign_bit_fp(yy) != bool(flags & kFlagSign)) yy = -yy;
  G1Point p{x, yy, false};
  if (!g1_in_subgroup(p)) return std::nullopt;
  return p;
}

std::array<uint8_t, kG2CompressedSize> g2_encode(const G2Point& p) {
  std::array<uint8_t, kG2CompressedSize> out{};
  if (p.infinity) {
    out[0] = kFlagCompressed | kFlagInfinity;
    return out;
  }
  // x = x0 + x1*u serialized as x1 || x0.
  export_be(p.x.c1.v, out.data(), 48);
  export_be(p.x.c0.v, out.data() + 48, 48);
  out[0] |= kFlagCompressed;
  if (sign_bit_fp2(p.y)) out[0] |= kFlagSign;
  return out;
}

std::optional<G2Point> g2_decode(std::span<const uint8_t> in) {
  if (in.size() != kG2CompressedSize) return std::nullopt;
  uint8_t flags = in[0];
  if (!(flags & kFlagCompressed)) return std::nullopt;
  Bytes body(in.begin(), in.end());
  body[0] &= 0x1f;
  if (flags & kFlagInfinity) {
    if (flags & kFlagSign) return std::nullopt;
    for (uint8_t b : body)
      if (b != 0) return std::nullopt;
    return G2Point::identity();
  }
  mpz_class x1 = import_be(std::span(body).first(48));
  mpz_class x0 = import_be(std::span(body).subspan(48));
  if (x0 >= field_modulus() || x1 >= field_modulus()) return std::nullopt;
  Fp2 x{Fp(x0), Fp(x1)};
  auto y = (x * x * x + g2_b()).sqrt();
  if (!y) return std::nullopt;
  Fp2 yy = *y;
  if (sign_bit_fp2(yy) != bool(flags & kFlagSign)) yy = -yy;
  G2Point p{x, yy, false};
  if (!g2_in_subgroup(p)) return std::nullopt;
  return p;
}

// ---------------------------------------------------------------- pairing

namespace {

// Fp12 element w (the quadratic generator of the tower's last step).
Fp12 fp12_w() {
  Fp12 r;
  r.c1 = Fp6::one();
  return r;
}

Fp12 embed_fp(const Fp& a) {
  Fp12 r;
  r.c0.c0.c0 = a;
  return r;
}

Fp12 embed_fp2(const Fp2& a) {
  Fp12 r;
  r.c0.c0 = a;
  return r;
}

// Untwist constants 1/w^2 and 1/w^3 mapping E'(Fp2) into E(Fp12).
struct UntwistConstants {
  Fp12 inv_w2, inv_w3;
};

const UntwistConstants& untwist_constants() {
  static const UntwistConstants c = [] {
    Fp12 w = fp12_w();
    Fp12 w2 = w * w;
    return UntwistConstants{w2.inv(), (w2 * w).inv()};
  }();
  return c;
}

using PointFp12 = AffinePoint<Fp12>;

PointFp12 untwist(const G2Point& q) {
  if (q.infinity) return PointFp12::identity();
  const auto& c = untwist_constants();
  return {embed_fp2(q.x) * c.inv_w2, embed_fp2(q.y) * c.inv_w3, false};
}

// Line through (a, b) [tangent when a == b] evaluated at the G1 point
// (px, py); vertical factors are discarded (even embedding degree).
Fp12 line_eval(const PointFp12& a, const PointFp12& b, const Fp12& px, const Fp12& py,
               PointFp12& out_sum) {
  Fp12 lambda;
  if (a.x == b.x && a.y == b.y) {
    Fp12 x2 = a.x * a.x;
    lambda = (x2 + x2 + x2) * (a.y + a.y).inv();
  } else if (a.x == b.x) {
    // Vertical line; contributes only denominator-eliminated factors.
    out_sum = PointFp12::identity();
    return Fp12::one();
  } else {
    lambda = (b.y - a.y) * (b.x - a.x).inv();
  }
  Fp12 x3 = lambda * lambda - a.x - b.x;
  Fp12 y3 = lambda * (a.x - x3) - a.y;
  out_sum = {x3, y3, false};
  return py - a.y - lambda * (px - a.x);
}

Fp12 pow_cyclotomic(const Fp12& f, const mpz_class& e) {
  Fp12 r = Fp12::one();
  size_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = nbits; i-- > 0;) {
    r = r.cyclotomic_square();
    if (mpz_tstbit(e.get_mpz_t(), i)) r = r * f;
  }
  return r;
}

const mpz_class& hard_part_exponent() {
  static const mpz_class d = [] {
    const mpz_class& p = field_modulus();
    mpz_class p2 = p * p;
    mpz_class num = p2 * p2 - p2 + 1;
    mpz_class q, rem;
    mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), group_order().get_mpz_t());
    if (rem != 0) throw std::logic_error("r must divide p^4 - p^2 + 1");
    return q;
  }();
  return d;
}

Fp12 final_exponentiation(const Fp12& f) {
  // Easy part: f^((p^6-1)(p^2+1)).
  Fp12 t = f.conj() * f.inv();
  t = t.frobenius().frobenius() * t;
  // Hard part: exponent (p^4 - p^2 + 1)/r, in the cyclotomic subgroup.
  return pow_cyclotomic(t, hard_part_exponent());
}

}  // namespace

GtElement pairing(const G1Point& a, const G2Point& b) {
  g_pairing_calls.fetch_add(1, std::memory_order_relaxed);
  if (a.is_identity() || b.is_identity()) return Fp12::one();

  Fp12 px = embed_fp(a.x);
  Fp12 py = embed_fp(a.y);
  PointFp12 q = untwist(b);
  PointFp12 t = q;
  Fp12 f = Fp12::one();

  const mpz_class& c = loop_count();
  size_t nbits = mpz_sizeinbase(c.get_mpz_t(), 2);
  for (size_t i = nbits - 1; i-- > 0;) {
    PointFp12 next;
    Fp12 l = line_eval(t, t, px, py, next);
    f = f.square() * l;
    t = next;
    if (mpz_tstbit(c.get_mpz_t(), i)) {
      l = line_eval(t, q, px, py, next);
      f = f * l;
      t = next;
    }
  }
  // The BLS parameter is negative: conjugate before the final exponentiation.
  f = f.conj();
  return final_exponentiation(f);
}

uint64_t pairing_call_count() { return g_pairing_calls.load(std::memory_order_relaxed); }
void reset_pairing_call_count() { g_pairing_calls.store(0, std::memory_order_relaxed); }

// ---------------------------------------------------------------- hash to G1

G1Point hash_to_g1(std::span<const uint8_t> domain_tag, std::span<const uint8_t> message) {
  if (domain_tag.empty()) throw std::invalid_argument("empty domain tag");
  for (int ctr = 0; ctr < 256; ++ctr) {
    auto block = [&](uint8_t idx) {
      Sha256 h;
      h.update(std::string_view("cropsig-h2c-v1"));
      Bytes len;
      put_u32be(len, uint32_t(domain_tag.size()));
      h.update(len);
      h.update(domain_tag);
      h.update(message);
      std::array<uint8_t, 2> tail = {uint8_t(ctr), idx};
      h.update(tail);
      return h.finish();
    };
    Digest32 h1 = block(1);
    Digest32 h2 = block(2);
    Bytes wide(h1.begin(), h1.end());
    append(wide, h2);
    Fp x(import_be(wide));
    auto y = (x * x * x + Fp(4)).sqrt();
    if (!y) continue;
    Fp yy = *y;
    bool want_sign = (h2[31] & 1) != 0;
    if (sign_bit_fp(yy) != want_sign) yy = -yy;
    G1Point p = point_mul(g1_cofactor(), G1Point{x, yy, false});
    if (p.is_identity()) continue;
    return p;
  }
  throw std::logic_error("hash_to_g1: no curve point found (probability ~2^-256)");
}

}  // namespace cropsig::bls
