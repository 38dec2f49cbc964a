#pragma once

// Tower of extension fields for the BLS12-381 pairing:
//   Fp2  = Fp[u]  / (u^2 + 1)
//   Fp6  = Fp2[v] / (v^3 - xi),  xi = 1 + u
//   Fp12 = Fp6[w] / (w^2 - v)
// All arithmetic is plain GMP integers reduced mod p; nothing here is
// constant-time, which matches the library's scope (authenticity, not
// secrecy of image data).

#include <gmpxx.h>

#include <optional>
#include <string>

namespace cropsig::bls {

// Base field modulus, subgroup order, curve parameters.
const mpz_class& field_modulus();  // p
const mpz_class& group_order();    // r

struct Fp {
  mpz_class v;

  Fp() : v(0) {}
  explicit Fp(long x);
  explicit Fp(const mpz_class& x);  // reduces mod p

  static Fp zero() { return Fp(); }
  static Fp one() { return Fp(1); }

  bool is_zero() const { return v == 0; }
  bool operator==(const Fp&) const = default;

  Fp operator+(const Fp& o) const;
  Fp operator-(const Fp& o) const;
  Fp operator*(const Fp& o) const;
  Fp operator-() const;
  Fp inv() const;  // throws on zero
  Fp pow(const mpz_class& e) const;
  std::optional<Fp> sqrt() const;
};

struct Fp2 {
  Fp c0, c1;  // c0 + c1*u

  Fp2() = default;
  Fp2(Fp a, Fp b) : c0(std::move(a)), c1(std::move(b)) {}

  static Fp2 zero() { return {}; }
  static Fp2 one() { return {Fp::one(), Fp::zero()}; }

  bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
  bool operator==(const Fp2&) const = default;

  Fp2 operator+(const Fp2& o) const;
  Fp2 operator-(const Fp2& o) const;
  Fp2 operator*(const Fp2& o) const;
  Fp2 operator-() const;
  Fp2 conj() const { return {c0, -c1}; }
  Fp2 square() const { return *this * *this; }
  Fp2 inv() const;
  Fp2 pow(const mpz_class& e) const;
  std::optional<Fp2> sqrt() const;

  Fp2 mul_scalar(const Fp& s) const { return {c0 * s, c1 * s}; }
};

Fp2 xi();  // 1 + u, the cubic non-residue used by the tower

struct Fp6 {
  Fp2 c0, c1, c2;  // c0 + c1*v + c2*v^2

  static Fp6 zero() { return {}; }
  static Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }

  bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
  bool operator==(const Fp6&) const = default;

  Fp6 operator+(const Fp6& o) const;
  Fp6 operator-(const Fp6& o) const;
  Fp6 operator*(const Fp6& o) const;
  Fp6 operator-() const;
  Fp6 mul_by_v() const;  // multiply by v: (c0,c1,c2) -> (xi*c2, c0, c1)
  Fp6 inv() const;
};

struct Fp12 {
  Fp6 c0, c1;  // c0 + c1*w

  static Fp12 zero() { return {}; }
  static Fp12 one() { return {Fp6::one(), Fp6::zero()}; }

  bool is_one() const { return c0 == Fp6::one() && c1.is_zero(); }
  bool operator==(const Fp12&) const = default;

  Fp12 operator+(const Fp12& o) const;
  Fp12 operator-(const Fp12& o) const;
  Fp12 operator*(const Fp12& o) const;
  Fp12 square() const;
  Fp12 inv() const;
  Fp12 pow(const mpz_class& e) const;
  Fp12 conj() const { return {c0, -c1}; }  // Frobenius^6
  Fp12 frobenius() const;                  // x -> x^p
  // Squaring specialized to the cyclotomic subgroup (valid after the easy
  // part of the final exponentiation).
  Fp12 cyclotomic_square() const;
};

}  // namespace cropsig::bls
