#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "ffec/poly.hpp"

namespace ffec {

// F_{q^e} as a log/exp/Zech table field over F_q.  Codes are base-q digit
// vectors of the residue mod the defining polynomial, whose root gamma
// generates the multiplicative group.  Arithmetic is done on logs, with
// kZero standing for log(0).
class ExtField {
 public:
  static constexpr u32 kMaxSize = 1u << 23;

  ExtField(FieldPtr F, int e);

  const Field& base() const { return *F_; }
  int e() const { return e_; }
  u32 size() const { return Q_; }
  u32 order() const { return N_; }  // Q - 1
  u32 zero() const { return N_; }   // kZero sentinel
  const Poly& modulus() const { return modulus_; }

  u32 code(u32 lg) const { return lg == N_ ? 0 : exp_[lg]; }
  u32 log_of(u32 code) const { return log_[code]; }
  u32 base_log(u32 c) const { return base_log_[c]; }  // log of an F_q element

  u32 mul(u32 x, u32 y) const {
    if (x == N_ || y == N_) return N_;
    u32 s = x + y;
    return s >= N_ ? s - N_ : s;
  }
  u32 add(u32 x, u32 y) const {
    if (x == N_) return y;
    if (y == N_) return x;
    u32 d = y >= x ? y - x : y + N_ - x;
    u32 z = zech_[d];
    if (z == N_) return N_;
    u32 s = x + z;
    return s >= N_ ? s - N_ : s;
  }
  u32 negl(u32 x) const {
    if (x == N_) return N_;
    u32 s = x + N_ / 2;
    return s >= N_ ? s - N_ : s;
  }
  u32 powl(u32 x, u64 k) const {
    if (x == N_) return k == 0 ? 0 : N_;
    return (u32)((u64)x * (k % N_) % N_);
  }
  u32 frob(u32 x) const { return x == N_ ? N_ : (u32)((u64)x * F_->q() % N_); }

  // Horner evaluation of a base-field polynomial at gamma^x, returning a log.
  u32 eval_log(const Poly& a, u32 x) const {
    u32 r = N_;
    for (size_t i = a.size(); i-- > 0;) r = add(mul(r, x), base_log_[a[i]]);
    return r;
  }

  int chi(u32 lg) const { return lg == N_ ? 0 : ((lg & 1) ? -1 : 1); }
  // Exponent j with x^((Q-1)/3) = omega^j for the base omega, or -1 at zero.
  int cubic(u32 lg) const { return lg == N_ ? -1 : (int)((lg % 3) * cubic_scale_ % 3); }

  // t(a, b) = -sum_x chi(x^3 + a x + b), from logs of a and b.
  int trace(u32 la, u32 lb) const;
  // Unnormalized cubic sum sum_y psi(y^2 - b) as (u, v) meaning u + v*omega.
  std::pair<i64, i64> mordell_sum(u32 lb) const;

  void ensure_trace_tables() const;
  void ensure_mordell_table() const;

 private:
  FieldPtr F_;
  int e_;
  u32 Q_, N_;
  Poly modulus_;
  std::vector<u32> exp_, log_, zech_, base_log_;
  u32 cubic_scale_ = 1;

  mutable std::mutex mu_;
  mutable bool traces_built_ = false, mordell_built_ = false;
  mutable std::vector<int16_t> tr_[3];  // a0 in {0, 1, gamma}, indexed by code of b
  mutable std::vector<int32_t> mord_u_, mord_v_;
};

using ExtPtr = std::shared_ptr<const ExtField>;
ExtPtr ext_field(const FieldPtr& F, int e);

// All monic irreducibles of degree d, sorted by cmp_poly, each with the log of
// one root in F_{q^d} (the least log in its Frobenius orbit; zero() for T).
class PrimeTable {
 public:
  PrimeTable(const FieldPtr& F, int d);

  int degree() const { return d_; }
  size_t size() const { return theta_.size(); }
  u32 theta(size_t i) const { return theta_[i]; }
  Poly poly(size_t i) const;
  // Low coefficients c_0..c_(d-1) of prime i (the leading 1 is implied).
  const uint16_t* coefs(size_t i) const { return &coef_[i * d_]; }
  const ExtField& ext() const { return *K_; }
  const ExtPtr& ext_ptr() const { return K_; }
  // Index of a monic irreducible of this degree, or size() if absent.
  size_t find(const Poly& P) const;

 private:
  int d_;
  ExtPtr K_;
  std::vector<u32> theta_;
  std::vector<uint16_t> coef_;  // d per prime (monic term implied)
};

using PrimeTablePtr = std::shared_ptr<const PrimeTable>;
PrimeTablePtr prime_table(const FieldPtr& F, int d);

std::vector<Poly> irreducibles_of_degree(const FieldPtr& F, int n);

}  // namespace ffec
