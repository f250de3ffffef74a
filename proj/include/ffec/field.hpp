#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "ffec/common.hpp"

namespace ffec {

// Elements of F_q are codes in [0, q): the base-p digits of the coefficient
// vector of the reduced representative (so addition is digitwise mod p).
class Field {
 public:
  static constexpr u32 kMaxQ = 1024;

  static std::shared_ptr<const Field> make(int p, int m);

  int p() const { return p_; }
  int m() const { return m_; }
  u32 q() const { return q_; }
  // Ascending coefficients over F_p, monic of degree m; {0,1} when m == 1.
  const std::vector<u32>& modulus() const { return modulus_; }
  u32 g() const { return g_; }
  bool has_mu3() const { return has_mu3_; }
  u32 omega() const;

  u32 add(u32 a, u32 b) const { return add_[a * q_ + b]; }
  u32 neg(u32 a) const { return neg_[a]; }
  u32 sub(u32 a, u32 b) const { return add_[a * q_ + neg_[b]]; }
  u32 mul(u32 a, u32 b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  u32 inv(u32 a) const;
  u32 div(u32 a, u32 b) const { return mul(a, inv(b)); }
  u32 pow(u32 a, u64 e) const;
  u32 from_int(i64 v) const;
  // Discrete log to base g (a != 0).
  u32 log(u32 a) const { return log_[a]; }
  u32 exp(u64 k) const { return exp_[k % (q_ - 1)]; }
  int chi(u32 a) const;        // quadratic character, 0 at 0
  int cubic_exp(u32 a) const;  // j with a^((q-1)/3) = omega^j, -1 at 0

  // Digits of a code over F_p (low to high).
  std::vector<u32> digits(u32 a) const;

 private:
  Field() = default;
  int p_ = 0, m_ = 0;
  u32 q_ = 0, g_ = 0;
  bool has_mu3_ = false;
  std::vector<u32> modulus_;
  std::vector<u32> add_, neg_, log_, exp_;
};

using FieldPtr = std::shared_ptr<const Field>;

// make_field
FieldPtr make_field(int p, int m);

// 1 -> 1, omega -> (-1 + i sqrt3)/2, omega^2 -> conjugate.
std::complex<double> embed_unity(const Field& F, u32 e);

// omega^j as a complex number.
std::complex<double> unity_power(int j);

bool is_prime_u64(u64 n);
std::vector<u64> prime_factors_u64(u64 n);

}  // namespace ffec
