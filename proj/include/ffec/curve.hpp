#pragma once

#include <memory>
#include <vector>

#include "ffec/ext.hpp"

namespace ffec {

enum class RedType : int { Good = 0, Multiplicative = 1, Additive = 2 };
const char* red_name(RedType t);

struct BadPrime {
  Poly P;
  RedType type;
  int vA, vB, vD;  // vA = 1000 when A = 0
};

// The place at infinity, in the model y^2 = x^3 + A_rev x + B_rev over F_q[S],
// A_rev = S^(4k) A(1/S), B_rev = S^(6k) B(1/S), k = max(ceil(a/4), ceil(b/6)).
struct InfinityData {
  int k = 0;
  RedType type = RedType::Good;
  int f = 0;  // conductor exponent
  int vA = 0, vB = 0, vD = 0;
  u32 a0 = 0, b0 = 0;      // A_rev(0), B_rev(0)
  u32 ua = 0, ub = 0;      // constant terms of A_rev / S^vA, B_rev / S^vB
};

struct ReductionProfile {
  std::vector<BadPrime> bad;  // sorted by cmp_poly
  Poly M{1}, Adot{1};
  InfinityData inf;
  int n_frak = 0;
};

constexpr int kInfVal = 1000;

class Curve {
 public:
  Curve(FieldPtr F, Poly A, Poly B);
  // Trusted constructor for family members whose profile is derived by the caller.
  Curve(FieldPtr F, Poly A, Poly B, Poly Delta, ReductionProfile prof);

  const Field& field() const { return *F_; }
  const FieldPtr& field_ptr() const { return F_; }
  const Poly& A() const { return A_; }
  const Poly& B() const { return B_; }
  const Poly& Delta() const { return D_; }
  const ReductionProfile& profile() const { return prof_; }
  int n_frak() const { return prof_.n_frak; }
  bool is_mordell() const { return A_.empty(); }

 private:
  FieldPtr F_;
  Poly A_, B_, D_;
  ReductionProfile prof_;
};

Poly discriminant(const Field& F, const Poly& A, const Poly& B);
InfinityData infinity_data(const Poly& A, const Poly& B, int deg_delta);
ReductionProfile reduction_profile(const Curve& E);
// Assemble M, Adot and n from the classified bad primes and infinity.
void finish_profile(const Field& F, ReductionProfile& prof);

// Local data at a finite prime from the degree-d tables.
int ap_trace(const Curve& E, const Poly& P);
i64 point_count(const Curve& E, const Poly& P);

struct Eisenstein {
  i64 a = 0, b = 0;  // a + b*omega
  i64 norm() const { return a * a - a * b + b * b; }
  bool operator==(const Eisenstein& o) const { return a == o.a && b == o.b; }
};
Eisenstein eis_mul(const Eisenstein& x, const Eisenstein& y);
Eisenstein eis_conj(const Eisenstein& x);
// x * omega^j
Eisenstein eis_rotate(const Eisenstein& x, int j);

// Sum over F mod P of the cubic symbol of F^2 - B.
Eisenstein lambda_P(const Curve& Et, const Poly& P);

Curve quadratic_twist(const Curve& E, const Poly& D);
Curve cubic_twist(const Curve& Et, const Poly& D);

// Profile of E_D (quadratic) or Et_D (cubic) built from the base profile and
// the factorization of D, without refactoring the discriminant.
Curve quadratic_twist_member(const Curve& E, const Poly& D, const Factorization& facD);
Curve cubic_twist_member(const Curve& Et, const Poly& D, const Factorization& facD);

}  // namespace ffec
