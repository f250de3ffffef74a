#pragma once

#include <gmpxx.h>

#include <map>
#include <mutex>

#include "ffec/lpoly.hpp"

namespace ffec {

enum class SignPart { All, Plus, Minus };
const char* sign_name(SignPart s);
SignPart parse_sign(const std::string& s);

// Monic square-free D of degree N coprime to Delta(E) * extra.  The sign
// parts split by jacobi_quad(D, M).
struct QuadFamilySpec {
  Curve E;
  int N = 1;
  SignPart sign = SignPart::All;
  Poly extra{1};
};

struct QuadMember {
  Poly D;
  int chi = 0;  // jacobi_quad(D, M), 0 when M = 1
  Factorization fac;
};

// Members whose monic index (monic_at order) lies in [begin, end).
std::vector<QuadMember> enum_quad(const QuadFamilySpec& s, u64 begin = 0, u64 end = ~0ull);
u64 quad_count(const QuadFamilySpec& s);

enum class CubicVariant { F, K };
const char* variant_name(CubicVariant v);
CubicVariant parse_variant(const std::string& s);

// D = D1 D2^2 with D1, D2 monic, square-free, coprime to each other and to
// B * extra.  F: deg(D1 D2) = N and 3 | deg D.  K: the union of the
// (deg rad, deg D mod 3) classes whose twists all share one conductor degree
// by the reduction chart at infinity.
struct CubicFamilySpec {
  Curve Et;
  int N = 1;
  CubicVariant variant = CubicVariant::F;
  Poly extra{1};
};

struct CubicMember {
  Poly D, D1, D2;
  Factorization fac;
};

std::vector<CubicMember> enum_cubic(const CubicFamilySpec& s);
u64 cubic_count(const CubicFamilySpec& s);

struct SizeReport {
  double predicted = 0;
  std::string formula;
  u64 exact = 0;
  double abs_err = 0, rel_err = 0;
};
SizeReport predicted_size(const QuadFamilySpec& s);
SizeReport predicted_size(const CubicFamilySpec& s);

struct RatioReport {
  mpq_class empirical;
  double predicted = 0;
  double deviation = 0;  // empirical - predicted
};
RatioReport coprime_ratio(const QuadFamilySpec& s, const Poly& P);
RatioReport coprime_ratio(const CubicFamilySpec& s, const Poly& P);
double cubic_ratio_prediction(u32 q, int m, int N);

// (sum_D (D/P)_3) / |F_N(B)|, numerator as an Eisenstein integer.
struct EisRational {
  Eisenstein num;
  u64 den = 1;
  std::complex<double> value() const;
};
EisRational character_average_EP(const CubicFamilySpec& s, const Poly& P);
// Same over an explicit member list (symbols computed once per member).
EisRational character_average_EP(const Field& F, const std::vector<CubicMember>& fam, const Poly& P);

struct SeriesTable {
  u32 q = 0;
  int N_max = 0;
  std::vector<mpz_class> H0, H1, G;  // coefficients of u^0..u^N_max
  // [u^d] H0 / q^d ~ L1 d + L0 and [u^d] H1 / q^d ~ C_(d mod 3), fitted on
  // d in [fit_lo, N_max].
  int fit_lo = 0;
  double L1 = 0, L0 = 0, L_resid = 0;
  double C[3] = {0, 0, 0};
  double C_resid = 0;
  double C_single = 0, C_single_resid = 0;  // one constant for every d
};
SeriesTable series_coefficients(const Field& F, const Poly& B, int N_max);

// Quadratic analogue: sum_{(D, Delta) = 1} mu^2(D) u^deg D.
std::vector<mpz_class> quad_series(const Field& F, const Poly& Delta, int N_max);

// Frobenius tables of twist members assembled from the base curve's tables.
// Quadratic twists multiply each trace by (D/P), which is read off cached
// per-factor sign vectors (P/Q) via reciprocity; cubic twists shift the log
// of B by 2 log D(theta).
class TwistBase {
 public:
  enum Kind { Quadratic, Cubic };
  TwistBase(const Curve& base, Kind kind, int K);

  const Curve& base() const { return base_; }
  Kind kind() const { return kind_; }
  int K() const { return K_; }
  const FrobTable& table() const { return ft_; }
  // log B(theta) per prime, cubic kind only
  const std::vector<std::vector<u32>>& logs_B() const { return lb_; }
  FrobTable member_table(const Curve& member, const Poly& D, const Factorization& fac, int K) const;
  LPolynomial member_l_polynomial(const Curve& member, const Poly& D, const Factorization& fac,
                                  const LPolyOptions& opt = {}) const;

 private:
  struct SignBits {
    std::vector<std::vector<uint64_t>> bits;  // bits[d]: (Q / P) = -1 for the i-th prime of degree d
    size_t self = ~size_t(0);                 // index of Q among primes of its own degree
  };
  std::shared_ptr<const SignBits> sign_bits(const Poly& Q) const;

  Curve base_;
  Kind kind_;
  int K_;
  FrobTable ft_;
  std::vector<std::vector<u32>> lb_;
  mutable std::mutex mu_;
  mutable std::map<Poly, std::shared_ptr<const SignBits>, PolyLess> cache_;
};

Curve quad_member_curve(const QuadFamilySpec& s, const QuadMember& m);
Curve cubic_member_curve(const CubicFamilySpec& s, const CubicMember& m);

}  // namespace ffec
