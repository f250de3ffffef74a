#pragma once

#include <map>
#include <string>

#include "ffec/lpoly.hpp"
#include "ffec/roots.hpp"

namespace ffec {

// How additive places enter sym^m for m >= 2.
//  Tame: inertia invariants of the tame potentially good (or potentially
//        multiplicative) representation, computed from the good model over
//        the splitting extension.
//  TrivialFactor: local factor 1.
//  UserSupplied: local polynomial per place, keyed by format_poly(P) or "inf".
enum class BadPolicy { Tame, TrivialFactor, UserSupplied };
const char* policy_name(BadPolicy p);
BadPolicy parse_policy(const std::string& s);

struct SymPolicy {
  BadPolicy kind = BadPolicy::Tame;
  std::map<std::string, std::vector<i64>> user;  // f_0 = 1, f_1, ... in X = v^deg P
};

// Local data at one place, enough to produce every sym^m factor.
struct PlaceData {
  int d = 1;
  u64 Q = 0;  // q^d
  RedType type = RedType::Good;
  int t = 0;
  // additive places
  bool pot_mult = false;
  int e = 1;       // inertia order of the potentially good reduction
  bool split = true;  // e | Q - 1
  int t_good = 0;  // trace of the good model over the splitting extension
  std::string key;
};

std::vector<PlaceData> bad_places(const Curve& E);
PlaceData place_data(const Curve& E, const Poly& P);  // finite prime
PlaceData infinity_place(const Curve& E);

// q^(k m d / 2) a*_{m,P^k}: the k-th power sum of the sym^m local inverse roots.
mpz_class sym_power_sum(const PlaceData& pd, int m, int k, const SymPolicy& pol = {});

struct LocalSymCoeff {
  int m = 0, k = 0, d = 0;
  mpz_class num;
  int twice_exp = 0;  // value = num / q^(twice_exp / 2)
  double value(u32 q) const;
};
LocalSymCoeff local_sym_coeff(const Curve& E, const Poly& P, int m, int k, const SymPolicy& pol = {});
bool power_reduce_check(const Curve& E, const Poly& P, int m, int d);

struct SymLPolynomial {
  u32 q = 0;
  int m = 0;
  int n = 0;
  std::vector<mpz_class> c;
  int eps = 0;
  int K = 0;
  bool verified = false;
  BadPolicy policy = BadPolicy::Tame;
  std::vector<mpz_class> prime_sums;  // sigma_1..sigma_K from the Euler product
  RootReport roots;
};

SymLPolynomial sym_l_polynomial(const Curve& E, int m, const SymPolicy& pol = {}, int max_prime_degree = 8);

// Euler-product power sums sigma_1..sigma_K of sym^m (infinite place included).
std::vector<mpz_class> sym_prime_sums(const Curve& E, int m, int K, const SymPolicy& pol = {});

// sigma_n for n <= n_max by Newton; checks them against the Euler product.
std::vector<mpz_class> sym_traces(const SymLPolynomial& L, int n_max);
double sym_trace_float(const SymLPolynomial& L, const mpz_class& sigma, int n);

// L'/L(u0) in the normalized variable, u0 = q^(twice_exp/2).
double log_derivative_at(const std::vector<mpz_class>& c, u32 q, int m, int twice_exp);

// Integer residual (scaled by q^(n/2)) of the even-n trace identity relating
// the prime-square sums of a*_1 to sym^2, all places included.
mpz_class nice_trace_identity(const Curve& E, int n, const SymPolicy& pol = {});

}  // namespace ffec
