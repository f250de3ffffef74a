#pragma once

#include <gmpxx.h>

#include <functional>
#include <vector>

#include "ffec/curve.hpp"

namespace ffec {

mpz_class to_mpz(i128 v);
i128 to_i128(const mpz_class& z);
mpz_class mpz_pow(u64 b, unsigned e);

// Frobenius traces of one curve at all primes of degree <= K and at infinity.
// Per-prime arrays are kept for degrees with 2d <= K (or all degrees when
// full); larger degrees only enter the expansion through their summed trace.
struct FrobTable {
  u32 q = 0;
  int K = 0;
  std::vector<std::vector<int16_t>> t;   // t[d][i]
  std::vector<std::vector<uint8_t>> bad;  // bad[d][i]
  std::vector<i64> tsum;                  // tsum[d]
  int t_inf = 0;
  bool bad_inf = false;

  bool has_primes(int d) const { return d < (int)t.size() && !t[d].empty(); }
};

// Logs of A and B at the chosen root of every prime, per degree.
struct CurveLogs {
  std::vector<std::vector<u32>> la, lb;
};

CurveLogs curve_logs(const Curve& E, int K);
FrobTable frob_table(const Curve& E, int K, bool full = false);
void set_infinity(FrobTable& ft, const Curve& E);

// A_k(P) = alpha^k + beta^k (good) or t^k (bad).
i128 A_power(int t, bool bad, i128 Q, int k);

// Coefficients c_0..c_K of the Euler product truncated at v^K.
std::vector<i128> euler_coeffs(const FrobTable& ft);

struct LPolynomial {
  u32 q = 0;
  int n = 0;
  std::vector<mpz_class> c;  // c_0..c_n of L(sqrt(q) v)
  int eps = 1;
  int K = 0;            // prime degrees used
  bool verified = false;  // K >= n: degree and every reflection checked directly
};

struct LPolyOptions {
  int max_prime_degree = 8;
  bool lean = false;  // use just enough prime degrees for reflection to close
  int margin = 0;
};

// Builds the polynomial of degree n from c_0..c_K.  Returns false when the
// sign cannot be fixed from the available coefficients.
bool complete_lpoly(const std::vector<i128>& ck, int n, u32 q, int K, LPolynomial& out);

LPolynomial l_polynomial(const Curve& E, const LPolyOptions& opt = {});
// Same, with the tables supplied per prime degree cap.
LPolynomial l_polynomial_from(u32 q, int n, const std::function<FrobTable(int)>& table, const LPolyOptions& opt = {});
int lean_degree(int n);

// Same for zeros on |v| = q^(-h/2): c_{n-j} = eps q^(h(n-2j)/2) c_j.
bool complete_weighted(const std::vector<mpz_class>& ck, int n, u32 q, int h, std::vector<mpz_class>& c,
                       int& eps, bool& verified);
int detect_degree_weighted(const std::vector<mpz_class>& ck, u32 q, int h, int lo, int hi);
// Degree n' in [0, 2K] consistent with c_0..c_K (unique), or -1.
int detect_degree(const std::vector<i128>& ck, u32 q, int lo, int hi);

std::vector<mpz_class> power_sums_from_coeffs(const std::vector<mpz_class>& c, int n_max);
std::vector<mpz_class> frobenius_power_sums(const LPolynomial& L, int n_max);
mpz_class trace_via_primes(const FrobTable& ft, int n);
mpz_class trace_via_primes(const Curve& E, int n);

}  // namespace ffec
