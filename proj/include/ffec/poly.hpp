#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ffec/field.hpp"

namespace ffec {

// Dense polynomial over F_q, ascending coefficients, always trimmed.
// The zero polynomial is the empty vector.
using Poly = std::vector<u32>;

inline int deg(const Poly& a) { return (int)a.size() - 1; }
inline bool is_zero(const Poly& a) { return a.empty(); }
inline u32 lead(const Poly& a) { return a.empty() ? 0 : a.back(); }
void trim(Poly& a);

Poly poly_const(u32 c);
Poly poly_T();
Poly poly_linear(u32 c0);  // T + c0

Poly add(const Field& F, const Poly& a, const Poly& b);
Poly sub(const Field& F, const Poly& a, const Poly& b);
Poly neg(const Field& F, const Poly& a);
Poly scale(const Field& F, const Poly& a, u32 c);
Poly mul(const Field& F, const Poly& a, const Poly& b);
Poly pow(const Field& F, const Poly& a, unsigned e);
Poly shift_up(const Poly& a, int k);  // a * T^k
void divmod(const Field& F, const Poly& a, const Poly& b, Poly& qo, Poly& r);
Poly mod(const Field& F, const Poly& a, const Poly& b);
Poly div_exact(const Field& F, const Poly& a, const Poly& b);
Poly mulmod(const Field& F, const Poly& a, const Poly& b, const Poly& m);
Poly powmod(const Field& F, const Poly& a, u64 e, const Poly& m);
Poly gcd(const Field& F, Poly a, Poly b);  // monic (or zero)
Poly derivative(const Field& F, const Poly& a);
Poly monic(const Field& F, const Poly& a);
u32 eval(const Field& F, const Poly& a, u32 x);
// v_P(a) for a != 0.
int valuation(const Field& F, Poly a, const Poly& P);

// a^((q^d - 1)/k) mod m, where d = deg m and k | q - 1.
Poly power_residue(const Field& F, const Poly& a, const Poly& m, unsigned k);

// Order used everywhere: degree first, then coefficients c0, c1, ... compared
// as integers with c0 most significant.
int cmp_poly(const Poly& a, const Poly& b);
struct PolyLess {
  bool operator()(const Poly& a, const Poly& b) const { return cmp_poly(a, b) < 0; }
};

std::string format_poly(const Poly& a);
Poly parse_poly(const Field& F, const std::string& s);

bool is_irreducible(const Field& F, const Poly& f);
bool is_squarefree(const Field& F, const Poly& f);

struct Factorization {
  u32 unit = 1;
  std::vector<std::pair<Poly, int>> factors;

  int mobius() const;
  Poly expand(const Field& F) const;
};

Factorization factorize(const Field& F, const Poly& D);
Poly radical(const Field& F, const Poly& D);
Poly degree_n_part(const Field& F, const Poly& D, int n);

// Monic polynomials of degree n indexed by 0 <= idx < q^n in cmp_poly order.
Poly monic_at(const Field& F, int n, u64 idx);
u64 ipow(u64 b, unsigned e);

// Number of monic irreducibles of degree n: (1/n) sum_{d|n} mu(d) q^(n/d).
u64 necklace_count(u64 q, int n);
int mobius_int(int n);

}  // namespace ffec
