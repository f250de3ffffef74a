#pragma once

// Slow, direct reference computations used as independent oracles.

#include <gmpxx.h>

#include <map>
#include <vector>

#include "ffec/curve.hpp"
#include "ffec/poly.hpp"

namespace oracle {

using namespace ffec;

// Every polynomial of degree < d (zero included).
inline std::vector<Poly> residues(const Field& F, int d) {
  std::vector<Poly> out;
  const u64 total = ipow(F.q(), (unsigned)d);
  for (u64 i = 0; i < total; ++i) {
    Poly a(d);
    u64 x = i;
    for (int j = 0; j < d; ++j) {
      a[j] = (u32)(x % F.q());
      x /= F.q();
    }
    trim(a);
    out.push_back(a);
  }
  return out;
}

inline Poly rem(const Field& F, const Poly& a, const Poly& P) {
  Poly qo, r;
  divmod(F, a, P, qo, r);
  return r;
}

// Direct F_q element arithmetic from the digit encoding and the modulus,
// for checking the table-driven Field.
struct SlowField {
  int p, m;
  std::vector<u32> f;  // modulus, ascending, monic

  std::vector<i64> dig(u32 a) const {
    std::vector<i64> d(m);
    for (int i = 0; i < m; ++i) {
      d[i] = a % p;
      a /= p;
    }
    return d;
  }
  u32 code(const std::vector<i64>& d) const {
    u32 r = 0;
    for (int i = m - 1; i >= 0; --i) r = r * p + (u32)(((d[i] % p) + p) % p);
    return r;
  }
  u32 add(u32 a, u32 b) const {
    auto x = dig(a), y = dig(b);
    for (int i = 0; i < m; ++i) x[i] += y[i];
    return code(x);
  }
  u32 mul(u32 a, u32 b) const {
    auto x = dig(a), y = dig(b);
    std::vector<i64> z(2 * m, 0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) z[i + j] = (z[i + j] + x[i] * y[j]) % p;
    for (int k = 2 * m - 2; k >= m; --k) {
      const i64 c = z[k];
      z[k] = 0;
      for (int i = 0; i < m; ++i) z[k - m + i] = ((z[k - m + i] - c * (i64)f[i]) % p + p) % p;
    }
    z.resize(m);
    return code(z);
  }
};

// Quadratic character mod a monic irreducible P, from the set of squares.
inline std::map<Poly, int, PolyLess> quad_chars(const Field& F, const Poly& P) {
  std::map<Poly, int, PolyLess> chi;
  const auto R = residues(F, deg(P));
  for (const auto& a : R) chi[a] = -1;
  for (const auto& x : R) chi[rem(F, mul(F, x, x), P)] = 1;
  chi[Poly{}] = 0;
  return chi;
}

inline int naive_trace(const Curve& E, const Poly& P) {
  const Field& F = E.field();
  auto chi = quad_chars(F, P);
  i64 s = 0;
  for (const auto& x : residues(F, deg(P))) {
    Poly v = add(F, add(F, mul(F, mul(F, x, x), x), mul(F, E.A(), x)), E.B());
    s += chi.at(rem(F, v, P));
  }
  return (int)-s;
}

inline Poly powmod_slow(const Field& F, Poly a, u64 e, const Poly& P) {
  Poly r{1};
  a = rem(F, a, P);
  while (e) {
    if (e & 1) r = rem(F, mul(F, r, a), P);
    a = rem(F, mul(F, a, a), P);
    e >>= 1;
  }
  return r;
}

// j with a^((|P|-1)/3) = omega^j, or -1 when P | a.
inline int cubic_symbol_slow(const Field& F, const Poly& a, const Poly& P) {
  const u64 Q = ipow(F.q(), (unsigned)deg(P));
  const Poly r = powmod_slow(F, a, (Q - 1) / 3, P);
  if (r.empty()) return -1;
  for (int j = 0; j < 3; ++j)
    if (r == Poly{F.pow(F.omega(), j)}) return j;
  return -2;
}

inline Eisenstein naive_lambda(const Curve& Et, const Poly& P) {
  const Field& F = Et.field();
  i64 n[3] = {0, 0, 0};
  for (const auto& x : residues(F, deg(P))) {
    const int j = cubic_symbol_slow(F, sub(F, mul(F, x, x), Et.B()), P);
    if (j >= 0) n[j]++;
  }
  return {n[0] - n[2], n[1] - n[2]};
}

inline bool squarefree_slow(const Field& F, const Poly& D) {
  for (int d = 1; 2 * d <= deg(D); ++d)
    for (u64 i = 0; i < ipow(F.q(), (unsigned)d); ++i) {
      const Poly P = monic_at(F, d, i);
      if (rem(F, D, mul(F, P, P)).empty()) return false;
    }
  return true;
}

inline bool coprime_slow(const Field& F, const Poly& a, const Poly& b) {
  for (int d = 1; d <= std::min(deg(a), deg(b)); ++d)
    for (u64 i = 0; i < ipow(F.q(), (unsigned)d); ++i) {
      const Poly P = monic_at(F, d, i);
      if (rem(F, a, P).empty() && rem(F, b, P).empty()) return false;
    }
  return true;
}

inline std::vector<Poly> irreducibles_slow(const Field& F, int d) {
  std::vector<Poly> out;
  for (u64 i = 0; i < ipow(F.q(), (unsigned)d); ++i) {
    const Poly P = monic_at(F, d, i);
    bool ok = true;
    for (int e = 1; 2 * e <= d && ok; ++e)
      for (u64 j = 0; j < ipow(F.q(), (unsigned)e) && ok; ++j)
        if (rem(F, P, monic_at(F, e, j)).empty()) ok = false;
    if (ok) out.push_back(P);
  }
  return out;
}

// Euler product coefficients up to v^K from naive traces at finite primes
// and the supplied trace at infinity (bad_inf: linear factor there).
inline std::vector<mpz_class> naive_euler(const Curve& E, int K, int t_inf, bool bad_inf) {
  const Field& F = E.field();
  const i64 q = F.q();
  std::vector<mpz_class> c(K + 1, 0);
  c[0] = 1;
  auto apply = [&](int d, i64 t, bool bad) {
    // multiply by 1 / (1 - t X + Q X^2) (good) or 1 / (1 - t X), X = v^d
    const mpz_class Q = mpz_class(ipow(q, (unsigned)d));
    for (int k = d; k <= K; ++k) {
      c[k] += t * c[k - d];
      if (!bad && k >= 2 * d) c[k] -= Q * c[k - 2 * d];
    }
  };
  for (int d = 1; d <= K; ++d)
    for (const Poly& P : irreducibles_slow(F, d)) {
      // at a bad prime the character sum already gives t in {-1, 0, 1}
      const bool bad = rem(F, E.Delta(), P).empty();
      const i64 t = naive_trace(E, P);
      apply(d, t, bad);
    }
  apply(1, t_inf, bad_inf);
  return c;
}

}  // namespace oracle
