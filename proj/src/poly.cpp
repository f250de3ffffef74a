#include "ffec/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ffec {

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_const(u32 c) { return c == 0 ? Poly{} : Poly{c}; }
Poly poly_T() { return Poly{0, 1}; }
Poly poly_linear(u32 c0) { return Poly{c0, 1}; }

Poly add(const Field& F, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) {
    u32 x = i < a.size() ? a[i] : 0;
    u32 y = i < b.size() ? b[i] : 0;
    r[i] = F.add(x, y);
  }
  trim(r);
  return r;
}

Poly neg(const Field& F, const Poly& a) {
  Poly r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = F.neg(a[i]);
  return r;
}

Poly sub(const Field& F, const Poly& a, const Poly& b) { return add(F, a, neg(F, b)); }

Poly scale(const Field& F, const Poly& a, u32 c) {
  if (c == 0) return {};
  Poly r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = F.mul(a[i], c);
  return r;
}

Poly mul(const Field& F, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  }
  trim(r);
  return r;
}

Poly pow(const Field& F, const Poly& a, unsigned e) {
  Poly r{1}, b = a;
  while (e) {
    if (e & 1) r = mul(F, r, b);
    e >>= 1;
    if (e) b = mul(F, b, b);
  }
  return r;
}

Poly shift_up(const Poly& a, int k) {
  if (a.empty()) return {};
  Poly r(a.size() + k, 0);
  std::copy(a.begin(), a.end(), r.begin() + k);
  return r;
}

void divmod(const Field& F, const Poly& a, const Poly& b, Poly& qo, Poly& r) {
  require(!b.empty(), Err::ZeroPolynomial, "division by zero polynomial");
  r = a;
  trim(r);
  const int db = deg(b);
  if (deg(r) < db) {
    qo.clear();
    return;
  }
  qo.assign(deg(r) - db + 1, 0);
  const u32 il = F.inv(b.back());
  while (deg(r) >= db) {
    const int s = deg(r) - db;
    const u32 c = F.mul(r.back(), il);
    qo[s] = c;
    for (int i = 0; i <= db; ++i) r[s + i] = F.sub(r[s + i], F.mul(c, b[i]));
    trim(r);
  }
  trim(qo);
}

Poly mod(const Field& F, const Poly& a, const Poly& b) {
  Poly qo, r;
  divmod(F, a, b, qo, r);
  return r;
}

Poly div_exact(const Field& F, const Poly& a, const Poly& b) {
  Poly qo, r;
  divmod(F, a, b, qo, r);
  require(r.empty(), Err::Internal, "inexact polynomial division");
  return qo;
}

Poly mulmod(const Field& F, const Poly& a, const Poly& b, const Poly& m) {
  return mod(F, mul(F, a, b), m);
}

Poly powmod(const Field& F, const Poly& a, u64 e, const Poly& m) {
  Poly r = mod(F, Poly{1}, m), b = mod(F, a, m);
  while (e) {
    if (e & 1) r = mulmod(F, r, b, m);
    e >>= 1;
    if (e) b = mulmod(F, b, b, m);
  }
  return r;
}

Poly gcd(const Field& F, Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = mod(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(F, a);
}

Poly derivative(const Field& F, const Poly& a) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = F.mul(a[i], F.from_int((i64)i));
  trim(r);
  return r;
}

Poly monic(const Field& F, const Poly& a) {
  if (a.empty() || a.back() == 1) return a;
  return scale(F, a, F.inv(a.back()));
}

u32 eval(const Field& F, const Poly& a, u32 x) {
  u32 r = 0;
  for (size_t i = a.size(); i-- > 0;) r = F.add(F.mul(r, x), a[i]);
  return r;
}

int valuation(const Field& F, Poly a, const Poly& P) {
  require(!a.empty(), Err::ZeroPolynomial, "valuation of zero");
  int v = 0;
  for (;;) {
    Poly qo, r;
    divmod(F, a, P, qo, r);
    if (!r.empty()) return v;
    a = std::move(qo);
    ++v;
  }
}

Poly power_residue(const Field& F, const Poly& a, const Poly& m, unsigned k) {
  const int d = deg(m);
  require(d >= 1, Err::ConstantModulus, "modulus must be nonconstant");
  require((F.q() - 1) % k == 0, Err::InvalidArgument, "k must divide q-1");
  // (q^d-1)/k = ((q-1)/k) * (1 + q + ... + q^(d-1)).
  Poly x = mod(F, a, m);
  Poly nrm = mod(F, Poly{1}, m);
  for (int i = 0; i < d; ++i) {
    nrm = mulmod(F, nrm, x, m);
    if (i + 1 < d) x = powmod(F, x, F.q(), m);
  }
  return powmod(F, nrm, (F.q() - 1) / k, m);
}

int cmp_poly(const Poly& a, const Poly& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  return 0;
}

std::string format_poly(const Poly& a) {
  if (a.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(a[i]);
  }
  return s;
}

Poly parse_poly(const Field& F, const std::string& s) {
  Poly r;
  std::string tok;
  std::stringstream ss(s);
  bool any = false;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }),
              tok.end());
    require(!tok.empty(), Err::BadPolynomialLiteral, "empty coefficient in '" + s + "'");
    size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &pos);
    } catch (...) {
      fail(Err::BadPolynomialLiteral, "bad coefficient '" + tok + "'");
    }
    require(pos == tok.size(), Err::BadPolynomialLiteral, "bad coefficient '" + tok + "'");
    if (F.m() == 1) {
      r.push_back(F.from_int(v));
    } else {
      require(v >= 0 && v < (long long)F.q(), Err::BadPolynomialLiteral,
              "element code out of range: " + tok);
      r.push_back((u32)v);
    }
    any = true;
  }
  require(any, Err::BadPolynomialLiteral, "empty polynomial literal");
  trim(r);
  return r;
}

bool is_irreducible(const Field& F, const Poly& f0) {
  require(!f0.empty(), Err::ZeroPolynomial, "irreducibility of zero");
  const Poly f = monic(F, f0);
  const int n = deg(f);
  if (n < 1) return false;
  if (n == 1) return true;
  Poly xp = poly_T();
  for (int i = 1; i <= n / 2; ++i) {
    xp = powmod(F, xp, F.q(), f);
    Poly g = gcd(F, f, sub(F, xp, poly_T()));
    if (deg(g) > 0) return false;
  }
  return true;
}

bool is_squarefree(const Field& F, const Poly& f) {
  require(!f.empty(), Err::ZeroPolynomial, "is_squarefree of zero");
  if (deg(f) <= 0) return true;
  Poly d = derivative(F, f);
  if (d.empty()) return false;
  return deg(gcd(F, f, d)) == 0;
}

int Factorization::mobius() const {
  for (const auto& pe : factors)
    if (pe.second > 1) return 0;
  return (factors.size() % 2 == 0) ? 1 : -1;
}

Poly Factorization::expand(const Field& F) const {
  Poly r{unit};
  for (const auto& pe : factors) r = mul(F, r, pow(F, pe.first, (unsigned)pe.second));
  return r;
}

namespace {

// Square-free decomposition of a monic polynomial: pairs (g, e) with f = prod g^e.
void squarefree_parts(const Field& F, const Poly& f, int mult, std::vector<std::pair<Poly, int>>& out) {
  if (deg(f) <= 0) return;
  Poly d = derivative(F, f);
  if (d.empty()) {
    // f = g^p where g takes the p-th roots of the coefficients at T^(ip).
    const int p = F.p();
    Poly g(deg(f) / p + 1);
    const u64 root_e = F.q() / (u64)p;  // x -> x^(q/p) inverts Frobenius x -> x^p
    for (size_t i = 0; i < g.size(); ++i) g[i] = F.pow(f[i * p], root_e);
    squarefree_parts(F, g, mult * p, out);
    return;
  }
  Poly c = gcd(F, f, d);
  Poly w = div_exact(F, f, c);
  int i = 1;
  while (deg(w) > 0) {
    Poly y = gcd(F, w, c);
    Poly z = div_exact(F, w, y);
    if (deg(z) > 0) out.push_back({z, i * mult});
    w = y;
    c = div_exact(F, c, y);
    ++i;
  }
  if (deg(c) > 0) {
    // Remaining part is a p-th power.
    const int p = F.p();
    Poly g(deg(c) / p + 1);
    const u64 root_e = F.q() / (u64)p;
    for (size_t j = 0; j < g.size(); ++j) g[j] = F.pow(c[j * p], root_e);
    squarefree_parts(F, g, mult * p, out);
  }
}

// Cantor-Zassenhaus split of a squarefree product of degree-d irreducibles.
void equal_degree(const Field& F, const Poly& f, int d, std::vector<Poly>& out) {
  const int n = deg(f);
  if (n == d) {
    out.push_back(f);
    return;
  }
  for (int k = 1; k < n; ++k) {
    const u64 lim = std::min<u64>(ipow(F.q(), (unsigned)k), 4096);
    for (u64 idx = 0; idx < lim; ++idx) {
      Poly r = monic_at(F, k, idx);
      Poly s = power_residue(F, r, f, 2);
      Poly g = gcd(F, f, sub(F, s, Poly{1}));
      if (deg(g) > 0 && deg(g) < n) {
        equal_degree(F, g, d, out);
        equal_degree(F, div_exact(F, f, g), d, out);
        return;
      }
    }
  }
  fail(Err::Internal, "equal-degree splitting failed");
}

}  // namespace

Factorization factorize(const Field& F, const Poly& D) {
  require(!D.empty(), Err::ZeroPolynomial, "factorize zero polynomial");
  Factorization fac;
  fac.unit = D.back();
  Poly f = monic(F, D);
  std::vector<std::pair<Poly, int>> sq;
  squarefree_parts(F, f, 1, sq);
  std::vector<std::pair<Poly, int>> all;
  for (auto& [g, e] : sq) {
    Poly rest = g;
    Poly xp = poly_T();
    for (int d = 1; deg(rest) > 0; ++d) {
      if (2 * d > deg(rest)) {
        all.push_back({monic(F, rest), e});
        break;
      }
      xp = powmod(F, xp, F.q(), rest);
      Poly h = gcd(F, rest, sub(F, xp, poly_T()));
      if (deg(h) > 0) {
        std::vector<Poly> parts;
        equal_degree(F, h, d, parts);
        for (auto& pp : parts) all.push_back({monic(F, pp), e});
        rest = div_exact(F, rest, h);
        xp = mod(F, xp, rest);
      }
    }
  }
  // Merge equal primes (distinct square-free parts are coprime, so this is defensive).
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return cmp_poly(x.first, y.first) < 0; });
  for (auto& pe : all) {
    if (!fac.factors.empty() && fac.factors.back().first == pe.first)
      fac.factors.back().second += pe.second;
    else
      fac.factors.push_back(pe);
  }
  return fac;
}

Poly radical(const Field& F, const Poly& D) {
  Factorization fac = factorize(F, D);
  Poly r{1};
  for (const auto& pe : fac.factors) r = mul(F, r, pe.first);
  return r;
}

Poly degree_n_part(const Field& F, const Poly& D, int n) {
  require(n >= 1, Err::InvalidArgument, "n must be >= 1");
  Factorization fac = factorize(F, D);
  Poly r{1};
  for (const auto& pe : fac.factors)
    if (deg(pe.first) == n) r = mul(F, r, pe.first);
  return r;
}

u64 ipow(u64 b, unsigned e) {
  u64 r = 1;
  while (e--) r *= b;
  return r;
}

Poly monic_at(const Field& F, int n, u64 idx) {
  Poly c(n + 1, 0);
  c[n] = 1;
  for (int i = n - 1; i >= 0; --i) {
    c[i] = (u32)(idx % F.q());
    idx /= F.q();
  }
  return c;
}

int mobius_int(int n) {
  int r = 1;
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      n /= d;
      if (n % d == 0) return 0;
      r = -r;
    }
  }
  if (n > 1) r = -r;
  return r;
}

u64 necklace_count(u64 q, int n) {
  i128 s = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) s += (i128)mobius_int(d) * (i128)ipow(q, (unsigned)(n / d));
  return (u64)(s / n);
}

}  // namespace ffec
