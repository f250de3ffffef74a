#include "ffec/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ffec {

namespace {

using ZPoly = std::vector<mpz_class>;
using QPoly = std::vector<mpq_class>;

void qtrim(QPoly& a) {
  while (!a.empty() && sgn(a.back()) == 0) a.pop_back();
}

QPoly to_q(const ZPoly& a) {
  QPoly r(a.begin(), a.end());
  qtrim(r);
  return r;
}

// Positive multiple with integer coprime coefficients; signs are preserved.
ZPoly primitive(const QPoly& a) {
  mpz_class l = 1;
  for (const auto& c : a) l = lcm(l, c.get_den());
  ZPoly r(a.size());
  mpz_class g = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    mpq_class t = a[i] * l;
    r[i] = t.get_num();
    g = gcd(g, r[i]);
  }
  if (g > 1)
    for (auto& c : r) c /= g;
  return r;
}

QPoly qsub(const QPoly& a, const QPoly& b) {
  QPoly r(std::max(a.size(), b.size()));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  qtrim(r);
  return r;
}

QPoly qderiv(const QPoly& a) {
  QPoly r;
  for (size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * (long)i);
  qtrim(r);
  return r;
}

void qdivmod(const QPoly& a, const QPoly& b, QPoly& quo, QPoly& rem) {
  rem = a;
  quo.assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  const int db = (int)b.size() - 1;
  for (int i = (int)rem.size() - 1; i >= db; --i) {
    if (sgn(rem[i]) == 0) continue;
    mpq_class f = rem[i] / b[db];
    quo[i - db] = f;
    for (int j = 0; j <= db; ++j) rem[i - db + j] -= f * b[j];
  }
  qtrim(rem);
  qtrim(quo);
}

QPoly qdiv(const QPoly& a, const QPoly& b) {
  QPoly q, r;
  qdivmod(a, b, q, r);
  return q;
}

QPoly qgcd(QPoly a, QPoly b) {
  while (!b.empty()) {
    QPoly q, r;
    qdivmod(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    mpq_class l = a.back();
    for (auto& c : a) c /= l;
  }
  return a;
}

// Yun: g = prod f_i^i with f_i square-free and pairwise coprime.
std::vector<std::pair<ZPoly, int>> yun(const ZPoly& g) {
  std::vector<std::pair<ZPoly, int>> out;
  QPoly f = to_q(g);
  if (f.size() <= 1) return out;
  QPoly fd = qderiv(f);
  QPoly a = qgcd(f, fd);
  QPoly b = qdiv(f, a), c = qdiv(fd, a);
  QPoly d = qsub(c, qderiv(b));
  for (int i = 1; b.size() > 1; ++i) {
    QPoly ai = qgcd(b, d);
    if (ai.size() > 1) out.push_back({primitive(ai), i});
    b = qdiv(b, ai);
    c = qdiv(d, ai);
    d = qsub(c, qderiv(b));
  }
  return out;
}

int sign_at(const ZPoly& g, const mpq_class& x) {
  const mpz_class& a = x.get_num();
  const mpz_class& b = x.get_den();
  mpz_class s = 0, bp = 1;
  // sum g_i a^i b^(d-i), Horner from the top
  s = g.back();
  for (size_t i = g.size() - 1; i-- > 0;) {
    bp *= b;
    s = s * a + g[i] * bp;
  }
  return sgn(s);
}

// Sign of g at x = 2 s sqrt(qp), qp not a square.
int sign_at_surd(const ZPoly& g, int s, u64 qp) {
  mpz_class E = 0, O = 0, pw = 1;  // pw = 2^i qp^floor(i/2)
  for (size_t i = 0; i < g.size(); ++i) {
    if (i % 2 == 0)
      E += g[i] * pw;
    else
      O += g[i] * pw;
    pw *= 2;
    if (i % 2 == 1) pw *= (unsigned long)qp;
  }
  if (s < 0) O = -O;
  const int se = sgn(E), so = sgn(O);
  if (se == so || so == 0) return se;
  if (se == 0) return so;
  mpz_class lhs = E * E, rhs = O * O * (unsigned long)qp;
  return lhs > rhs ? se : so;
}

std::vector<ZPoly> sturm_chain(const ZPoly& g) {
  std::vector<ZPoly> S;
  QPoly a = to_q(g), b = qderiv(a);
  S.push_back(primitive(a));
  while (!b.empty()) {
    S.push_back(primitive(b));
    QPoly q, r;
    qdivmod(a, b, q, r);
    for (auto& c : r) c = -c;
    a = std::move(b);
    b = std::move(r);
  }
  return S;
}

template <class SignFn>
int variations(const std::vector<ZPoly>& S, SignFn sign) {
  int v = 0, last = 0;
  for (const auto& p : S) {
    int s = sign(p);
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

struct Surd {
  u64 qp;
  u64 root;  // sqrt(qp) when qp is a square, else 0
};

// Distinct roots of g strictly inside (-2 sqrt qp, 2 sqrt qp); endpoints are not roots.
int count_inside(const std::vector<ZPoly>& S, const Surd& sd) {
  if (sd.root) {
    mpq_class lo(-2 * (long)sd.root), hi(2 * (long)sd.root);
    return variations(S, [&](const ZPoly& p) { return sign_at(p, lo); }) -
           variations(S, [&](const ZPoly& p) { return sign_at(p, hi); });
  }
  return variations(S, [&](const ZPoly& p) { return sign_at_surd(p, -1, sd.qp); }) -
         variations(S, [&](const ZPoly& p) { return sign_at_surd(p, 1, sd.qp); });
}

int count_between(const std::vector<ZPoly>& S, const mpq_class& lo, const mpq_class& hi) {
  return variations(S, [&](const ZPoly& p) { return sign_at(p, lo); }) -
         variations(S, [&](const ZPoly& p) { return sign_at(p, hi); });
}

// Roots of a square-free g, all known to lie in (-B, B), as rationals
// accurate to 2^-prec.
std::vector<mpq_class> real_roots(ZPoly g, const mpq_class& B, int prec) {
  std::vector<mpq_class> out;
  mpq_class eps(1);
  eps /= mpz_class(1) << prec;
  for (;;) {
    if (g.size() <= 1) return out;
    auto S = sturm_chain(g);
    struct Iv {
      mpq_class lo, hi;
      int n;
    };
    std::vector<Iv> stack{{-B, B, count_between(S, -B, B)}}, iso;
    bool hit = false;
    mpq_class root;
    while (!stack.empty() && !hit) {
      Iv iv = stack.back();
      stack.pop_back();
      if (iv.n == 0) continue;
      if (iv.n == 1) {
        iso.push_back(iv);
        continue;
      }
      mpq_class mid = (iv.lo + iv.hi) / 2;
      if (sign_at(g, mid) == 0) {
        hit = true;
        root = mid;
        break;
      }
      stack.push_back({mid, iv.hi, count_between(S, mid, iv.hi)});
      stack.push_back({iv.lo, mid, count_between(S, iv.lo, mid)});
    }
    if (hit) {
      out.push_back(root);
      QPoly lin{-root, mpq_class(1)};
      g = primitive(qdiv(to_q(g), lin));
      continue;
    }
    for (auto& iv : iso) {
      int slo = sign_at(g, iv.lo);
      bool exact = false;
      while (iv.hi - iv.lo > eps) {
        mpq_class mid = (iv.lo + iv.hi) / 2;
        int sm = sign_at(g, mid);
        if (sm == 0) {
          iv.lo = iv.hi = mid;
          exact = true;
          break;
        }
        if (sm == slo)
          iv.lo = mid;
        else
          iv.hi = mid;
      }
      out.push_back(exact ? iv.lo : mpq_class((iv.lo + iv.hi) / 2));
    }
    return out;
  }
}

u64 isqrt_exact(u64 v) {
  u64 r = (u64)std::llround(std::sqrt((double)v));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r * r == v ? r : 0;
}

// p / (w - a) for a root a.
ZPoly div_linear(const ZPoly& p, const mpz_class& a) {
  ZPoly q(p.size() - 1);
  mpz_class carry = 0;
  for (size_t i = p.size() - 1; i-- > 0;) {
    carry = p[i + 1] + carry * a;
    q[i] = carry;
  }
  return q;
}

mpz_class eval_z(const ZPoly& p, const mpz_class& x) {
  mpz_class s = 0;
  for (size_t i = p.size(); i-- > 0;) s = s * x + p[i];
  return s;
}

bool div_quadratic(ZPoly& p, u64 qp) {  // by w^2 - qp
  if (p.size() < 3) return false;
  ZPoly r = p, q(p.size() - 2);
  for (size_t i = r.size() - 1; i >= 2; --i) {
    q[i - 2] = r[i];
    r[i - 2] += r[i] * (unsigned long)qp;
    r[i] = 0;
  }
  if (sgn(r[0]) != 0 || sgn(r[1]) != 0) return false;
  p = std::move(q);
  return true;
}

}  // namespace

RootReport analyze_roots(const std::vector<mpz_class>& c, u32 q, int h, bool want_angles) {
  require(!c.empty() && sgn(c.back()) != 0 && h >= 1, Err::InvalidArgument, "bad polynomial for root analysis");
  RootReport R;
  const int n = (int)c.size() - 1;
  R.n = n;
  if (n == 0) {
    R.eps = 1;
    R.rh = true;
    return R;
  }
  const int s = (h + 1) / 2;
  const u64 qp = h % 2 == 0 ? 1 : q;
  const Surd sd{qp, isqrt_exact(qp)};
  ZPoly p(n + 1);
  for (int j = 0; j <= n; ++j) {
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), q, (unsigned long)(s * (n - j)));
    p[j] = c[j] * t;
  }

  // reflection: p_{n-j} qp^(n/2) = eps qp^j p_j
  if (n % 2 == 1 && !sd.root) {
    R.max_dev = std::numeric_limits<double>::infinity();
    return R;
  }
  mpz_class half;
  if (n % 2 == 0)
    mpz_ui_pow_ui(half.get_mpz_t(), qp, (unsigned long)(n / 2));
  else
    mpz_ui_pow_ui(half.get_mpz_t(), sd.root, (unsigned long)n);
  int eps = 0;
  if (p[n] * half == p[0]) eps = 1;
  if (p[n] * half == -p[0]) eps = -1;
  for (int j = 0; j <= n && eps != 0; ++j) {
    mpz_class qj;
    mpz_ui_pow_ui(qj.get_mpz_t(), qp, (unsigned long)j);
    if (p[n - j] * half != eps * qj * p[j]) eps = 0;
  }
  R.eps = eps;
  if (eps == 0) {
    R.max_dev = std::numeric_limits<double>::infinity();
    return R;
  }

  // real zeros w = +-sqrt(qp)
  std::vector<double> angles;
  int real_zeros = 0;
  if (sd.root) {
    const mpz_class r0((unsigned long)sd.root);
    while (p.size() > 1 && sgn(eval_z(p, r0)) == 0) {
      p = div_linear(p, r0);
      angles.push_back(0.0);
      ++real_zeros;
    }
    while (p.size() > 1 && sgn(eval_z(p, -r0)) == 0) {
      p = div_linear(p, -r0);
      angles.push_back(M_PI);
      ++real_zeros;
    }
  } else {
    while (div_quadratic(p, qp)) {
      angles.push_back(0.0);
      angles.push_back(M_PI);
      real_zeros += 2;
    }
  }
  const int m2 = (int)p.size() - 1;
  if (m2 % 2 == 1) {
    R.max_dev = std::numeric_limits<double>::infinity();
    return R;
  }
  const int r = m2 / 2;
  for (int j = 0; j <= r; ++j) {
    mpz_class qk;
    mpz_ui_pow_ui(qk.get_mpz_t(), qp, (unsigned long)(r - j));
    if (p[j] != qk * p[m2 - j]) {
      R.max_dev = std::numeric_limits<double>::infinity();
      return R;
    }
  }

  // R(x) = p_r + sum_k p_{r+k} V_k(x), V_k = x V_{k-1} - qp V_{k-2}
  ZPoly Rx(r + 1, 0);
  Rx[0] = p[r];
  ZPoly V0{2}, V1{0, 1};
  for (int k = 1; k <= r; ++k) {
    const ZPoly& Vk = V1;
    for (size_t i = 0; i < Vk.size(); ++i) Rx[i] += p[r + k] * Vk[i];
    ZPoly V2(V1.size() + 1, 0);
    for (size_t i = 0; i < V1.size(); ++i) V2[i + 1] += V1[i];
    for (size_t i = 0; i < V0.size(); ++i) V2[i] -= V0[i] * (unsigned long)qp;
    V0 = std::move(V1);
    V1 = std::move(V2);
  }

  int inside = 0;
  auto parts = r > 0 ? yun(Rx) : std::vector<std::pair<ZPoly, int>>{};
  for (const auto& [g, mult] : parts) inside += mult * count_inside(sturm_chain(g), sd);
  R.on_circle = real_zeros + 2 * inside;
  R.rh = inside == r;
  if (!R.rh) {
    R.max_dev = std::numeric_limits<double>::infinity();
    return R;
  }
  if (!want_angles) return R;

  const double rq = std::sqrt((double)qp);
  mpq_class B(sd.root ? 2 * (long)sd.root : (long)std::ceil(2 * rq) + 1);
  for (const auto& [g, mult] : parts) {
    for (const auto& x : real_roots(g, B, 110)) {
      double phi;
      if (sd.root) {
        mpq_class two_r(2 * (long)sd.root);
        double y1 = mpq_class(two_r - x).get_d(), y2 = mpq_class(two_r + x).get_d();
        phi = 2 * std::atan2(std::sqrt(std::max(0.0, y1)), std::sqrt(std::max(0.0, y2)));
      } else {
        long double xv = x.get_d(), tr = 2 * std::sqrt((long double)qp);
        phi = (double)(2 * std::atan2(std::sqrt(std::max(0.0L, tr - xv)), std::sqrt(std::max(0.0L, tr + xv))));
      }
      for (int i = 0; i < mult; ++i) {
        angles.push_back(phi);
        angles.push_back(-phi);
      }
    }
  }
  std::sort(angles.begin(), angles.end());
  R.angles = std::move(angles);
  R.max_dev = 0.0;
  return R;
}

std::vector<std::complex<double>> zeros_from_report(const RootReport& r, u32 q, int h) {
  std::vector<std::complex<double>> z;
  const double rad = std::pow((double)q, -0.5 * h);
  for (double a : r.angles) z.push_back(std::polar(rad, a));
  return z;
}

}  // namespace ffec
