#include "ffec/lpoly.hpp"

#include <algorithm>
#include <functional>

namespace ffec {

mpz_class to_mpz(i128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
  mpz_class hi((unsigned long)(u >> 64)), lo((unsigned long)(u & ~0ull));
  mpz_class r = (hi << 64) + lo;
  return neg ? mpz_class(-r) : r;
}

i128 to_i128(const mpz_class& z) {
  require(mpz_sizeinbase(z.get_mpz_t(), 2) < 126, Err::TooLarge, "integer exceeds 126 bits");
  mpz_class a = abs(z);
  mpz_class hi = a >> 64;
  mpz_class lo = a - (hi << 64);
  unsigned __int128 u = ((unsigned __int128)hi.get_ui() << 64) | (unsigned __int128)lo.get_ui();
  return sgn(z) < 0 ? -(i128)u : (i128)u;
}

mpz_class mpz_pow(u64 b, unsigned e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), (unsigned long)b, e);
  return r;
}

CurveLogs curve_logs(const Curve& E, int K) {
  CurveLogs L;
  L.la.resize(K + 1);
  L.lb.resize(K + 1);
  for (int d = 1; d <= K; ++d) {
    auto T = prime_table(E.field_ptr(), d);
    const ExtField& X = T->ext();
    L.la[d].resize(T->size());
    L.lb[d].resize(T->size());
    for (size_t i = 0; i < T->size(); ++i) {
      L.la[d][i] = X.eval_log(E.A(), T->theta(i));
      L.lb[d][i] = X.eval_log(E.B(), T->theta(i));
    }
  }
  return L;
}

FrobTable frob_table(const Curve& E, int K, bool full) {
  const Field& F = E.field();
  FrobTable ft;
  ft.q = F.q();
  ft.K = K;
  ft.t.resize(K + 1);
  ft.bad.resize(K + 1);
  ft.tsum.assign(K + 1, 0);
  for (int d = 1; d <= K; ++d) {
    auto T = prime_table(E.field_ptr(), d);
    const ExtField& X = T->ext();
    X.ensure_trace_tables();
    const u32 l4 = X.base_log(F.from_int(4)), l27 = X.base_log(F.from_int(27));
    const bool keep = full || 2 * d <= K;
    if (keep) {
      ft.t[d].resize(T->size());
      ft.bad[d].resize(T->size());
    }
    i64 s = 0;
    for (size_t i = 0; i < T->size(); ++i) {
      const u32 th = T->theta(i);
      const u32 la = X.eval_log(E.A(), th), lb = X.eval_log(E.B(), th);
      const int t = X.trace(la, lb);
      s += t;
      if (keep) {
        const u32 ld = X.add(X.mul(l4, X.powl(la, 3)), X.mul(l27, X.powl(lb, 2)));
        ft.t[d][i] = (int16_t)t;
        ft.bad[d][i] = ld == X.zero();
      }
    }
    ft.tsum[d] = s;
  }
  set_infinity(ft, E);
  return ft;
}

void set_infinity(FrobTable& ft, const Curve& E) {
  const auto& I = E.profile().inf;
  auto X1 = ext_field(E.field_ptr(), 1);
  X1->ensure_trace_tables();
  ft.t_inf = X1->trace(X1->base_log(I.a0), X1->base_log(I.b0));
  ft.bad_inf = I.type != RedType::Good;
}

i128 A_power(int t, bool bad, i128 Q, int k) {
  if (bad) {
    i128 r = 1;
    for (int i = 0; i < k; ++i) r *= t;
    return r;
  }
  if (k == 0) return 2;
  i128 a0 = 2, a1 = t;
  for (int i = 2; i <= k; ++i) {
    i128 a2 = (i128)t * a1 - Q * a0;
    a0 = a1;
    a1 = a2;
  }
  return a1;
}

namespace {
constexpr i128 kGuard = (i128)1 << 100;

void apply_factor(std::vector<i128>& c, int d, int t, bool bad, i128 Q) {
  const int K = (int)c.size() - 1;
  for (int n = d; n <= K; ++n) {
    i128 v = c[n] + (i128)t * c[n - d];
    if (!bad && n >= 2 * d) v -= Q * c[n - 2 * d];
    require(v < kGuard && v > -kGuard, Err::TooLarge, "Euler product overflow");
    c[n] = v;
  }
}
}  // namespace

std::vector<i128> euler_coeffs(const FrobTable& ft) {
  const int K = ft.K;
  std::vector<i128> c(K + 1, 0);
  c[0] = 1;
  i128 Q = 1;
  for (int d = 1; d <= K; ++d) {
    Q *= ft.q;
    if (2 * d <= K) {
      require(ft.has_primes(d), Err::Internal, "missing per-prime traces");
      for (size_t i = 0; i < ft.t[d].size(); ++i) apply_factor(c, d, ft.t[d][i], ft.bad[d][i], Q);
    } else {
      for (int n = K; n >= d; --n) {
        c[n] += (i128)ft.tsum[d] * c[n - d];
        require(c[n] < kGuard && c[n] > -kGuard, Err::TooLarge, "Euler product overflow");
      }
    }
  }
  if (K >= 1) apply_factor(c, 1, ft.t_inf, ft.bad_inf, ft.q);
  return c;
}

int lean_degree(int n) { return std::max(1, (n + 1) / 2); }

namespace {
// q^(h e / 2), with h e even.
mpz_class wpow(u32 q, int h, int e) { return mpz_pow(q, (unsigned)(h * e / 2)); }
bool weight_ok(int h, int n) { return h % 2 == 0 || n % 2 == 0; }
}  // namespace

bool complete_weighted(const std::vector<mpz_class>& ck, int n, u32 q, int h, std::vector<mpz_class>& c,
                       int& eps, bool& verified) {
  require(n >= 0, Err::IsotrivialCurve, "conductor degree is negative");
  require(!ck.empty() && ck[0] == 1, Err::Internal, "c_0 != 1");
  const int K = (int)ck.size() - 1;
  require(weight_ok(h, n), Err::DegreeMismatch, "odd degree with half-integral weight");
  c.assign(n + 1, 0);
  for (int j = 0; j <= std::min(n, K); ++j) c[j] = ck[j];
  eps = 0;
  verified = false;
  if (K >= n) {
    for (int j = n + 1; j <= K; ++j)
      require(sgn(ck[j]) == 0, Err::DegreeMismatch, "nonzero coefficient beyond degree " + std::to_string(n));
    const mpz_class top = wpow(q, h, n);
    if (c[n] == top) eps = 1;
    if (c[n] == -top) eps = -1;
    require(eps != 0, Err::DegreeMismatch, "leading coefficient is not +-q^(hn/2)");
    for (int j = 0; 2 * j <= n; ++j)
      require(c[n - j] == eps * wpow(q, h, n - 2 * j) * c[j], Err::DegreeMismatch, "reflection fails");
    verified = true;
    return true;
  }
  if (2 * K < n) return false;
  // a nonzero middle coefficient forces eps = +1
  for (int j = n - K; 2 * j <= n; ++j) {
    if (sgn(ck[j]) == 0) continue;
    const mpz_class r = wpow(q, h, n - 2 * j) * c[j];
    if (c[n - j] == r)
      eps = 1;
    else if (c[n - j] == -r)
      eps = -1;
    else
      fail(Err::DegreeMismatch, "reflection fails");
    break;
  }
  if (eps == 0) return false;
  for (int j = n - K; 2 * j <= n; ++j)
    require(c[n - j] == eps * wpow(q, h, n - 2 * j) * c[j], Err::DegreeMismatch, "reflection fails");
  for (int j = K + 1; j <= n; ++j) c[j] = eps * wpow(q, h, 2 * j - n) * c[n - j];
  return true;
}

bool complete_lpoly(const std::vector<i128>& ck, int n, u32 q, int K, LPolynomial& out) {
  out = LPolynomial{};
  out.q = q;
  out.n = n;
  out.K = K;
  std::vector<mpz_class> z(K + 1);
  for (int j = 0; j <= K; ++j) z[j] = to_mpz(ck[j]);
  return complete_weighted(z, n, q, 2, out.c, out.eps, out.verified);
}

int detect_degree_weighted(const std::vector<mpz_class>& ck, u32 q, int h, int lo, int hi) {
  const int K = (int)ck.size() - 1;
  int found = -1, count = 0;
  for (int n = std::max(lo, 0); n <= hi && n <= 2 * K; ++n) {
    if (!weight_ok(h, n)) continue;
    bool ok = true;
    for (int j = n + 1; j <= K && ok; ++j) ok = sgn(ck[j]) == 0;
    if (!ok) continue;
    // the middle pair j = n/2 says nothing unless eps = -1
    int eps = 0;
    bool consistent = true;
    for (int j = std::max(0, n - K); 2 * j < n && consistent; ++j) {
      const mpz_class r = wpow(q, h, n - 2 * j) * ck[j];
      const mpz_class& s = ck[n - j];
      if (sgn(ck[j]) == 0) {
        consistent = sgn(s) == 0;
        continue;
      }
      int e = s == r ? 1 : (s == -r ? -1 : 0);
      if (e == 0 || (eps != 0 && e != eps)) consistent = false;
      eps = e;
    }
    if (consistent && eps == -1 && n % 2 == 0 && n / 2 <= K && sgn(ck[n / 2]) != 0) consistent = false;
    if (consistent && eps != 0) {
      found = n;
      ++count;
    }
  }
  return count == 1 ? found : -1;
}

int detect_degree(const std::vector<i128>& ck, u32 q, int lo, int hi) {
  std::vector<mpz_class> z(ck.size());
  for (size_t j = 0; j < ck.size(); ++j) z[j] = to_mpz(ck[j]);
  return detect_degree_weighted(z, q, 2, lo, hi);
}

LPolynomial l_polynomial_from(u32 q, int n, const std::function<FrobTable(int)>& table, const LPolyOptions& opt) {
  require(n >= 0, Err::IsotrivialCurve, "conductor degree is negative");
  int K = std::min(n + opt.margin, opt.max_prime_degree);
  if (opt.lean) K = std::min(K, lean_degree(n));
  K = std::max(K, std::min(lean_degree(n), opt.max_prime_degree));
  if (n == 0) K = std::max(K, std::min(opt.margin, opt.max_prime_degree));
  require(2 * K >= n, Err::TooLarge, "prime degree cap too small for conductor degree " + std::to_string(n));
  for (;;) {
    std::vector<i128> ck = euler_coeffs(table(K));
    LPolynomial L;
    if (n == 0) {
      for (int j = 1; j <= K; ++j) require(ck[j] == 0, Err::DegreeMismatch, "nonconstant L for n = 0");
      L.q = q;
      L.n = 0;
      L.c = {mpz_class(1)};
      L.K = K;
      L.verified = true;
      return L;
    }
    if (complete_lpoly(ck, n, q, K, L)) return L;
    require(K < opt.max_prime_degree, Err::DegreeDetectionFailed, "cannot fix the sign of the functional equation");
    ++K;
  }
}

LPolynomial l_polynomial(const Curve& E, const LPolyOptions& opt) {
  return l_polynomial_from(E.field().q(), E.n_frak(), [&](int K) { return frob_table(E, K); }, opt);
}

std::vector<mpz_class> power_sums_from_coeffs(const std::vector<mpz_class>& c, int n_max) {
  std::vector<mpz_class> s(n_max + 1);
  const int n = (int)c.size() - 1;
  for (int k = 1; k <= n_max; ++k) {
    mpz_class v = 0;
    if (k <= n) v = -k * c[k];
    for (int i = 1; i < k; ++i)
      if (k - i <= n) v -= s[i] * c[k - i];
    s[k] = v;
  }
  return s;
}

std::vector<mpz_class> frobenius_power_sums(const LPolynomial& L, int n_max) {
  require(n_max >= 1, Err::InvalidArgument, "n_max must be >= 1");
  return power_sums_from_coeffs(L.c, n_max);
}

mpz_class trace_via_primes(const FrobTable& ft, int n) {
  require(n >= 1 && n <= ft.K, Err::InvalidArgument, "n outside the tabulated prime degrees");
  mpz_class sigma = 0;
  for (int d = 1; d <= n; ++d) {
    if (n % d) continue;
    const int k = n / d;
    const i128 Q = (i128)ipow(ft.q, (unsigned)d);
    i128 s = 0;
    if (k == 1) {
      s = ft.tsum[d];
    } else {
      require(ft.has_primes(d), Err::Internal, "missing per-prime traces");
      for (size_t i = 0; i < ft.t[d].size(); ++i) s += A_power(ft.t[d][i], ft.bad[d][i], Q, k);
    }
    if (d == 1) s += A_power(ft.t_inf, ft.bad_inf, Q, k);
    sigma -= d * to_mpz(s);
  }
  return sigma;
}

mpz_class trace_via_primes(const Curve& E, int n) { return trace_via_primes(frob_table(E, n), n); }

}  // namespace ffec
