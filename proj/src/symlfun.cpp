#include "ffec/symlfun.hpp"

#include <cmath>
#include <numeric>

namespace ffec {

const char* policy_name(BadPolicy p) {
  switch (p) {
    case BadPolicy::Tame: return "Tame";
    case BadPolicy::TrivialFactor: return "TrivialFactor";
    case BadPolicy::UserSupplied: return "UserSupplied";
  }
  return "?";
}

BadPolicy parse_policy(const std::string& s) {
  if (s == "Tame" || s == "tame") return BadPolicy::Tame;
  if (s == "TrivialFactor" || s == "trivial") return BadPolicy::TrivialFactor;
  if (s == "UserSupplied" || s == "user") return BadPolicy::UserSupplied;
  fail(Err::ParseError, "unknown bad-prime policy '" + s + "'");
}

namespace {

mpz_class A_power_z(int t, bool bad, const mpz_class& Q, int k) {
  if (bad) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), mpz_class(t).get_mpz_t(), (unsigned long)k);
    return r;
  }
  if (k == 0) return 2;
  mpz_class a0 = 2, a1 = t;
  for (int i = 2; i <= k; ++i) {
    mpz_class a2 = t * a1 - Q * a0;
    a0 = std::move(a1);
    a1 = std::move(a2);
  }
  return a1;
}

mpz_class zpow(const mpz_class& b, int e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), (unsigned long)e);
  return r;
}

void fill_tame(PlaceData& pd, int vA, int vB, int vD, bool A_zero, bool B_zero) {
  pd.pot_mult = !A_zero && 3 * vA < vD;
  pd.e = pd.pot_mult ? 2 : 12 / std::gcd(12, vD);
  pd.split = (pd.Q - 1) % (u64)pd.e == 0;
  (void)vB;
  (void)B_zero;
}

}  // namespace

PlaceData place_data(const Curve& E, const Poly& P) {
  const Field& F = E.field();
  PlaceData pd;
  pd.d = deg(P);
  pd.Q = ipow(F.q(), (unsigned)pd.d);
  pd.key = format_poly(P);
  auto T = prime_table(E.field_ptr(), pd.d);
  const size_t idx = T->find(P);
  require(idx < T->size(), Err::InvalidArgument, format_poly(P) + " is not a monic irreducible");
  const ExtField& X = T->ext();
  X.ensure_trace_tables();
  const u32 th = T->theta(idx);
  pd.t = X.trace(X.eval_log(E.A(), th), X.eval_log(E.B(), th));
  const BadPrime* bp = nullptr;
  for (const auto& b : E.profile().bad)
    if (b.P == P) bp = &b;
  if (!bp) return pd;
  pd.type = bp->type;
  if (pd.type != RedType::Additive) return pd;
  fill_tame(pd, bp->vA, bp->vB, bp->vD, E.A().empty(), E.B().empty());
  if (pd.pot_mult) return pd;
  auto unit_log = [&](const Poly& G, int v, bool use) {
    if (!use || G.empty()) return X.zero();
    Poly u = G;
    for (int i = 0; i < v; ++i) u = div_exact(F, u, P);
    return X.eval_log(u, th);
  };
  const u32 la = unit_log(E.A(), bp->vA, !E.A().empty() && 3 * bp->vA == bp->vD);
  const u32 lb = unit_log(E.B(), bp->vB, !E.B().empty() && 2 * bp->vB == bp->vD);
  pd.t_good = X.trace(la, lb);
  return pd;
}

PlaceData infinity_place(const Curve& E) {
  const Field& F = E.field();
  const auto& I = E.profile().inf;
  PlaceData pd;
  pd.d = 1;
  pd.Q = F.q();
  pd.key = "inf";
  auto X = ext_field(E.field_ptr(), 1);
  X->ensure_trace_tables();
  pd.t = X->trace(X->base_log(I.a0), X->base_log(I.b0));
  pd.type = I.type;
  if (pd.type != RedType::Additive) return pd;
  fill_tame(pd, I.vA, I.vB, I.vD, E.A().empty(), E.B().empty());
  if (pd.pot_mult) return pd;
  const u32 la = !E.A().empty() && 3 * I.vA == I.vD ? X->base_log(I.ua) : X->zero();
  const u32 lb = !E.B().empty() && 2 * I.vB == I.vD ? X->base_log(I.ub) : X->zero();
  pd.t_good = X->trace(la, lb);
  return pd;
}

std::vector<PlaceData> bad_places(const Curve& E) {
  std::vector<PlaceData> out;
  for (const auto& b : E.profile().bad) out.push_back(place_data(E, b.P));
  if (E.profile().inf.type != RedType::Good) out.push_back(infinity_place(E));
  return out;
}

mpz_class sym_power_sum(const PlaceData& pd, int m, int k, const SymPolicy& pol) {
  require(k >= 1 && m >= -1, Err::InvalidArgument, "need m >= -1, k >= 1");
  if (m == 0) return 1;
  if (m == -1) return 0;
  const mpz_class Q((unsigned long)pd.Q);
  if (pd.type == RedType::Good) {
    mpz_class s = m % 2 == 0 ? zpow(Q, k * m / 2) : mpz_class(0);
    for (int j = 0; j <= (m - 1) / 2; ++j) s += zpow(Q, k * j) * A_power_z(pd.t, false, Q, k * (m - 2 * j));
    return s;
  }
  if (pd.type == RedType::Multiplicative) return A_power_z(pd.t, true, Q, m * k);
  if (m == 1) return 0;
  switch (pol.kind) {
    case BadPolicy::TrivialFactor: return 0;
    case BadPolicy::UserSupplied: {
      auto it = pol.user.find(pd.key);
      require(it != pol.user.end(), Err::PolicyRequired, "no local factor supplied for " + pd.key);
      std::vector<mpz_class> f;
      for (i64 v : it->second) f.push_back(mpz_class((long)v));
      require(!f.empty() && f[0] == 1, Err::InvalidArgument, "local factor must start with 1");
      return power_sums_from_coeffs(f, k)[k];
    }
    case BadPolicy::Tame: break;
  }
  if (pd.pot_mult) return m % 2 == 0 ? 1 : 0;
  mpz_class s = 0;
  if (pd.split) {
    // eigenvalues a'^i b'^(m-i) on the inertia-fixed lines, e | 2i - m
    for (int i = 0; 2 * i <= m; ++i) {
      if ((2 * i - m) % pd.e != 0) continue;
      if (2 * i < m)
        s += zpow(Q, k * i) * A_power_z(pd.t_good, false, Q, k * (m - 2 * i));
      else
        s += zpow(Q, k * m / 2);
    }
    return s;
  }
  // Frobenius swaps the two inertia eigenlines; the good model is
  // supersingular, so Frobenius squared acts on V by -Q.
  const mpz_class mq = -Q;
  for (int i = 0; 2 * i <= m; ++i) {
    if ((2 * i - m) % pd.e != 0) continue;
    if (2 * i < m) {
      if (k % 2 == 0) s += 2 * zpow(zpow(mq, m), k / 2);
    } else {
      s += zpow(zpow(mq, m / 2), k);
    }
  }
  return s;
}

double LocalSymCoeff::value(u32 q) const { return num.get_d() / std::pow((double)q, 0.5 * twice_exp); }

LocalSymCoeff local_sym_coeff(const Curve& E, const Poly& P, int m, int k, const SymPolicy& pol) {
  require(m >= -1 && m <= 64 && k >= 1, Err::InvalidArgument, "need -1 <= m, k >= 1");
  PlaceData pd = place_data(E, P);
  LocalSymCoeff r;
  r.m = m;
  r.k = k;
  r.d = pd.d;
  r.twice_exp = std::max(m, 0) * k * pd.d;
  try {
    r.num = sym_power_sum(pd, m, k, pol);
  } catch (const Error& e) {
    if (e.code() == Err::PolicyRequired) fail(Err::BadPrimeUnsupported, e.what());
    throw;
  }
  return r;
}

bool power_reduce_check(const Curve& E, const Poly& P, int m, int d) {
  require(m >= 1 && d >= 1, Err::InvalidArgument, "need m, d >= 1");
  PlaceData pd = place_data(E, P);
  require(pd.type == RedType::Good, Err::BadPrime, format_poly(P) + " divides the discriminant");
  const mpz_class Qd = zpow(mpz_class((unsigned long)pd.Q), d);
  return sym_power_sum(pd, 1, m * d) == sym_power_sum(pd, m, d) - Qd * sym_power_sum(pd, m - 2, d);
}

std::vector<mpz_class> sym_prime_sums(const Curve& E, int m, int K, const SymPolicy& pol) {
  require(m >= 1, Err::InvalidArgument, "m must be positive");
  FrobTable ft = frob_table(E, K, true);
  const u32 q = E.field().q();
  // additive places by (degree, index)
  std::map<std::pair<int, size_t>, PlaceData> additive;
  for (const auto& b : E.profile().bad) {
    if (b.type != RedType::Additive || deg(b.P) > K) continue;
    additive[{deg(b.P), prime_table(E.field_ptr(), deg(b.P))->find(b.P)}] = place_data(E, b.P);
  }
  // acc[d][k] = sum over places of degree d of the k-th local power sum
  std::vector<std::vector<mpz_class>> acc(K + 1);
  for (int d = 1; d <= K; ++d) {
    const int kmax = K / d;
    acc[d].assign(kmax + 1, 0);
    const i128 Q = (i128)ipow(q, (unsigned)d);
    std::vector<i128> Qp(kmax * m + 1);
    Qp[0] = 1;
    for (size_t j = 1; j < Qp.size(); ++j) Qp[j] = Qp[j - 1] * Q;
    std::vector<i128> part(kmax + 1, 0);
    std::vector<i128> A(kmax * m + 1);
    const auto& tv = ft.t[d];
    const auto& bv = ft.bad[d];
    for (size_t i = 0; i < tv.size(); ++i) {
      const int t = tv[i];
      if (bv[i]) {
        if (t == 0) {
          auto it = additive.find({d, i});
          require(it != additive.end(), Err::Internal, "unclassified additive prime");
          for (int k = 1; k <= kmax; ++k) acc[d][k] += sym_power_sum(it->second, m, k, pol);
        } else {
          for (int k = 1; k <= kmax; ++k) part[k] += (m * k) % 2 == 0 ? 1 : t;
        }
        continue;
      }
      A[0] = 2;
      if (A.size() > 1) A[1] = t;
      for (size_t r = 2; r < A.size(); ++r) A[r] = (i128)t * A[r - 1] - Q * A[r - 2];
      for (int k = 1; k <= kmax; ++k) {
        i128 s = m % 2 == 0 ? Qp[k * m / 2] : 0;
        for (int j = 0; j <= (m - 1) / 2; ++j) s += Qp[k * j] * A[k * (m - 2 * j)];
        part[k] += s;
      }
    }
    for (int k = 1; k <= kmax; ++k) acc[d][k] += to_mpz(part[k]);
  }
  PlaceData inf = infinity_place(E);
  for (int k = 1; k <= K; ++k) acc[1][k] += sym_power_sum(inf, m, k, pol);
  std::vector<mpz_class> sigma(K + 1, 0);
  for (int n = 1; n <= K; ++n)
    for (int d = 1; d <= n; ++d)
      if (n % d == 0) sigma[n] -= d * acc[d][n / d];
  return sigma;
}

namespace {
std::vector<mpz_class> coeffs_from_sums(const std::vector<mpz_class>& sigma) {
  const int K = (int)sigma.size() - 1;
  std::vector<mpz_class> c(K + 1, 0);
  c[0] = 1;
  for (int k = 1; k <= K; ++k) {
    mpz_class s = 0;
    for (int i = 1; i <= k; ++i) s -= sigma[i] * c[k - i];
    require(mpz_divisible_ui_p(s.get_mpz_t(), (unsigned long)k), Err::Internal, "non-integral Euler coefficient");
    c[k] = s / k;
  }
  return c;
}
}  // namespace

SymLPolynomial sym_l_polynomial(const Curve& E, int m, const SymPolicy& pol, int max_prime_degree) {
  require(m >= 1, Err::InvalidArgument, "m must be positive");
  require(m <= 4, Err::UnsupportedPower, "sym^m supported for m <= 4");
  require(E.n_frak() >= 0, Err::IsotrivialCurve, "conductor degree is negative");
  SymLPolynomial L;
  L.q = E.field().q();
  L.m = m;
  L.K = max_prime_degree;
  L.policy = pol.kind;
  L.prime_sums = sym_prime_sums(E, m, L.K, pol);
  std::vector<mpz_class> ck = coeffs_from_sums(L.prime_sums);
  const int n = detect_degree_weighted(ck, L.q, m + 1, 0, 2 * L.K);
  require(n >= 0, Err::DegreeDetectionFailed,
          "no unique degree for sym^" + std::to_string(m) + " from primes of degree <= " + std::to_string(L.K));
  require(complete_weighted(ck, n, L.q, m + 1, L.c, L.eps, L.verified), Err::DegreeDetectionFailed,
          "sign of the functional equation undetermined");
  L.n = n;
  L.roots = analyze_roots(L.c, L.q, m + 1, false);
  return L;
}

std::vector<mpz_class> sym_traces(const SymLPolynomial& L, int n_max) {
  require(n_max >= 1, Err::InvalidArgument, "n_max must be >= 1");
  auto s = power_sums_from_coeffs(L.c, n_max);
  for (int n = 1; n <= std::min(n_max, (int)L.prime_sums.size() - 1); ++n)
    require(s[n] == L.prime_sums[n], Err::MethodDisagreement,
            "sym trace " + std::to_string(n) + ": " + s[n].get_str() + " vs " + L.prime_sums[n].get_str());
  return s;
}

double sym_trace_float(const SymLPolynomial& L, const mpz_class& sigma, int n) {
  mpq_class r(sigma, 1);
  if ((n * (L.m + 1)) % 2 == 0) {
    r /= mpz_pow(L.q, (unsigned)(n * (L.m + 1) / 2));
    return r.get_d();
  }
  r /= mpz_pow(L.q, (unsigned)(n * (L.m + 1) / 2));
  return r.get_d() / std::sqrt((double)L.q);
}

double log_derivative_at(const std::vector<mpz_class>& c, u32 q, int m, int twice_exp) {
  const int tv = twice_exp - m;  // v0 = q^(tv/2)
  if (tv % 2 == 0) {
    const int e = tv / 2;
    mpq_class v0 = e >= 0 ? mpq_class(mpz_pow(q, (unsigned)e)) : mpq_class(1, mpz_pow(q, (unsigned)(-e)));
    mpq_class val = 0, der = 0, vp = 1;
    for (size_t j = 0; j < c.size(); ++j) {
      val += c[j] * vp;
      if (j + 1 < c.size()) der += (long)(j + 1) * c[j + 1] * vp;
      vp *= v0;
    }
    require(sgn(val) != 0, Err::EvaluationAtRoot, "L vanishes at the evaluation point");
    mpq_class r = der / val;
    double out = r.get_d();
    return out * std::pow((double)q, -0.5 * m);
  }
  const long double v0 = std::pow((long double)q, 0.5L * tv);
  long double val = 0, der = 0, vp = 1, mag = 0;
  for (size_t j = 0; j < c.size(); ++j) {
    const long double cj = c[j].get_d();
    val += cj * vp;
    mag += std::fabs(cj * vp);
    if (j + 1 < c.size()) der += (long double)(j + 1) * c[j + 1].get_d() * vp;
    vp *= v0;
  }
  require(std::fabs(val) > 1e-15L * mag, Err::EvaluationAtRoot, "L vanishes at the evaluation point");
  return (double)(der / val * std::pow((long double)q, -0.5L * m));
}

mpz_class nice_trace_identity(const Curve& E, int n, const SymPolicy& pol) {
  require(n >= 2 && n % 2 == 0, Err::InvalidArgument, "n must be even");
  const u32 q = E.field().q();
  const int N = n / 2;
  FrobTable ft = frob_table(E, N, true);
  std::vector<PlaceData> bad = bad_places(E);
  mpz_class S1 = 0, Sbad = 0;
  const mpz_class qn2 = mpz_pow(q, (unsigned)N);
  for (int d = 2; d <= n; d += 2) {
    if (n % d) continue;
    const int g = n / d;  // prime degree
    const u64 Q = ipow(q, (unsigned)g);
    i128 s = 0;
    for (size_t i = 0; i < ft.t[g].size(); ++i) s += A_power(ft.t[g][i], ft.bad[g][i], (i128)Q, d);
    if (g == 1) s += A_power(ft.t_inf, ft.bad_inf, (i128)Q, d);
    S1 += (n / d) * to_mpz(s);
    for (const auto& pd : bad) {
      if (pd.d != g) continue;
      Sbad += (n / d) * (sym_power_sum(pd, 1, d, pol) - sym_power_sum(pd, 2, d / 2, pol) + qn2);
    }
  }
  SymLPolynomial L2 = sym_l_polynomial(E, 2, pol, std::max(8, N));
  mpz_class sigma2 = power_sums_from_coeffs(L2.c, N)[N];
  return S1 + qn2 * qn2 + qn2 + sigma2 - Sbad;
}

}  // namespace ffec
