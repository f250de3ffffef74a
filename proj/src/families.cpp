#include "ffec/families.hpp"

#include <algorithm>
#include <cmath>

#include "ffec/chars.hpp"

namespace ffec {

const char* sign_name(SignPart s) {
  switch (s) {
    case SignPart::All: return "all";
    case SignPart::Plus: return "plus";
    case SignPart::Minus: return "minus";
  }
  return "?";
}

SignPart parse_sign(const std::string& s) {
  if (s == "all") return SignPart::All;
  if (s == "plus" || s == "+") return SignPart::Plus;
  if (s == "minus" || s == "-") return SignPart::Minus;
  fail(Err::ParseError, "unknown sign part '" + s + "'");
}

const char* variant_name(CubicVariant v) { return v == CubicVariant::F ? "F" : "K"; }

CubicVariant parse_variant(const std::string& s) {
  if (s == "F" || s == "f") return CubicVariant::F;
  if (s == "K" || s == "k") return CubicVariant::K;
  fail(Err::ParseError, "unknown cubic variant '" + s + "'");
}

namespace {

std::vector<Poly> prime_support(const Field& F, const Poly& a, const Poly& b) {
  std::vector<Poly> out;
  for (const Poly* x : {&a, &b})
    if (deg(*x) >= 1)
      for (auto& pe : factorize(F, *x).factors) out.push_back(pe.first);
  std::sort(out.begin(), out.end(), PolyLess{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool avoids(const Factorization& fac, const std::vector<Poly>& bad) {
  for (const auto& pe : fac.factors)
    if (std::binary_search(bad.begin(), bad.end(), pe.first, PolyLess{})) return false;
  return true;
}

bool squarefree_fac(const Factorization& fac) {
  for (const auto& pe : fac.factors)
    if (pe.second > 1) return false;
  return true;
}

// All monic square-free polynomials of degree n avoiding the given primes.
std::vector<std::pair<Poly, Factorization>> squarefree_of_degree(const Field& F, int n, const std::vector<Poly>& bad) {
  std::vector<std::pair<Poly, Factorization>> out;
  const u64 cnt = ipow(F.q(), (unsigned)n);
  for (u64 i = 0; i < cnt; ++i) {
    Poly D = monic_at(F, n, i);
    if (n == 0) {
      out.push_back({D, Factorization{}});
      continue;
    }
    Factorization fac = factorize(F, D);
    if (squarefree_fac(fac) && avoids(fac, bad)) out.push_back({std::move(D), std::move(fac)});
  }
  return out;
}

}  // namespace

std::vector<QuadMember> enum_quad(const QuadFamilySpec& s, u64 begin, u64 end) {
  require(s.N >= 1, Err::InvalidArgument, "N must be >= 1");
  const Field& F = s.E.field();
  const Poly& M = s.E.profile().M;
  require(s.sign == SignPart::All || deg(M) >= 1, Err::SignSplitUndefined,
          "no multiplicative primes: the sign split is undefined");
  const std::vector<Poly> bad = prime_support(F, s.E.Delta(), s.extra);
  std::vector<Poly> mprimes;
  if (deg(M) >= 1)
    for (auto& pe : factorize(F, M).factors) mprimes.push_back(pe.first);
  std::vector<QuadMember> out;
  end = std::min(end, ipow(F.q(), (unsigned)s.N));
  for (u64 i = begin; i < end; ++i) {
    QuadMember m;
    m.D = monic_at(F, s.N, i);
    m.fac = factorize(F, m.D);
    if (!squarefree_fac(m.fac) || !avoids(m.fac, bad)) continue;
    m.chi = 0;
    if (!mprimes.empty()) {
      m.chi = 1;
      for (const Poly& P : mprimes) m.chi *= quad_symbol(F, m.D, P);
    }
    if (s.sign == SignPart::Plus && m.chi != 1) continue;
    if (s.sign == SignPart::Minus && m.chi != -1) continue;
    out.push_back(std::move(m));
  }
  return out;
}

u64 quad_count(const QuadFamilySpec& s) { return enum_quad(s).size(); }

std::vector<CubicMember> enum_cubic(const CubicFamilySpec& s) {
  require(s.N >= 1, Err::InvalidArgument, "N must be >= 1");
  require(s.Et.is_mordell(), Err::NotMordellCurve, "cubic family needs A = 0");
  const Field& F = s.Et.field();
  const std::vector<Poly> bad = prime_support(F, s.Et.B(), s.extra);
  // (deg rad D, deg D mod 3) classes
  std::vector<std::pair<int, int>> classes;
  if (s.variant == CubicVariant::F) {
    classes.push_back({s.N, 0});
  } else {
    const int b = deg(s.Et.B());
    const int R = b % 3 == 0 ? s.N : s.N + 1;
    classes.push_back({R, b % 3});
    classes.push_back({R - 1, (b + 1) % 3});
    classes.push_back({R - 1, (b + 2) % 3});
  }
  int Rmax = 0;
  for (auto& c : classes) Rmax = std::max(Rmax, c.first);
  std::vector<std::vector<std::pair<Poly, Factorization>>> sf(Rmax + 1);
  for (int n = 0; n <= Rmax; ++n) sf[n] = squarefree_of_degree(F, n, bad);
  std::vector<CubicMember> out;
  for (auto [R, k] : classes) {
    if (R < 0) continue;
    for (int a = 0; a <= R; ++a) {
      if (((2 * R - a) % 3 + 3) % 3 != k) continue;
      for (const auto& [D1, f1] : sf[a])
        for (const auto& [D2, f2] : sf[R - a]) {
          if (deg(gcd(F, D1, D2)) > 0) continue;
          CubicMember m;
          m.D1 = D1;
          m.D2 = D2;
          m.D = mul(F, D1, mul(F, D2, D2));
          m.fac.unit = 1;
          for (const auto& pe : f1.factors) m.fac.factors.push_back({pe.first, 1});
          for (const auto& pe : f2.factors) m.fac.factors.push_back({pe.first, 2});
          std::sort(m.fac.factors.begin(), m.fac.factors.end(),
                    [](const auto& x, const auto& y) { return cmp_poly(x.first, y.first) < 0; });
          out.push_back(std::move(m));
        }
    }
  }
  std::sort(out.begin(), out.end(), [](const CubicMember& x, const CubicMember& y) {
    const int c = cmp_poly(x.D1, y.D1);
    return c != 0 ? c < 0 : cmp_poly(x.D2, y.D2) < 0;
  });
  return out;
}

u64 cubic_count(const CubicFamilySpec& s) { return enum_cubic(s).size(); }

namespace {

mpz_class necklace_mpz(u32 q, int n) {
  mpz_class s = 0;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) s += mobius_int(d) * mpz_pow(q, (unsigned)(n / d));
  return s / n;
}

// prod over primes Q not in `bad` of (1 + w(deg Q) u^deg Q), truncated at u^N.
std::vector<mpz_class> euler_series(const Field& F, const std::vector<Poly>& bad, int N,
                                    const std::function<int(int)>& w) {
  std::vector<mpz_class> c(N + 1, 0);
  c[0] = 1;
  for (int d = 1; d <= N; ++d) {
    mpz_class cnt = necklace_mpz(F.q(), d);
    for (const Poly& P : bad)
      if (deg(P) == d) cnt -= 1;
    const int wd = w(d);
    // multiply by (1 + wd x)^cnt, x = u^d
    std::vector<mpz_class> f(N / d + 1);
    mpz_class sp = 1;
    for (int k = 0; k <= N / d; ++k) {
      mpz_bin_ui(f[k].get_mpz_t(), cnt.get_mpz_t(), (unsigned long)k);
      f[k] *= sp;
      sp *= wd;
    }
    std::vector<mpz_class> r(N + 1, 0);
    for (int i = 0; i <= N; ++i) {
      if (sgn(c[i]) == 0) continue;
      for (int k = 0; i + k * d <= N; ++k) r[i + k * d] += c[i] * f[k];
    }
    c.swap(r);
  }
  return c;
}

}  // namespace

std::vector<mpz_class> quad_series(const Field& F, const Poly& Delta, int N_max) {
  return euler_series(F, prime_support(F, Delta, Poly{1}), N_max, [](int) { return 1; });
}

SeriesTable series_coefficients(const Field& F, const Poly& B, int N_max) {
  require(N_max >= 0 && N_max <= 24, Err::InvalidArgument, "N_max must be in [0, 24]");
  SeriesTable S;
  S.q = F.q();
  S.N_max = N_max;
  const auto bad = prime_support(F, B, Poly{1});
  S.H0 = euler_series(F, bad, N_max, [](int) { return 2; });
  S.H1 = euler_series(F, bad, N_max, [](int d) { return d % 3 == 0 ? 2 : -1; });
  S.G.resize(N_max + 1);
  for (int d = 0; d <= N_max; ++d) {
    mpz_class t = S.H0[d] + 2 * S.H1[d];
    require(mpz_divisible_ui_p(t.get_mpz_t(), 3), Err::Internal, "series coefficient not divisible by 3");
    S.G[d] = t / 3;
  }
  S.fit_lo = std::max(1, N_max / 2);
  std::vector<double> xs, y0, y1;
  for (int d = S.fit_lo; d <= N_max; ++d) {
    mpq_class r0(S.H0[d], mpz_pow(F.q(), (unsigned)d)), r1(S.H1[d], mpz_pow(F.q(), (unsigned)d));
    xs.push_back(d);
    y0.push_back(r0.get_d());
    y1.push_back(r1.get_d());
  }
  const size_t n = xs.size();
  if (n >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
      sx += xs[i];
      sy += y0[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * y0[i];
    }
    S.L1 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    S.L0 = (sy - S.L1 * sx) / n;
  } else if (n == 1) {
    S.L0 = y0[0];
  }
  double cs[3] = {0, 0, 0};
  int cn[3] = {0, 0, 0};
  for (size_t i = 0; i < n; ++i) {
    S.L_resid = std::max(S.L_resid, std::abs(y0[i] - S.L1 * xs[i] - S.L0));
    const int r = (int)xs[i] % 3;
    cs[r] += y1[i];
    cn[r]++;
    S.C_single += y1[i];
  }
  if (n) S.C_single /= n;
  for (int r = 0; r < 3; ++r) S.C[r] = cn[r] ? cs[r] / cn[r] : 0.0;
  for (size_t i = 0; i < n; ++i) {
    S.C_resid = std::max(S.C_resid, std::abs(y1[i] - S.C[(int)xs[i] % 3]));
    S.C_single_resid = std::max(S.C_single_resid, std::abs(y1[i] - S.C_single));
  }
  return S;
}

SizeReport predicted_size(const QuadFamilySpec& s) {
  const Field& F = s.E.field();
  SizeReport r;
  r.formula = "q^(N-1)(q-1) prod |Q|/(|Q|+1)";
  double p = std::pow((double)F.q(), s.N - 1) * (F.q() - 1.0);
  for (const Poly& Q : prime_support(F, s.E.Delta(), s.extra)) {
    const double nq = std::pow((double)F.q(), deg(Q));
    p *= nq / (nq + 1);
  }
  if (s.sign != SignPart::All) {
    p /= 2;
    r.formula += " / 2";
  }
  r.predicted = p;
  r.exact = quad_count(s);
  r.abs_err = (double)r.exact - p;
  r.rel_err = p != 0 ? r.abs_err / p : 0;
  return r;
}

SizeReport predicted_size(const CubicFamilySpec& s) {
  const Field& F = s.Et.field();
  SizeReport r;
  r.exact = cubic_count(s);
  if (s.variant != CubicVariant::F) {
    r.formula = "none (K variant is counted only)";
    r.predicted = (double)r.exact;
    return r;
  }
  const int Nfit = std::min(24, std::max(12, 2 * s.N));
  Poly BB = s.extra.size() > 1 ? mul(F, s.Et.B(), s.extra) : s.Et.B();
  SeriesTable S = series_coefficients(F, BB, Nfit);
  r.formula = "(1/3)(L(N) + 2 C_(N mod 3)) q^N";
  r.predicted = (S.L1 * s.N + S.L0 + 2 * S.C[s.N % 3]) / 3 * std::pow((double)F.q(), s.N);
  r.abs_err = (double)r.exact - r.predicted;
  r.rel_err = r.predicted != 0 ? r.abs_err / r.predicted : 0;
  return r;
}

double cubic_ratio_prediction(u32 q, int m, int N) {
  double s = 1, x = -2.0 / std::pow((double)q, m), xa = 1;
  for (int a = 1; a <= N / m; ++a) {
    xa *= x;
    s += xa * (1.0 - (double)a * m / N);
  }
  return s;
}

RatioReport coprime_ratio(const QuadFamilySpec& s, const Poly& P) {
  const Field& F = s.E.field();
  require(is_irreducible(F, P) && lead(P) == 1, Err::InvalidArgument, "P must be a monic irreducible");
  const u64 den = quad_count(s);
  require(den > 0, Err::EmptyFamily, "family is empty");
  QuadFamilySpec t = s;
  t.extra = mul(F, s.extra, P);
  RatioReport r;
  r.empirical = mpq_class(mpz_class((unsigned long)quad_count(t)), mpz_class((unsigned long)den));
  r.empirical.canonicalize();
  const bool divides = mod(F, mul(F, s.E.Delta(), s.extra), P).empty();
  const double nq = std::pow((double)F.q(), deg(P));
  r.predicted = divides ? 1.0 : nq / (nq + 1);
  r.deviation = r.empirical.get_d() - r.predicted;
  return r;
}

RatioReport coprime_ratio(const CubicFamilySpec& s, const Poly& P) {
  const Field& F = s.Et.field();
  require(is_irreducible(F, P) && lead(P) == 1, Err::InvalidArgument, "P must be a monic irreducible");
  const u64 den = cubic_count(s);
  require(den > 0, Err::EmptyFamily, "family is empty");
  CubicFamilySpec t = s;
  t.extra = mul(F, s.extra, P);
  RatioReport r;
  r.empirical = mpq_class(mpz_class((unsigned long)cubic_count(t)), mpz_class((unsigned long)den));
  r.empirical.canonicalize();
  const bool divides = mod(F, mul(F, s.Et.B(), s.extra), P).empty();
  r.predicted = divides ? 1.0 : cubic_ratio_prediction(F.q(), deg(P), s.N);
  r.deviation = r.empirical.get_d() - r.predicted;
  return r;
}

std::complex<double> EisRational::value() const {
  const std::complex<double> w = unity_power(1);
  return (double(num.a) + double(num.b) * w) / double(den);
}

EisRational character_average_EP(const Field& F, const std::vector<CubicMember>& fam, const Poly& P) {
  require(!fam.empty(), Err::EmptyFamily, "family is empty");
  i64 n[3] = {0, 0, 0};
  for (const auto& m : fam) {
    const int j = cubic_symbol(F, m.D, P);
    if (j >= 0) n[j]++;
  }
  EisRational r;
  // n0 + n1 w + n2 w^2 with w^2 = -1 - w
  r.num = {n[0] - n[2], n[1] - n[2]};
  r.den = fam.size();
  return r;
}

EisRational character_average_EP(const CubicFamilySpec& s, const Poly& P) {
  require(s.variant == CubicVariant::F, Err::InvalidArgument, "E_P is defined on the F variant");
  return character_average_EP(s.Et.field(), enum_cubic(s), P);
}

TwistBase::TwistBase(const Curve& base, Kind kind, int K) : base_(base), kind_(kind), K_(K) {
  require(kind == Quadratic || base.is_mordell(), Err::NotMordellCurve, "cubic twists need A = 0");
  ft_ = frob_table(base, K, true);
  if (kind == Cubic) lb_ = curve_logs(base, K).lb;
}

std::shared_ptr<const TwistBase::SignBits> TwistBase::sign_bits(const Poly& Q) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(Q);
    if (it != cache_.end()) return it->second;
  }
  const Field& F = base_.field();
  const int e = deg(Q);
  auto TQ = prime_table(base_.field_ptr(), e);
  const size_t iq = TQ->find(Q);
  require(iq < TQ->size(), Err::Internal, "twist factor is not a tabulated prime");
  const ExtField& Y = TQ->ext();
  const u32 rho = TQ->theta(iq);
  auto sb = std::make_shared<SignBits>();
  sb->self = iq;
  sb->bits.resize(K_ + 1);
  for (int d = 1; d <= K_; ++d) {
    auto T = prime_table(base_.field_ptr(), d);
    // (Q/P) = (-1)^((q-1)/2 deg P deg Q) (P/Q)
    const bool flip = ((u64)(F.q() - 1) / 2 * d * e) % 2 == 1;
    auto& b = sb->bits[d];
    b.assign((T->size() + 63) / 64, 0);
    for (size_t i = 0; i < T->size(); ++i) {
      const uint16_t* c = T->coefs(i);
      u32 r = 0;  // log 1
      for (int j = d - 1; j >= 0; --j) r = Y.add(Y.mul(r, rho), Y.base_log(c[j]));
      const bool neg = (Y.chi(r) == -1) != flip;
      if (neg) b[i / 64] |= 1ull << (i % 64);
    }
  }
  std::lock_guard<std::mutex> lk(mu_);
  return cache_.emplace(Q, sb).first->second;
}

FrobTable TwistBase::member_table(const Curve& member, const Poly& D, const Factorization& fac, int K) const {
  if (K > K_) return frob_table(member, K);
  FrobTable ft;
  ft.q = base_.field().q();
  ft.K = K;
  ft.t.resize(K + 1);
  ft.bad.resize(K + 1);
  ft.tsum.assign(K + 1, 0);
  std::vector<std::shared_ptr<const SignBits>> sb;
  std::vector<int> sdeg;
  if (kind_ == Quadratic)
    for (const auto& pe : fac.factors) {
      sb.push_back(sign_bits(pe.first));
      sdeg.push_back(deg(pe.first));
    }
  for (int d = 1; d <= K; ++d) {
    auto T = prime_table(base_.field_ptr(), d);
    const ExtField& X = T->ext();
    if (kind_ == Cubic) X.ensure_trace_tables();
    const bool keep = 2 * d <= K;
    if (keep) {
      ft.t[d].resize(T->size());
      ft.bad[d].resize(T->size());
    }
    std::vector<size_t> self;  // primes of degree d dividing D
    std::vector<const uint64_t*> bits;
    for (size_t k = 0; k < sb.size(); ++k) {
      bits.push_back(sb[k]->bits[d].data());
      if (sdeg[k] == d) self.push_back(sb[k]->self);
    }
    const auto& t0 = ft_.t[d];
    const auto& bad0 = ft_.bad[d];
    i64 s = 0;
    for (size_t i = 0; i < T->size(); ++i) {
      int t;
      bool bad = bad0[i];
      if (kind_ == Quadratic) {
        if (std::find(self.begin(), self.end(), i) != self.end()) {
          t = 0;
          bad = true;
        } else {
          uint64_t x = 0;
          for (const uint64_t* b : bits) x ^= b[i / 64] >> (i % 64);
          t = (x & 1) ? -t0[i] : t0[i];
        }
      } else {
        const u32 lD = X.eval_log(D, T->theta(i));
        if (lD == X.zero()) {
          t = 0;
          bad = true;
        } else {
          t = X.trace(X.zero(), X.mul(lb_[d][i], X.mul(lD, lD)));
        }
      }
      s += t;
      if (keep) {
        ft.t[d][i] = (int16_t)t;
        ft.bad[d][i] = bad;
      }
    }
    ft.tsum[d] = s;
  }
  set_infinity(ft, member);
  return ft;
}

LPolynomial TwistBase::member_l_polynomial(const Curve& member, const Poly& D, const Factorization& fac,
                                           const LPolyOptions& opt) const {
  return l_polynomial_from(base_.field().q(), member.n_frak(),
                           [&](int K) { return member_table(member, D, fac, K); }, opt);
}

Curve quad_member_curve(const QuadFamilySpec& s, const QuadMember& m) {
  return quadratic_twist_member(s.E, m.D, m.fac);
}

Curve cubic_member_curve(const CubicFamilySpec& s, const CubicMember& m) {
  return cubic_twist_member(s.Et, m.D, m.fac);
}

}  // namespace ffec
