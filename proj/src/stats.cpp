#include "ffec/stats.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "ffec/chars.hpp"

namespace ffec {

namespace {
constexpr double kPi = 3.14159265358979323846;

// 2 Re(x) for x = a + b omega
i64 re2(const Eisenstein& x) { return 2 * x.a - x.b; }

Eisenstein eis_pow(Eisenstein x, int k) {
  Eisenstein r{1, 0};
  for (int i = 0; i < k; ++i) r = eis_mul(r, x);
  return r;
}

void infinity_of(const Curve& C, int& t, bool& bad) {
  FrobTable ft;
  ft.q = C.field().q();
  set_infinity(ft, C);
  t = ft.t_inf;
  bad = ft.bad_inf;
}

int max_n_frak(const std::vector<Curve>& cs) {
  int n = 0;
  for (const auto& c : cs) n = std::max(n, c.n_frak());
  return n;
}

int base_degree(const LPolyOptions& opt, int n) {
  return opt.lean ? std::min(opt.max_prime_degree, lean_degree(n) + 1) : std::min(std::max(n, 1), opt.max_prime_degree);
}
}  // namespace

void parallel_for(size_t count, int jobs, const std::function<void(size_t)>& fn) {
  const size_t nt = std::min<size_t>(std::max(1, jobs), count);
  if (nt <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex emu;
  std::vector<std::thread> th;
  for (size_t t = 0; t < nt; ++t)
    th.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(emu);
          if (!err) err = std::current_exception();
          next = count;
          return;
        }
      }
    });
  for (auto& t : th) t.join();
  if (err) std::rethrow_exception(err);
}

namespace {
// Legendre coefficients a_0, a_2, ... of the Gaussian on [-alpha, alpha],
// rescaled to [-1, 1], cut once they drop below 1e-18 of a_0.
const std::vector<double>& gauss_legendre_coeffs(double alpha, double sigma) {
  static std::mutex mu;
  static std::map<std::pair<double, double>, std::vector<double>> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find({alpha, sigma});
  if (it != cache.end()) return it->second;
  std::vector<double> a;
  const double c = alpha * alpha / (2 * sigma * sigma);
  for (unsigned n = 0; n <= 160; n += 2) {
    auto g = [&](double t) { return std::exp(-c * t * t) * std::legendre(n, t); };
    const double v = (2 * n + 1) / 2.0 * boost::math::quadrature::gauss<double, 100>::integrate(g, -1.0, 1.0);
    a.push_back(v);
    if (n >= 8 && std::fabs(v) < 1e-18 * std::fabs(a[0])) break;
  }
  return cache.emplace(std::make_pair(alpha, sigma), std::move(a)).first->second;
}

// j_0..j_nmax at x >= 0: upward recurrence when x exceeds the order,
// otherwise Miller's downward recurrence normalized by j_0.
void sph_bessel_all(int nmax, double x, std::vector<double>& j) {
  j.assign(nmax + 1, 0.0);
  if (x < 1e-8) {
    j[0] = 1;
    return;
  }
  const double j0 = std::sin(x) / x;
  if (x > nmax) {
    j[0] = j0;
    if (nmax >= 1) j[1] = j0 / x - std::cos(x) / x;
    for (int n = 1; n < nmax; ++n) j[n + 1] = (2 * n + 1) / x * j[n] - j[n - 1];
    return;
  }
  const int start = nmax + 20 + (int)std::sqrt(40.0 * (nmax + 1));
  double up = 0, cur = 1e-300;
  for (int n = start; n >= 1; --n) {
    const double dn = (2 * n + 1) / x * cur - up;
    up = cur;
    cur = dn;
    if (n - 1 <= nmax) j[n - 1] = cur;
    if (std::fabs(cur) > 1e250) {
      for (int k = n - 1; k <= nmax; ++k) j[k] *= 1e-250;
      cur *= 1e-250;
      up *= 1e-250;
    }
  }
  // j[0] now holds the unnormalized j_0; rescale (sin x / x may vanish, use j_1 then)
  const double j1 = j0 / x - std::cos(x) / x;
  const double scale = std::fabs(j0) > std::fabs(j1) ? j0 / j[0] : j1 / j[1];
  for (double& v : j) v *= scale;
}
}  // namespace

TestFunction TestFunction::fejer(double alpha) {
  require(alpha > 0, Err::InvalidArgument, "alpha must be positive");
  TestFunction f;
  f.alpha = alpha;
  return f;
}

TestFunction TestFunction::truncated_gaussian(double alpha, double sigma) {
  require(alpha > 0 && sigma > 0, Err::InvalidArgument, "alpha and sigma must be positive");
  TestFunction f;
  f.kind = TruncatedGaussian;
  f.alpha = alpha;
  f.sigma = sigma;
  return f;
}

double TestFunction::fhat(double x) const {
  const double ax = std::fabs(x);
  if (ax >= alpha) return 0.0;
  if (kind == Fejer) return 1.0 - ax / alpha;
  return std::exp(-x * x / (2 * sigma * sigma));
}

double TestFunction::f(double x) const {
  if (kind == Fejer) {
    const double y = kPi * alpha * x;
    if (std::fabs(y) < 1e-8) return alpha * (1 - y * y / 3);
    const double s = std::sin(y) / y;
    return alpha * s * s;
  }
  // exp(-alpha^2 t^2 / 2 sigma^2) = sum a_n P_n(t) on [-1, 1], and
  // int_{-1}^{1} P_n(t) e^{i w t} dt = 2 i^n j_n(w)
  const auto& a = gauss_legendre_coeffs(alpha, sigma);
  const double w = 2 * kPi * alpha * std::fabs(x);
  thread_local std::vector<double> jn;
  sph_bessel_all(2 * (int)a.size(), w, jn);
  double s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += (k % 2 ? -a[k] : a[k]) * jn[2 * k];
  return 2 * alpha * s;
}

std::string TestFunction::describe() const {
  char buf[96];
  if (kind == Fejer)
    std::snprintf(buf, sizeof buf, "fejer(%.17g)", alpha);
  else
    std::snprintf(buf, sizeof buf, "gauss(%.17g,%.17g)", alpha, sigma);
  return buf;
}

double rmt_baseline(int nn, const TestFunction& f) {
  require(nn >= 1, Err::InvalidArgument, "nn must be >= 1");
  double s = 0;
  for (int n = 1; 2.0 * n / nn < f.alpha; ++n) s += f.fhat(2.0 * n / nn);
  return f.fhat(0) + 2.0 / nn * s;
}

const char* method_name(TraceMethod m) {
  switch (m) {
    case TraceMethod::LPoly: return "lpoly";
    case TraceMethod::PrimeSum: return "primesum";
    case TraceMethod::Both: return "both";
  }
  return "?";
}

TraceMethod parse_method(const std::string& s) {
  if (s == "lpoly") return TraceMethod::LPoly;
  if (s == "primesum") return TraceMethod::PrimeSum;
  if (s == "both") return TraceMethod::Both;
  fail(Err::ParseError, "unknown trace method '" + s + "'");
}

// ---- families ----

QuadFamily::QuadFamily(const QuadFamilySpec& s, int jobs) : spec_(s), jobs_(std::max(1, jobs)) {
  members_ = enum_quad(s);
  require(!members_.empty(), Err::EmptyFamily, "quadratic family " + id() + " is empty");
  curves_.reserve(members_.size());
  for (const auto& m : members_) curves_.push_back(quad_member_curve(s, m));
}

std::string QuadFamily::id() const { return "H" + std::to_string(spec_.N) + "^" + sign_name(spec_.sign); }

std::shared_ptr<const TwistBase> QuadFamily::base(int K) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (!base_ || base_->K() < K) base_ = std::make_shared<const TwistBase>(spec_.E, TwistBase::Quadratic, K);
  return base_;
}

const std::vector<LPolynomial>& QuadFamily::l_polys(const LPolyOptions& opt) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const auto key = std::make_pair(opt.max_prime_degree, opt.lean);
  auto it = lp_.find(key);
  if (it != lp_.end()) return it->second;
  auto tb = base(base_degree(opt, max_n_frak(curves_)));
  std::vector<LPolynomial> out(members_.size());
  parallel_for(members_.size(), jobs_, [&](size_t i) {
    out[i] = tb->member_l_polynomial(curves_[i], members_[i].D, members_[i].fac, opt);
  });
  return lp_.emplace(key, std::move(out)).first->second;
}

const std::vector<Tally>& QuadFamily::tally(int d) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = tally_.find(d);
  if (it != tally_.end()) return it->second;
  auto T = prime_table(spec_.E.field_ptr(), d);
  const ExtField& X = T->ext();
  std::vector<Tally> out(T->size(), Tally{0, 0, 0});
  const size_t chunk = 512, nchunks = (T->size() + chunk - 1) / chunk;
  parallel_for(nchunks, jobs_, [&](size_t c) {
    for (size_t i = c * chunk; i < std::min(T->size(), (c + 1) * chunk); ++i) {
      const u32 th = T->theta(i);
      for (const auto& m : members_) {
        const u32 l = X.eval_log(m.D, th);
        if (l != X.zero()) out[i][X.chi(l) == 1 ? 0 : 1]++;
      }
    }
  });
  return tally_.emplace(d, std::move(out)).first->second;
}

CubicFamily::CubicFamily(const CubicFamilySpec& s, int jobs) : spec_(s), jobs_(std::max(1, jobs)) {
  require(s.Et.field().has_mu3(), Err::UnsupportedFeature, "cubic families need 3 | q - 1");
  members_ = enum_cubic(s);
  require(!members_.empty(), Err::EmptyFamily, "cubic family " + id() + " is empty");
  curves_.reserve(members_.size());
  for (const auto& m : members_) curves_.push_back(cubic_member_curve(s, m));
}

std::string CubicFamily::id() const { return std::string(variant_name(spec_.variant)) + std::to_string(spec_.N); }

std::shared_ptr<const TwistBase> CubicFamily::base(int K) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  if (!base_ || base_->K() < K) base_ = std::make_shared<const TwistBase>(spec_.Et, TwistBase::Cubic, K);
  return base_;
}

const std::vector<LPolynomial>& CubicFamily::l_polys(const LPolyOptions& opt) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  const auto key = std::make_pair(opt.max_prime_degree, opt.lean);
  auto it = lp_.find(key);
  if (it != lp_.end()) return it->second;
  auto tb = base(base_degree(opt, max_n_frak(curves_)));
  std::vector<LPolynomial> out(members_.size());
  parallel_for(members_.size(), jobs_, [&](size_t i) {
    out[i] = tb->member_l_polynomial(curves_[i], members_[i].D, members_[i].fac, opt);
  });
  return lp_.emplace(key, std::move(out)).first->second;
}

const std::vector<Tally>& CubicFamily::tally(int d) const {
  std::lock_guard<std::recursive_mutex> lk(mu_);
  auto it = tally_.find(d);
  if (it != tally_.end()) return it->second;
  auto T = prime_table(spec_.Et.field_ptr(), d);
  const ExtField& X = T->ext();
  std::vector<Tally> out(T->size(), Tally{0, 0, 0});
  const size_t chunk = 512, nchunks = (T->size() + chunk - 1) / chunk;
  parallel_for(nchunks, jobs_, [&](size_t c) {
    for (size_t i = c * chunk; i < std::min(T->size(), (c + 1) * chunk); ++i) {
      const u32 th = T->theta(i);
      for (const auto& m : members_) {
        const int j = X.cubic(X.eval_log(m.D, th));
        if (j >= 0) out[i][j]++;
      }
    }
  });
  return tally_.emplace(d, std::move(out)).first->second;
}

LambdaTable lambda_table(const Curve& Et, int d) {
  require(Et.is_mordell(), Err::NotMordellCurve, "lambda_P needs A = 0");
  require(Et.field().has_mu3(), Err::NoCubeRootsOfUnity, "3 does not divide q-1");
  auto T = prime_table(Et.field_ptr(), d);
  const ExtField& X = T->ext();
  X.ensure_mordell_table();
  LambdaTable r;
  r.lam.resize(T->size());
  r.divides_B.resize(T->size());
  for (size_t i = 0; i < T->size(); ++i) {
    const u32 lb = X.eval_log(Et.B(), T->theta(i));
    r.divides_B[i] = lb == X.zero();
    auto uv = X.mordell_sum(lb);
    r.lam[i] = {uv.first, uv.second};
  }
  return r;
}

// ---- trace averages ----

namespace {

void check_methods(TraceAverage& r, TraceMethod m) {
  if (m == TraceMethod::Both && r.lpoly != r.primesum)
    fail(Err::MethodDisagreement, r.family + " n=" + std::to_string(r.n) + ": lpoly " + r.lpoly.get_str() +
                                      " vs primesum " + r.primesum.get_str());
  r.value = m == TraceMethod::PrimeSum ? r.primesum : r.lpoly;
}

template <class Fam>
mpq_class lpoly_average(const Fam& fam, int n) {
  const auto& L = fam.l_polys();
  mpz_class s = 0;
  for (const auto& l : L) s += power_sums_from_coeffs(l.c, n)[n];
  mpq_class r(s, mpz_pow(L[0].q, (unsigned)n) * mpz_class((unsigned long)L.size()));
  r.canonicalize();
  return r;
}

template <class Fam>
mpz_class infinity_total(const Fam& fam, int n) {
  const u32 q = fam.curve(0).field().q();
  mpz_class s = 0;
  for (size_t i = 0; i < fam.size(); ++i) {
    int t;
    bool bad;
    infinity_of(fam.curve(i), t, bad);
    s += to_mpz(A_power(t, bad, (i128)q, n));
  }
  return s;
}

}  // namespace

TraceAverage average_trace(const QuadFamily& fam, int n, TraceMethod m, const QuadTheory* th) {
  require(n >= 1, Err::InvalidArgument, "n must be >= 1");
  TraceAverage r;
  r.family = fam.id();
  r.n = n;
  r.size = fam.size();
  r.method = m;
  const u32 q = fam.spec().E.field().q();
  if (m != TraceMethod::PrimeSum) r.lpoly = lpoly_average(fam, n);
  if (m != TraceMethod::LPoly) {
    // sum_D sigma_n(E_D) = -sum_{d | n} d sum_{deg P = d} A_{n/d}(P) sum_D (D/P)^(n/d) - infinity
    auto tb = fam.base(n);
    const FrobTable& ft = tb->table();
    mpz_class s = -infinity_total(fam, n);
    for (int d = 1; d <= n; ++d) {
      if (n % d) continue;
      const int k = n / d;
      const i128 Q = (i128)ipow(q, (unsigned)d);
      const auto& tl = fam.tally(d);
      i128 acc = 0;
      for (size_t i = 0; i < tl.size(); ++i) {
        const i128 c = k % 2 == 0 ? (i128)tl[i][0] + tl[i][1] : (i128)tl[i][0] - tl[i][1];
        if (c) acc += A_power(ft.t[d][i], ft.bad[d][i], Q, k) * c;
      }
      s -= d * to_mpz(acc);
    }
    r.primesum = mpq_class(s, mpz_pow(q, (unsigned)n) * mpz_class((unsigned long)fam.size()));
    r.primesum.canonicalize();
  }
  check_methods(r, m);
  if (th) {
    r.main_term = th->expected_trace(n).total;
  } else {
    QuadTheory t(fam.spec(), std::max(1, n / 2));
    r.main_term = t.expected_trace(n).total;
  }
  r.residual = r.value.get_d() - r.main_term;
  return r;
}

TraceAverage average_trace(const CubicFamily& fam, int n, TraceMethod m) {
  require(n >= 1, Err::InvalidArgument, "n must be >= 1");
  TraceAverage r;
  r.family = fam.id();
  r.n = n;
  r.size = fam.size();
  r.method = m;
  const Curve& Et = fam.spec().Et;
  const u32 q = Et.field().q();
  if (m != TraceMethod::LPoly) require(ipow(q, (unsigned)(n / 2 + 1)) < (1ull << 60), Err::TooLarge, "n too large");
  if (m != TraceMethod::PrimeSum) r.lpoly = lpoly_average(fam, n);
  if (m != TraceMethod::LPoly) {
    // alpha_P(Et_D) = -omega^(2j) Lambda_P with j = (D/P)_3, so the family
    // sum of A_k only needs the tallies of j per prime
    mpz_class s = -infinity_total(fam, n);
    for (int d = 1; d <= n; ++d) {
      if (n % d) continue;
      const int k = n / d;
      const auto lt = lambda_table(Et, d);
      const auto& tl = fam.tally(d);
      i128 acc = 0;
      for (size_t i = 0; i < tl.size(); ++i) {
        if (lt.divides_B[i]) continue;
        const Eisenstein lk = eis_pow(lt.lam[i], k);
        i128 a = 0;
        for (int j = 0; j < 3; ++j)
          if (tl[i][j]) a += (i128)tl[i][j] * re2(eis_rotate(lk, 2 * j * k));
        acc += k % 2 ? -a : a;
      }
      s -= d * to_mpz(acc);
    }
    r.primesum = mpq_class(s, mpz_pow(q, (unsigned)n) * mpz_class((unsigned long)fam.size()));
    r.primesum.canonicalize();
  }
  check_methods(r, m);
  r.main_term = cubic_secondary_terms(fam, n).main;
  r.residual = r.value.get_d() - r.main_term;
  return r;
}

// ---- quadratic main terms ----

QuadTheory::QuadTheory(const QuadFamilySpec& s, int K, const SymPolicy& pol) : spec_(s), pol_(pol) {
  require(K >= 1, Err::InvalidArgument, "K must be >= 1");
  const Curve& E = s.E;
  ft_ = frob_table(E, K, true);
  bad_ = bad_places(E);
  L2_ = sym_l_polynomial(E, 2, pol);
  sig2_ = power_sums_from_coeffs(L2_.c, std::max(1, K));
  // every member has the same data at infinity, since deg D = N is fixed
  const u64 total = ipow(E.field().q(), (unsigned)s.N);
  for (u64 b = 0; b < total; b += 64) {
    auto ms = enum_quad(s, b, b + 64);
    if (ms.empty()) continue;
    member_inf_.q = E.field().q();
    set_infinity(member_inf_, quad_member_curve(s, ms[0]));
    return;
  }
  fail(Err::EmptyFamily, "quadratic family is empty");
}

QuadMainTerm QuadTheory::expected_trace(int n) const {
  require(n >= 1, Err::InvalidArgument, "n must be >= 1");
  const u32 q = spec_.E.field().q();
  QuadMainTerm r;
  r.n = n;
  r.eta = eta2(n);
  const mpz_class qn = mpz_pow(q, (unsigned)n);
  r.inf = -mpq_class(to_mpz(A_power(member_inf_.t_inf, member_inf_.bad_inf, q, n)), qn).get_d();
  if (r.eta) {
    const int h = n / 2;
    require(h <= ft_.K, Err::InvalidArgument, "prime tables too short for n = " + std::to_string(n));
    r.sym2 = mpq_class(sig2_.at(h), qn).get_d();
    const mpz_class qh = mpz_pow(q, (unsigned)h);
    mpq_class G = 0, Bad = 0;
    for (int k = 2; k <= n; k += 2) {
      if (n % k) continue;
      const int g = n / k;
      const i128 Q = (i128)ipow(q, (unsigned)g);
      i128 s = 0;
      for (size_t i = 0; i < ft_.t[g].size(); ++i)
        if (!ft_.bad[g][i]) s += A_power(ft_.t[g][i], false, Q, k);
      G += mpq_class((n / k) * to_mpz(s), qh * to_mpz(Q + 1));
      for (const auto& pd : bad_) {
        if (pd.d != g) continue;
        Bad += mpq_class((n / k) * (sym_power_sum(pd, 1, k, pol_) - sym_power_sum(pd, 2, k / 2, pol_) + qh), qh);
      }
    }
    G.canonicalize();
    Bad.canonicalize();
    const mpq_class ainf(to_mpz(A_power(ft_.t_inf, ft_.bad_inf, q, n)), qh);
    r.good = G.get_d();
    r.bad = Bad.get_d();
    r.Dn = mpq_class(G - Bad + 1 + ainf).get_d();
  }
  const Poly& M = spec_.E.profile().M;
  if (spec_.sign != SignPart::All && deg(M) >= 1 && is_irreducible(spec_.E.field(), M)) {
    const int e = deg(M);
    if (n % e == 0 && (n / e) % 2 == 1) {
      const PlaceData pd = place_data(spec_.E, M);
      const int s = spec_.sign == SignPart::Plus ? 1 : -1;
      r.mp = -s * e * mpq_class(to_mpz(A_power(pd.t, true, (i128)pd.Q, n / e)), qn).get_d();
    }
  }
  r.total = r.eta * (1 + r.sym2 + r.Dn / std::pow((double)q, n / 2.0)) + r.mp + r.inf;
  return r;
}

QuadMainTerm quad_expected_trace(const QuadFamilySpec& s, int n, const SymPolicy& pol) {
  return QuadTheory(s, std::max(1, n / 2), pol).expected_trace(n);
}

// ---- cubic terms ----

CubicTerms cubic_secondary_terms(const CubicFamily& fam, int n) {
  require(n >= 1, Err::InvalidArgument, "n must be >= 1");
  const Curve& Et = fam.spec().Et;
  const u32 q = Et.field().q();
  const int N = fam.spec().N;
  const double F = (double)fam.size();
  const double qn2 = std::pow((double)q, n / 2.0), qn = std::pow((double)q, n);
  CubicTerms r;
  r.n = n;
  auto EP = [&](const Tally& t) {  // F * E_P as an Eisenstein integer
    return Eisenstein{(i64)t[0] - (i64)t[2], (i64)t[1] - (i64)t[2]};
  };
  auto ratio = [&](const Tally& t) { return ((double)t[0] + t[1] + t[2]) / F; };
  {
    const auto lt = lambda_table(Et, n);
    const auto& tl = fam.tally(n);
    double s = 0;
    for (size_t i = 0; i < tl.size(); ++i) s += (double)re2(eis_mul(lt.lam[i], eis_conj(EP(tl[i]))));
    r.E += n * s / (qn * F);
  }
  if (n % 2 == 0) {
    const int d = n / 2;
    const double Q = std::pow((double)q, d);
    const auto lt = lambda_table(Et, d);
    const auto& tl = fam.tally(d);
    const double w = cubic_ratio_prediction(q, d, N) - 1;
    double m = 0, m0 = 0, d1 = 0, e2 = 0;
    for (size_t i = 0; i < tl.size(); ++i) {
      const double x = 2 * ((double)lt.lam[i].norm() - Q) / Q;  // 2(|lambda|^2 - 1)
      m += x * ratio(tl[i]);
      m0 += x;
      if (!lt.divides_B[i]) d1 += x;
      e2 += (double)re2(eis_mul(eis_mul(lt.lam[i], lt.lam[i]), EP(tl[i])));
    }
    r.M = -(n / 2.0) * m / qn2;
    r.M0 = -(n / 2.0) * m0 / qn2;
    r.D1 = -(n / 2.0) * d1 * w;
    r.E -= (n / 2.0) * e2 / (qn * F);
  }
  if (n % 3 == 0) {
    const int d = n / 3;
    const double Q = std::pow((double)q, d);
    const auto lt = lambda_table(Et, d);
    const auto& tl = fam.tally(d);
    const double w = cubic_ratio_prediction(q, d, N) - 1;
    double s = 0, s0 = 0, d2 = 0, e3 = 0;
    for (size_t i = 0; i < tl.size(); ++i) {
      const double l3 = (double)re2(eis_pow(lt.lam[i], 3)) / qn2;  // lambda^3 + conj
      s += l3 * ratio(tl[i]);
      s0 += l3;
      if (!lt.divides_B[i]) d2 += l3;
      const double x = 3 * ((double)lt.lam[i].norm() - Q) / Q;
      e3 += x * (double)re2(eis_mul(lt.lam[i], eis_conj(EP(tl[i])))) / (std::sqrt(Q) * F);
    }
    r.S = (n / 3.0) * s / qn2;
    r.S0 = (n / 3.0) * s0 / qn2;
    r.D2 = (n / 3.0) * d2 * w;
    r.E += (n / 3.0) * e3 / qn2;
  }
  r.main = r.M0 + r.S0 + (r.D1 + r.D2) / qn2;
  r.mse = r.M + r.S + r.E;
  return r;
}

LambdaMoment lambda_moment(const Curve& Et, int m) {
  require(m >= 1, Err::InvalidArgument, "m must be >= 1");
  const u32 q = Et.field().q();
  const auto lt = lambda_table(Et, m);
  mpz_class s = 0;
  for (const auto& l : lt.lam) s += mpz_class((long)l.norm());
  LambdaMoment r;
  r.m = m;
  r.primes = lt.lam.size();
  r.value = mpq_class(m * s, mpz_pow(q, (unsigned)(2 * m)));
  r.value.canonicalize();
  r.deviation = r.value.get_d() - 0.5;
  return r;
}

MomentFit lambda_moment_fit(const Curve& Et, int m_max) {
  MomentFit f;
  const double q = Et.field().q();
  for (int m = 1; m <= m_max; ++m) {
    f.rows.push_back(lambda_moment(Et, m));
    f.C = std::max(f.C, std::fabs(f.rows.back().deviation) * std::pow(q, m / 3.0));
  }
  return f;
}

ConjectureRow conjecture_probe(const CubicFamily& fam, int n) {
  require(n >= 1, Err::InvalidArgument, "n must be >= 1");
  const Curve& Et = fam.spec().Et;
  const u32 q = Et.field().q();
  ConjectureRow r;
  r.n = n;
  r.N = fam.spec().N;
  r.lhs = lpoly_average(fam, n);
  r.rhs = eta2(n);
  if (n % 3 == 0) {
    const int k = n / 3;
    SymLPolynomial L3 = sym_l_polynomial(Et, 3);
    r.sym3 = mpq_class(power_sums_from_coeffs(L3.c, k)[k], mpz_pow(q, (unsigned)(2 * k))).get_d();
    LPolynomial L1 = l_polynomial(Et);
    r.tr1 = mpq_class(power_sums_from_coeffs(L1.c, k)[k], mpz_pow(q, (unsigned)k)).get_d();
    r.rhs += std::pow((double)q, -n / 3.0) * (r.sym3 + 0.5 * r.tr1);
  }
  r.gap = r.lhs.get_d() - r.rhs;
  r.scaled_gap = r.gap * std::pow((double)q, n / 2.0);
  return r;
}

// ---- one-level densities ----

namespace {

// sum_k f(nn (x - k)) for the Fejer kernel: direct terms |k| <= K, the mean
// of sin^2 beyond through trigamma, the oscillating rest by two steps of
// summation by parts.
double fejer_periodized(double x, int nn, double alpha, double& bound) {
  const double beta = alpha * nn;
  const double c = 1.0 / (2 * kPi * kPi * alpha * nn * nn);
  const std::complex<double> zp = std::polar(1.0, -2 * kPi * beta), zm = std::conj(zp);
  const double gap = std::abs(1.0 - zp);
  const int K = gap < 0.05 && gap > 1e-12 ? 20000 : 1000;
  TestFunction f = TestFunction::fejer(alpha);
  double s = f.f(nn * x);
  for (int k = 1; k <= K; ++k) s += f.f(nn * (x - k)) + f.f(nn * (x + k));
  const double gp1 = 1.0 / ((K + 1 - x) * (K + 1 - x)), gp2 = 1.0 / ((K + 2 - x) * (K + 2 - x));
  const double gm1 = 1.0 / ((K + 1 + x) * (K + 1 + x)), gm2 = 1.0 / ((K + 2 + x) * (K + 2 + x));
  const double mean = boost::math::trigamma(K + 1 - x) + boost::math::trigamma(K + 1 + x);
  std::complex<double> osc;
  if (gap <= 1e-12) {
    osc = mean;
    bound = 0;
  } else {
    auto abel = [&](std::complex<double> z, double g1, double g2) {
      const std::complex<double> a = std::polar(1.0, std::arg(z) * (K + 1));
      return (a * g1 + a * z * (g2 - g1) / (1.0 - z)) / (1.0 - z);
    };
    osc = abel(zp, gp1, gp2) + abel(zm, gm1, gm2);
    bound = c * 2 * 12.0 / (std::pow((double)K, 4) * gap * gap * gap);
  }
  const double tail = c * (mean - std::real(std::polar(1.0, 2 * kPi * beta * x) * osc));
  return s + tail;
}

// sum_k f(nn (x - k)) for the truncated Gaussian g.  The edge jump and
// slope are carried by the indicator of [-alpha, alpha] and by
// (alpha^2 - xi^2) / (2 alpha), whose periodizations are finite Fourier
// sums; the remainder has fhat vanishing to first order at the edges, so
// |rho(y)| <= 2 C / |2 pi y|^3 and it is summed directly.
double gauss_periodized(double x, int nn, const TestFunction& f, double& bound) {
  const double al = f.alpha, s2 = f.sigma * f.sigma;
  const double g = std::exp(-al * al / (2 * s2));
  const double g1 = -al / s2 * g, g2 = (al * al / s2 - 1) / s2 * g;
  const double c = -g1;
  auto h1 = [&](double y) {
    const double w = 2 * kPi * y, u = w * al;
    return std::fabs(u) < 1e-6 ? 2 * al * (1 - u * u / 6) : 2 * std::sin(u) / w;
  };
  auto h2 = [&](double y) {
    const double w = 2 * kPi * y, u = w * al;
    if (std::fabs(u) < 1e-2) return 2 * al * al * (1.0 / 3 - u * u / 30 + u * u * u * u / 840);
    return 2 * (std::sin(u) - u * std::cos(u)) / (al * w * w * w);
  };
  auto rho = [&](double y) { return f.f(y) - g * h1(y) - c * h2(y); };
  const int K = 400;
  double s = rho(nn * x);
  for (int k = 1; k <= K; ++k) s += rho(nn * (x - k)) + rho(nn * (x + k));
  // (1/nn) sum_m khat(m / nn) e^{2 pi i m x}, half weight on the edge
  double p1 = 0, p2 = 0;
  for (int m = 0; (double)m / nn <= al; ++m) {
    const double xi = (double)m / nn;
    const double wt = (m == 0 ? 1.0 : 2.0) * std::cos(2 * kPi * m * x) / nn;
    p1 += (std::fabs(xi - al) < 1e-12 ? 0.5 : 1.0) * wt;
    p2 += (al * al - xi * xi) / (2 * al) * wt;
  }
  // C = |rhohat''(alpha)| + int_0^alpha |g'''|
  double var = 0;
  const int M = 2000;
  for (int i = 0; i < M; ++i) {
    const double t = (i + 0.5) * al / M;
    var += std::fabs(t * (3 * s2 - t * t) / (s2 * s2 * s2) * std::exp(-t * t / (2 * s2))) * al / M;
  }
  const double C = std::fabs(g2 - g1 / al) + var;
  const double w0 = 2 * kPi * nn;
  // both sides of sum_{k > K} (k - 1/2)^-3 <= 1 / (2 (K - 1)^2)
  bound = 2 * (2 * C / (w0 * w0 * w0)) / (2.0 * (K - 1) * (K - 1));
  return s + g * p1 + c * p2;
}

double angle_symmetry(std::vector<double> a) {
  double worst = 0;
  std::vector<bool> used(a.size(), false);
  for (size_t i = 0; i < a.size(); ++i) {
    double best = 1e9;
    size_t bj = 0;
    for (size_t j = 0; j < a.size(); ++j) {
      if (used[j]) continue;
      const double d = std::fabs(std::remainder(a[i] + a[j], 2 * kPi));
      if (d < best) best = d, bj = j;
    }
    used[bj] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

OneLevelMember one_level(const LPolynomial& L, const TestFunction& f) {
  OneLevelMember r;
  const int nn = L.n;
  if (nn == 0) {
    r.degenerate = true;
    return r;
  }
  const int top = (int)std::ceil(f.alpha * nn);
  const auto sig = power_sums_from_coeffs(L.c, std::max(1, top));
  double s = nn * f.fhat(0);
  for (int k = 1; k <= top; ++k) {
    const double w = f.fhat((double)k / nn);
    if (w != 0) s += 2 * w * mpq_class(sig[k], mpz_pow(L.q, (unsigned)k)).get_d();
  }
  r.trace_side = s / nn;
  RootReport rr = analyze_roots(L.c, L.q, 2, true);
  r.symmetry_err = angle_symmetry(rr.angles);
  double e = 0;
  for (double th : rr.angles) {
    const double x = std::remainder(th / (2 * kPi), 1.0);
    if (f.kind == TestFunction::Fejer) {
      double b = 0;
      e += fejer_periodized(x, nn, f.alpha, b);
      r.tail_bound += b;
    } else {
      double b = 0;
      e += gauss_periodized(x, nn, f, b);
      r.tail_bound += b;
    }
  }
  r.eigen_side = e;
  return r;
}

namespace {
template <class Fam>
OneLevelReport one_level_family(const Fam& fam, const TestFunction& f, size_t eigen_members) {
  OneLevelReport r;
  r.family = fam.id();
  r.f = f;
  const auto& L = fam.l_polys();
  r.members = L.size();
  const size_t ne = eigen_members == 0 ? L.size() : std::min(eigen_members, L.size());
  std::vector<OneLevelMember> res(L.size());
  parallel_for(L.size(), fam.jobs(), [&](size_t i) {
    if (i < ne) {
      res[i] = one_level(L[i], f);
    } else if (L[i].n == 0) {
      res[i].degenerate = true;
    } else {
      // trace side only
      TestFunction g = f;
      LPolynomial l = L[i];
      const int nn = l.n, top = (int)std::ceil(g.alpha * nn);
      const auto sig = power_sums_from_coeffs(l.c, std::max(1, top));
      double s = nn * g.fhat(0);
      for (int k = 1; k <= top; ++k) {
        const double w = g.fhat((double)k / nn);
        if (w != 0) s += 2 * w * mpq_class(sig[k], mpz_pow(l.q, (unsigned)k)).get_d();
      }
      res[i].trace_side = s / nn;
    }
  });
  r.nn = L.empty() ? 0 : L[0].n;
  double ts = 0, es = 0, rm = 0;
  for (size_t i = 0; i < L.size(); ++i) {
    if (L[i].n != r.nn) r.nn = 0;
    if (res[i].degenerate) {
      r.degenerate++;
      continue;
    }
    ts += res[i].trace_side;
    rm += rmt_baseline(L[i].n, f);
    if (i < ne) {
      es += res[i].eigen_side;
      r.max_gap = std::max(r.max_gap, std::fabs(res[i].trace_side - res[i].eigen_side));
      r.max_symmetry_err = std::max(r.max_symmetry_err, res[i].symmetry_err);
    }
  }
  require(r.degenerate < r.members, Err::DegenerateDegree, "every member has n = 0");
  // degenerate members count as 0 in the averages
  r.trace_side = ts / L.size();
  r.rmt = rm / L.size();
  r.eigen_members = ne;
  double ts_e = 0;
  for (size_t i = 0; i < ne; ++i) ts_e += res[i].trace_side;
  r.eigen_side = ne ? es / ne : 0;
  r.eigen_trace_side = ne ? ts_e / ne : 0;
  r.residual = r.trace_side - r.rmt;
  return r;
}
}  // namespace

OneLevelReport one_level_density(const QuadFamily& fam, const TestFunction& f, const DevReport* dev,
                                 size_t eigen_members) {
  OneLevelReport r = one_level_family(fam, f, eigen_members);
  if (dev) r.dev_over_N = dev->value / fam.spec().N;
  return r;
}

OneLevelReport one_level_density(const CubicFamily& fam, const TestFunction& f, size_t eigen_members) {
  return one_level_family(fam, f, eigen_members);
}

// ---- deviation term ----

double dev_inner_good(i64 t, u64 Q) {
  const double T2 = (double)t * t, q = (double)Q;
  return (T2 - 2 * q - 2) / ((q + 1) * (q + 1) - T2);
}

double dev_inner_series(i64 t, u64 Q, int terms) {
  // a*_{1,P^(2d)} = A_(2d) / Q^d; b_k = A_k / Q^(k/2) stays bounded
  const double q = (double)Q, c = t / std::sqrt(q);
  double s = 0, bm = 2, b = c, qd = 1;
  for (int k = 2; k <= 2 * terms; ++k) {
    const double bn = c * b - bm;
    bm = b;
    b = bn;
    if (k % 2 == 0) {
      qd *= q;
      s += b / qd;
    }
  }
  return s;
}

DevReport dev_quad(const Curve& E, const TestFunction& f, int max_prime_degree, const SymPolicy& pol) {
  require(max_prime_degree >= 1, Err::InvalidArgument, "max_prime_degree must be >= 1");
  DevReport r;
  r.max_prime_degree = max_prime_degree;
  const double fh0 = f.fhat(0);
  if (fh0 == 0) return r;
  const u32 q = E.field().q();
  SymLPolynomial L2 = sym_l_polynomial(E, 2, pol);
  r.log_deriv = -log_derivative_at(L2.c, q, 2, -2) / q;
  FrobTable ft = frob_table(E, max_prime_degree, true);
  double good = 0;
  for (int g = 1; g <= max_prime_degree; ++g) {
    const u64 Q = ipow(q, (unsigned)g);
    double s = 0;
    for (size_t i = 0; i < ft.t[g].size(); ++i)
      if (!ft.bad[g][i]) s += dev_inner_good(ft.t[g][i], Q);
    if (g == 1 && !ft.bad_inf) s += dev_inner_good(ft.t_inf, Q);
    good += g * s / (double)(Q + 1);
  }
  double bad = 0;
  for (const auto& pd : bad_places(E)) {
    const double Q = (double)pd.Q;
    double s = 0, qd = 1;
    for (int d = 1; d <= 80; ++d) {
      qd *= Q;
      const double a1 = sym_power_sum(pd, 1, 2 * d, pol).get_d() / qd;
      const double a2 = sym_power_sum(pd, 2, d, pol).get_d() / qd;
      const double term = (a1 - a2 + 1) / qd;
      s += term;
      if (1.0 / qd < 1e-18) break;
    }
    bad += pd.d * s;
  }
  // |inner| <= 2(Q + 1)/(Q - 1)^2 and there are at most q^m/m places of degree m
  double tail = 0;
  for (int m = max_prime_degree + 1; m < 200; ++m) {
    const double Q = std::pow((double)q, m);
    const double term = 2 * Q / ((Q - 1) * (Q - 1));
    tail += term;
    if (term < 1e-20) break;
  }
  r.good = good;
  r.bad = bad;
  r.value = fh0 * (r.log_deriv + good - bad);
  r.tail_bound = fh0 * tail;
  return r;
}

// ---- identity suite ----

namespace {

Poly random_monic(std::mt19937_64& rng, u32 q, int d) {
  Poly p(d + 1);
  for (int i = 0; i < d; ++i) p[i] = (u32)(rng() % q);
  p[d] = 1;
  return p;
}

struct Check {
  IdentityResult r;
  explicit Check(std::string name) { r.name = std::move(name), r.pass = true; }
  void operator()(bool ok, const std::string& what) {
    r.checked++;
    if (!ok && r.pass) {
      r.pass = false;
      r.detail = what;
    }
  }
};

std::vector<Poly> primes_upto(const FieldPtr& F, int max_deg) {
  std::vector<Poly> out;
  for (int d = 1; d <= max_deg; ++d)
    for (auto& P : irreducibles_of_degree(F, d)) out.push_back(P);
  return out;
}

}  // namespace

std::vector<IdentityResult> identity_suite(const Curve& E, const Curve* Et, int max_deg, int twists, u64 seed,
                                           const SymPolicy& pol) {
  const FieldPtr& Fp = E.field_ptr();
  const Field& F = *Fp;
  const u32 q = F.q();
  std::mt19937_64 rng(seed);
  const std::vector<Poly> primes = primes_upto(Fp, max_deg);
  std::vector<IdentityResult> out;

  std::vector<Poly> qt;
  while ((int)qt.size() < twists) {
    Poly D = random_monic(rng, q, 1 + (int)(rng() % 3));
    if (is_squarefree(F, D) && deg(gcd(F, D, E.Delta())) == 0) qt.push_back(D);
  }
  {
    Check c("quadratic twist traces");
    for (const Poly& D : qt) {
      Curve ED = quadratic_twist(E, D);
      for (const Poly& P : primes) {
        const int lhs = ap_trace(ED, P), rhs = quad_symbol(F, D, P) * ap_trace(E, P);
        c(lhs == rhs, "D=" + format_poly(D) + " P=" + format_poly(P));
      }
    }
    out.push_back(c.r);
  }

  std::vector<const Curve*> curves{&E};
  if (Et) curves.push_back(Et);
  {
    Check c("power reduction");
    for (const Curve* C : curves)
      for (const Poly& P : primes) {
        if (place_data(*C, P).type != RedType::Good) continue;
        for (int m = 1; m <= 4; ++m)
          for (int d = 1; d <= 3; ++d)
            c(power_reduce_check(*C, P, m, d), format_poly(P) + " m=" + std::to_string(m) + " d=" + std::to_string(d));
      }
    out.push_back(c.r);
  }
  {
    Check c0("a*_0 = 1 and a*_-1 = 0"), cb("|a*_m| <= 2(m+1)");
    for (const Curve* C : curves) {
      std::vector<PlaceData> places;
      for (const Poly& P : primes) places.push_back(place_data(*C, P));
      places.push_back(infinity_place(*C));
      for (const auto& pd : places)
        for (int k = 1; k <= 3; ++k) {
          c0(sym_power_sum(pd, 0, k, pol) == 1 && sym_power_sum(pd, -1, k, pol) == 0, pd.key);
          for (int m = 0; m <= 4; ++m) {
            const mpz_class s = sym_power_sum(pd, m, k, pol);
            const mpz_class lim = 4 * (m + 1) * (m + 1) * mpz_pow(pd.Q, (unsigned)(k * m));
            cb(s * s <= lim, pd.key + " m=" + std::to_string(m) + " k=" + std::to_string(k));
          }
        }
    }
    out.push_back(c0.r);
    out.push_back(cb.r);
  }
  {
    Check c("sym^2 prime-square identity");
    for (int n = 2; n <= 2 * max_deg; n += 2) c(nice_trace_identity(E, n, pol) == 0, "n=" + std::to_string(n));
    out.push_back(c.r);
  }
  if (!Et) return out;

  std::vector<Poly> ct;
  while ((int)ct.size() < twists) {
    Poly D1 = random_monic(rng, q, (int)(rng() % 3)), D2 = random_monic(rng, q, (int)(rng() % 2));
    if (deg(D1) + deg(D2) == 0) continue;
    if (!is_squarefree(F, D1) || !is_squarefree(F, D2) || deg(gcd(F, D1, D2)) > 0) continue;
    if (deg(gcd(F, mul(F, D1, D2), Et->B())) > 0) continue;
    ct.push_back(mul(F, D1, mul(F, D2, D2)));
  }
  std::vector<std::pair<Curve, Poly>> tw;  // twist and D (1 for the base)
  tw.push_back({*Et, Poly{1}});
  for (const Poly& D : ct) tw.push_back({cubic_twist(*Et, D), D});
  {
    Check c("cubic twist of lambda");
    for (size_t i = 1; i < tw.size(); ++i)
      for (const Poly& P : primes) {
        if (mod(F, mul(F, Et->B(), tw[i].second), P).empty()) continue;
        const int j = cubic_symbol(F, tw[i].second, P);
        c(lambda_P(tw[i].first, P) == eis_rotate(lambda_P(*Et, P), 2 * j),
          "D=" + format_poly(tw[i].second) + " P=" + format_poly(P));
      }
    out.push_back(c.r);
  }
  {
    Check ct1("a_P = -(lambda + conj)"), ct3("sym^3 in lambda");
    for (const auto& [C, D] : tw)
      for (const Poly& P : primes) {
        if (mod(F, mul(F, C.B(), Poly{1}), P).empty()) continue;
        const Eisenstein l = lambda_P(C, P);
        const i64 t = ap_trace(C, P);
        ct1(t == -re2(l), "D=" + format_poly(D) + " P=" + format_poly(P));
        // q^(3d/2) a*_3 = -(Lambda^3 + conj) + (3 |Lambda|^2 - 2 Q) t
        const PlaceData pd = place_data(C, P);
        const mpz_class lhs = sym_power_sum(pd, 3, 1, pol);
        const mpz_class rhs = -mpz_class((long)re2(eis_pow(l, 3))) + mpz_class((long)(3 * l.norm() - 2 * (i64)pd.Q)) * t;
        ct3(lhs == rhs, "D=" + format_poly(D) + " P=" + format_poly(P));
      }
    out.push_back(ct1.r);
    out.push_back(ct3.r);
  }
  return out;
}

}  // namespace ffec
