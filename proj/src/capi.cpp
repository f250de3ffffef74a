#include "ffec/ffec.h"

#include <array>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "ffec/chars.hpp"
#include "ffec/stats.hpp"

using namespace ffec;

struct ffec_field {
  FieldPtr F;
};

struct ffec_curve {
  std::shared_ptr<const Curve> E;
};

struct ffec_policy {
  SymPolicy pol;
};

struct ffec_lpoly {
  int m = 1;
  u32 q = 0;
  int n = 0, eps = 0, K = 0;
  bool verified = false;
  std::vector<mpz_class> c;
  RootReport roots;
};

struct ffec_identities {
  std::vector<IdentityResult> rows;
};

struct ffec_family {
  bool cubic = false;
  int jobs = 1;
  std::string id;
  std::optional<QuadFamilySpec> qs;
  std::optional<CubicFamilySpec> cs;

  std::mutex mu;
  std::unique_ptr<QuadFamily> quad;
  std::unique_ptr<CubicFamily> cub;
  std::vector<std::array<std::string, 3>> names;
  std::string formula;
  std::unique_ptr<QuadTheory> theory;
  int theory_K = 0;
  SymPolicy theory_pol;
};

namespace {

thread_local std::string g_error;

template <class Fn>
ffec_status guard(Fn&& fn) {
  try {
    fn();
    g_error.clear();
    return FFEC_OK;
  } catch (const Error& e) {
    g_error = e.what();
    return (ffec_status)e.code();
  } catch (const std::bad_alloc&) {
    g_error = "Internal: out of memory";
  } catch (const std::exception& e) {
    g_error = std::string("Internal: ") + e.what();
  } catch (...) {
    g_error = "Internal: unknown exception";
  }
  return FFEC_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) fail(Err::InvalidArgument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* r = (char*)std::malloc(s.size() + 1);
  if (!r) throw std::bad_alloc();
  std::memcpy(r, s.c_str(), s.size() + 1);
  return r;
}

void put(char* dst, size_t cap, const std::string& s) {
  require(s.size() < cap, Err::TooLarge, "value has " + std::to_string(s.size()) + " digits");
  std::memcpy(dst, s.c_str(), s.size() + 1);
}

void put_rational(ffec_rational& r, const mpq_class& v) {
  put(r.num, sizeof r.num, v.get_num().get_str());
  put(r.den, sizeof r.den, v.get_den().get_str());
  r.value = v.get_d();
}

const SymPolicy& policy_of(const ffec_policy* p) {
  static const SymPolicy tame;
  return p ? p->pol : tame;
}

bool same_policy(const SymPolicy& a, const SymPolicy& b) { return a.kind == b.kind && a.user == b.user; }

TestFunction test_function(const ffec_test_function* f) {
  need(f, "test function");
  require(f->alpha > 0 && f->alpha <= 1, Err::InvalidArgument, "alpha must be in (0, 1]");
  if (f->kind == FFEC_FEJER) return TestFunction::fejer(f->alpha);
  require(f->kind == FFEC_TRUNCATED_GAUSSIAN, Err::InvalidArgument, "unknown test function kind");
  require(f->sigma > 0, Err::InvalidArgument, "sigma must be positive");
  return TestFunction::truncated_gaussian(f->alpha, f->sigma);
}

const QuadFamily& quad_of(ffec_family* fam) {
  std::lock_guard<std::mutex> lk(fam->mu);
  if (!fam->quad) fam->quad = std::make_unique<QuadFamily>(*fam->qs, fam->jobs);
  return *fam->quad;
}

const CubicFamily& cubic_of(ffec_family* fam) {
  std::lock_guard<std::mutex> lk(fam->mu);
  if (!fam->cub) fam->cub = std::make_unique<CubicFamily>(*fam->cs, fam->jobs);
  return *fam->cub;
}

int deg_rad(const Factorization& f) {
  int s = 0;
  for (const auto& [P, e] : f.factors) s += deg(P);
  return s;
}

void fill_lpoly_roots(ffec_lpoly& l) { l.roots = analyze_roots(l.c, l.q, l.m + 1, true); }

}  // namespace

extern "C" {

const char* ffec_version(void) { return "0.4.0"; }

const char* ffec_status_name(ffec_status s) { return err_name((Err)s); }

const char* ffec_last_error(void) { return g_error.c_str(); }

void ffec_string_free(char* s) { std::free(s); }

// ---- fields ----

ffec_status ffec_field_new(int p, int m, ffec_field** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    auto h = std::make_unique<ffec_field>();
    h->F = make_field(p, m);
    *out = h.release();
  });
}

void ffec_field_free(ffec_field* f) { delete f; }

ffec_status ffec_field_get_info(const ffec_field* f, ffec_field_info* out) {
  return guard([&] {
    need(f, "field");
    need(out, "out");
    const Field& F = *f->F;
    out->p = F.p();
    out->m = F.m();
    out->q = F.q();
    out->g = F.g();
    out->has_mu3 = F.has_mu3();
    out->omega = F.has_mu3() ? F.omega() : 0;
  });
}

ffec_status ffec_field_modulus(const ffec_field* f, char** out) {
  return guard([&] {
    need(f, "field");
    need(out, "out");
    std::string s;
    for (u32 c : f->F->modulus()) s += (s.empty() ? "" : ",") + std::to_string(c);
    *out = dup(s);
  });
}

// ---- curves ----

ffec_status ffec_curve_new(const ffec_field* f, const char* A, const char* B, ffec_curve** out) {
  return guard([&] {
    need(f, "field");
    need(A, "A");
    need(B, "B");
    need(out, "out");
    *out = nullptr;
    const Field& F = *f->F;
    auto h = std::make_unique<ffec_curve>();
    h->E = std::make_shared<const Curve>(f->F, parse_poly(F, A), parse_poly(F, B));
    *out = h.release();
  });
}

void ffec_curve_free(ffec_curve* c) { delete c; }

ffec_status ffec_curve_get_info(const ffec_curve* c, ffec_curve_info* out) {
  return guard([&] {
    need(c, "curve");
    need(out, "out");
    const ReductionProfile& p = c->E->profile();
    out->n_frak = p.n_frak;
    out->is_mordell = c->E->is_mordell();
    out->deg_delta = deg(c->E->Delta());
    out->deg_M = deg(p.M);
    out->deg_Adot = deg(p.Adot);
    out->bad_primes = (int)p.bad.size();
    out->inf_type = (int)p.inf.type;
    out->inf_f = p.inf.f;
  });
}

ffec_status ffec_curve_delta(const ffec_curve* c, char** out) {
  return guard([&] {
    need(c, "curve");
    need(out, "out");
    *out = dup(format_poly(c->E->Delta()));
  });
}

size_t ffec_curve_bad_place_count(const ffec_curve* c) {
  if (!c) return 0;
  const ReductionProfile& p = c->E->profile();
  return p.bad.size() + (p.inf.type != RedType::Good);
}

ffec_status ffec_curve_bad_place(const ffec_curve* c, size_t i, ffec_place* out) {
  return guard([&] {
    need(c, "curve");
    need(out, "out");
    const ReductionProfile& p = c->E->profile();
    require(i < ffec_curve_bad_place_count(c), Err::InvalidArgument, "place index out of range");
    if (i < p.bad.size()) {
      put(out->P, sizeof out->P, format_poly(p.bad[i].P));
      out->degree = deg(p.bad[i].P);
      out->type = (int)p.bad[i].type;
    } else {
      put(out->P, sizeof out->P, "inf");
      out->degree = 1;
      out->type = (int)p.inf.type;
    }
  });
}

// ---- policies ----

ffec_status ffec_policy_new(const char* kind, ffec_policy** out) {
  return guard([&] {
    need(kind, "kind");
    need(out, "out");
    *out = nullptr;
    auto h = std::make_unique<ffec_policy>();
    h->pol.kind = parse_policy(kind);
    *out = h.release();
  });
}

void ffec_policy_free(ffec_policy* p) { delete p; }

ffec_status ffec_policy_set_factor(ffec_policy* p, const char* place, const int64_t* f, size_t len) {
  return guard([&] {
    need(p, "policy");
    need(place, "place");
    require(len >= 1 && f && f[0] == 1, Err::InvalidArgument, "local factor must start with 1");
    p->pol.user[place] = std::vector<i64>(f, f + len);
  });
}

const char* ffec_policy_kind(const ffec_policy* p) { return policy_name(policy_of(p).kind); }

// ---- L-polynomials ----

ffec_status ffec_lpoly_new(const ffec_curve* c, int max_prime_degree, ffec_lpoly** out) {
  return guard([&] {
    need(c, "curve");
    need(out, "out");
    *out = nullptr;
    LPolyOptions o;
    o.max_prime_degree = max_prime_degree;
    const LPolynomial L = l_polynomial(*c->E, o);
    auto h = std::make_unique<ffec_lpoly>();
    h->m = 1;
    h->q = L.q;
    h->n = L.n;
    h->eps = L.eps;
    h->K = L.K;
    h->verified = L.verified;
    h->c = L.c;
    fill_lpoly_roots(*h);
    *out = h.release();
  });
}

ffec_status ffec_sym_lpoly_new(const ffec_curve* c, int m, const ffec_policy* pol, int max_prime_degree,
                               ffec_lpoly** out) {
  return guard([&] {
    need(c, "curve");
    need(out, "out");
    *out = nullptr;
    const SymLPolynomial L = sym_l_polynomial(*c->E, m, policy_of(pol), max_prime_degree);
    auto h = std::make_unique<ffec_lpoly>();
    h->m = m;
    h->q = L.q;
    h->n = L.n;
    h->eps = L.eps;
    h->K = L.K;
    h->verified = L.verified;
    h->c = L.c;
    fill_lpoly_roots(*h);
    *out = h.release();
  });
}

void ffec_lpoly_free(ffec_lpoly* l) { delete l; }

ffec_status ffec_lpoly_get_info(const ffec_lpoly* l, ffec_lpoly_info* out) {
  return guard([&] {
    need(l, "lpoly");
    need(out, "out");
    out->m = l->m;
    out->degree = l->n;
    out->eps = l->eps;
    out->prime_degrees = l->K;
    out->verified = l->verified;
    out->rh = l->roots.rh;
    out->max_dev = l->roots.max_dev;
  });
}

ffec_status ffec_lpoly_coeff(const ffec_lpoly* l, int j, char** out) {
  return guard([&] {
    need(l, "lpoly");
    need(out, "out");
    require(j >= 0 && j <= l->n, Err::InvalidArgument, "coefficient index out of range");
    *out = dup(l->c[j].get_str());
  });
}

ffec_status ffec_lpoly_zeros(const ffec_lpoly* l, double* re, double* im, size_t cap, size_t* count) {
  return guard([&] {
    need(l, "lpoly");
    need(count, "count");
    const auto z = zeros_from_report(l->roots, l->q, l->m + 1);
    *count = z.size();
    if (cap) {
      need(re, "re");
      need(im, "im");
    }
    for (size_t i = 0; i < z.size() && i < cap; ++i) {
      re[i] = z[i].real();
      im[i] = z[i].imag();
    }
  });
}

// ---- identities ----

ffec_status ffec_identities_run(const ffec_curve* E, const ffec_curve* Et, int max_deg, int twists, uint64_t seed,
                                const ffec_policy* pol, ffec_identities** out) {
  return guard([&] {
    need(E, "curve");
    need(out, "out");
    *out = nullptr;
    auto h = std::make_unique<ffec_identities>();
    h->rows = identity_suite(*E->E, Et ? Et->E.get() : nullptr, max_deg, twists, seed, policy_of(pol));
    *out = h.release();
  });
}

void ffec_identities_free(ffec_identities* r) { delete r; }

size_t ffec_identities_count(const ffec_identities* r) { return r ? r->rows.size() : 0; }

ffec_status ffec_identities_get(const ffec_identities* r, size_t i, ffec_identity* out) {
  return guard([&] {
    need(r, "identities");
    need(out, "out");
    require(i < r->rows.size(), Err::InvalidArgument, "index out of range");
    const IdentityResult& x = r->rows[i];
    out->name = x.name.c_str();
    out->pass = x.pass;
    out->checked = x.checked;
    out->detail = x.detail.c_str();
  });
}

// ---- families ----

ffec_status ffec_quad_family_new(const ffec_curve* E, int N, const char* sign, int jobs, ffec_family** out) {
  return guard([&] {
    need(E, "curve");
    need(out, "out");
    *out = nullptr;
    require(N >= 1, Err::InvalidArgument, "N must be >= 1");
    auto h = std::make_unique<ffec_family>();
    QuadFamilySpec s{*E->E};
    s.N = N;
    s.sign = parse_sign(sign ? sign : "all");
    h->id = "H" + std::to_string(N) + "^" + sign_name(s.sign);
    h->qs = s;
    h->jobs = std::max(1, jobs);
    *out = h.release();
  });
}

ffec_status ffec_cubic_family_new(const ffec_curve* Et, int N, const char* variant, int jobs, ffec_family** out) {
  return guard([&] {
    need(Et, "curve");
    need(out, "out");
    *out = nullptr;
    require(N >= 1, Err::InvalidArgument, "N must be >= 1");
    require(Et->E->field().has_mu3(), Err::UnsupportedFeature, "cubic families need q = 1 mod 3");
    require(Et->E->is_mordell(), Err::NotMordellCurve, "cubic families need A = 0");
    auto h = std::make_unique<ffec_family>();
    CubicFamilySpec s{*Et->E};
    s.N = N;
    s.variant = parse_variant(variant ? variant : "F");
    h->cubic = true;
    h->id = std::string(variant_name(s.variant)) + std::to_string(N);
    h->cs = s;
    h->jobs = std::max(1, jobs);
    *out = h.release();
  });
}

void ffec_family_free(ffec_family* fam) { delete fam; }

ffec_status ffec_family_get_info(const ffec_family* fam, ffec_family_info* out) {
  return guard([&] {
    need(fam, "family");
    need(out, "out");
    auto* f = const_cast<ffec_family*>(fam);
    out->cubic = f->cubic;
    out->N = f->cubic ? f->cs->N : f->qs->N;
    out->size = f->cubic ? cubic_of(f).size() : quad_of(f).size();
    out->id = f->id.c_str();
  });
}

ffec_status ffec_family_member(const ffec_family* fam, size_t i, ffec_member* out) {
  return guard([&] {
    need(fam, "family");
    need(out, "out");
    auto* f = const_cast<ffec_family*>(fam);
    *out = ffec_member{};
    if (f->cubic) {
      const auto& ms = cubic_of(f).members();
      require(i < ms.size(), Err::InvalidArgument, "member index out of range");
      std::lock_guard<std::mutex> lk(f->mu);
      if (f->names.empty())
        for (const auto& m : ms) f->names.push_back({format_poly(m.D), format_poly(m.D1), format_poly(m.D2)});
      out->D = f->names[i][0].c_str();
      out->D1 = f->names[i][1].c_str();
      out->D2 = f->names[i][2].c_str();
      out->deg_D = deg(ms[i].D);
      out->deg_rad = deg_rad(ms[i].fac);
    } else {
      const auto& ms = quad_of(f).members();
      require(i < ms.size(), Err::InvalidArgument, "member index out of range");
      std::lock_guard<std::mutex> lk(f->mu);
      if (f->names.empty())
        for (const auto& m : ms) f->names.push_back({format_poly(m.D), "", ""});
      out->D = f->names[i][0].c_str();
      out->deg_D = deg(ms[i].D);
      out->deg_rad = deg_rad(ms[i].fac);
      out->chi = ms[i].chi;
    }
  });
}

ffec_status ffec_family_size_report(const ffec_family* fam, ffec_size_report* out) {
  return guard([&] {
    need(fam, "family");
    need(out, "out");
    auto* f = const_cast<ffec_family*>(fam);
    SizeReport r;
    *out = ffec_size_report{};
    if (fam->cubic) {
      const auto& s = *fam->cs;
      r = predicted_size(s);
      if (s.variant == CubicVariant::F) {
        const auto S = series_coefficients(s.Et.field(), s.Et.B(), s.N);
        out->has_series = 1;
        out->series = S.G[s.N].get_ui();
      }
    } else {
      const auto& s = *fam->qs;
      r = predicted_size(s);
      if (s.sign == SignPart::All) {
        const auto c = quad_series(s.E.field(), s.E.Delta(), s.N);
        out->has_series = 1;
        out->series = c[s.N].get_ui();
      }
    }
    std::lock_guard<std::mutex> lk(f->mu);
    f->formula = r.formula;
    out->exact = r.exact;
    out->predicted = r.predicted;
    out->abs_err = r.abs_err;
    out->rel_err = r.rel_err;
    out->formula = f->formula.c_str();
  });
}

ffec_status ffec_family_coprime_ratio(const ffec_family* fam, const char* P, ffec_ratio* out) {
  return guard([&] {
    need(fam, "family");
    need(out, "out");
    const Curve& C = fam->cubic ? fam->cs->Et : fam->qs->E;
    const Field& F = C.field();
    const Poly& avoid = fam->cubic ? C.B() : C.Delta();
    Poly Pp;
    if (P) {
      Pp = parse_poly(F, P);
    } else {
      for (u32 c = 0; c < F.q() && Pp.empty(); ++c)
        if (!mod(F, avoid, poly_linear(c)).empty()) Pp = poly_linear(c);
      require(!Pp.empty(), Err::InvalidArgument, "every degree-1 prime divides the discriminant");
    }
    const RatioReport r = fam->cubic ? coprime_ratio(*fam->cs, Pp) : coprime_ratio(*fam->qs, Pp);
    put(out->P, sizeof out->P, format_poly(Pp));
    put_rational(out->empirical, r.empirical);
    out->predicted = r.predicted;
    out->deviation = r.deviation;
  });
}

// ---- trace averages ----

ffec_status ffec_trace_average(const ffec_family* fam, int n, const char* method, const ffec_policy* pol,
                               ffec_trace_avg* out) {
  return guard([&] {
    need(fam, "family");
    need(out, "out");
    auto* f = const_cast<ffec_family*>(fam);
    const TraceMethod m = parse_method(method ? method : "both");
    *out = ffec_trace_avg{};
    TraceAverage r;
    if (f->cubic) {
      const CubicFamily& cf = cubic_of(f);
      r = average_trace(cf, n, m);
      const CubicTerms t = cubic_secondary_terms(cf, n);
      out->M = t.M;
      out->S = t.S;
      out->E = t.E;
      out->M0 = t.M0;
      out->S0 = t.S0;
      out->D1 = t.D1;
      out->D2 = t.D2;
      out->mse = t.mse;
    } else {
      const QuadFamily& qf = quad_of(f);
      const SymPolicy& sp = policy_of(pol);
      const QuadTheory* th;
      {
        std::lock_guard<std::mutex> lk(f->mu);
        const int K = std::max(1, n / 2);
        if (!f->theory || f->theory_K < K || !same_policy(f->theory_pol, sp)) {
          f->theory = std::make_unique<QuadTheory>(*f->qs, K, sp);
          f->theory_K = K;
          f->theory_pol = sp;
        }
        th = f->theory.get();
      }
      r = average_trace(qf, n, m, th);
      const QuadMainTerm t = th->expected_trace(n);
      out->eta = t.eta;
      out->sym2 = t.sym2;
      out->Dn = t.Dn;
      out->good = t.good;
      out->bad = t.bad;
      out->mp = t.mp;
      out->inf = t.inf;
    }
    out->n = n;
    out->size = r.size;
    put_rational(out->value, r.value);
    if (m != TraceMethod::PrimeSum) {
      out->has_lpoly = 1;
      put_rational(out->lpoly, r.lpoly);
    }
    if (m != TraceMethod::LPoly) {
      out->has_primesum = 1;
      put_rational(out->primesum, r.primesum);
    }
    out->main_term = r.main_term;
    out->residual = r.residual;
  });
}

ffec_status ffec_conjecture_probe(const ffec_family* fam, int n, ffec_conjecture_row* out) {
  return guard([&] {
    need(fam, "family");
    need(out, "out");
    require(fam->cubic, Err::InvalidArgument, "the conjecture probe needs a cubic family");
    const ConjectureRow r = conjecture_probe(cubic_of(const_cast<ffec_family*>(fam)), n);
    *out = ffec_conjecture_row{};
    out->n = r.n;
    out->N = r.N;
    put_rational(out->lhs, r.lhs);
    out->rhs = r.rhs;
    out->gap = r.gap;
    out->scaled_gap = r.scaled_gap;
    out->sym3 = r.sym3;
    out->tr1 = r.tr1;
  });
}

// ---- moments ----

ffec_status ffec_lambda_moment(const ffec_curve* Et, int m, ffec_moment* out) {
  return guard([&] {
    need(Et, "curve");
    need(out, "out");
    const LambdaMoment r = lambda_moment(*Et->E, m);
    *out = ffec_moment{};
    out->m = r.m;
    put_rational(out->value, r.value);
    out->deviation = r.deviation;
    out->primes = r.primes;
  });
}

double ffec_moment_envelope(uint32_t q, const ffec_moment* rows, size_t count) {
  double C = 0;
  for (size_t i = 0; rows && i < count; ++i)
    C = std::max(C, std::fabs(rows[i].deviation) * std::pow((double)q, rows[i].m / 3.0));
  return C;
}

// ---- one-level densities ----

double ffec_rmt_baseline(int nn, const ffec_test_function* f) {
  try {
    return rmt_baseline(nn, test_function(f));
  } catch (const std::exception& e) {
    g_error = e.what();
    return std::nan("");
  }
}

ffec_status ffec_one_level_density(const ffec_family* fam, const ffec_test_function* f, size_t eigen_members,
                                   int with_dev, int max_prime_degree, const ffec_policy* pol,
                                   ffec_one_level_report* out) {
  return guard([&] {
    need(fam, "family");
    need(out, "out");
    auto* h = const_cast<ffec_family*>(fam);
    const TestFunction tf = test_function(f);
    OneLevelReport r;
    DevReport dv;
    *out = ffec_one_level_report{};
    if (h->cubic) {
      require(!with_dev, Err::UnsupportedFeature, "the deviation term is implemented for quadratic families");
      r = one_level_density(cubic_of(h), tf, eigen_members);
    } else {
      const QuadFamily& qf = quad_of(h);
      if (with_dev) {
        dv = dev_quad(h->qs->E, tf, max_prime_degree, policy_of(pol));
        out->has_dev = 1;
        out->dev = dv.value;
        out->dev_log_deriv = dv.log_deriv;
        out->dev_good = dv.good;
        out->dev_bad = dv.bad;
        out->dev_tail_bound = dv.tail_bound;
      }
      r = one_level_density(qf, tf, with_dev ? &dv : nullptr, eigen_members);
    }
    out->members = r.members;
    out->degenerate = r.degenerate;
    out->nn = r.nn;
    out->trace_side = r.trace_side;
    out->eigen_side = r.eigen_side;
    out->rmt = r.rmt;
    out->residual = r.residual;
    out->eigen_members = r.eigen_members;
    out->eigen_trace_side = r.eigen_trace_side;
    out->max_gap = r.max_gap;
    out->max_symmetry_err = r.max_symmetry_err;
    out->dev_over_N = r.dev_over_N;
  });
}

}  // extern "C"
