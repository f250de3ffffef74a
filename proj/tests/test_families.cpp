#include <doctest.h>

#include "ffec/families.hpp"
#include "oracle.hpp"

using namespace ffec;

namespace {
FieldPtr F7() { return make_field(7, 1); }
}

TEST_CASE("quadratic family enumeration equals a direct sieve") {
  auto F = F7();
  Curve E(F, parse_poly(*F, "4"), parse_poly(*F, "0,0,0,1"));
  for (int N = 1; N <= 3; ++N) {
    QuadFamilySpec s{E};
    s.N = N;
    const auto fam = enum_quad(s);
    std::vector<Poly> want;
    for (u64 i = 0; i < ipow(7, N); ++i) {
      const Poly D = monic_at(*F, N, i);
      if (oracle::squarefree_slow(*F, D) && oracle::coprime_slow(*F, D, E.Delta())) want.push_back(D);
    }
    REQUIRE(fam.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) CHECK(fam[i].D == want[i]);
    CHECK(quad_count(s) == want.size());
    CHECK(quad_series(*F, E.Delta(), N)[N] == (unsigned long)want.size());
    // sign parts partition the family
    s.sign = SignPart::Plus;
    const u64 np = quad_count(s);
    s.sign = SignPart::Minus;
    CHECK(np + quad_count(s) == want.size());
  }
}

TEST_CASE("empty conductor product gives q^(N-1)(q-1)") {
  auto F = F7();
  Curve C(F, Poly{1}, Poly{1});  // constant discriminant
  QuadFamilySpec s{C};
  for (int N = 2; N <= 4; ++N) {
    s.N = N;
    CHECK(quad_count(s) == ipow(7, N - 1) * 6);
  }
}

TEST_CASE("cubic family enumeration equals a direct sieve") {
  auto F = F7();
  Curve Et(F, Poly{}, parse_poly(*F, "1,0,1"));
  for (int N = 1; N <= 3; ++N) {
    CubicFamilySpec s{Et};
    s.N = N;
    const auto fam = enum_cubic(s);
    u64 want = 0;
    // D1 D2^2 with deg D1 + deg D2 = N, 3 | deg D1 + 2 deg D2
    for (int d2 = 0; d2 <= N; ++d2) {
      const int d1 = N - d2;
      if ((d1 + 2 * d2) % 3) continue;
      for (u64 i = 0; i < ipow(7, d1); ++i) {
        const Poly D1 = monic_at(*F, d1, i);
        if (!oracle::squarefree_slow(*F, D1) || !oracle::coprime_slow(*F, D1, Et.B())) continue;
        for (u64 j = 0; j < ipow(7, d2); ++j) {
          const Poly D2 = monic_at(*F, d2, j);
          if (oracle::squarefree_slow(*F, D2) && oracle::coprime_slow(*F, D2, Et.B()) &&
              oracle::coprime_slow(*F, D1, D2))
            ++want;
        }
      }
    }
    CHECK(fam.size() == want);
    CHECK(cubic_count(s) == want);
    CHECK(series_coefficients(*F, Et.B(), N).G[N] == (unsigned long)want);
    for (const auto& m : fam) CHECK(m.D == mul(*F, m.D1, mul(*F, m.D2, m.D2)));
  }
}

TEST_CASE("member L-polynomials from the base tables equal direct computation") {
  auto F = F7();
  Curve E(F, parse_poly(*F, "4"), parse_poly(*F, "0,0,0,1"));
  QuadFamilySpec s{E};
  s.N = 2;
  const auto fam = enum_quad(s);
  TwistBase tb(E, TwistBase::Quadratic, 8);
  for (size_t i = 0; i < fam.size(); i += 7) {
    const Curve C = quad_member_curve(s, fam[i]);
    const Curve D = quadratic_twist(E, fam[i].D);
    CHECK(C.n_frak() == D.n_frak());
    const LPolynomial a = tb.member_l_polynomial(C, fam[i].D, fam[i].fac);
    const LPolynomial b = l_polynomial(D);
    CHECK(a.c == b.c);
  }
  Curve Et(F, Poly{}, parse_poly(*F, "1,0,1"));
  CubicFamilySpec cs{Et};
  cs.N = 2;
  const auto cf = enum_cubic(cs);
  TwistBase cb(Et, TwistBase::Cubic, 8);
  for (size_t i = 0; i < cf.size(); i += 5) {
    const Curve C = cubic_member_curve(cs, cf[i]);
    const Curve D = cubic_twist(Et, cf[i].D);
    CHECK(C.n_frak() == D.n_frak());
    CHECK(cb.member_l_polynomial(C, cf[i].D, cf[i].fac).c == l_polynomial(D).c);
  }
}

TEST_CASE("coprime ratio equals a direct count") {
  auto F = F7();
  Curve E(F, parse_poly(*F, "4"), parse_poly(*F, "0,0,0,1"));
  QuadFamilySpec s{E};
  s.N = 3;
  const Poly P{1, 1};
  const auto all = enum_quad(s);
  u64 good = 0;
  for (const auto& m : all) good += !oracle::rem(*F, m.D, P).empty();
  const RatioReport r = coprime_ratio(s, P);
  mpq_class want(good, all.size());
  want.canonicalize();
  CHECK(r.empirical == want);
  CHECK(std::abs(r.predicted - 7.0 / 8.0) < 1e-12);
}

TEST_CASE("cubic character average over the family") {
  auto F = F7();
  Curve Et(F, Poly{}, parse_poly(*F, "1,0,1"));
  CubicFamilySpec s{Et};
  s.N = 2;
  const Poly P{2, 1};
  const auto fam = enum_cubic(s);
  i64 n[3] = {0, 0, 0};
  for (const auto& m : fam) {
    const int j = oracle::cubic_symbol_slow(*F, m.D, P);
    if (j >= 0) n[j]++;
  }
  const EisRational e = character_average_EP(s, P);
  CHECK(e.den == fam.size());
  CHECK(e.num == Eisenstein{n[0] - n[2], n[1] - n[2]});
}
