#include <doctest.h>

#include "ffec/symlfun.hpp"
#include "oracle.hpp"

using namespace ffec;

TEST_CASE("sym^1 agrees with the L-polynomial") {
  auto F = make_field(7, 1);
  Curve E(F, parse_poly(*F, "4"), parse_poly(*F, "0,0,0,1"));
  const LPolynomial L = l_polynomial(E);
  const SymLPolynomial S = sym_l_polynomial(E, 1);
  CHECK(S.n == L.n);
  CHECK(S.c == L.c);
  CHECK(S.eps == L.eps);
  CHECK(S.roots.rh);
}

TEST_CASE("sym^3 of the Mordell reference curve") {
  auto F = make_field(7, 1);
  Curve Et(F, Poly{}, parse_poly(*F, "1,0,1"));
  const SymLPolynomial S = sym_l_polynomial(Et, 3);
  CHECK(S.c == std::vector<mpz_class>{1, -98, 2401});
  CHECK(S.eps == 1);
  CHECK(S.roots.rh);
  const auto tr = sym_traces(S, 6);
  const auto ps = sym_prime_sums(Et, 3, 6);
  for (int n = 1; n <= 6; ++n) CHECK(tr[n] == ps[n]);
}

TEST_CASE("sym^2 of the Mordell reference curve is not a polynomial") {
  auto F = make_field(7, 1);
  Curve Et(F, Poly{}, parse_poly(*F, "1,0,1"));
  try {
    sym_l_polynomial(Et, 2, {}, 6);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Err::DegreeDetectionFailed);
  }
}

TEST_CASE("power reduction holds at good primes") {
  auto F = make_field(7, 1);
  Curve E(F, parse_poly(*F, "4"), parse_poly(*F, "0,0,0,1"));
  for (int d = 1; d <= 2; ++d)
    for (const Poly& P : oracle::irreducibles_slow(*F, d))
      for (int m = 1; m <= 4; ++m) CHECK(power_reduce_check(E, P, m, 3));
}

TEST_CASE("sym power sums of a good place from its trace") {
  auto F = make_field(7, 1);
  Curve E(F, parse_poly(*F, "4"), parse_poly(*F, "0,0,0,1"));
  const Poly P{1, 1};
  const PlaceData pd = place_data(E, P);
  REQUIRE(pd.type == RedType::Good);
  // alpha beta = Q, alpha + beta = t; pair i with m - i
  const i64 t = pd.t, Q = 7;
  std::vector<mpz_class> s(16);
  s[0] = 2;
  s[1] = t;
  for (size_t j = 2; j < s.size(); ++j) s[j] = t * s[j - 1] - Q * s[j - 2];
  for (int m = 1; m <= 3; ++m)
    for (int k = 1; k <= 3; ++k) {
      mpz_class want = m % 2 ? 0 : mpz_pow(Q, k * m / 2);
      for (int i = 0; 2 * i < m; ++i) want += mpz_pow(Q, k * i) * s[k * (m - 2 * i)];
      CHECK(sym_power_sum(pd, m, k) == want);
    }
}

TEST_CASE("user-supplied policy needs a factor at every additive place") {
  auto F = make_field(7, 1);
  Curve Et(F, Poly{}, parse_poly(*F, "1,0,1"));
  SymPolicy pol;
  pol.kind = BadPolicy::UserSupplied;
  CHECK_THROWS_AS(sym_l_polynomial(Et, 3, pol), Error);
  // dropping the local factors breaks the functional equation here
  pol.kind = BadPolicy::TrivialFactor;
  CHECK_THROWS_AS(sym_l_polynomial(Et, 3, pol, 6), Error);
}

TEST_CASE("nice trace identity residual vanishes") {
  auto F = make_field(7, 1);
  Curve E(F, parse_poly(*F, "4"), parse_poly(*F, "0,0,0,1"));
  for (int n = 2; n <= 6; n += 2) CHECK(nice_trace_identity(E, n) == 0);
}
