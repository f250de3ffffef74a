#include <doctest.h>

#include <random>

#include "ffec/poly.hpp"
#include "oracle.hpp"

using namespace ffec;

namespace {
Poly random_poly(std::mt19937_64& rng, u32 q, int d) {
  Poly a(d + 1);
  for (auto& c : a) c = (u32)(rng() % q);
  trim(a);
  return a;
}
}  // namespace

TEST_CASE("literal format round trip") {
  auto F = make_field(7, 1);
  CHECK(format_poly(parse_poly(*F, "1,0,1")) == "1,0,1");
  CHECK(parse_poly(*F, "0").empty());
  CHECK(format_poly(Poly{}) == "0");
  CHECK(parse_poly(*F, "-3") == Poly{4});
  CHECK(parse_poly(*F, "1,2,0,0") == Poly{1, 2});
  CHECK_THROWS_AS(parse_poly(*F, "1,,2"), Error);
  CHECK_THROWS_AS(parse_poly(*F, "x"), Error);
}

TEST_CASE("division identity and gcd") {
  auto F = make_field(7, 1);
  std::mt19937_64 rng(3);
  for (int it = 0; it < 200; ++it) {
    Poly a = random_poly(rng, 7, (int)(rng() % 9)), b = random_poly(rng, 7, 1 + (int)(rng() % 5));
    if (b.empty()) continue;
    Poly qo, r;
    divmod(*F, a, b, qo, r);
    CHECK(add(*F, mul(*F, qo, b), r) == a);
    CHECK(deg(r) < deg(b));
    const Poly g = gcd(*F, a, b);
    if (!g.empty()) {
      CHECK(lead(g) == 1);
      CHECK(mod(*F, a, g).empty());
      CHECK(mod(*F, b, g).empty());
    }
  }
}

TEST_CASE("irreducibles: counts and membership against trial division") {
  auto F = make_field(5, 1);
  for (int d = 1; d <= 4; ++d) {
    const auto slow = oracle::irreducibles_slow(*F, d);
    CHECK(slow.size() == necklace_count(5, d));
    CHECK(irreducibles_of_degree(F, d) == slow);
    for (u64 i = 0; i < ipow(5, d); i += 7) {
      const Poly P = monic_at(*F, d, i);
      CHECK(is_irreducible(*F, P) == std::binary_search(slow.begin(), slow.end(), P, PolyLess{}));
    }
  }
  CHECK(necklace_count(7, 6) == (117649 - 343 - 49 + 7) / 6);
}

TEST_CASE("factorization expands back and has irreducible factors") {
  auto F = make_field(7, 1);
  std::mt19937_64 rng(11);
  for (int it = 0; it < 60; ++it) {
    Poly a = random_poly(rng, 7, 1 + (int)(rng() % 8));
    if (deg(a) < 1) continue;
    const Factorization f = factorize(*F, a);
    CHECK(f.expand(*F) == a);
    bool sqf = true;
    for (const auto& [P, e] : f.factors) {
      CHECK(lead(P) == 1);
      CHECK(is_irreducible(*F, P));
      if (e > 1) sqf = false;
    }
    CHECK(is_squarefree(*F, a) == sqf);
    CHECK(oracle::squarefree_slow(*F, monic(*F, a)) == sqf);
  }
}

TEST_CASE("monic_at enumerates in cmp_poly order") {
  auto F = make_field(5, 1);
  Poly prev = monic_at(*F, 3, 0);
  for (u64 i = 1; i < 125; ++i) {
    const Poly cur = monic_at(*F, 3, i);
    CHECK(cmp_poly(prev, cur) < 0);
    CHECK(deg(cur) == 3);
    CHECK(lead(cur) == 1);
    prev = cur;
  }
}

TEST_CASE("power residue matches repeated squaring") {
  auto F = make_field(13, 1);
  const Poly P = oracle::irreducibles_slow(*F, 2)[5];
  for (u64 i = 1; i < 169; i += 5) {
    const Poly a = monic_at(*F, 1, i % 13);
    CHECK(power_residue(*F, a, P, 3) == oracle::powmod_slow(*F, a, (169 - 1) / 3, P));
  }
}
