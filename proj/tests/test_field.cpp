#include <doctest.h>

#include <set>

#include "ffec/field.hpp"
#include "oracle.hpp"

using namespace ffec;

TEST_CASE("prime field arithmetic matches integers mod p") {
  auto F = make_field(13, 1);
  CHECK(F->q() == 13);
  for (u32 a = 0; a < 13; ++a)
    for (u32 b = 0; b < 13; ++b) {
      CHECK(F->add(a, b) == (a + b) % 13);
      CHECK(F->mul(a, b) == (a * b) % 13);
      if (b) CHECK(F->mul(F->div(a, b), b) == a);
    }
  CHECK(F->from_int(-1) == 12);
}

TEST_CASE("extension field agrees with schoolbook arithmetic mod the modulus") {
  for (auto [p, m] : {std::pair{5, 2}, std::pair{7, 2}, std::pair{5, 3}}) {
    auto F = make_field(p, m);
    const auto& f = F->modulus();
    REQUIRE((int)f.size() == m + 1);
    CHECK(f.back() == 1);
    CHECK(is_irreducible(*make_field(p, 1), Poly(f.begin(), f.end())));
    oracle::SlowField S{p, m, f};
    for (u32 a = 0; a < F->q(); a += 3)
      for (u32 b = 0; b < F->q(); ++b) {
        REQUIRE(F->add(a, b) == S.add(a, b));
        REQUIRE(F->mul(a, b) == S.mul(a, b));
      }
  }
}

TEST_CASE("g generates the multiplicative group and omega is a primitive cube root") {
  for (int p : {7, 13, 19, 31}) {
    auto F = make_field(p, 1);
    std::set<u32> seen;
    u32 x = 1;
    for (u32 i = 0; i + 1 < F->q(); ++i, x = F->mul(x, F->g())) seen.insert(x);
    CHECK(seen.size() == F->q() - 1);
    // least generator
    for (u32 h = 2; h < F->g(); ++h) {
      u32 y = h, ord = 1;
      while (y != 1) y = F->mul(y, h), ++ord;
      CHECK(ord < F->q() - 1);
    }
    REQUIRE(F->has_mu3());
    const u32 w = F->omega();
    CHECK(w != 1);
    CHECK(F->mul(F->mul(w, w), w) == 1);
    CHECK(w == F->pow(F->g(), (F->q() - 1) / 3));
  }
}

TEST_CASE("cube roots of unity exist exactly when 3 divides q - 1") {
  CHECK_FALSE(make_field(11, 1)->has_mu3());
  CHECK_FALSE(make_field(5, 1)->has_mu3());
  CHECK(make_field(5, 2)->has_mu3());
  CHECK(make_field(7, 1)->has_mu3());
}

TEST_CASE("characters") {
  auto F = make_field(19, 1);
  std::set<u32> squares;
  for (u32 x = 1; x < 19; ++x) squares.insert(F->mul(x, x));
  for (u32 a = 1; a < 19; ++a) {
    CHECK(F->chi(a) == (squares.count(a) ? 1 : -1));
    const int j = F->cubic_exp(a);
    CHECK(F->pow(a, 6) == F->pow(F->omega(), j));
  }
  CHECK(F->chi(0) == 0);
  CHECK(F->cubic_exp(0) == -1);
}

TEST_CASE("field construction errors") {
  CHECK_THROWS_AS(make_field(2, 1), Error);
  CHECK_THROWS_AS(make_field(9, 1), Error);
  try {
    make_field(15, 1);
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotPrime);
  }
  try {
    make_field(2, 1);
  } catch (const Error& e) {
    CHECK((e.code() == Err::EvenCharacteristic || e.code() == Err::ForbiddenCharacteristic));
  }
  CHECK_THROWS_AS(make_field(37, 2), Error);  // q above the table limit
}
