#include <doctest.h>

#include "ffec/chars.hpp"
#include "oracle.hpp"

using namespace ffec;

TEST_CASE("quadratic symbol equals the square test") {
  auto F = make_field(7, 1);
  for (int d = 1; d <= 2; ++d)
    for (const Poly& P : oracle::irreducibles_slow(*F, d)) {
      const auto chi = oracle::quad_chars(*F, P);
      for (const auto& [a, v] : chi) CHECK(quad_symbol(*F, a, P) == v);
    }
}

TEST_CASE("quadratic reciprocity for monic coprime polynomials") {
  auto F = make_field(7, 1);
  // (A/B)(B/A) = (-1)^((q-1)/2 deg A deg B) for monic coprime A, B
  for (u64 i = 0; i < 343; i += 13)
    for (u64 j = 0; j < 49; ++j) {
      // degrees (3, 1) give sign (-1)^9, degrees (3, 2) give (-1)^18
      const int dB = j < 7 ? 1 : 2;
      const Poly A = monic_at(*F, 3, i), B = monic_at(*F, dB, dB == 1 ? j : j - 7);
      if (deg(gcd(*F, A, B)) > 0) continue;
      CHECK(jacobi_quad(*F, A, B) * jacobi_quad(*F, B, A) == (dB == 1 ? -1 : 1));
    }
  auto G = make_field(13, 1);
  for (u64 i = 0; i < 169; i += 7)
    for (u64 j = 0; j < 13; ++j) {
      const Poly A = monic_at(*G, 2, i), B = monic_at(*G, 1, j);
      if (deg(gcd(*G, A, B)) > 0) continue;
      CHECK(jacobi_quad(*G, A, B) * jacobi_quad(*G, B, A) == 1);
    }
}

TEST_CASE("cubic symbol equals the definition by exponentiation") {
  for (int p : {7, 13}) {
    auto F = make_field(p, 1);
    for (int d = 1; d <= 2; ++d)
      for (const Poly& P : oracle::irreducibles_slow(*F, d))
        for (const auto& a : oracle::residues(*F, d)) CHECK(cubic_symbol(*F, a, P) == oracle::cubic_symbol_slow(*F, a, P));
  }
}

TEST_CASE("cubic symbol needs cube roots of unity") {
  auto F = make_field(11, 1);
  CHECK_THROWS_AS(cubic_symbol(*F, Poly{2}, Poly{0, 1}), Error);
}
