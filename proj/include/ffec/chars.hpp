#pragma once

#include "ffec/poly.hpp"

namespace ffec {

// (F/P) in {-1, 0, 1} for a monic irreducible P.
int quad_symbol(const Field& K, const Poly& F, const Poly& P);

// Product of quad_symbol over the factorization of monic nonconstant G.
int jacobi_quad(const Field& K, const Poly& F, const Poly& G);

// j in {0, 1, 2} with F^((|P|-1)/3) = omega^j mod P, or -1 when P | F.
int cubic_symbol(const Field& K, const Poly& F, const Poly& P);

}  // namespace ffec
