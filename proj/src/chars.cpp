#include "ffec/chars.hpp"

namespace ffec {

int quad_symbol(const Field& K, const Poly& F, const Poly& P) {
  require(K.q() % 2 == 1, Err::EvenCharacteristic, "quadratic symbol needs odd q");
  require(deg(P) >= 1, Err::ConstantModulus, "modulus must be nonconstant");
  Poly r = power_residue(K, F, monic(K, P), 2);
  if (r.empty()) return 0;
  require(r.size() == 1, Err::Internal, "quadratic symbol not +-1");
  if (r[0] == 1) return 1;
  require(r[0] == K.neg(1), Err::Internal, "quadratic symbol not +-1");
  return -1;
}

int jacobi_quad(const Field& K, const Poly& F, const Poly& G) {
  require(deg(G) >= 1, Err::ConstantModulus, "modulus must be nonconstant");
  Factorization fac = factorize(K, G);
  int s = 1;
  for (const auto& [P, e] : fac.factors) {
    const int v = quad_symbol(K, F, P);
    if (v == 0) return 0;
    if (e % 2 == 1) s *= v;
  }
  return s;
}

int cubic_symbol(const Field& K, const Poly& F, const Poly& P) {
  require(K.has_mu3(), Err::NoCubeRootsOfUnity, "3 does not divide q-1");
  require(deg(P) >= 1, Err::ConstantModulus, "modulus must be nonconstant");
  Poly r = power_residue(K, F, monic(K, P), 3);
  if (r.empty()) return -1;
  require(r.size() == 1, Err::Internal, "cubic symbol not a cube root of unity");
  const u32 w = K.omega();
  if (r[0] == 1) return 0;
  if (r[0] == w) return 1;
  require(r[0] == K.mul(w, w), Err::Internal, "cubic symbol not a cube root of unity");
  return 2;
}

}  // namespace ffec
