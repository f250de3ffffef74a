#pragma once

#include <gmpxx.h>

#include <complex>
#include <vector>

#include "ffec/common.hpp"

namespace ffec {

// Root structure of an integral polynomial sum c_j v^j whose zeros should lie
// on |v| = q^(-h/2) (h = 2 for L(E), h = m + 1 for sym^m).
//
// With s = ceil(h/2) and w = q^s v the zeros sit on |w|^2 = q' (q' = 1 or q).
// After removing the real zeros w = +-sqrt(q') the polynomial is w^r R(w + q'/w),
// and the zeros are on the circle iff R has all its roots in [-2 sqrt q', 2 sqrt q'],
// which is decided exactly by Sturm sequences on the square-free parts.
struct RootReport {
  int n = 0;
  int eps = 0;            // reflection sign, 0 when the reflection fails
  bool rh = false;        // every zero certified on the circle
  int on_circle = 0;      // zeros certified on the circle, with multiplicity
  double max_dev = 0.0;   // max | |v| q^(h/2) - 1 | over computed zeros
  std::vector<double> angles;  // arguments of the zeros w, sorted, in (-pi, pi]
};

RootReport analyze_roots(const std::vector<mpz_class>& c, u32 q, int h, bool want_angles);

// Zeros v as complex numbers (needs want_angles).
std::vector<std::complex<double>> zeros_from_report(const RootReport& r, u32 q, int h);

}  // namespace ffec
