#include "ffec/curve.hpp"

#include <algorithm>

namespace ffec {

const char* red_name(RedType t) {
  switch (t) {
    case RedType::Good: return "good";
    case RedType::Multiplicative: return "multiplicative";
    case RedType::Additive: return "additive";
  }
  return "?";
}

Poly discriminant(const Field& F, const Poly& A, const Poly& B) {
  Poly a3 = scale(F, pow(F, A, 3), F.from_int(4));
  Poly b2 = scale(F, mul(F, B, B), F.from_int(27));
  return add(F, a3, b2);
}

namespace {
int ceil_div(int x, int y) { return x <= 0 ? 0 : (x + y - 1) / y; }
}  // namespace

InfinityData infinity_data(const Poly& A, const Poly& B, int deg_delta) {
  InfinityData I;
  const int a = A.empty() ? -1 : deg(A);
  const int b = B.empty() ? -1 : deg(B);
  I.k = std::max(a < 0 ? 0 : ceil_div(a, 4), b < 0 ? 0 : ceil_div(b, 6));
  I.vA = A.empty() ? kInfVal : 4 * I.k - a;
  I.vB = B.empty() ? kInfVal : 6 * I.k - b;
  I.vD = 12 * I.k - deg_delta;
  I.a0 = I.vA == 0 ? lead(A) : 0;
  I.b0 = I.vB == 0 ? lead(B) : 0;
  I.ua = A.empty() ? 0 : lead(A);
  I.ub = B.empty() ? 0 : lead(B);
  if (I.vD == 0) {
    I.type = RedType::Good;
    I.f = 0;
  } else if (I.vA == 0) {
    I.type = RedType::Multiplicative;
    I.f = 1;
  } else {
    I.type = RedType::Additive;
    I.f = 2;
  }
  return I;
}

void finish_profile(const Field& F, ReductionProfile& prof) {
  std::sort(prof.bad.begin(), prof.bad.end(),
            [](const BadPrime& x, const BadPrime& y) { return cmp_poly(x.P, y.P) < 0; });
  prof.M = Poly{1};
  prof.Adot = Poly{1};
  for (const auto& bp : prof.bad) {
    if (bp.type == RedType::Multiplicative)
      prof.M = mul(F, prof.M, bp.P);
    else
      prof.Adot = mul(F, prof.Adot, bp.P);
  }
  prof.n_frak = deg(prof.M) + 2 * deg(prof.Adot) + prof.inf.f - 4;
}

ReductionProfile reduction_profile(const Curve& E) {
  const Field& F = E.field();
  ReductionProfile prof;
  Factorization fac = factorize(F, E.Delta());
  for (const auto& [P, e] : fac.factors) {
    BadPrime bp;
    bp.P = P;
    bp.vD = e;
    bp.vA = E.A().empty() ? kInfVal : valuation(F, E.A(), P);
    bp.vB = E.B().empty() ? kInfVal : valuation(F, E.B(), P);
    require(bp.vA < 4 || bp.vB < 6, Err::NonMinimalModel,
            "model is not minimal at " + format_poly(P));
    bp.type = bp.vA == 0 ? RedType::Multiplicative : RedType::Additive;
    prof.bad.push_back(bp);
  }
  prof.inf = infinity_data(E.A(), E.B(), deg(E.Delta()));
  finish_profile(F, prof);
  return prof;
}

Curve::Curve(FieldPtr F, Poly A, Poly B) : F_(std::move(F)), A_(std::move(A)), B_(std::move(B)) {
  trim(A_);
  trim(B_);
  D_ = discriminant(*F_, A_, B_);
  require(!D_.empty(), Err::InvalidArgument, "singular curve (zero discriminant)");
  prof_ = reduction_profile(*this);
}

Curve::Curve(FieldPtr F, Poly A, Poly B, Poly Delta, ReductionProfile prof)
    : F_(std::move(F)), A_(std::move(A)), B_(std::move(B)), D_(std::move(Delta)), prof_(std::move(prof)) {}

namespace {
const PrimeTable& table_for(const Curve& E, const Poly& P, size_t& idx) {
  require(deg(P) >= 1 && lead(P) == 1, Err::InvalidArgument, "prime must be monic nonconstant");
  auto T = prime_table(E.field_ptr(), deg(P));
  idx = T->find(P);
  require(idx < T->size(), Err::InvalidArgument, format_poly(P) + " is not irreducible");
  return *T;
}
}  // namespace

int ap_trace(const Curve& E, const Poly& P) {
  size_t i = 0;
  const PrimeTable& T = table_for(E, P, i);
  const ExtField& K = T.ext();
  K.ensure_trace_tables();
  const u32 th = T.theta(i);
  return K.trace(K.eval_log(E.A(), th), K.eval_log(E.B(), th));
}

i64 point_count(const Curve& E, const Poly& P) {
  return (i64)ipow(E.field().q(), (unsigned)deg(P)) + 1 - ap_trace(E, P);
}

Eisenstein eis_mul(const Eisenstein& x, const Eisenstein& y) {
  return {x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a - x.b * y.b};
}

Eisenstein eis_conj(const Eisenstein& x) { return {x.a - x.b, -x.b}; }

Eisenstein eis_rotate(const Eisenstein& x, int j) {
  j = ((j % 3) + 3) % 3;
  Eisenstein r = x;
  for (int i = 0; i < j; ++i) r = {-r.b, r.a - r.b};
  return r;
}

Eisenstein lambda_P(const Curve& Et, const Poly& P) {
  require(Et.is_mordell(), Err::NotMordellCurve, "lambda_P needs A = 0");
  require(Et.field().has_mu3(), Err::NoCubeRootsOfUnity, "3 does not divide q-1");
  size_t i = 0;
  const PrimeTable& T = table_for(Et, P, i);
  const ExtField& K = T.ext();
  K.ensure_mordell_table();
  auto uv = K.mordell_sum(K.eval_log(Et.B(), T.theta(i)));
  return {uv.first, uv.second};
}

Curve quadratic_twist(const Curve& E, const Poly& D) {
  const Field& F = E.field();
  require(!D.empty() && lead(D) == 1, Err::InvalidArgument, "twist must be monic");
  require(is_squarefree(F, D), Err::NotSquarefree, "twist is not square-free");
  require(deg(gcd(F, D, E.Delta())) == 0, Err::NotCoprimeToDiscriminant,
          "twist shares a factor with the discriminant");
  Poly D2 = mul(F, D, D);
  return Curve(E.field_ptr(), mul(F, E.A(), D2), mul(F, E.B(), mul(F, D2, D)));
}

Curve cubic_twist(const Curve& Et, const Poly& D) {
  const Field& F = Et.field();
  require(Et.is_mordell(), Err::NotMordellCurve, "cubic twist needs A = 0");
  require(!D.empty() && lead(D) == 1, Err::InvalidArgument, "twist must be monic");
  Factorization fac = factorize(F, D);
  for (const auto& pe : fac.factors) require(pe.second <= 2, Err::NotCubefree, "twist is not cube-free");
  require(deg(gcd(F, D, Et.B())) == 0, Err::NotCoprimeToB, "twist shares a factor with B");
  return Curve(Et.field_ptr(), Poly{}, mul(F, Et.B(), mul(F, D, D)));
}

Curve quadratic_twist_member(const Curve& E, const Poly& D, const Factorization& facD) {
  const Field& F = E.field();
  ReductionProfile prof = E.profile();
  for (const auto& [P, e] : facD.factors) {
    BadPrime bp;
    bp.P = P;
    bp.type = RedType::Additive;
    bp.vA = E.A().empty() ? kInfVal : valuation(F, E.A(), P) + 2;
    bp.vB = E.B().empty() ? kInfVal : valuation(F, E.B(), P) + 3;
    bp.vD = 6;
    prof.bad.push_back(bp);
  }
  Poly D2 = mul(F, D, D);
  Poly A = mul(F, E.A(), D2), B = mul(F, E.B(), mul(F, D2, D));
  Poly Delta = mul(F, E.Delta(), pow(F, D2, 3));
  prof.inf = infinity_data(A, B, deg(Delta));
  finish_profile(F, prof);
  return Curve(E.field_ptr(), std::move(A), std::move(B), std::move(Delta), std::move(prof));
}

Curve cubic_twist_member(const Curve& Et, const Poly& D, const Factorization& facD) {
  const Field& F = Et.field();
  ReductionProfile prof = Et.profile();
  for (const auto& [P, e] : facD.factors) {
    BadPrime bp;
    bp.P = P;
    bp.type = RedType::Additive;
    bp.vA = kInfVal;
    bp.vB = 2 * e;
    bp.vD = 4 * e;
    prof.bad.push_back(bp);
  }
  Poly B = mul(F, Et.B(), mul(F, D, D));
  Poly Delta = scale(F, mul(F, B, B), F.from_int(27));
  prof.inf = infinity_data(Poly{}, B, deg(Delta));
  finish_profile(F, prof);
  return Curve(Et.field_ptr(), Poly{}, std::move(B), std::move(Delta), std::move(prof));
}

}  // namespace ffec
