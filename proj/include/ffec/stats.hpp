#pragma once

#include <gmpxx.h>

#include <array>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

#include "ffec/families.hpp"
#include "ffec/symlfun.hpp"

namespace ffec {

inline int eta2(int n) { return n % 2 == 0 ? 1 : 0; }
inline int eta3(int n) { return n % 3 == 0 ? 1 : 0; }

// Runs fn(i) for i < count on up to jobs threads.  Each index is handled by
// exactly one call, so results written per index do not depend on jobs.
void parallel_for(size_t count, int jobs, const std::function<void(size_t)>& fn);

// Even test function with fhat supported in (-alpha, alpha).
struct TestFunction {
  enum Kind { Fejer, TruncatedGaussian };
  Kind kind = Fejer;
  double alpha = 0.9;
  double sigma = 1.0;  // TruncatedGaussian only

  static TestFunction fejer(double alpha);
  static TestFunction truncated_gaussian(double alpha, double sigma);
  double fhat(double x) const;
  double f(double x) const;
  std::string describe() const;
};

double rmt_baseline(int nn, const TestFunction& f);

inline LPolyOptions lean_options() {
  LPolyOptions o;
  o.lean = true;
  return o;
}

enum class TraceMethod { LPoly, PrimeSum, Both };
const char* method_name(TraceMethod m);
TraceMethod parse_method(const std::string& s);

// Per-prime character tallies over a family, for primes of one degree.
// Quadratic: c[0] = #{(D/P) = 1}, c[1] = #{(D/P) = -1}.
// Cubic: c[j] = #{(D/P)_3 = omega^j}.
using Tally = std::array<u32, 3>;

// A twist family with lazily built member data.  Member L-polynomials come
// from tables assembled on a shared TwistBase.
class QuadFamily {
 public:
  explicit QuadFamily(const QuadFamilySpec& s, int jobs = 1);

  const QuadFamilySpec& spec() const { return spec_; }
  std::string id() const;
  size_t size() const { return members_.size(); }
  const std::vector<QuadMember>& members() const { return members_; }
  const Curve& curve(size_t i) const { return curves_[i]; }
  int jobs() const { return jobs_; }

  // Member L-polynomials for the given options, cached per option pair.
  const std::vector<LPolynomial>& l_polys(const LPolyOptions& opt = lean_options()) const;
  const std::vector<Tally>& tally(int d) const;
  // Base curve tables with per-prime traces up to degree K.
  std::shared_ptr<const TwistBase> base(int K) const;

 private:
  QuadFamilySpec spec_;
  int jobs_;
  std::vector<QuadMember> members_;
  std::vector<Curve> curves_;
  mutable std::recursive_mutex mu_;
  mutable std::shared_ptr<const TwistBase> base_;
  mutable std::map<std::pair<int, bool>, std::vector<LPolynomial>> lp_;
  mutable std::map<int, std::vector<Tally>> tally_;
};

class CubicFamily {
 public:
  explicit CubicFamily(const CubicFamilySpec& s, int jobs = 1);

  const CubicFamilySpec& spec() const { return spec_; }
  std::string id() const;
  size_t size() const { return members_.size(); }
  const std::vector<CubicMember>& members() const { return members_; }
  const Curve& curve(size_t i) const { return curves_[i]; }
  int jobs() const { return jobs_; }

  const std::vector<LPolynomial>& l_polys(const LPolyOptions& opt = lean_options()) const;
  const std::vector<Tally>& tally(int d) const;
  std::shared_ptr<const TwistBase> base(int K) const;

 private:
  CubicFamilySpec spec_;
  int jobs_;
  std::vector<CubicMember> members_;
  std::vector<Curve> curves_;
  mutable std::recursive_mutex mu_;
  mutable std::shared_ptr<const TwistBase> base_;
  mutable std::map<std::pair<int, bool>, std::vector<LPolynomial>> lp_;
  mutable std::map<int, std::vector<Tally>> tally_;
};

// Unnormalized cubic sums Lambda_P = sum_F psi(F^2 - B) for every prime of
// degree d, in prime-table order.
struct LambdaTable {
  std::vector<Eisenstein> lam;
  std::vector<uint8_t> divides_B;
};
LambdaTable lambda_table(const Curve& Et, int d);

struct TraceAverage {
  std::string family;
  int n = 0;
  size_t size = 0;
  TraceMethod method = TraceMethod::Both;
  mpq_class value;                 // <Tr Theta^n>, denominator divides q^n |family|
  mpq_class lpoly, primesum;       // per method, when run
  double main_term = 0;
  double residual = 0;             // value - main_term
};

class QuadTheory;
// Main term from th when given, else from a theory built for this n.
TraceAverage average_trace(const QuadFamily& fam, int n, TraceMethod m = TraceMethod::Both,
                           const QuadTheory* th = nullptr);
TraceAverage average_trace(const CubicFamily& fam, int n, TraceMethod m = TraceMethod::Both);

// eta2(n)(1 + Tr(Theta^(n/2), sym^2 E) / q^(n/4) + Dn / q^(n/2)) + mp + inf.
// Infinity never divides D, so its member trace enters exactly (inf) and the
// base trace there is moved into Dn.
struct QuadMainTerm {
  int n = 0;
  int eta = 0;
  double sym2 = 0;  // Tr(Theta^(n/2), sym^2 E) / q^(n/4)
  double Dn = 0;
  double good = 0, bad = 0;  // the two prime sums inside Dn
  double mp = 0;   // fixed-sign contribution of M when M is a prime of odd index
  double inf = 0;
  double total = 0;
};

class QuadTheory {
 public:
  // Tables for primes of degree <= K.
  QuadTheory(const QuadFamilySpec& s, int K, const SymPolicy& pol = {});
  QuadMainTerm expected_trace(int n) const;
  const SymLPolynomial& sym2() const { return L2_; }

 private:
  QuadFamilySpec spec_;
  SymPolicy pol_;
  FrobTable ft_;
  FrobTable member_inf_;
  std::vector<PlaceData> bad_;
  SymLPolynomial L2_;
  std::vector<mpz_class> sig2_;
};

QuadMainTerm quad_expected_trace(const QuadFamilySpec& s, int n, const SymPolicy& pol = {});

struct CubicTerms {
  int n = 0;
  double M = 0, S = 0, E = 0;  // with exact coprime ratios and E_P
  double M0 = 0, S0 = 0;       // the same prime sums without ratios
  double D1 = 0, D2 = 0;
  double main = 0;  // M0 + S0 + (D1 + D2) / q^(n/2)
  double mse = 0;   // M + S + E
};
CubicTerms cubic_secondary_terms(const CubicFamily& fam, int n);

struct LambdaMoment {
  int m = 0;
  mpq_class value;  // (m / q^m) sum_{deg P = m} |lambda_P|^2
  double deviation = 0;  // value - 1/2
  u64 primes = 0;
};
LambdaMoment lambda_moment(const Curve& Et, int m);

struct MomentFit {
  std::vector<LambdaMoment> rows;
  double C = 0;  // least C with |dev_m| <= C q^(-m/3) for every row
};
MomentFit lambda_moment_fit(const Curve& Et, int m_max);

struct ConjectureRow {
  int n = 0, N = 0;
  mpq_class lhs;
  double rhs = 0, gap = 0, scaled_gap = 0;  // scaled by q^(n/2)
  double sym3 = 0, tr1 = 0;
};
ConjectureRow conjecture_probe(const CubicFamily& fam, int n);

// One spectrum against a test function, both sides of the explicit formula.
struct OneLevelMember {
  bool degenerate = false;  // n = 0
  double trace_side = 0, eigen_side = 0;
  double symmetry_err = 0;  // distance of the angle multiset from its negation
  double tail_bound = 0;    // bound on the eigen side's tail estimate
};
OneLevelMember one_level(const LPolynomial& L, const TestFunction& f);

struct OneLevelReport {
  std::string family;
  TestFunction f;
  size_t members = 0, degenerate = 0;
  int nn = 0;  // common member degree (0 if mixed)
  double trace_side = 0, eigen_side = 0, rmt = 0;
  double dev_over_N = 0;
  double residual = 0;    // trace_side - rmt
  size_t eigen_members = 0;       // members whose zeros were computed
  double eigen_trace_side = 0;    // trace-side average over those members
  double max_gap = 0;     // max per-member |trace - eigen|
  double max_symmetry_err = 0;
};

struct DevReport {
  double value = 0;
  double log_deriv = 0, good = 0, bad = 0;
  double tail_bound = 0;
  int max_prime_degree = 0;
};
DevReport dev_quad(const Curve& E, const TestFunction& f, int max_prime_degree, const SymPolicy& pol = {});
// sum_{d >= 1} a*_{1,P^(2d)} / |P|^d for a good P with trace t.
double dev_inner_good(i64 t, u64 Q);
double dev_inner_series(i64 t, u64 Q, int terms);

// eigen_members caps how many members get their zeros computed (0: all).
OneLevelReport one_level_density(const QuadFamily& fam, const TestFunction& f, const DevReport* dev = nullptr,
                                 size_t eigen_members = 0);
OneLevelReport one_level_density(const CubicFamily& fam, const TestFunction& f, size_t eigen_members = 0);

struct IdentityResult {
  std::string name;
  bool pass = false;
  u64 checked = 0;
  std::string detail;
};
// Exact local identities over every prime of degree <= max_deg and a batch
// of random twists.  Et may be null when no Mordell curve is at hand.
std::vector<IdentityResult> identity_suite(const Curve& E, const Curve* Et, int max_deg = 2, int twists = 20,
                                           u64 seed = 1, const SymPolicy& pol = {});

}  // namespace ffec
