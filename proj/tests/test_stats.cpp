#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>

#include "ffec/stats.hpp"
#include "oracle.hpp"

using namespace ffec;

namespace {
FieldPtr F7() { return make_field(7, 1); }
Curve base_E(const FieldPtr& F) { return Curve(F, parse_poly(*F, "4"), parse_poly(*F, "0,0,0,1")); }
Curve base_Et(const FieldPtr& F) { return Curve(F, Poly{}, parse_poly(*F, "1,0,1")); }
}  // namespace

TEST_CASE("orthogonal baseline") {
  CHECK(rmt_baseline(10, TestFunction::fejer(1.0)) == doctest::Approx(1.4).epsilon(1e-12));
  double prev = -1;
  for (double a = 0.2; a <= 1.0; a += 0.1) {
    const double r = rmt_baseline(12, TestFunction::fejer(a));
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("test functions: f is the inverse transform of fhat") {
  for (const TestFunction f : {TestFunction::fejer(0.9), TestFunction::truncated_gaussian(0.8, 1.3),
                               TestFunction::truncated_gaussian(0.9, 0.25)}) {
    for (double x : {0.0, 0.3, 1.7, 5.25, 40.3}) {
      // Simpson on [-alpha, alpha]
      const int n = 20000;
      const double h = 2 * f.alpha / n;
      double s = 0;
      for (int i = 0; i <= n; ++i) {
        // endpoints as limits from inside the support
        const double y = std::clamp(-f.alpha + i * h, -f.alpha * (1 - 1e-15), f.alpha * (1 - 1e-15));
        const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        s += w * f.fhat(y) * std::cos(2 * M_PI * x * y);
      }
      CHECK(f.f(x) == doctest::Approx(s * h / 3).epsilon(1e-7));
    }
    CHECK(f.fhat(f.alpha) == 0);
    CHECK(f.fhat(-0.3) == f.fhat(0.3));
  }
}

TEST_CASE("dev inner sum: closed form equals the series") {
  for (u64 Q : {7ull, 49ull, 343ull})
    for (i64 t = -(i64)std::floor(2 * std::sqrt((double)Q)); t * t <= 4 * (i64)Q; ++t)
      CHECK(dev_inner_good(t, Q) == doctest::Approx(dev_inner_series(t, Q, 200)).epsilon(1e-12));
}

TEST_CASE("lambda moments equal direct cubic character sums") {
  auto F = F7();
  const Curve Et = base_Et(F);
  for (int m = 1; m <= 2; ++m) {
    mpz_class s = 0;
    u64 n = 0;
    for (const Poly& P : oracle::irreducibles_slow(*F, m)) {
      s += oracle::naive_lambda(Et, P).norm();
      ++n;
    }
    // |lambda|^2 = |Lambda|^2 / q^m
    mpq_class want(s * m, mpz_pow(7, 2 * m));
    want.canonicalize();
    const LambdaMoment r = lambda_moment(Et, m);
    CHECK(r.value == want);
    CHECK(r.primes == n);
  }
  CHECK(lambda_moment(Et, 1).value == 1);
  CHECK(lambda_moment(Et, 2).value == mpq_class(40, 49));
}

TEST_CASE("family trace averages: both methods and a per-member oracle") {
  auto F = F7();
  QuadFamilySpec s{base_E(F)};
  s.N = 2;
  QuadFamily fam(s, 2);
  for (int n = 1; n <= 4; ++n) {
    const TraceAverage a = average_trace(fam, n, TraceMethod::Both);
    CHECK(a.lpoly == a.primesum);
    mpq_class want = 0;
    for (size_t i = 0; i < fam.size(); ++i) want += mpq_class(trace_via_primes(fam.curve(i), n), mpz_pow(7, n));
    want /= (unsigned long)fam.size();
    CHECK(a.value == want);
  }
  CubicFamilySpec cs{base_Et(F)};
  cs.N = 2;
  CubicFamily cf(cs, 3);
  for (int n = 1; n <= 3; ++n) {
    const TraceAverage a = average_trace(cf, n);
    CHECK(a.lpoly == a.primesum);
  }
}

TEST_CASE("explicit formula: both sides agree on single spectra") {
  auto F = F7();
  const TestFunction f = TestFunction::fejer(0.9);
  const OneLevelMember a = one_level(l_polynomial(base_Et(F)), f);
  CHECK(std::abs(a.trace_side - a.eigen_side) < 1e-8);
  const OneLevelMember b = one_level(l_polynomial(base_E(F)), TestFunction::truncated_gaussian(0.9, 1.0));
  CHECK(std::abs(b.trace_side - b.eigen_side) < 1e-8);
  CHECK(b.symmetry_err < 1e-9);
}

TEST_CASE("parallel_for visits each index once") {
  for (int jobs : {1, 2, 5}) {
    std::vector<std::atomic<int>> hit(1000);
    parallel_for(hit.size(), jobs, [&](size_t i) { hit[i]++; });
    for (auto& h : hit) CHECK(h.load() == 1);
  }
}

TEST_CASE("exact identity suite passes") {
  auto F = F7();
  const Curve E = base_E(F), Et = base_Et(F);
  for (const auto& r : identity_suite(E, &Et, 2, 5, 3)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.pass);
    CHECK(r.checked > 0);
  }
}
