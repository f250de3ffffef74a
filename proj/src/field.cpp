#include "ffec/field.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace ffec {

const char* err_name(Err e) {
  switch (e) {
    case Err::Ok: return "Ok";
    case Err::NotPrime: return "NotPrime";
    case Err::ForbiddenCharacteristic: return "ForbiddenCharacteristic";
    case Err::NoIrreducibleFound: return "NoIrreducibleFound";
    case Err::NotCubeRootOfUnity: return "NotCubeRootOfUnity";
    case Err::ZeroPolynomial: return "ZeroPolynomial";
    case Err::EvenCharacteristic: return "EvenCharacteristic";
    case Err::ConstantModulus: return "ConstantModulus";
    case Err::NoCubeRootsOfUnity: return "NoCubeRootsOfUnity";
    case Err::NonMinimalModel: return "NonMinimalModel";
    case Err::IsotrivialCurve: return "IsotrivialCurve";
    case Err::NotMordellCurve: return "NotMordellCurve";
    case Err::NotSquarefree: return "NotSquarefree";
    case Err::NotCoprimeToDiscriminant: return "NotCoprimeToDiscriminant";
    case Err::NotCubefree: return "NotCubefree";
    case Err::NotCoprimeToB: return "NotCoprimeToB";
    case Err::DegreeMismatch: return "DegreeMismatch";
    case Err::BadPrimeUnsupported: return "BadPrimeUnsupported";
    case Err::BadPrime: return "BadPrime";
    case Err::DegreeDetectionFailed: return "DegreeDetectionFailed";
    case Err::UnsupportedPower: return "UnsupportedPower";
    case Err::EvaluationAtRoot: return "EvaluationAtRoot";
    case Err::SignSplitUndefined: return "SignSplitUndefined";
    case Err::EmptyFamily: return "EmptyFamily";
    case Err::MethodDisagreement: return "MethodDisagreement";
    case Err::PolicyRequired: return "PolicyRequired";
    case Err::DegenerateDegree: return "DegenerateDegree";
    case Err::ParseError: return "ParseError";
    case Err::UnsupportedFeature: return "UnsupportedFeature";
    case Err::BadPolynomialLiteral: return "BadPolynomialLiteral";
    case Err::InvalidArgument: return "InvalidArgument";
    case Err::TooLarge: return "TooLarge";
    case Err::Internal: return "Internal";
  }
  return "Unknown";
}

std::string i128_str(i128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
  std::string s;
  while (u) {
    s.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return std::string(s.rbegin(), s.rend());
}

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<u64> prime_factors_u64(u64 n) {
  std::vector<u64> out;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

namespace {

// Minimal dense polynomial helpers over F_p, used only while bootstrapping F_q.
using PP = std::vector<u32>;

void pp_trim(PP& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

PP pp_mod(PP a, const PP& f, u32 p) {
  pp_trim(a);
  const size_t n = f.size() - 1;
  u32 inv_lead = 1;
  for (u32 x = 1; x < p; ++x)
    if ((u64)x * f.back() % p == 1) inv_lead = x;
  while (a.size() > n) {
    u32 c = (u32)((u64)a.back() * inv_lead % p);
    size_t shift = a.size() - 1 - n;
    for (size_t i = 0; i <= n; ++i)
      a[shift + i] = (u32)((a[shift + i] + (u64)(p - c) * f[i]) % p);
    pp_trim(a);
  }
  return a;
}

PP pp_mulmod(const PP& a, const PP& b, const PP& f, u32 p) {
  if (a.empty() || b.empty()) return {};
  PP r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (u32)((r[i + j] + (u64)a[i] * b[j]) % p);
  return pp_mod(r, f, p);
}

PP pp_gcd(PP a, PP b, u32 p) {
  pp_trim(a);
  pp_trim(b);
  while (!b.empty()) {
    PP r = pp_mod(a, b, p);
    a = b;
    b = r;
  }
  return a;
}

bool pp_irreducible(const PP& f, u32 p) {
  const int n = (int)f.size() - 1;
  PP x = {0, 1};
  PP xp = x;
  for (int i = 1; i <= n / 2; ++i) {
    PP acc = {1};
    PP base = xp;
    u64 e = p;
    while (e) {
      if (e & 1) acc = pp_mulmod(acc, base, f, p);
      base = pp_mulmod(base, base, f, p);
      e >>= 1;
    }
    xp = acc;
    PP d = xp;
    d.resize(std::max<size_t>(d.size(), 2), 0);
    d[1] = (d[1] + p - 1) % p;
    pp_trim(d);
    PP g = pp_gcd(f, d, p);
    if (g.size() > 1) return false;
  }
  return true;
}

}  // namespace

FieldPtr Field::make(int p, int m) {
  require(m >= 1, Err::InvalidArgument, "extension degree must be >= 1");
  require(p >= 2 && is_prime_u64((u64)p), Err::NotPrime, std::to_string(p) + " is not prime");
  require(p != 2 && p != 3, Err::ForbiddenCharacteristic, "characteristic 2 and 3 are excluded");
  u64 q = 1;
  for (int i = 0; i < m; ++i) {
    q *= (u64)p;
    require(q <= kMaxQ, Err::TooLarge, "field size above " + std::to_string(kMaxQ));
  }
  std::shared_ptr<Field> F(new Field());
  F->p_ = p;
  F->m_ = m;
  F->q_ = (u32)q;
  const u32 Q = (u32)q;
  const u32 up = (u32)p;

  // Enumerate vectors (c0..c_{m-1}) with c0 most significant.
  auto key_vec = [&](u64 idx) {
    PP c(m, 0);
    for (int i = m - 1; i >= 0; --i) {
      c[i] = (u32)(idx % up);
      idx /= up;
    }
    return c;
  };
  if (m == 1) {
    F->modulus_ = {0, 1};
  } else {
    bool found = false;
    for (u64 idx = 0; idx < q && !found; ++idx) {
      PP f = key_vec(idx);
      f.push_back(1);
      if (f[0] == 0) continue;
      if (pp_irreducible(f, up)) {
        F->modulus_ = f;
        found = true;
      }
    }
    require(found, Err::NoIrreducibleFound, "no irreducible modulus");
  }

  auto to_code = [&](const PP& c) {
    u32 code = 0, w = 1;
    for (size_t i = 0; i < c.size(); ++i) {
      code += c[i] * w;
      w *= up;
    }
    return code;
  };
  auto from_code = [&](u32 code) {
    PP c(m, 0);
    for (int i = 0; i < m; ++i) {
      c[i] = code % up;
      code /= up;
    }
    pp_trim(c);
    return c;
  };
  auto raw_mul = [&](u32 a, u32 b) -> u32 {
    if (m == 1) return (u32)((u64)a * b % up);
    PP r = pp_mulmod(from_code(a), from_code(b), F->modulus_, up);
    r.resize(m, 0);
    return to_code(r);
  };

  F->add_.assign((size_t)Q * Q, 0);
  F->neg_.assign(Q, 0);
  for (u32 a = 0; a < Q; ++a) {
    PP da(m), na(m);
    u32 t = a;
    for (int i = 0; i < m; ++i) {
      da[i] = t % up;
      t /= up;
      na[i] = (up - da[i]) % up;
    }
    F->neg_[a] = to_code(na);
    for (u32 b = 0; b < Q; ++b) {
      u32 code = 0, w = 1, s = b;
      for (int i = 0; i < m; ++i) {
        code += ((da[i] + s % up) % up) * w;
        s /= up;
        w *= up;
      }
      F->add_[(size_t)a * Q + b] = code;
    }
  }

  const u64 n = q - 1;
  const auto ell = prime_factors_u64(n);
  auto raw_pow = [&](u32 a, u64 e) {
    u32 r = 1, b = a;
    while (e) {
      if (e & 1) r = raw_mul(r, b);
      b = raw_mul(b, b);
      e >>= 1;
    }
    return r;
  };
  bool gfound = false;
  for (u64 idx = 0; idx < q && !gfound; ++idx) {
    u32 c = to_code(key_vec(idx));
    if (c == 0) continue;
    if (raw_pow(c, n) != 1) continue;
    bool gen = true;
    for (u64 l : ell)
      if (raw_pow(c, n / l) == 1) gen = false;
    if (gen) {
      F->g_ = c;
      gfound = true;
    }
  }
  require(gfound, Err::Internal, "no generator");
  F->exp_.assign(2 * n + 1, 0);
  F->log_.assign(Q, 0);
  u32 x = 1;
  for (u64 k = 0; k < 2 * n + 1; ++k) {
    F->exp_[k] = x;
    if (k < n) F->log_[x] = (u32)k;
    x = raw_mul(x, F->g_);
  }
  F->has_mu3_ = (n % 3 == 0);
  return F;
}

FieldPtr make_field(int p, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, FieldPtr> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_pair(p, m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  FieldPtr F = Field::make(p, m);
  cache[key] = F;
  return F;
}

u32 Field::omega() const {
  require(has_mu3_, Err::NoCubeRootsOfUnity, "3 does not divide q-1");
  return exp_[(q_ - 1) / 3];
}

u32 Field::inv(u32 a) const {
  require(a != 0, Err::InvalidArgument, "inverse of zero");
  return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

u32 Field::pow(u32 a, u64 e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  return exp_[(u64)log_[a] * (e % (q_ - 1)) % (q_ - 1)];
}

u32 Field::from_int(i64 v) const {
  i64 r = v % p_;
  if (r < 0) r += p_;
  return (u32)r;
}

int Field::chi(u32 a) const {
  if (a == 0) return 0;
  return (log_[a] % 2 == 0) ? 1 : -1;
}

int Field::cubic_exp(u32 a) const {
  require(has_mu3_, Err::NoCubeRootsOfUnity, "3 does not divide q-1");
  if (a == 0) return -1;
  // a^((q-1)/3) = g^(log a (q-1)/3) = omega^(log a).
  return (int)(log_[a] % 3);
}

std::vector<u32> Field::digits(u32 a) const {
  std::vector<u32> d(m_);
  for (int i = 0; i < m_; ++i) {
    d[i] = a % (u32)p_;
    a /= (u32)p_;
  }
  return d;
}

std::complex<double> unity_power(int j) {
  j = ((j % 3) + 3) % 3;
  if (j == 0) return {1.0, 0.0};
  const double s = std::sqrt(3.0) / 2.0;
  return {-0.5, j == 1 ? s : -s};
}

std::complex<double> embed_unity(const Field& F, u32 e) {
  require(F.has_mu3(), Err::NoCubeRootsOfUnity, "3 does not divide q-1");
  if (e == 1) return unity_power(0);
  if (e == F.omega()) return unity_power(1);
  if (e == F.mul(F.omega(), F.omega())) return unity_power(2);
  fail(Err::NotCubeRootOfUnity, "element is not a cube root of unity");
}

}  // namespace ffec
