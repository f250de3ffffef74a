#include "ffec/ext.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

namespace ffec {

namespace {
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// In-place multidimensional DFT over (Z/p)^n, laid out by base-p code.
void dft(fftw_complex* a, int p, int n, int sign) {
  std::vector<int> dims(n, p);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lk(fftw_mutex());
    plan = fftw_plan_dft(n, dims.data(), a, a, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lk(fftw_mutex());
  fftw_destroy_plan(plan);
}

struct FftBuf {
  fftw_complex* p = nullptr;
  explicit FftBuf(size_t n) {
    p = (fftw_complex*)fftw_malloc(sizeof(fftw_complex) * n);
    require(p != nullptr, Err::TooLarge, "out of memory for character-sum tables");
  }
  ~FftBuf() { fftw_free(p); }
  FftBuf(const FftBuf&) = delete;
  FftBuf& operator=(const FftBuf&) = delete;
};

i64 round_checked(double x, const char* what) {
  double r = std::nearbyint(x);
  require(std::fabs(x - r) < 1e-4, Err::Internal, std::string("non-integral ") + what);
  return (i64)r;
}
}  // namespace

ExtField::ExtField(FieldPtr F, int e) : F_(std::move(F)), e_(e) {
  require(e >= 1, Err::InvalidArgument, "extension degree must be >= 1");
  const u32 q = F_->q();
  u64 Q = 1;
  for (int i = 0; i < e; ++i) {
    Q *= q;
    require(Q <= kMaxSize, Err::TooLarge,
            "F_{q^" + std::to_string(e) + "} exceeds the table limit");
  }
  Q_ = (u32)Q;
  N_ = Q_ - 1;
  const auto ell = prime_factors_u64(N_);

  // Least primitive polynomial in cmp_poly order.
  // The norm of a primitive root, (-1)^e f(0), generates F_q^*.
  std::vector<bool> gen0(q, false);
  for (u32 c = 1; c < q; ++c) {
    bool g = true;
    for (u64 l : prime_factors_u64(q - 1))
      if (F_->pow(c, (q - 1) / l) == 1) g = false;
    gen0[c] = g;
  }
  bool found = false;
  for (u64 idx = 0; idx < Q && !found; ++idx) {
    Poly f = monic_at(*F_, e, idx);
    const u32 nrm = (e % 2) ? F_->neg(f[0]) : f[0];
    if (nrm == 0 || !gen0[nrm] || !is_irreducible(*F_, f)) continue;
    bool prim = true;
    for (u64 l : ell) {
      if (powmod(*F_, poly_T(), N_ / l, f) == Poly{1}) {
        prim = false;
        break;
      }
    }
    if (prim) {
      modulus_ = f;
      found = true;
    }
  }
  require(found, Err::NoIrreducibleFound, "no primitive polynomial");

  // top digit t contributes -t * (f_0 .. f_{e-1}) after the shift.
  const u32 hi = Q_ / q;
  std::vector<std::vector<u32>> red(q, std::vector<u32>(e));
  for (u32 t = 0; t < q; ++t)
    for (int i = 0; i < e; ++i) red[t][i] = F_->neg(F_->mul(t, modulus_[i]));

  exp_.assign(N_, 0);
  log_.assign(Q_, N_);
  u32 x = 1;
  for (u32 k = 0; k < N_; ++k) {
    exp_[k] = x;
    require(log_[x] == N_, Err::Internal, "generator order too small");
    log_[x] = k;
    const u32 top = x / hi;
    u32 rest = (x % hi) * q;
    u32 y = 0, w = 1;
    for (int i = 0; i < e; ++i) {
      y += F_->add(rest % q, red[top][i]) * w;
      rest /= q;
      w *= q;
    }
    x = y;
  }
  require(x == 1, Err::Internal, "generator order mismatch");

  zech_.assign(N_, N_);
  for (u32 k = 0; k < N_; ++k) {
    const u32 c = exp_[k];
    const u32 d0 = c % q;
    const u32 c1 = c - d0 + F_->add(d0, 1);
    zech_[k] = log_[c1];
  }
  base_log_.assign(q, N_);
  for (u32 c = 0; c < q; ++c) base_log_[c] = log_[c];

  if (F_->has_mu3()) {
    const u32 w3 = exp_[N_ / 3];
    require(w3 < q, Err::Internal, "cube root of unity outside base field");
    cubic_scale_ = (w3 == F_->omega()) ? 1 : 2;
  }
}

void ExtField::ensure_trace_tables() const {
  std::lock_guard<std::mutex> lk(mu_);
  if (traces_built_) return;
  const int p = F_->p();
  const int n = F_->m() * e_;
  FftBuf chat(Q_), work(Q_);
  for (u32 c = 0; c < Q_; ++c) {
    chat.p[c][0] = chi(log_[c]);
    chat.p[c][1] = 0;
  }
  dft(chat.p, p, n, FFTW_FORWARD);
  const u32 a0_log[3] = {N_, 0, 1};
  const double bound = 2 * std::sqrt((double)Q_) + 2;
  for (int s = 0; s < 3; ++s) {
    for (u32 c = 0; c < Q_; ++c) work.p[c][0] = work.p[c][1] = 0;
    for (u32 xc = 0; xc < Q_; ++xc) {
      const u32 lx = log_[xc];
      u32 lu = powl(lx, 3);
      if (a0_log[s] != N_) lu = add(lu, mul(a0_log[s], lx));
      work.p[code(lu)][0] += 1;
    }
    dft(work.p, p, n, FFTW_FORWARD);
    for (u32 c = 0; c < Q_; ++c) {
      // chat * conj(nhat)
      const double ar = chat.p[c][0], ai = chat.p[c][1];
      const double br = work.p[c][0], bi = -work.p[c][1];
      work.p[c][0] = ar * br - ai * bi;
      work.p[c][1] = ar * bi + ai * br;
    }
    dft(work.p, p, n, FFTW_BACKWARD);
    tr_[s].assign(Q_, 0);
    for (u32 c = 0; c < Q_; ++c) {
      const i64 h = round_checked(work.p[c][0] / Q_, "character sum");
      require(std::fabs((double)h) <= bound, Err::Internal, "character sum above Weil bound");
      tr_[s][c] = (int16_t)(-h);
    }
  }
  traces_built_ = true;
}

int ExtField::trace(u32 la, u32 lb) const {
  if (la == N_) return tr_[0][code(lb)];
  const u32 lam = la >> 1;
  const int s = 1 + (int)(la & 1);
  u32 lb2 = N_;
  if (lb != N_) {
    const u32 sh = (u32)((3ull * lam) % N_);
    lb2 = lb >= sh ? lb - sh : lb + N_ - sh;
  }
  const int t = tr_[s][code(lb2)];
  return (lam & 1) ? -t : t;
}

void ExtField::ensure_mordell_table() const {
  std::lock_guard<std::mutex> lk(mu_);
  if (mordell_built_) return;
  require(F_->has_mu3(), Err::NoCubeRootsOfUnity, "3 does not divide q-1");
  const int p = F_->p();
  const int n = F_->m() * e_;
  FftBuf psi(Q_), msq(Q_);
  std::vector<uint8_t> nsq(Q_, 0);
  for (u32 c = 0; c < Q_; ++c) {
    const int j = cubic(log_[c]);
    if (j < 0) {
      psi.p[c][0] = psi.p[c][1] = 0;
    } else {
      auto z = unity_power(j);
      psi.p[c][0] = z.real();
      psi.p[c][1] = z.imag();
    }
    msq.p[c][0] = msq.p[c][1] = 0;
  }
  for (u32 y = 0; y < Q_; ++y) {
    const u32 u = code(powl(log_[y], 2));
    msq.p[u][0] += 1;
    nsq[u]++;
  }
  dft(psi.p, p, n, FFTW_FORWARD);
  dft(msq.p, p, n, FFTW_FORWARD);
  for (u32 c = 0; c < Q_; ++c) {
    const double ar = psi.p[c][0], ai = psi.p[c][1];
    const double br = msq.p[c][0], bi = msq.p[c][1];
    msq.p[c][0] = ar * br - ai * bi;
    msq.p[c][1] = ar * bi + ai * br;
  }
  dft(msq.p, p, n, FFTW_BACKWARD);
  mord_u_.assign(Q_, 0);
  mord_v_.assign(Q_, 0);
  const double r3 = std::sqrt(3.0);
  for (u32 b = 0; b < Q_; ++b) {
    const double re = msq.p[b][0] / Q_, im = msq.p[b][1] / Q_;
    const i64 S = (i64)Q_ - nsq[b];
    const i64 n0x3 = round_checked(2 * re + S, "cubic sum");
    require(n0x3 % 3 == 0, Err::Internal, "cubic sum not integral");
    const i64 n0 = n0x3 / 3;
    const i64 dd = round_checked(2 * im / r3, "cubic sum");
    const i64 rest = S - n0;
    require(((rest + dd) & 1) == 0, Err::Internal, "cubic sum parity");
    const i64 n1 = (rest + dd) / 2, n2 = (rest - dd) / 2;
    mord_u_[b] = (int32_t)(n0 - n2);
    mord_v_[b] = (int32_t)(n1 - n2);
  }
  mordell_built_ = true;
}

std::pair<i64, i64> ExtField::mordell_sum(u32 lb) const {
  const u32 c = code(lb);
  return {mord_u_[c], mord_v_[c]};
}

ExtPtr ext_field(const FieldPtr& F, int e) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, ExtPtr> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_tuple(F->p(), F->m(), e);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto K = std::make_shared<const ExtField>(F, e);
  cache[key] = K;
  return K;
}

PrimeTable::PrimeTable(const FieldPtr& F, int d) : d_(d) {
  require(d >= 1, Err::InvalidArgument, "prime degree must be >= 1");
  K_ = ext_field(F, d);
  const ExtField& K = *K_;
  const u32 N = K.order();
  const u64 q = F->q();
  std::vector<u32> reps;
  if (d == 1) reps.push_back(K.zero());
  std::vector<bool> seen(N, false);
  for (u32 k = 0; k < N; ++k) {
    if (seen[k]) continue;
    u32 j = k;
    int sz = 0;
    do {
      seen[j] = true;
      j = (u32)((u64)j * q % N);
      ++sz;
    } while (j != k);
    if (sz == d) reps.push_back(k);
  }
  const size_t np = reps.size();
  std::vector<uint16_t> raw(np * d);
  std::vector<u32> c(d + 1);
  for (size_t i = 0; i < np; ++i) {
    std::fill(c.begin(), c.end(), K.zero());
    c[0] = 0;  // log 1
    u32 r = reps[i];
    for (int s = 0; s < d; ++s) {
      const u32 nr = K.negl(r);
      for (int j = s + 1; j >= 1; --j) c[j] = K.add(c[j - 1], K.mul(nr, c[j]));
      c[0] = K.mul(nr, c[0]);
      r = K.frob(r);
    }
    for (int j = 0; j < d; ++j) {
      const u32 code = K.code(c[j]);
      require(code < q, Err::Internal, "minimal polynomial outside base field");
      raw[i * d + j] = (uint16_t)code;
    }
  }
  std::vector<u32> order(np);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](u32 x, u32 y) {
    return std::lexicographical_compare(raw.begin() + (size_t)x * d, raw.begin() + (size_t)(x + 1) * d,
                                        raw.begin() + (size_t)y * d, raw.begin() + (size_t)(y + 1) * d);
  });
  theta_.resize(np);
  coef_.resize(np * d);
  for (size_t i = 0; i < np; ++i) {
    theta_[i] = reps[order[i]];
    std::copy(raw.begin() + (size_t)order[i] * d, raw.begin() + (size_t)(order[i] + 1) * d,
              coef_.begin() + i * d);
  }
  require(np == necklace_count(q, d), Err::Internal, "prime count mismatch");
}

Poly PrimeTable::poly(size_t i) const {
  Poly P(d_ + 1);
  for (int j = 0; j < d_; ++j) P[j] = coef_[i * d_ + j];
  P[d_] = 1;
  return P;
}

size_t PrimeTable::find(const Poly& P) const {
  if (deg(P) != d_ || P.back() != 1) return size();
  size_t lo = 0, hi = size();
  while (lo < hi) {
    const size_t mid = (lo + hi) / 2;
    int c = 0;
    for (int j = 0; j < d_ && c == 0; ++j)
      if (coef_[mid * d_ + j] != P[j]) c = coef_[mid * d_ + j] < P[j] ? -1 : 1;
    if (c == 0) return mid;
    if (c < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return size();
}

PrimeTablePtr prime_table(const FieldPtr& F, int d) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, PrimeTablePtr> cache;
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(std::make_tuple(F->p(), F->m(), d));
    if (it != cache.end()) return it->second;
  }
  auto T = std::make_shared<const PrimeTable>(F, d);
  std::lock_guard<std::mutex> lk(mu);
  auto& slot = cache[std::make_tuple(F->p(), F->m(), d)];
  if (!slot) slot = T;
  return slot;
}

std::vector<Poly> irreducibles_of_degree(const FieldPtr& F, int n) {
  require(n >= 1, Err::InvalidArgument, "degree must be >= 1");
  auto T = prime_table(F, n);
  std::vector<Poly> out;
  out.reserve(T->size());
  for (size_t i = 0; i < T->size(); ++i) out.push_back(T->poly(i));
  return out;
}

}  // namespace ffec
