#include "asmoments/gf.hpp"

#include <map>
#include <mutex>
#include <string>

#include "asmoments/errors.hpp"
#include "asmoments/exact.hpp"

namespace asmoments {

namespace {

constexpr std::uint64_t kMaxFieldSize = 1ull << 25;

std::vector<int> poly_mod_p(std::vector<int> a, const std::vector<int>& m, int p) {
  int n = static_cast<int>(m.size()) - 1;
  int inv_lead = 1;
  for (int c = 1; c < p; ++c)
    if (m[n] * c % p == 1) inv_lead = c;
  for (int k = static_cast<int>(a.size()) - 1; k >= n; --k) {
    int c = ((a[k] % p) + p) % p;
    if (!c) continue;
    c = c * inv_lead % p;
    for (int j = 0; j <= n; ++j) a[k - n + j] = ((a[k - n + j] - c * m[j]) % p + p) % p;
  }
  a.resize(std::min<std::size_t>(a.size(), n));
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

std::vector<int> poly_mulmod_p(const std::vector<int>& a, const std::vector<int>& b,
                               const std::vector<int>& m, int p) {
  if (a.empty() || b.empty()) return {};
  std::vector<int> r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i])
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  return poly_mod_p(r, m, p);
}

std::vector<int> poly_gcd_p(std::vector<int> a, std::vector<int> b, int p) {
  auto trim = [](std::vector<int>& v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
  };
  trim(a);
  trim(b);
  while (!b.empty()) {
    auto r = poly_mod_p(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

}  // namespace

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool is_irreducible_fp(const std::vector<int>& m, int p) {
  int n = static_cast<int>(m.size()) - 1;
  if (n < 1 || m[n] % p == 0) return false;
  if (n == 1) return true;
  // no factor of degree k <= n/2  <=>  gcd(x^{p^k} - x, m) = 1 for all such k
  std::vector<int> x{0, 1};
  std::vector<int> xp = x;
  for (int k = 1; k <= n / 2; ++k) {
    std::vector<int> r{1};
    for (int i = 0; i < p; ++i) r = poly_mulmod_p(r, xp, m, p);
    xp = r;
    std::vector<int> diff(std::max<std::size_t>(xp.size(), 2), 0);
    for (std::size_t i = 0; i < diff.size(); ++i)
      diff[i] = (((i < xp.size() ? xp[i] : 0) - (i < 2 ? x[i] : 0)) % p + p) % p;
    auto g = poly_gcd_p(m, diff, p);
    if (g.size() != 1) return false;
  }
  return true;
}

std::vector<int> least_irreducible(int p, int degree) {
  std::vector<int> m(degree + 1, 0);
  m[degree] = 1;
  if (degree == 1) return m;  // y
  // lexicographic on (c_0, c_1, ..., c_{n-1}) with c_0 most significant
  std::vector<int> tail(degree, 0);
  while (true) {
    for (int i = 0; i < degree; ++i) m[i] = tail[i];
    if (m[0] != 0 && is_irreducible_fp(m, p)) return m;
    int i = degree - 1;
    while (i >= 0 && ++tail[i] == p) tail[i--] = 0;
    if (i < 0) break;
  }
  throw ConsistencyFailure("no irreducible polynomial found");
}

FieldCtx::FieldCtx(int p, int degree) : p_(p), e_(degree) {
  if (p == 2 || !is_prime(p)) throw RejectedParameter("characteristic must be an odd prime");
  if (degree < 1) throw RejectedParameter("field degree must be positive");
  q_ = 1;
  pw_.push_back(1);
  for (int i = 0; i < e_; ++i) {
    q_ *= static_cast<std::uint64_t>(p_);
    pw_.push_back(q_);
    if (q_ > kMaxFieldSize) throw RejectedParameter("field too large for table arithmetic");
  }
  mod_ = least_irreducible(p_, e_);

  // primitive element by the order test
  std::uint64_t n = q_ - 1;
  std::vector<std::uint64_t> primes;
  {
    std::uint64_t t = n;
    for (std::uint64_t f = 2; f * f <= t; ++f)
      if (t % f == 0) {
        primes.push_back(f);
        while (t % f == 0) t /= f;
      }
    if (t > 1) primes.push_back(t);
  }
  auto pow_slow = [&](Elem a, std::uint64_t k) {
    Elem r = 1;
    while (k) {
      if (k & 1) r = mul_slow(r, a);
      a = mul_slow(a, a);
      k >>= 1;
    }
    return r;
  };
  std::vector<Elem> cands;
  if (e_ > 1) cands.push_back(static_cast<Elem>(p_));  // try y first
  for (std::uint64_t g = 1; g < q_; ++g) cands.push_back(static_cast<Elem>(g));
  prim_ = 0;
  for (Elem g : cands) {
    if (g == 0) continue;
    bool ok = true;
    for (auto r : primes)
      if (pow_slow(g, n / r) == 1) {
        ok = false;
        break;
      }
    if (ok) {
      prim_ = g;
      break;
    }
  }
  if (q_ == 2) prim_ = 1;
  if (!prim_) throw ConsistencyFailure("no primitive element");

  exp_.assign(n, 0);
  log_.assign(q_, -1);
  Elem cur = 1;
  for (std::uint64_t k = 0; k < n; ++k) {
    exp_[k] = cur;
    log_[cur] = static_cast<std::int32_t>(k);
    cur = mul_slow(cur, prim_);
  }
  zech_.assign(n, -1);
  for (std::uint64_t k = 0; k < n; ++k) {
    Elem x = exp_[k];
    Elem d0 = x % p_;
    Elem y = x - d0 + (d0 + 1) % p_;
    zech_[k] = log_[y];
  }
  trace_basis_.resize(e_);
  for (int i = 0; i < e_; ++i) trace_basis_[i] = trace_by_powers(static_cast<Elem>(pw_[i]));

  small_ = q_ <= 729;
  if (small_) {
    add_tab_.resize(q_ * q_);
    mul_tab_.resize(q_ * q_);
    for (Elem a = 0; a < q_; ++a)
      for (Elem b = 0; b < q_; ++b) {
        add_tab_[a * q_ + b] = add_slow(a, b);
        mul_tab_[a * q_ + b] = (a && b) ? exp_[(log_[a] + log_[b]) % n] : 0;
      }
  }
}

Elem FieldCtx::from_int(long c) const { return static_cast<Elem>(((c % p_) + p_) % p_); }

Elem FieldCtx::gen() const {
  if (e_ == 1) return 0;  // y = 0 in F_p[y]/(y)
  return static_cast<Elem>(p_);
}

std::vector<int> FieldCtx::coeffs(Elem x) const {
  std::vector<int> c(e_);
  for (int i = 0; i < e_; ++i) {
    c[i] = static_cast<int>(x % p_);
    x /= p_;
  }
  return c;
}

Elem FieldCtx::pack(const std::vector<int>& c) const {
  if (static_cast<int>(c.size()) > e_) {
    std::vector<int> r = poly_mod_p(c, mod_, p_);
    return pack(r);
  }
  std::uint64_t x = 0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) x = x * p_ + ((c[i] % p_) + p_) % p_;
  return static_cast<Elem>(x);
}

Elem FieldCtx::add_slow(Elem a, Elem b) const {
  std::uint64_t r = 0;
  for (int i = 0; i < e_; ++i) {
    r += ((a % p_ + b % p_) % p_) * pw_[i];
    a /= p_;
    b /= p_;
  }
  return static_cast<Elem>(r);
}

Elem FieldCtx::neg_slow(Elem a) const {
  std::uint64_t r = 0;
  for (int i = 0; i < e_; ++i) {
    r += ((p_ - a % p_) % p_) * pw_[i];
    a /= p_;
  }
  return static_cast<Elem>(r);
}

Elem FieldCtx::mul_slow(Elem a, Elem b) const {
  auto ca = coeffs(a), cb = coeffs(b);
  return pack(poly_mulmod_p(ca, cb, mod_, p_));
}

Elem FieldCtx::add(Elem a, Elem b) const {
  if (small_) return add_tab_[a * q_ + b];
  if (!a) return b;
  if (!b) return a;
  std::int64_t n = static_cast<std::int64_t>(q_ - 1);
  std::int64_t la = log_[a], lb = log_[b];
  std::int64_t d = lb - la;
  if (d < 0) d += n;
  std::int32_t z = zech_[d];
  if (z < 0) return 0;
  return exp_[(la + z) % n];
}

Elem FieldCtx::neg(Elem a) const {
  if (!a) return 0;
  std::uint64_t n = q_ - 1;
  return exp_[(log_[a] + n / 2) % n];
}

Elem FieldCtx::sub(Elem a, Elem b) const { return add(a, neg(b)); }

Elem FieldCtx::mul(Elem a, Elem b) const {
  if (small_) return mul_tab_[a * q_ + b];
  if (!a || !b) return 0;
  return exp_[(static_cast<std::uint64_t>(log_[a]) + log_[b]) % (q_ - 1)];
}

Elem FieldCtx::inv(Elem a) const {
  if (!a) throw DivisionByZero("inverse of zero in finite field");
  std::uint64_t n = q_ - 1;
  return exp_[(n - log_[a]) % n];
}

Elem FieldCtx::pow(Elem a, std::uint64_t k) const {
  if (!a) return k == 0 ? 1 : 0;
  std::uint64_t n = q_ - 1;
  return exp_[(static_cast<unsigned __int128>(log_[a]) * k) % n];
}

Elem FieldCtx::exp(std::int64_t k) const {
  std::int64_t n = static_cast<std::int64_t>(q_ - 1);
  k %= n;
  if (k < 0) k += n;
  return exp_[k];
}

Elem FieldCtx::frobenius(Elem a) const { return pow(a, p_); }

Elem FieldCtx::scale(Elem a, int c) const {
  c = ((c % p_) + p_) % p_;
  if (!c || !a) return 0;
  return mul(a, static_cast<Elem>(c));
}

int FieldCtx::trace(Elem a) const {
  long s = 0;
  for (int i = 0; i < e_; ++i) {
    s += static_cast<long>(a % p_) * trace_basis_[i];
    a /= p_;
  }
  return static_cast<int>(s % p_);
}

int FieldCtx::trace_by_powers(Elem a) const {
  Elem s = 0, y = a;
  for (int i = 0; i < e_; ++i) {
    s = add_slow(s, y);
    Elem z = 1;
    for (int j = 0; j < p_; ++j) z = mul_slow(z, y);
    y = z;
  }
  if (s >= static_cast<Elem>(p_)) throw ConsistencyFailure("trace left the prime field");
  return static_cast<int>(s);
}

Field make_field(int p, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, Field> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p, degree});
    if (it != cache.end()) return it->second;
  }
  auto f = std::make_shared<const FieldCtx>(p, degree);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(std::make_pair(p, degree), f).first->second;
}

int abs_trace(const FieldElem& x) { return x.ctx->trace(x.v); }

CycInt psi_value(int c, int p) { return CycInt::zeta_pow(p, c); }

Embedding::Embedding(Field src, Field dst) : src_(std::move(src)), dst_(std::move(dst)) {
  if (src_->p() != dst_->p() || dst_->degree() % src_->degree() != 0)
    throw RejectedParameter("embedding needs the source degree to divide the target degree");
  const auto& m = src_->modulus();
  int e = src_->degree();
  if (e == 1) {
    root_ = 0;
  } else {
    root_ = 0;
    bool found = false;
    for (std::uint64_t a = 0; a < dst_->size() && !found; ++a) {
      Elem v = 0;
      for (int i = e; i >= 0; --i) v = dst_->add(dst_->mul(v, static_cast<Elem>(a)), dst_->from_int(m[i]));
      if (v == 0) {
        root_ = static_cast<Elem>(a);
        found = true;
      }
    }
    if (!found) throw ConsistencyFailure("source modulus has no root in target field");
  }
  table_.resize(src_->size());
  for (std::uint64_t x = 0; x < src_->size(); ++x) {
    auto c = src_->coeffs(static_cast<Elem>(x));
    Elem v = 0;
    if (e == 1) {
      v = dst_->from_int(c[0]);
    } else {
      for (int i = e - 1; i >= 0; --i) v = dst_->add(dst_->mul(v, root_), dst_->from_int(c[i]));
    }
    table_[x] = v;
  }
}

std::shared_ptr<const Embedding> make_embedding(int p, int e, int n) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::shared_ptr<const Embedding>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p, e, n});
    if (it != cache.end()) return it->second;
  }
  auto emb = std::make_shared<const Embedding>(make_field(p, e), make_field(p, e * n));
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(std::make_tuple(p, e, n), emb).first->second;
}

FieldElem embed(const FieldElem& x, const Field& into) {
  if (into->degree() % x.ctx->degree() != 0)
    throw RejectedParameter("embedding needs the source degree to divide the target degree");
  auto emb = make_embedding(x.ctx->p(), x.ctx->degree(), into->degree() / x.ctx->degree());
  return {emb->dst(), (*emb)(x.v)};
}

}  // namespace asmoments
