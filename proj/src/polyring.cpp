#include "asmoments/polyring.hpp"

#include <algorithm>
#include <sstream>

#include "asmoments/errors.hpp"

namespace asmoments {

namespace {

int int_moebius(long n) {
  int r = 1;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) {
      n /= d;
      if (n % d == 0) return 0;
      r = -r;
    }
  if (n > 1) r = -r;
  return r;
}

std::int64_t binom64(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

PolyRing::PolyRing(Field F) : F_(std::move(F)) {}

Poly PolyRing::monomial(int n, Elem a) const {
  Poly r;
  if (!a) return r;
  r.c.assign(n + 1, 0);
  r.c[n] = a;
  return r;
}

Poly PolyRing::linear(Elem root) const { return Poly({F_->neg(root), 1}); }

Poly PolyRing::add(const Poly& a, const Poly& b) const {
  Poly r;
  r.c.resize(std::max(a.c.size(), b.c.size()));
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = F_->add(a.coef(i), b.coef(i));
  r.trim();
  return r;
}

Poly PolyRing::neg(const Poly& a) const {
  Poly r = a;
  for (auto& x : r.c) x = F_->neg(x);
  return r;
}

Poly PolyRing::sub(const Poly& a, const Poly& b) const {
  Poly r;
  r.c.resize(std::max(a.c.size(), b.c.size()));
  for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = F_->sub(a.coef(i), b.coef(i));
  r.trim();
  return r;
}

Poly PolyRing::mul(const Poly& a, const Poly& b) const {
  if (a.is_zero() || b.is_zero()) return {};
  Poly r;
  r.c.assign(a.c.size() + b.c.size() - 1, 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (!a.c[i]) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j)
      if (b.c[j]) r.c[i + j] = F_->add(r.c[i + j], F_->mul(a.c[i], b.c[j]));
  }
  r.trim();
  return r;
}

Poly PolyRing::scale(const Poly& a, Elem s) const {
  if (!s) return {};
  Poly r = a;
  for (auto& x : r.c) x = F_->mul(x, s);
  r.trim();
  return r;
}

void PolyRing::divmod(const Poly& a, const Poly& b, Poly& quo, Poly& rem) const {
  if (b.is_zero()) throw DivisionByZero("polynomial division by zero");
  rem = a;
  int db = b.deg();
  if (a.deg() < db) {
    quo = Poly();
    return;
  }
  quo.c.assign(a.deg() - db + 1, 0);
  Elem il = F_->inv(b.lead());
  for (int k = rem.deg(); k >= db; --k) {
    Elem cf = rem.c[k];
    if (!cf) continue;
    cf = F_->mul(cf, il);
    quo.c[k - db] = cf;
    for (int j = 0; j <= db; ++j)
      if (b.c[j]) rem.c[k - db + j] = F_->sub(rem.c[k - db + j], F_->mul(cf, b.c[j]));
  }
  rem.trim();
  quo.trim();
}

Poly PolyRing::div(const Poly& a, const Poly& b) const {
  Poly q, r;
  divmod(a, b, q, r);
  if (!r.is_zero()) throw ConsistencyFailure("inexact polynomial division");
  return q;
}

Poly PolyRing::mod(const Poly& a, const Poly& b) const {
  if (a.deg() < b.deg()) return a;
  Poly q, r;
  divmod(a, b, q, r);
  return r;
}

Poly PolyRing::monic(const Poly& a) const {
  if (a.is_zero()) return a;
  return scale(a, F_->inv(a.lead()));
}

Poly PolyRing::gcd(Poly a, Poly b) const {
  while (!b.is_zero()) {
    Poly r = mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

Poly PolyRing::inv_mod(const Poly& a, const Poly& m) const {
  // extended Euclid tracking the coefficient of a
  Poly r0 = m, r1 = mod(a, m), s0, s1 = one();
  while (!r1.is_zero()) {
    Poly qq, rr;
    divmod(r0, r1, qq, rr);
    Poly s2 = sub(s0, mul(qq, s1));
    r0 = std::move(r1);
    r1 = std::move(rr);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  if (r0.deg() != 0) throw RejectedParameter("non-coprime modulus");
  return mod(scale(s0, F_->inv(r0.lead())), m);
}

Poly PolyRing::mulmod(const Poly& a, const Poly& b, const Poly& m) const { return mod(mul(a, b), m); }

Poly PolyRing::powmod(const Poly& a, const mpz_class& e, const Poly& m) const {
  Poly r = mod(one(), m), b = mod(a, m);
  std::size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  if (sgn(e) == 0) return r;
  for (std::size_t i = bits; i-- > 0;) {
    r = mulmod(r, r, m);
    if (mpz_tstbit(e.get_mpz_t(), i)) r = mulmod(r, b, m);
  }
  return r;
}

Poly PolyRing::pow(const Poly& a, int k) const {
  Poly r = one(), b = a;
  while (k) {
    if (k & 1) r = mul(r, b);
    k >>= 1;
    if (k) b = mul(b, b);
  }
  return r;
}

Poly PolyRing::derivative(const Poly& a) const {
  Poly r;
  if (a.deg() < 1) return r;
  r.c.resize(a.c.size() - 1);
  for (std::size_t i = 1; i < a.c.size(); ++i) r.c[i - 1] = F_->scale(a.c[i], static_cast<int>(i % F_->p()));
  r.trim();
  return r;
}

Poly PolyRing::compose_xk(const Poly& a, int k) const {
  Poly r;
  if (a.is_zero()) return r;
  r.c.assign(a.deg() * k + 1, 0);
  for (int i = 0; i <= a.deg(); ++i) r.c[i * k] = a.c[i];
  r.trim();
  return r;
}

Poly PolyRing::reverse(const Poly& a, int n) const {
  if (a.deg() > n) throw RejectedParameter("reverse length below degree");
  Poly r;
  r.c.assign(n + 1, 0);
  for (int i = 0; i <= a.deg(); ++i) r.c[n - i] = a.c[i];
  r.trim();
  return r;
}

Poly PolyRing::pth_root(const Poly& a) const {
  int p = F_->p();
  Poly r;
  if (a.is_zero()) return r;
  r.c.assign(a.deg() / p + 1, 0);
  // inverse Frobenius on F_q is x -> x^{q/p}
  std::uint64_t ex = F_->size() / p;
  for (int i = 0; i <= a.deg(); ++i) {
    if (!a.c[i]) continue;
    if (i % p) throw ConsistencyFailure("not a p-th power");
    r.c[i / p] = F_->pow(a.c[i], ex);
  }
  r.trim();
  return r;
}

Elem PolyRing::eval(const Poly& a, Elem x) const {
  Elem v = 0;
  for (int i = a.deg(); i >= 0; --i) v = F_->add(F_->mul(v, x), a.c[i]);
  return v;
}

Poly PolyRing::monic_from_index(std::uint64_t idx, int n) const {
  Poly r;
  r.c.assign(n + 1, 0);
  r.c[n] = 1;
  std::uint64_t q = F_->size();
  for (int i = n - 1; i >= 0; --i) {
    r.c[i] = static_cast<Elem>(idx % q);
    idx /= q;
  }
  return r;
}

std::uint64_t PolyRing::monic_index(const Poly& f) const {
  std::uint64_t idx = 0, q = F_->size();
  for (int i = 0; i < f.deg(); ++i) idx = idx * q + f.c[i];
  return idx;
}

Poly PolyRing::residue_from_index(std::uint64_t idx) const {
  Poly r;
  std::uint64_t q = F_->size();
  while (idx) {
    r.c.push_back(static_cast<Elem>(idx % q));
    idx /= q;
  }
  return r;
}

std::uint64_t PolyRing::residue_index(const Poly& r) const {
  std::uint64_t idx = 0, q = F_->size();
  for (int i = r.deg(); i >= 0; --i) idx = idx * q + r.c[i];
  return idx;
}

void PolyRing::sqfree_decomp(const Poly& f, int mult, std::vector<Factor>& out) const {
  if (f.deg() < 1) return;
  Poly df = derivative(f);
  Poly c = gcd(f, df);
  Poly w = div(f, c);
  int i = 1;
  while (w.deg() >= 1) {
    Poly y = gcd(w, c);
    Poly fac = div(w, y);
    if (fac.deg() >= 1) ddf(fac, i * mult, out);
    w = y;
    c = div(c, y);
    ++i;
  }
  if (c.deg() >= 1) sqfree_decomp(pth_root(c), mult * F_->p(), out);
}

void PolyRing::ddf(const Poly& f0, int mult, std::vector<Factor>& out) const {
  Poly f = f0;
  Poly h = x();
  mpz_class q = static_cast<unsigned long>(F_->size());
  for (int d = 1; 2 * d <= f.deg(); ++d) {
    h = powmod(h, q, f);
    Poly g = gcd(f, sub(h, x()));
    if (g.deg() >= 1) {
      edf(g, d, mult, out);
      f = div(f, g);
      h = mod(h, f);
    }
  }
  if (f.deg() >= 1) out.push_back({f, mult});
}

void PolyRing::edf(const Poly& f, int d, int mult, std::vector<Factor>& out) const {
  if (f.deg() == d) {
    out.push_back({f, mult});
    return;
  }
  mpz_class qd;
  mpz_ui_pow_ui(qd.get_mpz_t(), F_->size(), d);
  mpz_class ex = (qd - 1) / 2;
  // deterministic trial elements: monic polynomials of increasing degree
  for (int deg = 1; deg < f.deg(); ++deg) {
    std::uint64_t cnt = 1;
    for (int i = 0; i < deg; ++i) cnt *= F_->size();
    for (std::uint64_t idx = 0; idx < cnt; ++idx) {
      Poly a = monic_from_index(idx, deg);
      Poly b = sub(powmod(a, ex, f), one());
      Poly g = gcd(f, b);
      if (g.deg() >= 1 && g.deg() < f.deg()) {
        edf(g, d, mult, out);
        edf(div(f, g), d, mult, out);
        return;
      }
    }
  }
  throw ConsistencyFailure("equal-degree splitting failed");
}

std::vector<Factor> PolyRing::factorize(const Poly& f) const {
  if (f.is_zero()) throw RejectedParameter("cannot factor the zero polynomial");
  std::vector<Factor> out;
  sqfree_decomp(monic(f), 1, out);
  std::sort(out.begin(), out.end(), [](const Factor& a, const Factor& b) {
    if (a.P.deg() != b.P.deg()) return a.P.deg() < b.P.deg();
    return a.P.c < b.P.c;
  });
  // merge equal factors arising from different squarefree layers
  std::vector<Factor> merged;
  for (auto& fc : out) {
    if (!merged.empty() && merged.back().P == fc.P)
      merged.back().mult += fc.mult;
    else
      merged.push_back(fc);
  }
  return merged;
}

bool PolyRing::is_irreducible(const Poly& f) const {
  if (f.deg() < 1) return false;
  auto fs = factorize(f);
  return fs.size() == 1 && fs[0].mult == 1;
}

bool PolyRing::is_squarefree(const Poly& f) const {
  if (f.is_zero()) throw RejectedParameter("zero polynomial");
  if (f.deg() < 1) return true;
  return gcd(f, derivative(f)).deg() == 0;
}

std::int64_t PolyRing::divisor_k(const Poly& f, int k) const {
  if (!is_monic(f)) throw RejectedParameter("divisor function needs a monic polynomial");
  if (k < 1) throw RejectedParameter("k must be positive");
  std::int64_t r = 1;
  if (f.deg() == 0) return 1;
  for (auto& fc : factorize(f)) r *= binom64(fc.mult + k - 1, k - 1);
  return r;
}

int PolyRing::moebius(const Poly& f) const {
  if (!is_monic(f)) throw RejectedParameter("moebius needs a monic polynomial");
  if (f.deg() == 0) return 1;
  auto fs = factorize(f);
  for (auto& fc : fs)
    if (fc.mult > 1) return 0;
  return fs.size() % 2 ? -1 : 1;
}

std::uint64_t PolyRing::norm(const Poly& f) const {
  std::uint64_t r = 1;
  for (int i = 0; i < f.deg(); ++i) r *= F_->size();
  return r;
}

std::uint64_t PolyRing::euler_phi(const Poly& f) const {
  if (!is_monic(f)) throw RejectedParameter("phi needs a monic polynomial");
  if (f.deg() == 0) return 1;
  std::uint64_t r = 1;
  for (auto& fc : factorize(f)) {
    std::uint64_t np = norm(fc.P);
    r *= np - 1;
    for (int i = 1; i < fc.mult; ++i) r *= np;
  }
  return r;
}

RatFn PolyRing::make_ratfn(const Poly& num, const Poly& den) const {
  if (den.is_zero()) throw DivisionByZero("zero denominator");
  Poly g = gcd(num, den);
  RatFn r{div(num, g), div(den, g)};
  Elem il = F_->inv(r.den.lead());
  r.num = scale(r.num, il);
  r.den = scale(r.den, il);
  return r;
}

std::vector<Elem> PolyRing::power_sums(const Poly& c, int count) const {
  int k = c.deg();
  std::vector<Elem> P(count, 0);
  if (count > 0) P[0] = F_->from_int(k);
  for (int i = 1; i < count; ++i) {
    Elem s = 0;
    for (int j = 1; j < i && j <= k; ++j) s = F_->add(s, F_->mul(c.coef(k - j), P[i - j]));
    if (i <= k) s = F_->add(s, F_->scale(c.coef(k - i), i % F_->p()));
    P[i] = F_->neg(s);
  }
  return P;
}

Elem PolyRing::root_sum_eval(const RatFn& f, const Poly& c) const {
  if (!is_monic(c) || c.deg() < 1) throw RejectedParameter("root sums need a monic modulus of positive degree");
  Poly r = mulmod(f.num, inv_mod(f.den, c), c);
  auto P = power_sums(c, c.deg());
  Elem s = 0;
  for (int i = 0; i <= r.deg(); ++i) s = F_->add(s, F_->mul(r.c[i], P[i]));
  return s;
}

Elem PolyRing::root_sum_eval_matrix(const RatFn& f, const Poly& c) const {
  if (!is_monic(c) || c.deg() < 1) throw RejectedParameter("root sums need a monic modulus of positive degree");
  int k = c.deg();
  using Mat = std::vector<std::vector<Elem>>;
  Mat C(k, std::vector<Elem>(k, 0));
  for (int j = 0; j < k; ++j) {
    // column j holds x * x^j reduced mod c
    if (j + 1 < k) {
      C[j + 1][j] = 1;
    } else {
      for (int i = 0; i < k; ++i) C[i][j] = F_->neg(c.c[i]);
    }
  }
  auto matmul = [&](const Mat& A, const Mat& B) {
    Mat R(k, std::vector<Elem>(k, 0));
    for (int i = 0; i < k; ++i)
      for (int l = 0; l < k; ++l) {
        if (!A[i][l]) continue;
        for (int j = 0; j < k; ++j) R[i][j] = F_->add(R[i][j], F_->mul(A[i][l], B[l][j]));
      }
    return R;
  };
  auto horner = [&](const Poly& a) {
    Mat R(k, std::vector<Elem>(k, 0));
    for (int d = a.deg(); d >= 0; --d) {
      R = matmul(R, C);
      for (int i = 0; i < k; ++i) R[i][i] = F_->add(R[i][i], a.c[d]);
    }
    return R;
  };
  Mat N = horner(f.num), D = horner(f.den);
  // Gauss-Jordan inverse of D
  Mat A = D, I(k, std::vector<Elem>(k, 0));
  for (int i = 0; i < k; ++i) I[i][i] = 1;
  for (int col = 0; col < k; ++col) {
    int piv = -1;
    for (int r = col; r < k; ++r)
      if (A[r][col]) {
        piv = r;
        break;
      }
    if (piv < 0) throw RejectedParameter("non-coprime modulus");
    std::swap(A[col], A[piv]);
    std::swap(I[col], I[piv]);
    Elem iv = F_->inv(A[col][col]);
    for (int j = 0; j < k; ++j) {
      A[col][j] = F_->mul(A[col][j], iv);
      I[col][j] = F_->mul(I[col][j], iv);
    }
    for (int r = 0; r < k; ++r) {
      if (r == col || !A[r][col]) continue;
      Elem fct = A[r][col];
      for (int j = 0; j < k; ++j) {
        A[r][j] = F_->sub(A[r][j], F_->mul(fct, A[col][j]));
        I[r][j] = F_->sub(I[r][j], F_->mul(fct, I[col][j]));
      }
    }
  }
  Mat M = matmul(N, I);
  Elem tr = 0;
  for (int i = 0; i < k; ++i) tr = F_->add(tr, M[i][i]);
  return tr;
}

std::vector<int> PolyRing::to_ints(const Poly& f) const {
  std::vector<int> r(f.c.begin(), f.c.end());
  return r;
}

std::string PolyRing::str(const Poly& f) const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < f.c.size(); ++i) os << (i ? "," : "") << f.c[i];
  os << "]";
  return os.str();
}

void enumerate_monic(const PolyRing& R, int n, const std::function<void(const Poly&)>& fn) {
  std::uint64_t cnt = 1;
  for (int i = 0; i < n; ++i) cnt *= R.q();
  for (std::uint64_t idx = 0; idx < cnt; ++idx) fn(R.monic_from_index(idx, n));
}

std::vector<Poly> monic_polys(const PolyRing& R, int n) {
  std::vector<Poly> v;
  enumerate_monic(R, n, [&](const Poly& f) { v.push_back(f); });
  return v;
}

std::vector<Poly> monic_irreducibles(const PolyRing& R, int n) {
  std::vector<Poly> v;
  enumerate_monic(R, n, [&](const Poly& f) {
    if (R.is_irreducible(f)) v.push_back(f);
  });
  return v;
}

mpz_class count_irreducibles(long q, int n) {
  mpz_class s = 0;
  for (int d = 1; d <= n; ++d) {
    if (n % d) continue;
    int mu = int_moebius(d);
    if (!mu) continue;
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), q, n / d);
    s += mu * t;
  }
  return s / n;
}

}  // namespace asmoments
