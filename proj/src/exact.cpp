#include "asmoments/exact.hpp"

#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "asmoments/errors.hpp"
#include "asmoments/gf.hpp"

namespace asmoments {

namespace {

unsigned g_bits = 106;
const bool g_init = (Real::default_precision(34), true);

std::int64_t add_ck(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw NumericalFailure("CycInt overflow");
  return r;
}

std::int64_t mul_ck(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw NumericalFailure("CycInt overflow");
  return r;
}

using QZ = std::vector<mpq_class>;  // element of Q(zeta_p), length p-1

QZ qz_mul(const QZ& a, const QZ& b, int p) {
  std::vector<mpq_class> full(p);
  for (int i = 0; i < p - 1; ++i) {
    if (sgn(a[i]) == 0) continue;
    for (int j = 0; j < p - 1; ++j) {
      if (sgn(b[j]) == 0) continue;
      full[(i + j) % p] += a[i] * b[j];
    }
  }
  QZ r(p - 1);
  for (int i = 0; i < p - 1; ++i) r[i] = full[i] - full[p - 1];
  return r;
}

bool qz_zero(const QZ& a) {
  for (auto& x : a)
    if (sgn(x) != 0) return false;
  return true;
}

QZ qz_galois(const QZ& a, int p, int k) {
  std::vector<mpq_class> full(p);
  k = ((k % p) + p) % p;
  for (int i = 0; i < p - 1; ++i) full[(static_cast<long>(i) * k) % p] += a[i];
  QZ r(p - 1);
  for (int i = 0; i < p - 1; ++i) r[i] = full[i] - full[p - 1];
  return r;
}

int legendre(int a, int p) {
  a %= p;
  if (a == 0) return 0;
  for (int x = 1; x < p; ++x)
    if (x * x % p == a) return 1;
  return -1;
}

}  // namespace

void set_precision_bits(unsigned bits) {
  if (bits < 53) throw RejectedParameter("precision must be at least 53 bits");
  g_bits = bits;
  Real::default_precision(static_cast<unsigned>(std::ceil(bits * 0.30103)) + 2);
}

unsigned precision_bits() { return g_bits; }

Real real_pi() { return boost::math::constants::pi<Real>(); }

ComplexVal ComplexVal::operator/(const ComplexVal& o) const {
  Real den = o.re * o.re + o.im * o.im;
  if (den == 0) throw DivisionByZero("complex division by zero");
  return {(re * o.re + im * o.im) / den, (im * o.re - re * o.im) / den};
}

Real ComplexVal::abs() const { return boost::multiprecision::sqrt(re * re + im * im); }

// ---- CycInt

CycInt::CycInt(int p, std::int64_t c) : p_(p), c_(p - 1, 0) { c_[0] = c; }

CycInt CycInt::zeta_pow(int p, long k) {
  k = ((k % p) + p) % p;
  CycInt r(p, 0);
  if (k == p - 1) {
    for (auto& x : r.c_) x = -1;
  } else {
    r.c_[k] = 1;
  }
  return r;
}

CycInt CycInt::from_full(int p, const std::vector<std::int64_t>& v) {
  CycInt r(p, 0);
  for (int i = 0; i < p - 1; ++i) r.c_[i] = add_ck(v[i], -v[p - 1]);
  return r;
}

CycInt CycInt::operator+(const CycInt& o) const {
  CycInt r = *this;
  r += o;
  return r;
}

CycInt CycInt::operator-(const CycInt& o) const {
  CycInt r = *this;
  r -= o;
  return r;
}

CycInt CycInt::operator-() const {
  CycInt r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

CycInt& CycInt::operator+=(const CycInt& o) {
  if (p_ == 0) {
    *this = o;
    return *this;
  }
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] = add_ck(c_[i], o.c_[i]);
  return *this;
}

CycInt& CycInt::operator-=(const CycInt& o) {
  if (p_ == 0) {
    *this = -o;
    return *this;
  }
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] = add_ck(c_[i], -o.c_[i]);
  return *this;
}

CycInt CycInt::operator*(const CycInt& o) const {
  std::vector<std::int64_t> full(p_, 0);
  for (int i = 0; i < p_ - 1; ++i) {
    if (!c_[i]) continue;
    for (int j = 0; j < p_ - 1; ++j) {
      if (!o.c_[j]) continue;
      int k = (i + j) % p_;
      full[k] = add_ck(full[k], mul_ck(c_[i], o.c_[j]));
    }
  }
  return from_full(p_, full);
}

CycInt CycInt::scaled(std::int64_t k) const {
  CycInt r = *this;
  for (auto& x : r.c_) x = mul_ck(x, k);
  return r;
}

bool CycInt::divisible_by(std::int64_t n) const {
  for (auto x : c_)
    if (x % n != 0) return false;
  return true;
}

CycInt CycInt::div_exact(std::int64_t n) const {
  if (!divisible_by(n)) throw ConsistencyFailure("non-integral cyclotomic coefficient");
  CycInt r = *this;
  for (auto& x : r.c_) x /= n;
  return r;
}

bool CycInt::is_zero() const {
  for (auto x : c_)
    if (x) return false;
  return true;
}

bool CycInt::is_one() const {
  if (c_.empty() || c_[0] != 1) return false;
  for (std::size_t i = 1; i < c_.size(); ++i)
    if (c_[i]) return false;
  return true;
}

CycInt CycInt::galois(int a) const {
  a = ((a % p_) + p_) % p_;
  if (!a) throw RejectedParameter("galois exponent must be a unit mod p");
  std::vector<std::int64_t> full(p_, 0);
  for (int i = 0; i < p_ - 1; ++i) full[(static_cast<long>(i) * a) % p_] += c_[i];
  return from_full(p_, full);
}

CycInt CycInt::conj() const { return galois(p_ - 1); }

CycInt cyc_conj(const CycInt& x) { return x.conj(); }

ComplexVal CycInt::embed() const {
  ComplexVal r;
  Real pi2 = 2 * real_pi() / p_;
  for (int j = 0; j < p_ - 1; ++j) {
    if (!c_[j]) continue;
    Real ang = pi2 * j;
    r.re += Real(c_[j]) * boost::multiprecision::cos(ang);
    r.im += Real(c_[j]) * boost::multiprecision::sin(ang);
  }
  return r;
}

std::string CycInt::str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? "," : "") << c_[i];
  os << "]";
  return os.str();
}

// ---- ExactCtx

std::string ExactCtx::describe() const {
  std::ostringstream os;
  os << "Q(zeta_" << p << ")[s]/(s^" << m << " - c), s = " << s_base << "^(1/" << s_root
     << "), t = s^" << t_exp;
  return os.str();
}

std::shared_ptr<const ExactCtx> exact_ctx(int p, long q) {
  static std::mutex mu;
  static std::map<std::pair<int, long>, std::shared_ptr<const ExactCtx>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({p, q});
  if (it != cache.end()) return it->second;
  if (p == 2 || !is_prime(p)) throw RejectedParameter("p must be an odd prime");
  int e = 0;
  long qq = q;
  while (qq > 1 && qq % p == 0) {
    qq /= p;
    ++e;
  }
  if (qq != 1 || e == 0) throw RejectedParameter("q must be a power of p");
  auto ctx = std::make_shared<ExactCtx>();
  ctx->p = p;
  ctx->q = q;
  ctx->e = e;
  int g = std::gcd(e, 2 * p);
  int m = 2 * p / g;
  ctx->t_exp = e / g;
  ctx->s_base = p;
  ctx->s_root = m;
  ctx->c.assign(p - 1, mpq_class(0));
  if (m % 2 == 0 && p % 4 == 1) {
    // s^{m/2} = sqrt(p), realised as the quadratic Gauss sum
    ctx->m = m / 2;
    std::vector<std::int64_t> full(p, 0);
    for (int a = 1; a < p; ++a) full[a] = legendre(a, p);
    CycInt gs = CycInt::from_full(p, full);
    for (int i = 0; i < p - 1; ++i) ctx->c[i] = mpq_class(static_cast<long>(gs[i]));
  } else {
    ctx->m = m;
    ctx->c[0] = p;
  }
  cache[{p, q}] = ctx;
  return ctx;
}

// ---- ExactNum

ExactNum::ExactNum(std::shared_ptr<const ExactCtx> ctx) : ctx_(std::move(ctx)), v_(ctx_->dim()) {}

ExactNum::ExactNum(std::shared_ptr<const ExactCtx> ctx, const mpq_class& r) : ExactNum(std::move(ctx)) {
  v_[0] = r;
}

ExactNum::ExactNum(std::shared_ptr<const ExactCtx> ctx, const CycInt& z) : ExactNum(std::move(ctx)) {
  if (z.p() != ctx_->p) throw RejectedParameter("cyclotomic order mismatch");
  for (int j = 0; j < ctx_->p - 1; ++j) v_[j] = mpq_class(static_cast<long>(z[j]));
}

ExactNum ExactNum::zero(int p, long q) { return ExactNum(exact_ctx(p, q)); }
ExactNum ExactNum::one(int p, long q) { return ExactNum(exact_ctx(p, q), mpq_class(1)); }
ExactNum ExactNum::rational(int p, long q, const mpq_class& r) { return ExactNum(exact_ctx(p, q), r); }
ExactNum ExactNum::zeta_pow(int p, long q, long k) {
  return ExactNum(exact_ctx(p, q), CycInt::zeta_pow(p, k));
}

ExactNum ExactNum::from_coords(int p, long q, const std::vector<mpq_class>& v) {
  auto ctx = exact_ctx(p, q);
  if (static_cast<int>(v.size()) != ctx->dim()) throw RejectedParameter("coordinate vector has the wrong length");
  ExactNum x(ctx);
  x.v_ = v;
  for (auto& c : x.v_) c.canonicalize();
  return x;
}

ExactNum ExactNum::t(int p, long q) { return t_pow(p, q, 1); }

ExactNum ExactNum::t_pow(int p, long q, long k) {
  auto ctx = exact_ctx(p, q);
  long j = k * ctx->t_exp;  // power of s
  bool neg = j < 0;
  if (neg) j = -j;
  long a = j / ctx->m, r = j % ctx->m;
  QZ cz = ctx->c, acc(p - 1);
  acc[0] = 1;
  for (long i = 0; i < a; ++i) acc = qz_mul(acc, cz, p);
  ExactNum x(ctx);
  for (int i = 0; i < p - 1; ++i) x.v_[r * (p - 1) + i] = acc[i];
  return neg ? x.inverse() : x;
}

ExactNum ExactNum::q_pow(int p, long q, long a, long b) {
  if (b < 0) {
    a = -a;
    b = -b;
  }
  if ((2L * p * a) % b != 0) throw RejectedParameter("exponent not representable in the radical ring");
  return t_pow(p, q, 2L * p * a / b);
}

void ExactNum::check_same(const ExactNum& o) const {
  if (ctx_ != o.ctx_) throw RejectedParameter("mixed radical rings");
}

ExactNum ExactNum::operator+(const ExactNum& o) const {
  ExactNum r = *this;
  r += o;
  return r;
}

ExactNum ExactNum::operator-(const ExactNum& o) const {
  ExactNum r = *this;
  r -= o;
  return r;
}

ExactNum ExactNum::operator-() const {
  ExactNum r = *this;
  for (auto& x : r.v_) x = -x;
  return r;
}

ExactNum& ExactNum::operator+=(const ExactNum& o) {
  check_same(o);
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

ExactNum& ExactNum::operator-=(const ExactNum& o) {
  check_same(o);
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

ExactNum ExactNum::operator*(const ExactNum& o) const {
  check_same(o);
  int p = ctx_->p, m = ctx_->m, w = p - 1;
  std::vector<QZ> acc(2 * m, QZ(w));
  std::vector<QZ> a(m), b(m);
  std::vector<bool> az(m), bz(m);
  for (int i = 0; i < m; ++i) {
    a[i].assign(v_.begin() + i * w, v_.begin() + (i + 1) * w);
    b[i].assign(o.v_.begin() + i * w, o.v_.begin() + (i + 1) * w);
    az[i] = qz_zero(a[i]);
    bz[i] = qz_zero(b[i]);
  }
  for (int i = 0; i < m; ++i) {
    if (az[i]) continue;
    for (int k = 0; k < m; ++k) {
      if (bz[k]) continue;
      QZ pr = qz_mul(a[i], b[k], p);
      for (int j = 0; j < w; ++j) acc[i + k][j] += pr[j];
    }
  }
  ExactNum r(ctx_);
  for (int i = 0; i < m; ++i) {
    QZ s = acc[i];
    if (i + m < 2 * m && !qz_zero(acc[i + m])) {
      QZ hi = qz_mul(acc[i + m], ctx_->c, p);
      for (int j = 0; j < w; ++j) s[j] += hi[j];
    }
    for (int j = 0; j < w; ++j) r.v_[i * w + j] = s[j];
  }
  return r;
}

ExactNum& ExactNum::operator*=(const ExactNum& o) {
  *this = *this * o;
  return *this;
}

ExactNum ExactNum::operator*(const mpq_class& s) const {
  ExactNum r = *this;
  for (auto& x : r.v_) x *= s;
  return r;
}

ExactNum ExactNum::inverse() const {
  if (is_zero()) throw DivisionByZero("division by zero in radical ring");
  int n = ctx_->dim();
  // columns: this * basis_k
  std::vector<std::vector<mpq_class>> M(n, std::vector<mpq_class>(n + 1));
  for (int k = 0; k < n; ++k) {
    ExactNum b(ctx_);
    b.v_[k] = 1;
    ExactNum col = *this * b;
    for (int i = 0; i < n; ++i) M[i][k] = col.v_[i];
  }
  M[0][n] = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (sgn(M[r][c]) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw ConsistencyFailure("radical ring is not a field for this configuration");
    std::swap(M[c], M[piv]);
    mpq_class inv = 1 / M[c][c];
    for (int k = c; k <= n; ++k) M[c][k] *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == c || sgn(M[r][c]) == 0) continue;
      mpq_class f = M[r][c];
      for (int k = c; k <= n; ++k) M[r][k] -= f * M[c][k];
    }
  }
  ExactNum x(ctx_);
  for (int i = 0; i < n; ++i) x.v_[i] = M[i][n];
  return x;
}

ExactNum ExactNum::operator/(const ExactNum& o) const {
  check_same(o);
  return *this * o.inverse();
}

ExactNum ExactNum::pow(long k) const {
  if (k < 0) return inverse().pow(-k);
  ExactNum r(ctx_, mpq_class(1)), b = *this;
  while (k) {
    if (k & 1) r *= b;
    k >>= 1;
    if (k) b *= b;
  }
  return r;
}

ExactNum ExactNum::conj() const {
  int p = ctx_->p, w = p - 1;
  ExactNum r(ctx_);
  for (int i = 0; i < ctx_->m; ++i) {
    QZ a(v_.begin() + i * w, v_.begin() + (i + 1) * w);
    QZ b = qz_galois(a, p, p - 1);
    for (int j = 0; j < w; ++j) r.v_[i * w + j] = b[j];
  }
  return r;
}

bool ExactNum::operator==(const ExactNum& o) const {
  check_same(o);
  return v_ == o.v_;
}

bool ExactNum::is_zero() const {
  for (auto& x : v_)
    if (sgn(x) != 0) return false;
  return true;
}

ComplexVal ExactNum::embed(unsigned bits) const {
  unsigned old = precision_bits();
  if (bits && bits != old) set_precision_bits(bits);
  int p = ctx_->p, w = p - 1;
  std::vector<ComplexVal> z(w);
  Real pi2 = 2 * real_pi() / p;
  for (int j = 0; j < w; ++j) z[j] = ComplexVal(boost::multiprecision::cos(pi2 * j), boost::multiprecision::sin(pi2 * j));
  Real s = boost::multiprecision::pow(Real(ctx_->s_base), Real(1) / Real(ctx_->s_root));
  ComplexVal r;
  Real spow = 1;
  for (int i = 0; i < ctx_->m; ++i) {
    ComplexVal inner;
    for (int j = 0; j < w; ++j) {
      const mpq_class& c = v_[i * w + j];
      if (sgn(c) == 0) continue;
      Real cr = Real(c.get_num().get_str()) / Real(c.get_den().get_str());
      inner.re += cr * z[j].re;
      inner.im += cr * z[j].im;
    }
    r.re += inner.re * spow;
    r.im += inner.im * spow;
    spow *= s;
  }
  if (bits && bits != old) set_precision_bits(old);
  return r;
}

std::string ExactNum::str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < v_.size(); ++i) os << (i ? "," : "") << v_[i].get_str();
  os << "]";
  return os.str();
}

ExactNum exact_div(const ExactNum& a, const ExactNum& b) { return a / b; }

ComplexVal embed_complex(const ExactNum& x, unsigned bits) {
  if (bits < 53) throw RejectedParameter("precision must be at least 53 bits");
  return x.embed(bits);
}

ExactNum eval_cyc_poly(const std::vector<CycInt>& a, const ExactNum& u) {
  auto ctx = u.ctx();
  ExactNum r(ctx);
  for (int j = static_cast<int>(a.size()) - 1; j >= 0; --j) r = r * u + ExactNum(ctx, a[j]);
  return r;
}

std::string fmt_real(const Real& x, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

std::string fmt_complex(const ComplexVal& z, int digits) {
  std::ostringstream os;
  os.precision(digits);
  os << z.re;
  if (z.im >= 0) os << "+";
  os << z.im << "i";
  return os.str();
}

}  // namespace asmoments
