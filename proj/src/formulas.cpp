#include "asmoments/formulas.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "asmoments/chars.hpp"
#include "asmoments/errors.hpp"
#include "asmoments/gf.hpp"
#include "asmoments/lfun.hpp"

namespace asmoments {

namespace {

using boost::multiprecision::atan2;
using boost::multiprecision::cos;
using boost::multiprecision::exp;
using boost::multiprecision::log;
using boost::multiprecision::pow;
using boost::multiprecision::sin;

mpq_class frac(long a, long b) {
  mpq_class r(a, b);
  r.canonicalize();
  return r;
}
ExactNum qp(int p, long q, long a, long b = 1) { return ExactNum::q_pow(p, q, a, b); }
ExactNum zeta(int p, long q, long k) { return ExactNum::zeta_pow(p, q, k); }

void need_coprime(int p, int d, int m = 1) {
  if (d % p == 0 || (m > 1 && d % m == 0)) throw RejectedParameter("d must be coprime to the characteristic");
}

// Raises the working precision for the duration of an Euler product so that
// q^n-sized prime counts times rounding stay small.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned want) : old_(precision_bits()) {
    if (want > old_) set_precision_bits(want);
  }
  ~PrecisionGuard() {
    if (precision_bits() != old_) set_precision_bits(old_);
  }

 private:
  unsigned old_;
};

ComplexVal cx(const Real& r) { return ComplexVal(r, Real(0)); }

ComplexVal root_of_unity(int p, long k) {
  k = ((k % p) + p) % p;
  Real a = 2 * real_pi() * k / p;
  return ComplexVal(cos(a), sin(a));
}

ComplexVal clog(const ComplexVal& z) { return ComplexVal(log(z.abs()), atan2(z.im, z.re)); }

ComplexVal cexp(const ComplexVal& z) {
  Real m = exp(z.re);
  return ComplexVal(m * cos(z.im), m * sin(z.im));
}

ComplexVal cpow_int(const ComplexVal& z, long k) {
  ComplexVal r(Real(1), Real(0)), b = z;
  bool inv = k < 0;
  if (inv) k = -k;
  while (k) {
    if (k & 1) r = r * b;
    k >>= 1;
    if (k) b = b * b;
  }
  return inv ? cx(Real(1)) / r : r;
}

Real qreal(long q, const Real& e) { return pow(Real(q), e); }

// Product over monic irreducibles grouped by degree: value = prod_{n <= N}
// local(n)^{count(n)}. The tail estimate sums count(n) |log local(n)| over the
// next degrees and closes with a geometric remainder; it is an engineering
// estimate, not a proven bound.
FormulaValue product_by_degree(long q, int N, const std::function<ComplexVal(int)>& local,
                               const std::function<Real(int)>& count) {
  if (N < 1) throw RejectedParameter("truncation degree must be positive");
  double lq = std::log2(static_cast<double>(q));
  int look = 16;
  PrecisionGuard guard(static_cast<unsigned>(96 + lq * (N + look)));
  ComplexVal S;
  for (int n = 1; n <= N; ++n) {
    ComplexVal f = local(n);
    if (f.re == 0 && f.im == 0) throw NumericalFailure("vanishing Euler factor");
    ComplexVal l = clog(f);
    Real c = count(n);
    S = S + ComplexVal(l.re * c, l.im * c);
  }
  Real T = 0, prev = -1, last = 0;
  for (int n = N + 1; n <= N + look; ++n) {
    Real t = clog(local(n)).abs() * count(n);
    T += t;
    prev = last;
    last = t;
  }
  Real rho = 0;
  if (prev > 0) rho = last / prev;
  if (rho >= 1) throw BudgetExceeded("Euler product tail does not shrink", N);
  T += last * rho / (1 - rho);
  FormulaValue fv;
  fv.approx = cexp(S);
  fv.tail = fv.approx.abs() * (exp(T) - 1);
  fv.trunc = N;
  return fv;
}

Real pi_count(long q, int n) {
  mpz_class c = count_irreducibles(q, n);
  return Real(c.get_str());
}

// bivariate series in a = degree of u^2 and b = degree of v^p, truncated at 2a + p b <= W
class Ser2 {
 public:
  Ser2(int p, int W) : p_(p), W_(W), c_(W / 2 + 1, std::vector<mpq_class>(W / p + 1, 0)) {}
  static Ser2 constant(int p, int W, const mpq_class& v) {
    Ser2 s(p, W);
    s.c_[0][0] = v;
    return s;
  }
  static Ser2 monomial(int p, int W, int a, int b) {
    Ser2 s(p, W);
    if (s.ok(a, b)) s.c_[a][b] = 1;
    return s;
  }
  bool ok(int a, int b) const { return 2 * a + p_ * b <= W_; }
  int amax() const { return W_ / 2; }
  int bmax() const { return W_ / p_; }
  const mpq_class& at(int a, int b) const { return c_[a][b]; }
  mpq_class& at(int a, int b) { return c_[a][b]; }

  Ser2 operator+(const Ser2& o) const {
    Ser2 r = *this;
    for (int a = 0; a <= amax(); ++a)
      for (int b = 0; b <= bmax(); ++b) r.c_[a][b] += o.c_[a][b];
    return r;
  }
  Ser2 operator-(const Ser2& o) const {
    Ser2 r = *this;
    for (int a = 0; a <= amax(); ++a)
      for (int b = 0; b <= bmax(); ++b) r.c_[a][b] -= o.c_[a][b];
    return r;
  }
  Ser2 operator-() const { return Ser2(p_, W_) - *this; }
  Ser2 operator*(const Ser2& o) const {
    Ser2 r(p_, W_);
    for (int a = 0; a <= amax(); ++a)
      for (int b = 0; b <= bmax(); ++b) {
        if (!ok(a, b) || c_[a][b] == 0) continue;
        for (int a2 = 0; a + a2 <= amax(); ++a2)
          for (int b2 = 0; b + b2 <= bmax(); ++b2)
            if (ok(a + a2, b + b2) && o.c_[a2][b2] != 0) r.c_[a + a2][b + b2] += c_[a][b] * o.c_[a2][b2];
      }
    return r;
  }
  Ser2 inverse() const {
    if (c_[0][0] == 0) throw DivisionByZero("series with zero constant term");
    // 1/(c (1 + e)) = (1/c) sum (-e)^j; e has no constant term so the sum is finite
    mpq_class ic = 1 / c_[0][0];
    Ser2 e = *this * constant(p_, W_, ic) - constant(p_, W_, 1);
    Ser2 r = constant(p_, W_, 1), term = constant(p_, W_, 1);
    for (int j = 1; j <= W_; ++j) {
      term = term * (-e);
      r = r + term;
    }
    return r * constant(p_, W_, ic);
  }
  Ser2 operator/(const Ser2& o) const { return *this * o.inverse(); }
  Ser2 scaled(const mpq_class& v) const {
    Ser2 r = *this;
    for (auto& row : r.c_)
      for (auto& x : row) x *= v;
    return r;
  }

 private:
  int p_, W_;
  std::vector<std::vector<mpq_class>> c_;
};

Real cst(const Real&, long c) { return Real(c); }
Ser2 cst(const Ser2& one, long c) { return one.scaled(c); }

Ser2 ser_pow(Ser2 b, mpz_class e) {
  Ser2 r = b * b.inverse();  // unit of the right shape
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = r * b;
    e >>= 1;
    if (e > 0) b = b * b;
  }
  return r;
}

using ESeries = std::vector<ExactNum>;

ESeries es_mul(const ESeries& a, const ESeries& b, int n) {
  ESeries r(n + 1, ExactNum(a[0].ctx()));
  for (int i = 0; i <= n && i < static_cast<int>(a.size()); ++i) {
    if (a[i].is_zero()) continue;
    for (int j = 0; i + j <= n && j < static_cast<int>(b.size()); ++j)
      if (!b[j].is_zero()) r[i + j] += a[i] * b[j];
  }
  return r;
}

ESeries es_pow(ESeries b, mpz_class e, int n) {
  ESeries r(n + 1, ExactNum(b[0].ctx()));
  r[0] = ExactNum(b[0].ctx(), mpq_class(1));
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = es_mul(r, b, n);
    e >>= 1;
    if (e > 0) b = es_mul(b, b, n);
  }
  return r;
}

mpz_class binom(long n, long k) {
  mpz_class r;
  if (k < 0 || n < k) return 0;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

mpz_class zpow(long b, long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), b, e);
  return r;
}

}  // namespace

int residue_class(long m, int p) {
  long r = m % p;
  return static_cast<int>(r < 0 ? r + p : r);
}

ExactNum s_ell(int ell, long n, const ExactNum& x) {
  int p = x.ctx()->p;
  long q = x.ctx()->q;
  ExactNum one = ExactNum::one(p, q);
  ExactNum xp = x.pow(p);
  ExactNum den = one - xp;
  if (den.is_zero()) throw DivisionByZero("S_l pole: x^p = 1");
  ExactNum id = den.inverse();
  switch (ell) {
    case 1:
      return x.pow(residue_class(n, p)) * id * mpq_class(p);
    case 2: {
      long m = residue_class(n + 1, p);
      return x.pow(m - 1) * (id * mpq_class(m) + xp * id * id * mpq_class(p)) * mpq_class(p);
    }
    case 3: {
      long m = residue_class(n + 2, p);
      ExactNum in = id * mpq_class(m * (m - 1)) + xp * id * id * mpq_class(p * (2 * m + p - 1)) +
                    xp * xp * id * id * id * mpq_class(2L * p * p);
      return x.pow(m - 2) * in * frac(p, 2);
    }
    default:
      throw RejectedParameter("S_l is implemented for l = 1, 2, 3");
  }
}

ExactNum s_ell_direct(int ell, long n, const ExactNum& x) {
  int p = x.ctx()->p;
  long q = x.ctx()->q;
  ExactNum s = ExactNum::zero(p, q), one = ExactNum::one(p, q);
  for (int j = 0; j < p; ++j) {
    ExactNum d = one - zeta(p, q, j) * x;
    if (d.is_zero()) throw DivisionByZero("S_l pole: x^p = 1");
    s += zeta(p, q, -n * j) * d.pow(ell).inverse();
  }
  return s;
}

mpq_class s_unit(int p, long n) { return frac(p - 1, 2) - residue_class(n, p); }

ExactNum s_unit_direct(int p, long q, long n) {
  ExactNum s = ExactNum::zero(p, q), one = ExactNum::one(p, q);
  for (int j = 1; j < p; ++j) s += zeta(p, q, -n * j) / (one - zeta(p, q, j));
  return s;
}

ExactNum alpha_k(int p, long q, int k, long ell) {
  if (k < 1) throw RejectedParameter("k must be positive");
  ExactNum s = ExactNum::zero(p, q), one = ExactNum::one(p, q);
  ExactNum iq = qp(p, q, -1, 2);
  for (int j = 0; j < p; ++j) s += zeta(p, q, j * ell) * (one - iq * zeta(p, q, j)).pow(k).inverse();
  return s * frac(q, p);
}

ExactNum alpha_k_sum(int p, long q, int k, long ell) {
  if (k < 1) throw RejectedParameter("k must be positive");
  Field F = make_field(p, field_degree(p, q));
  ExactNum s = ExactNum::zero(p, q), one = ExactNum::one(p, q);
  ExactNum iq = qp(p, q, -1, 2);
  for (Elem b = 0; b < static_cast<Elem>(q); ++b) {
    ExactNum psi = zeta(p, q, F->trace(b));
    s += psi.pow(residue_class(ell, p)) * (one - psi * iq).pow(k).inverse();
  }
  return s;
}

int default_trunc(long q) {
  if (q == 3) return 12;
  if (q == 9) return 6;
  return std::max(1, static_cast<int>(std::floor(12 * std::log(3.0) / std::log(static_cast<double>(q)))));
}

Real prime_count(long q, int n) { return pi_count(q, n); }

ExactNum thm11_k1(int p, long q, int d) {
  need_coprime(p, d);
  ExactNum one = ExactNum::one(p, q);
  ExactNum top = one - qp(p, q, static_cast<long>(2 - p) * (d / p + 1), 2);
  ExactNum bot = (one - qp(p, q, 2 - p, 2)) * (one - qp(p, q, -p, 2));
  return top / bot * frac(q - 1, q);
}

Real thm11_local(int p, long q, int k, int n) {
  // (1/p) sum_l (1 - zeta^l x)^{-k} = sum_{p | h} binom(h + k - 1, k - 1) x^h, x = q^{-n/2}
  Real x = qreal(q, Real(-n) / 2);
  Real xp = pow(x, p), term = 1, s = 0, eps = pow(Real(2), -static_cast<int>(precision_bits()));
  for (long m = 0;; ++m) {
    term = Real(binom(m * p + k - 1, k - 1).get_str()) * pow(xp, m);
    s += term;
    if (m > 0 && term < eps * s) break;
    if (m > 100000) throw NumericalFailure("local factor series did not converge");
  }
  return s;
}

double thm11_error_term(int p, long q, int k, int d) {
  double lg = (d / 2.0) * ((k + 1.0) / p - 1) * std::log(static_cast<double>(q)) + (k + 1.0) * std::log(d) +
              (static_cast<double>(d) * (k + 1) + k) * std::log(static_cast<double>(k));
  return lg > 700 ? std::numeric_limits<double>::infinity() : std::exp(lg);
}

FormulaValue thm11_rhs(int k, int p, long q, int d, int trunc) {
  need_coprime(p, d);
  if (k < 1) throw RejectedParameter("k must be positive");
  FormulaValue fv;
  if (k == 1) {
    ExactNum v = thm11_k1(p, q, d);
    fv.exact = v;
    fv.approx = v.embed();
    return fv;
  }
  int N = trunc > 0 ? trunc : default_trunc(q);
  fv = product_by_degree(
      q, N, [&](int n) { return cx(thm11_local(p, q, k, n)); }, [&](int n) { return pi_count(q, n); });
  fv.error_term = thm11_error_term(p, q, k, d);
  fv.asymptotic = fv.error_term < fv.approx.real_d();
  if (!fv.asymptotic) fv.note = "formula-not-asymptotic: error term exceeds the main term";
  return fv;
}

ExactNum thm12_cd(int p, long q, int d) {
  need_coprime(p, d);
  ExactNum one = ExactNum::one(p, q);
  ExactNum X = qp(p, q, p - 2, 2L * p);
  ExactNum a = one - qp(p, q, 2 - p, 2);
  mpq_class c(q - 1, static_cast<long>(p) * q);
  ExactNum s2 = s_ell(2, d - 1, X);
  return (one - qp(p, q, -p, 2)) / a * s2 + s2 + s2 * (c * mpq_class(-1 - residue_class(d, p))) -
         s_ell(2, -1, X) * s_ell(1, d, X) * c + s_ell(3, d - 1, X) * c - s_ell(3, d - 2, X) * c;
}

ExactNum thm12_printed(int p, long q, int d) {
  need_coprime(p, d);
  ExactNum one = ExactNum::one(p, q);
  int r = residue_class(d, p);
  ExactNum a = one - qp(p, q, 2 - p, 2);
  ExactNum a2 = a * a;
  ExactNum t1 = (one - qp(p, q, 1 - p)) * mpq_class(d) / a2;
  ExactNum t2 = qp(p, q, 2 - p, 2) * (one - qp(p, q, -p, 2)) / (a2 * a) * mpq_class(2 * p);
  ExactNum t3 = qp(p, q, static_cast<long>(d + p - r) * (2 - p), 2L * p) * frac(d * (q - 1), q) *
                (a2.inverse() - a.inverse() * frac(r, p));
  ExactNum t4 = thm12_cd(p, q, d) * qp(p, q, static_cast<long>(d - 1) * (2 - p), 2L * p) * frac(1, p);
  return t1 - t2 + t3 + t4;
}

ExactNum thm12_proof_final(int p, long q, int d) {
  need_coprime(p, d);
  ExactNum one = ExactNum::one(p, q);
  ExactNum X = qp(p, q, p - 2, 2L * p);
  ExactNum a = one - qp(p, q, 2 - p, 2);
  ExactNum a2 = a * a;
  ExactNum e1 = qp(p, q, static_cast<long>(d - 1) * (2 - p), 2L * p);
  ExactNum e2 = qp(p, q, static_cast<long>(d - 2) * (2 - p), 2L * p);
  mpq_class c(q - 1, static_cast<long>(p) * p * q);
  ExactNum s2 = s_ell(2, d - 1, X);
  ExactNum v = (one - qp(p, q, 1 - p)) * mpq_class(d) / a2;
  v -= qp(p, q, 2 - p, 2) * (one - qp(p, q, -p, 2)) / (a2 * a) * mpq_class(2 * p);
  v += e1 * (one - qp(p, q, -p, 2)) / a * s2 * frac(1, p);
  v += e1 * s2 * frac(1, p);
  v += e1 * s2 * (c * mpq_class(d - 1 - residue_class(d, p)));
  v -= e1 * s_ell(2, -1, X) * s_ell(1, d, X) * c;
  v += e1 * s_ell(3, d - 1, X) * c;
  v -= e2 * s_ell(3, d - 2, X) * c;
  return v;
}

ExactNum thm13_dd(int p, long q, int d) {
  need_coprime(p, d, 2);
  ExactNum Y = qp(p, q, p - 2, p);
  ExactNum s = s_ell(2, (d + p) / 2, Y) - qp(p, q, -2, p) * s_ell(2, (d + p - 2) / 2, Y) +
               qp(p, q, p - 2, 2L * p) * s_ell(2, (d - 1) / 2, Y) -
               qp(p, q, p - 6, 2L * p) * s_ell(2, (d - 3) / 2, Y);
  return s * frac(q - 1, static_cast<long>(p) * q);
}

ExactNum thm13_printed(int p, long q, int d) {
  need_coprime(p, d, 2);
  ExactNum one = ExactNum::one(p, q);
  ExactNum a = one - qp(p, q, 2 - p, 2);
  mpq_class m1(q - 1, q), p1(q + 1, q);
  ExactNum t1 = (one - qp(p, q, -p, 2)) / a * (m1 * frac(d, 2));
  ExactNum t2 = qp(p, q, 2 - p, 2) / (a * a) * (m1 * m1 * frac(p, 2));
  ExactNum t3 = (ExactNum::rational(p, q, p1) + qp(p, q, 2 - p, 2) * (2 * m1) - qp(p, q, 1 - p) * p1) /
                ((one - qp(p, q, 2 - p)) * mpq_class(2));
  ExactNum t4 = thm13_dd(p, q, d) * qp(p, q, static_cast<long>(d) * (2 - p), 2L * p);
  return t1 - t2 + t3 + t4;
}

SplitCounts split_counts(long q, int maxdeg) {
  if (q % 2 == 0) throw RejectedParameter("q must be odd");
  SplitCounts sc;
  sc.split.assign(maxdeg + 1, 0);
  sc.inert.assign(maxdeg + 1, 0);
  // L(u, chi_x) = 1: sum over e | n of e (N_s(e) + (-1)^{n/e} N_i(e)) vanishes
  for (int n = 1; n <= maxdeg; ++n) {
    mpz_class tot = count_irreducibles(q, n) - (n == 1 ? 1 : 0);
    mpz_class s = 0;
    for (int e = 1; e < n; ++e)
      if (n % e == 0) s += e * (sc.split[e] + ((n / e) % 2 ? -1 : 1) * sc.inert[e]);
    mpz_class diff = -s / n;
    sc.split[n] = (tot + diff) / 2;
    sc.inert[n] = (tot - diff) / 2;
    if ((tot + diff) % 2 != 0 || s % n != 0) throw ConsistencyFailure("split/inert recursion not integral");
  }
  return sc;
}

SplitCounts split_counts_enumerated(int p, long q, int maxdeg) {
  const PolyRing& R = ring_for(p, q);
  SplitCounts sc;
  sc.split.assign(maxdeg + 1, 0);
  sc.inert.assign(maxdeg + 1, 0);
  for (int n = 1; n <= maxdeg; ++n)
    for (const Poly& Q : monic_irreducibles(R, n)) {
      if (Q == R.x()) continue;
      if (quad_split_type(p, q, Q) == SplitType::split)
        ++sc.split[n];
      else
        ++sc.inert[n];
    }
  return sc;
}

template <class T>
T local_inert(const T& X, const T& Y, const T& one, long p, LocalForm form) {
  T Y2 = Y * Y;
  T P = cst(one, p);
  if (form == LocalForm::printed) {
    T first = (one - Y + P * Y) / ((one - Y) * (one - Y));
    T num = X * (P * X * Y2 - X * Y2 - P * Y2 + cst(one, 2) * Y2 + X - cst(one, 2));
    T den = (X - one) * (X - one) * (Y2 - one) * (Y2 - one);
    return first - num / den;
  }
  // sum_{a, b} (a + p b + 1) X^a Y^{2b}
  T num = X * Y2 * P - Y2 * P + Y2 - one;
  T den = (X - one) * (X - one) * (Y2 - one) * (Y2 - one);
  return -num / den;
}

template <class T>
T local_split(const T& X, const T& Y, const T& one, long p, LocalForm form) {
  T Y2 = Y * Y, X2 = X * X;
  T P = cst(one, p), P2 = cst(one, p * p);
  auto k = [&](long c) { return cst(one, c); };
  if (form == LocalForm::printed) {
    T w = one - Y + P * Y;
    T first = w / ((one - Y) * (one - Y));
    T poly = -k(2) * P2 * X * Y2 + P2 * X2 * Y2 + P2 * Y2 - k(6) * P * X * Y + k(6) * X * Y + k(6) * P * X * Y2 -
             k(3) * X * Y2 + k(2) * P * X2 * Y - k(2) * X2 * Y - k(2) * P * X2 * Y2 + X2 * Y2 + k(4) * P * Y -
             k(8) * Y - k(4) * P * Y2 + k(4) * Y2 - k(3) * X + X2 + k(4);
    T omx = one - X;
    return first + X * poly / (w * (one - Y) * (one - Y) * omx * omx * omx);
  }
  // sum_{a, b1, b2} (a + p b1 + 1)(a + p b2 + 1) X^a Y^{b1 + b2}
  T num = X2 * Y2 * P2 - k(2) * X * Y2 * P2 + k(2) * X * Y2 * P + X * Y2 - k(2) * X * Y * P - k(2) * X * Y + X +
          Y2 * P2 - k(2) * Y2 * P + Y2 + k(2) * Y * P - k(2) * Y + one;
  T xm = X - one, ym = Y - one;
  return -num / (xm * xm * xm * ym * ym * ym * ym);
}

template Real local_inert<Real>(const Real&, const Real&, const Real&, long, LocalForm);
template Real local_split<Real>(const Real&, const Real&, const Real&, long, LocalForm);

FormulaValue h_euler(int p, long q, const Real& u, const Real& v, LocalForm form, int trunc) {
  int N = trunc > 0 ? trunc : default_trunc(q);
  SplitCounts sc = split_counts(q, N + 16);
  auto local_log = [&](int n) {
    Real X = pow(u, 2 * n), Y = pow(v, static_cast<long>(p) * n), one = 1;
    Real omx = one - X;
    Real C = omx * omx * omx * (one + X) * local_inert(X, Y, one, p, form);
    Real D = omx * omx * omx * omx * local_split(X, Y, one, p, form);
    if (C <= 0 || D <= 0) throw NumericalFailure("nonpositive local factor");
    return Real(sc.inert[n].get_str()) * log(C) + Real(sc.split[n].get_str()) * log(D);
  };
  // counts already folded into the logarithm
  return product_by_degree(
      q, N, [&](int n) { return cx(exp(local_log(n))); }, [](int) { return Real(1); });
}

FormulaValue thm14_leading(int p, long q, LocalForm form, int trunc) {
  Real iq = 1 / boost::multiprecision::sqrt(Real(q));
  FormulaValue h = h_euler(p, q, iq, iq, form, trunc);
  LPoly Lchi = dirichlet_l_of(p, q, 1, [&](const Poly& F) { return chi_x(p, q, F); });
  ComplexVal lv;
  Real up = 1;
  for (const CycInt& c : Lchi) {
    ComplexVal e = c.embed();
    lv = lv + ComplexVal(e.re * up, e.im * up);
    up /= q;
  }
  Real one = 1;
  Real pref = pow(one - one / q, 3) / (24 * pow(one - iq, 2));
  FormulaValue fv;
  fv.approx = h.approx * lv * cx(pref);
  fv.tail = h.tail * lv.abs() * pref;
  fv.trunc = h.trunc;
  fv.note = form == LocalForm::printed ? "printed local factors" : "series-derived local factors";
  return fv;
}

Coeff2 pair_series_direct(int p, long q, int total) {
  const PolyRing& R = ring_for(p, q);
  Coeff2 out(total / 2 + 1, std::vector<mpq_class>(total / p + 1, 0));
  for (int a = 0; 2 * a <= total; ++a) {
    auto g1s = monic_polys(R, a);
    for (int b = 0; 2 * a + p * b <= total; ++b) {
      auto g2s = monic_polys(R, b);
      mpz_class sum = 0;
      for (const Poly& g1 : g1s) {
        if (g1.coef(0) == 0) continue;
        std::map<Poly, int> e1;
        for (const Factor& f : R.factorize(R.compose_xk(g1, 2))) e1[f.P] += f.mult;
        for (const Poly& g2 : g2s) {
          if (g2.coef(0) == 0) continue;
          std::map<Poly, int> e = e1;
          for (const Factor& f : R.factorize(g2)) e[f.P] += f.mult * p;
          mpz_class d2 = 1;
          for (auto& [P, m] : e) d2 *= m + 1;
          sum += d2;
        }
      }
      out[a][b] = sum;
    }
  }
  return out;
}

Coeff2 pair_series_factored(int p, long q, int total, LocalForm form) {
  const PolyRing& R = ring_for(p, q);
  int W = total;
  Ser2 one = Ser2::constant(p, W, 1);
  Ser2 u2 = Ser2::monomial(p, W, 1, 0);
  // Z(u^2)^3 (1 - u^2)^3
  Ser2 z = (one - u2 * Ser2::constant(p, W, q)).inverse();
  Ser2 pre = z * z * z * (one - u2) * (one - u2) * (one - u2);
  // L(u^2, chi_x)
  LPoly Lchi = dirichlet_l_of(p, q, 1, [&](const Poly& F) { return chi_x(p, q, F); });
  Ser2 L(p, W);
  for (std::size_t i = 0; i < Lchi.size(); ++i) {
    const CycInt& c = Lchi[i];
    for (int j = 1; j < p - 1; ++j)
      if (c[j] != 0) throw ConsistencyFailure("quadratic L-function coefficient not rational");
    if (L.ok(static_cast<int>(i), 0)) L.at(static_cast<int>(i), 0) = c[0];
  }
  Ser2 H = one;
  int maxn = std::max(W / 2, W / p);
  for (int n = 1; n <= maxn; ++n) {
    Ser2 X = Ser2::monomial(p, W, n, 0), Y = Ser2::monomial(p, W, 0, n);
    Ser2 omx = one - X;
    Ser2 C = omx * omx * omx * (one + X) * local_inert(X, Y, one, p, form);
    Ser2 D = omx * omx * omx * omx * local_split(X, Y, one, p, form);
    mpz_class ni = 0, ns = 0;
    for (const Poly& Q : monic_irreducibles(R, n)) {
      if (Q == R.x()) continue;
      if (quad_split_type(p, q, Q) == SplitType::split)
        ++ns;
      else
        ++ni;
    }
    H = H * ser_pow(C, ni) * ser_pow(D, ns);
  }
  Ser2 G = pre * L * H;
  Coeff2 out(W / 2 + 1, std::vector<mpq_class>(W / p + 1, 0));
  for (int a = 0; 2 * a <= W; ++a)
    for (int b = 0; 2 * a + p * b <= W; ++b) out[a][b] = G.at(a, b);
  return out;
}

FormulaValue g_euler(long q, const Real& u, int trunc) {
  int N = trunc > 0 ? trunc : default_trunc(q);
  return product_by_degree(
      q, N,
      [&](int n) {
        Real un = pow(u, n), Pn = pow(Real(q), n);
        return cx(1 - un - Pn * (Pn - 1) * un * un);
      },
      [&](int n) { return pi_count(q, n); });
}

FormulaValue e_euler(int p, long q, const Real& w, const ComplexVal& u, int trunc) {
  int N = trunc > 0 ? trunc : default_trunc(q);
  return product_by_degree(
      q, N,
      [&](int n) {
        Real wn = pow(w, n), Pn = pow(Real(q), n);
        ComplexVal un = cpow_int(u, n);
        ComplexVal a = cx(Real(1)) - cpow_int(un, p) * cx(1 / pow(Pn, Real(p) / 2));
        ComplexVal b = cx(Real(1)) - un * cx(1 / Pn);
        return (cx(Real(1)) + cx(wn) * a * b) * cx(1 - wn);
      },
      [&](int n) { return pi_count(q, n); });
}

FormulaValue f_euler(int i, int p, long q, const Real& w, int j, int trunc) {
  if (i < 1 || i > 3) throw RejectedParameter("F_i is defined for i = 1, 2, 3");
  int N = trunc > 0 ? trunc : default_trunc(q);
  return product_by_degree(
      q, N,
      [&](int n) {
        Real wn = pow(w, n), Pn = pow(Real(q), n);
        Real ex = i == 2 ? Real(1) / p : Real(1) / 2 + Real(1) / p;
        long rot = i == 3 ? -2L * j * n : -static_cast<long>(j) * n;
        ComplexVal c = root_of_unity(p, rot) * cx(1 / pow(Pn, ex));
        return (cx(Real(1)) + cx(wn * (Pn - 1)) * (cx(Real(1)) - c)) * cx(1 - Pn * wn);
      },
      [&](int n) { return pi_count(q, n); });
}

std::vector<ExactNum> e_series_product(int p, long q, const ExactNum& u, int n) {
  ExactNum one = ExactNum::one(p, q), zero = ExactNum::zero(p, q);
  ESeries r(n + 1, zero);
  r[0] = one;
  for (int m = 1; m <= n; ++m) {
    ExactNum um = u.pow(m);
    ExactNum kappa = (one - um.pow(p) * qp(p, q, -static_cast<long>(m) * p, 2)) * (one - um * qp(p, q, -m));
    // (1 + kappa w^m)(1 - w^m)
    ESeries f(n + 1, zero);
    f[0] = one;
    f[m] += kappa - one;
    if (2 * m <= n) f[2 * m] -= kappa;
    r = es_mul(r, es_pow(f, count_irreducibles(q, m), n), n);
  }
  return r;
}

std::vector<ExactNum> e_series_direct(int p, long q, const ExactNum& u, int n) {
  const PolyRing& R = ring_for(p, q);
  ExactNum one = ExactNum::one(p, q), zero = ExactNum::zero(p, q);
  ESeries s(n + 1, zero);
  for (int m = 0; m <= n; ++m)
    enumerate_monic(R, m, [&](const Poly& g) {
      auto fs = R.factorize(g);
      ExactNum t = one;
      for (const Factor& f : fs) {
        if (f.mult > 1) return;
        int e = f.P.deg();
        ExactNum ue = u.pow(e);
        t *= (one - ue.pow(p) * qp(p, q, -static_cast<long>(e) * p, 2)) * (one - ue * qp(p, q, -e));
      }
      s[m] += t;
    });
  // times 1 / Z(w) = 1 - q w
  ESeries out(n + 1, zero);
  for (int m = 0; m <= n; ++m) {
    out[m] = s[m];
    if (m > 0) out[m] -= s[m - 1] * mpq_class(q);
  }
  return out;
}

std::vector<mpz_class> zg_series(int p, long q, int n) {
  (void)p;
  QSeries g(n + 1, 0);
  g[0] = 1;
  for (int m = 1; m <= n; ++m) {
    QSeries f(n + 1, 0);
    f[0] = 1;
    mpz_class P = zpow(q, m);
    f[m] -= 1;
    if (2 * m <= n) f[2 * m] -= P * (P - 1);
    mpz_class c = count_irreducibles(q, m);
    QSeries pw(n + 1, 0);
    pw[0] = 1;
    for (mpz_class i = 0; i < c; ++i) pw = qseries_mul(pw, f, n);
    g = qseries_mul(g, pw, n);
  }
  QSeries z(n + 1, 0);
  for (int m = 0; m <= n; ++m) z[m] = zpow(q, 2 * m);
  QSeries r = qseries_mul(z, g, n);
  std::vector<mpz_class> out(n + 1);
  for (int m = 0; m <= n; ++m) {
    if (r[m].get_den() != 1) throw ConsistencyFailure("non-integral square-free phi count");
    out[m] = r[m].get_num();
  }
  return out;
}

FormulaValue thm15_main(int p, long q, int trunc) {
  Real one = 1;
  FormulaValue E = e_euler(p, q, one / q, cx(one), trunc);
  FormulaValue G = g_euler(q, one / (Real(q) * q), trunc);
  Real c = (one - pow(Real(q), -Real(p) / 2)) * (one - pow(Real(q), one - Real(p) / 2));
  FormulaValue fv;
  fv.approx = E.approx / (G.approx * cx(c));
  Real rel = E.tail / E.approx.abs() + G.tail / G.approx.abs();
  fv.tail = fv.approx.abs() * rel * 2;
  fv.trunc = E.trunc;
  return fv;
}

FormulaValue thm15_c0(int p, long q, int d, int trunc) {
  Real one = 1, Q = q, P = p;
  auto qr = [&](const Real& e) { return pow(Q, e); };
  Real w = one / q;
  ComplexVal X = cx(qr(one / 2 - one / P));
  Real a0 = one - qr(-P / 2);
  // E term
  ComplexVal sE;
  Real tail = 0;
  for (int j = 0; j < p; ++j) {
    FormulaValue E = e_euler(p, q, w, X * root_of_unity(p, j), trunc);
    tail += E.tail;
    ComplexVal den = (cx(qr(one / P - one / 2)) - root_of_unity(p, j)) * root_of_unity(p, 2L * j * d);
    sE = sE + E.approx / den;
  }
  ComplexVal T2 = sE * cx((Q + qr(one - 2 / P) - qr(-2 / P)) / (P * a0));
  // the F_i are taken at j = 0
  Real w2 = one / (Q * Q);
  FormulaValue F1 = f_euler(1, p, q, w2, 0, trunc);
  FormulaValue F2 = f_euler(2, p, q, w2, 0, trunc);
  FormulaValue F3 = f_euler(3, p, q, w2, 0, trunc);
  Real b = one - qr(P / 2 - 1);
  Real h = one / 2 - one / P;
  ComplexVal T3 = F1.approx * cx(Q / (a0 * b) * qr(h * (residue_class(2 * d - 1, p) + 1)));
  ComplexVal T4 = F1.approx * cx((one - one / Q) * qr(one - 2 / P) / (a0 * b) * qr(h * (residue_class(2 * d - 3, p) + 1)));
  int r2 = residue_class(2 * d - 2, p);
  ComplexVal T5 = F2.approx * cx((qr((2 - P + r2) / 2) + qr(-Real(r2) / 2)) / ((one - one / Q) * a0) *
                                 qr(Real(residue_class(-2 * d, p)) / P));
  ComplexVal s6;
  for (int j = 0; j < p; ++j) {
    ComplexVal z = root_of_unity(p, j);
    ComplexVal den = (cx(one) - cx(qr(-one / 2)) * z) * (cx(qr(one / 2)) * z - cx(one)) *
                     (cx(qr(one / P)) - root_of_unity(p, -j));
    s6 = s6 + root_of_unity(p, static_cast<long>(j) * (4 * d - 1)) / den;
  }
  ComplexVal T6 = F3.approx * s6 * cx(-(one - one / Q) * Q * Q / (P * P));
  FormulaValue G = g_euler(q, w2, trunc);
  FormulaValue fv;
  fv.approx = (T2 + T3 + T4 + T5 + T6) * cx(Q / (Q * Q + Q - 1)) / G.approx;
  fv.tail = tail + F1.tail + F2.tail + F3.tail + G.tail;
  fv.trunc = G.trunc;
  fv.note = "F_1, F_2, F_3 evaluated at j = 0";
  return fv;
}

ExactNum prop6_rhs(int p, long q, const Poly& g, int d, bool main_only) {
  const PolyRing& R = ring_for(p, q);
  if (!R.is_monic(g) || !R.is_squarefree(g)) throw RejectedParameter("g must be monic and square-free");
  bool full = g.deg() == d;
  if (!full && g.deg() != d - 1) throw RejectedParameter("deg g must be d or d - 1");
  std::vector<int> pd;
  for (const Factor& f : R.factorize(g)) pd.push_back(f.P.deg());
  ExactNum one = ExactNum::one(p, q), zero = ExactNum::zero(p, q);
  int M = full ? 2 * d : 2 * d - 2;
  int n = M - 1;
  // prod_{P | g} (1 - u^{p deg P} / |P|^{p/2})(1 - u^{deg P} / |P|) / ((1 - q^{1 - p/2} u^p)(1 - u))
  ESeries F(n + 1, zero);
  F[0] = one;
  for (int e : pd) {
    ESeries a(n + 1, zero), b(n + 1, zero);
    a[0] = one;
    b[0] = one;
    if (static_cast<long>(p) * e <= n) a[p * e] = -qp(p, q, -static_cast<long>(p) * e, 2);
    if (e <= n) b[e] = -qp(p, q, -e);
    F = es_mul(es_mul(F, a, n), b, n);
  }
  ESeries geo(n + 1, zero);
  ExactNum r = qp(p, q, 2 - p, 2);
  for (int m = 0; static_cast<long>(m) * p <= n; ++m) geo[m * p] = r.pow(m);
  F = es_mul(F, geo, n);
  ExactNum coef = zero;
  for (int m = 0; m <= n; ++m) coef += F[m];
  mpq_class ratio(static_cast<unsigned long>(R.norm(g)), static_cast<unsigned long>(R.euler_phi(g)));
  ratio.canonicalize();
  ExactNum main = coef * ratio / (one - qp(p, q, -p, 2));
  if (main_only) return main;

  auto prod = [&](long jr, long a, long b) {
    // prod_{P | g} (1 - zeta^{jr deg P} |P|^{-a/b})
    ExactNum t = one;
    for (int e : pd) t *= one - zeta(p, q, jr * e) * qp(p, q, -a * e, b);
    return t;
  };
  ExactNum a0 = one - qp(p, q, -p, 2);
  ExactNum x1 = qp(p, q, 2 - p, 2L * p);  // q^{1/p - 1/2}
  ExactNum extra = zero;
  if (full) {
    ExactNum s1 = zero, s2 = zero, s3 = zero;
    int r2 = residue_class(2 * d - 2, p);
    for (int j = 0; j < p; ++j) {
      s1 += zeta(p, q, static_cast<long>(j) * (2 * d - 1)) / (x1 - zeta(p, q, -j)) * prod(-j, p + 2, 2L * p);
      s2 += zeta(p, q, static_cast<long>(j) * (2 * d - 1)) / (qp(p, q, 1, p) - zeta(p, q, -j)) * prod(-j, 1, p);
      ExactNum z = zeta(p, q, j);
      s3 += zeta(p, q, static_cast<long>(j) * (4 * d - 1)) /
            ((one - qp(p, q, -1, 2) * z) * (qp(p, q, 1, 2) * z - one) * (qp(p, q, 1, p) - zeta(p, q, -j))) *
            prod(-2L * j, p + 2, 2L * p);
    }
    ExactNum c2 = qp(p, q, 1, 2) * (qp(p, q, 1 + r2, 2) + qp(p, q, p - 1 - r2, 2)) / (qp(p, q, p, 2) - one);
    extra = qp(p, q, static_cast<long>(d) * (2 - p), p) * frac(1, p) *
            (s1 / a0 + c2 * s2 - s3 * frac(q - 1, p));
  } else {
    ExactNum s1 = zero;
    for (int j = 0; j < p; ++j)
      s1 += zeta(p, q, static_cast<long>(j) * (2 * d - 3)) / (x1 - zeta(p, q, -j)) * prod(-j, p + 2, 2L * p);
    extra = qp(p, q, static_cast<long>(d - 1) * (2 - p), p) / a0 * s1 * frac(1, p);
  }
  return main + extra;
}

ExactNum prop6_main_direct(int p, long q, const Poly& g, int d) {
  const PolyRing& R = ring_for(p, q);
  if (!R.is_monic(g) || !R.is_squarefree(g)) throw RejectedParameter("g must be monic and square-free");
  bool full = g.deg() == d;
  if (!full && g.deg() != d - 1) throw RejectedParameter("deg g must be d or d - 1");
  int n = (full ? 2 * d : 2 * d - 2) - 1;
  ExactNum one = ExactNum::one(p, q), s = ExactNum::zero(p, q);
  // divisors Q of g with mu(Q) / |Q|
  std::vector<std::pair<int, int>> divs;  // (deg Q, mu(Q))
  auto fs = R.factorize(g);
  for (std::size_t mask = 0; mask < (std::size_t(1) << fs.size()); ++mask) {
    int deg = 0, mu = 1;
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (mask >> i & 1) {
        deg += fs[i].P.deg();
        mu = -mu;
      }
    divs.push_back({deg, mu});
  }
  for (int r = 0; static_cast<long>(r) * p <= n; ++r)
    enumerate_monic(R, r, [&](const Poly& Rp) {
      if (R.gcd(Rp, g).deg() != 0) return;
      for (auto [dq, mu] : divs)
        if (static_cast<long>(r) * p + dq <= n) s += qp(p, q, -static_cast<long>(p) * r, 2) * qp(p, q, -dq) * mpq_class(mu);
    });
  mpq_class ratio(static_cast<unsigned long>(R.norm(g)), static_cast<unsigned long>(R.euler_phi(g)));
  ratio.canonicalize();
  return s * ratio / (one - qp(p, q, -p, 2));
}

std::pair<mpq_class, mpq_class> rmt_constants(int k) {
  if (k < 1) throw RejectedParameter("k must be positive");
  auto fact = [](long n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return r;
  };
  mpq_class gu = 1;
  for (int j = 0; j < k; ++j) gu *= mpq_class(fact(j)) / mpq_class(fact(j + k));
  mpz_class den = 1;
  for (int j = 0; j <= k; ++j)
    for (long i = 2L * j - 1; i > 1; i -= 2) den *= i;
  return {gu, mpq_class(1) / mpq_class(den)};
}

DivisorBound divisor_progression_bound(int p, long q, int n, int d, int k) {
  if (n <= d) throw RejectedParameter("need n > d");
  DivisorBound b;
  mpz_class c = binom(n + k - 1, k - 1);
  int h = n - d;
  b.main = c * zpow(q, h);
  double ex = 0.5 * (h + n / p - (n - h) / p + 1);
  b.bound = 3 * c.get_d() * std::pow(k + 2.0, 2 * n - h) * std::pow(static_cast<double>(q), ex);
  return b;
}

QSeries qseries_mul(const QSeries& a, const QSeries& b, int n) {
  QSeries r(n + 1, 0);
  for (int i = 0; i <= n && i < static_cast<int>(a.size()); ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; i + j <= n && j < static_cast<int>(b.size()); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

QSeries qseries_inv(const QSeries& a, int n) {
  if (a.empty() || a[0] == 0) throw DivisionByZero("series with zero constant term");
  QSeries r(n + 1, 0);
  r[0] = 1 / a[0];
  for (int m = 1; m <= n; ++m) {
    mpq_class s = 0;
    for (int i = 1; i <= m && i < static_cast<int>(a.size()); ++i) s += a[i] * r[m - i];
    r[m] = -s / a[0];
  }
  return r;
}

QSeries zeta_series(long q, int n) {
  QSeries r(n + 1);
  for (int m = 0; m <= n; ++m) r[m] = zpow(q, m);
  return r;
}

mpq_class perron_coeff(const QSeries& num, const QSeries& den, int n) {
  return qseries_mul(num, qseries_inv(den, n), n)[n];
}

}  // namespace asmoments
