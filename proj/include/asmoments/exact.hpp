#pragma once
#include <gmpxx.h>

#include <boost/multiprecision/mpfr.hpp>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace asmoments {

using Real = boost::multiprecision::mpfr_float;

// Sets the working precision (bits) of newly created Real values. Call before
// spawning workers.
void set_precision_bits(unsigned bits);
unsigned precision_bits();
Real real_pi();

struct ComplexVal {
  Real re, im;
  ComplexVal() : re(0), im(0) {}
  ComplexVal(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  ComplexVal operator+(const ComplexVal& o) const { return {re + o.re, im + o.im}; }
  ComplexVal operator-(const ComplexVal& o) const { return {re - o.re, im - o.im}; }
  ComplexVal operator*(const ComplexVal& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  ComplexVal operator/(const ComplexVal& o) const;
  ComplexVal conj() const { return {re, -im}; }
  Real abs() const;
  double real_d() const { return re.convert_to<double>(); }
  double imag_d() const { return im.convert_to<double>(); }
};

// Element of Z[zeta_p] in the basis 1, zeta, ..., zeta^{p-2}. Coordinates are
// checked 64-bit integers; overflow throws.
class CycInt {
 public:
  CycInt() = default;
  explicit CycInt(int p, std::int64_t c = 0);
  static CycInt zeta_pow(int p, long k);

  int p() const { return p_; }
  const std::vector<std::int64_t>& coeffs() const { return c_; }
  std::int64_t operator[](int i) const { return c_[i]; }

  CycInt operator+(const CycInt& o) const;
  CycInt operator-(const CycInt& o) const;
  CycInt operator-() const;
  CycInt operator*(const CycInt& o) const;
  CycInt& operator+=(const CycInt& o);
  CycInt& operator-=(const CycInt& o);
  CycInt scaled(std::int64_t k) const;
  // exact division by an integer; throws if some coordinate is not divisible
  CycInt div_exact(std::int64_t n) const;
  bool divisible_by(std::int64_t n) const;
  bool operator==(const CycInt& o) const { return p_ == o.p_ && c_ == o.c_; }
  bool operator!=(const CycInt& o) const { return !(*this == o); }
  bool is_zero() const;
  bool is_one() const;

  CycInt conj() const;
  // the automorphism zeta -> zeta^a
  CycInt galois(int a) const;
  ComplexVal embed() const;
  std::string str() const;

  // from a length-p vector in the spanning set 1..zeta^{p-1}
  static CycInt from_full(int p, const std::vector<std::int64_t>& v);

 private:
  int p_ = 0;
  std::vector<std::int64_t> c_;
};

CycInt cyc_conj(const CycInt& x);

// R = Q(zeta_p)[s]/(s^m - c) with s a positive real radical of p and
// t = q^{1/(2p)} = s^k. m and c are chosen so the quotient is a field.
struct ExactCtx {
  int p = 0;
  long q = 0;
  int e = 0;
  int m = 0;                  // degree in s
  std::vector<mpq_class> c;   // s^m = c, element of Q(zeta_p)
  int t_exp = 0;              // t = s^t_exp
  long s_base = 0;            // s = s_base^{1/s_root} as a real number
  int s_root = 0;
  int dim() const { return m * (p - 1); }
  std::string describe() const;
};

std::shared_ptr<const ExactCtx> exact_ctx(int p, long q);

class ExactNum {
 public:
  ExactNum() = default;
  explicit ExactNum(std::shared_ptr<const ExactCtx> ctx);
  ExactNum(std::shared_ptr<const ExactCtx> ctx, const mpq_class& r);
  ExactNum(std::shared_ptr<const ExactCtx> ctx, const CycInt& z);

  static ExactNum zero(int p, long q);
  static ExactNum one(int p, long q);
  static ExactNum rational(int p, long q, const mpq_class& r);
  static ExactNum zeta_pow(int p, long q, long k);
  static ExactNum t(int p, long q);
  // t^k for any integer k (negative powers by inversion)
  static ExactNum t_pow(int p, long q, long k);
  // q^{a/b}; requires 2p*a/b integral
  static ExactNum q_pow(int p, long q, long a, long b = 1);
  static ExactNum sqrt_q(int p, long q) { return t_pow(p, q, p); }
  // inverse of coords(); throws RejectedParameter on a size mismatch
  static ExactNum from_coords(int p, long q, const std::vector<mpq_class>& v);

  const std::shared_ptr<const ExactCtx>& ctx() const { return ctx_; }
  const std::vector<mpq_class>& coords() const { return v_; }
  // coefficient of s^i zeta^j
  const mpq_class& coord(int i, int j) const { return v_[i * (ctx_->p - 1) + j]; }

  ExactNum operator+(const ExactNum& o) const;
  ExactNum operator-(const ExactNum& o) const;
  ExactNum operator-() const;
  ExactNum operator*(const ExactNum& o) const;
  ExactNum operator/(const ExactNum& o) const;
  ExactNum operator*(const mpq_class& r) const;
  ExactNum& operator+=(const ExactNum& o);
  ExactNum& operator-=(const ExactNum& o);
  ExactNum& operator*=(const ExactNum& o);
  ExactNum pow(long k) const;
  ExactNum inverse() const;
  ExactNum conj() const;  // complex conjugation: zeta -> zeta^{-1}, s fixed
  bool operator==(const ExactNum& o) const;
  bool operator!=(const ExactNum& o) const { return !(*this == o); }
  bool is_zero() const;

  ComplexVal embed(unsigned bits = 0) const;
  double real_d() const { return embed().real_d(); }
  std::string str() const;

 private:
  std::shared_ptr<const ExactCtx> ctx_;
  std::vector<mpq_class> v_;
  void check_same(const ExactNum& o) const;
};

ExactNum exact_div(const ExactNum& a, const ExactNum& b);
ComplexVal embed_complex(const ExactNum& x, unsigned bits);

// Evaluates sum_j a_j u^j in R.
ExactNum eval_cyc_poly(const std::vector<CycInt>& a, const ExactNum& u);

std::string fmt_real(const Real& x, int digits = 15);
std::string fmt_complex(const ComplexVal& z, int digits = 15);

}  // namespace asmoments
