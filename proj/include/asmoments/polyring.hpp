#pragma once
#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "asmoments/gf.hpp"

namespace asmoments {

// Dense polynomial over F_q, constant term first, no trailing zeros.
struct Poly {
  std::vector<Elem> c;
  Poly() = default;
  explicit Poly(std::vector<Elem> v) : c(std::move(v)) { trim(); }
  int deg() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c.empty(); }
  Elem lead() const { return c.empty() ? 0 : c.back(); }
  Elem coef(int i) const { return (i >= 0 && i < static_cast<int>(c.size())) ? c[i] : 0; }
  void trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  bool operator==(const Poly& o) const { return c == o.c; }
  bool operator!=(const Poly& o) const { return c != o.c; }
  bool operator<(const Poly& o) const { return c < o.c; }
};

struct RatFn {
  Poly num, den;  // den monic, gcd(num, den) = 1
};

struct Factor {
  Poly P;
  int mult;
};

class PolyRing {
 public:
  explicit PolyRing(Field F);
  const Field& field() const { return F_; }
  int p() const { return F_->p(); }
  std::uint64_t q() const { return F_->size(); }

  Poly x() const { return Poly({0, 1}); }
  Poly one() const { return Poly({1}); }
  Poly constant(Elem a) const { return Poly({a}); }
  Poly monomial(int n, Elem a = 1) const;
  Poly linear(Elem root) const;  // x - root

  Poly add(const Poly& a, const Poly& b) const;
  Poly sub(const Poly& a, const Poly& b) const;
  Poly neg(const Poly& a) const;
  Poly mul(const Poly& a, const Poly& b) const;
  Poly scale(const Poly& a, Elem s) const;
  void divmod(const Poly& a, const Poly& b, Poly& quo, Poly& rem) const;
  Poly div(const Poly& a, const Poly& b) const;  // exact division asserted
  Poly mod(const Poly& a, const Poly& b) const;
  Poly gcd(Poly a, Poly b) const;                // monic
  // s with s*a = g mod b, g = gcd(a,b) monic
  Poly inv_mod(const Poly& a, const Poly& m) const;
  Poly mulmod(const Poly& a, const Poly& b, const Poly& m) const;
  Poly powmod(const Poly& a, const mpz_class& e, const Poly& m) const;
  Poly monic(const Poly& a) const;
  Poly derivative(const Poly& a) const;
  Poly compose_xk(const Poly& a, int k) const;  // a(x^k)
  Poly reverse(const Poly& a, int n) const;     // x^n a(1/x), needs deg a <= n
  Poly pth_root(const Poly& a) const;           // requires a = b^p
  Poly pow(const Poly& a, int k) const;
  Elem eval(const Poly& a, Elem x) const;
  bool is_monic(const Poly& a) const { return !a.is_zero() && a.lead() == 1; }

  // monic polynomials of degree n are indexed by their coefficient digits
  // (c_0 most significant); the index order is lexicographic, low degree first
  Poly monic_from_index(std::uint64_t idx, int n) const;
  std::uint64_t monic_index(const Poly& f) const;
  // residues modulo a degree-n modulus: base-q digits, c_0 least significant
  Poly residue_from_index(std::uint64_t idx) const;
  std::uint64_t residue_index(const Poly& r) const;

  std::vector<Factor> factorize(const Poly& f) const;
  bool is_irreducible(const Poly& f) const;
  bool is_squarefree(const Poly& f) const;
  std::int64_t divisor_k(const Poly& f, int k) const;
  int moebius(const Poly& f) const;
  std::uint64_t euler_phi(const Poly& f) const;
  std::uint64_t norm(const Poly& f) const;  // q^deg

  RatFn make_ratfn(const Poly& num, const Poly& den) const;
  // sum over roots of c (with multiplicity) of f(alpha)
  Elem root_sum_eval(const RatFn& f, const Poly& c) const;
  // same quantity via explicit companion-matrix arithmetic
  Elem root_sum_eval_matrix(const RatFn& f, const Poly& c) const;
  std::vector<Elem> power_sums(const Poly& c, int count) const;

  std::vector<int> to_ints(const Poly& f) const;  // packed field elements
  std::string str(const Poly& f) const;

 private:
  Field F_;
  void sqfree_decomp(const Poly& f, int mult, std::vector<Factor>& out) const;
  void ddf(const Poly& f, int mult, std::vector<Factor>& out) const;
  void edf(const Poly& f, int d, int mult, std::vector<Factor>& out) const;
};

void enumerate_monic(const PolyRing& R, int n, const std::function<void(const Poly&)>& fn);
std::vector<Poly> monic_polys(const PolyRing& R, int n);
std::vector<Poly> monic_irreducibles(const PolyRing& R, int n);
// number of monic irreducibles of degree n over F_q
mpz_class count_irreducibles(long q, int n);

}  // namespace asmoments
