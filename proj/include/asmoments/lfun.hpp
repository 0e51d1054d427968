#pragma once
#include <memory>
#include <string>
#include <vector>

#include "asmoments/exact.hpp"
#include "asmoments/polyring.hpp"

namespace asmoments {

enum class FamilyKind { polynomial, odd, ordinary };
std::string kind_name(FamilyKind k);
FamilyKind parse_kind(const std::string& s);

using LPoly = std::vector<CycInt>;

struct CurveParams {
  FamilyKind kind = FamilyKind::polynomial;
  int p = 3;
  long q = 3;
  int d = 1;
  RatFn f;  // den = 1 for the polynomial families

  const PolyRing& ring() const;
  bool infinity_is_pole() const { return f.num.deg() > f.den.deg(); }
};

const PolyRing& ring_for(int p, long q);
int field_degree(int p, long q);

// Builds and validates curve data; throws RejectedParameter on family violations.
CurveParams make_curve(FamilyKind kind, int p, long q, const Poly& num, const Poly& den = Poly({1}));
bool in_family(const CurveParams& c);

// Trace tables for fast exponential sums: for every non-pole alpha in
// F_{q^n} and every (j, i), the absolute trace of y^i alpha^j / g(alpha).
class TraceTable {
 public:
  TraceTable(int p, long q, int n, const Poly& den, int maxdeg);
  // histogram over Z/p of tr(h(alpha)/g(alpha))
  std::vector<std::int64_t> histogram(const Poly& num) const;
  std::size_t rows() const { return rows_; }

 private:
  int p_, e_, maxdeg_, K_;
  std::size_t rows_ = 0;
  std::vector<std::uint8_t> T_;
};

std::shared_ptr<const TraceTable> trace_table(int p, long q, int n, const Poly& den, int maxdeg);

struct LOptions {
  int psi_a = 1;         // use psi(c) = zeta^{a c}
  bool fe_half = false;  // odd family: low half from point counts, rest from the functional equation
};

// Affine exponential sum over F_{q^n}, poles excluded.
CycInt point_count_sum(const CurveParams& f, int n, int psi_a = 1);
// Sum including the point at infinity when it is not a pole.
CycInt complete_point_count_sum(const CurveParams& f, int n, int psi_a = 1);
int l_degree(const CurveParams& f);
int genus(const CurveParams& f);

LPoly l_from_point_counts(const CurveParams& f, const LOptions& opt = {});
LPoly l_from_char_sums(const CurveParams& f, int psi_a = 1);
// exp(sum S_n u^n / n) through degree len-1
LPoly l_from_sums(const std::vector<CycInt>& S, int len);
// psi_f(F) for monic F coprime to the denominator, else 0
CycInt psi_f(const CurveParams& f, const Poly& F, int psi_a = 1);

struct FEResult {
  ExactNum epsilon;
  bool ok = false;
  bool unit = false;  // epsilon * conj(epsilon) == 1
};
FEResult functional_equation_check(const LPoly& L, int p, long q);

std::vector<ComplexVal> complex_roots(const std::vector<ComplexVal>& coeffs, unsigned bits = 0);
bool rh_check(const LPoly& L, long q, double tol);
Real max_rh_deviation(const LPoly& L, long q);

bool afe_absolute_identity(const CurveParams& f, int k);
bool afe_odd_identity(const CurveParams& f);

// L(u)^k and L(u) * conj(L)(u) as polynomials
LPoly lpoly_mul(const LPoly& a, const LPoly& b);
LPoly lpoly_conj(const LPoly& a);
ExactNum lpoly_at_inv_sqrt_q(const LPoly& L, int p, long q);

}  // namespace asmoments
