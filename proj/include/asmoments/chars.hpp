#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "asmoments/lfun.hpp"

namespace asmoments {

// Order-p Dirichlet character stored as exponents: chi(r) = zeta^{e}, e = -1 when gcd(r, Q) != 1.
struct DirichletChar {
  int p = 3;
  long q = 3;
  Poly modulus;
  std::vector<std::int8_t> table;  // indexed by PolyRing::residue_index

  const PolyRing& ring() const { return ring_for(p, q); }
  int exponent(const Poly& F) const;
  CycInt operator()(const Poly& F) const;
  bool is_principal() const;
  bool operator==(const DirichletChar& o) const { return modulus == o.modulus && table == o.table; }
  bool operator<(const DirichletChar& o) const { return table < o.table; }
};

DirichletChar char_product(const DirichletChar& a, const DirichletChar& b);
bool is_primitive(const DirichletChar& chi);
// chi trivial on residues congruent to 1 modulo the divisor Q1
bool trivial_mod(const DirichletChar& chi, const Poly& Q1);
int char_order(const DirichletChar& chi);

// chi_f(c) = psi(tr sum_{c(alpha)=0} f(1/alpha)), 0 when x | c. The reversal
// makes chi_f periodic modulo x^{d+1}; see the README for the convention.
CycInt chi_f_polynomial(const CurveParams& f, const Poly& c, int psi_a = 1);
int chi_f_polynomial_exp(const CurveParams& f, const Poly& c);
// chi_f as a table modulo x^{d+1}
DirichletChar chi_f_table(const CurveParams& f);

struct CorrespondenceResult {
  bool periodic = false;   // root-sum values agree with the table on higher-degree c
  bool primitive = false;  // period exactly x^{d+1}
  bool order_p = false;
  bool l_identity = false;  // L(u, chi_f) = (1 - u) L(u, f, psi)
  bool ok() const { return periodic && primitive && order_p && l_identity; }
};
CorrespondenceResult verify_char_correspondence(const CurveParams& f);

enum class GroupTag { H_n, H_odd_n, G_mod_g2, G_gQ };
std::string tag_name(GroupTag t);

struct CharGroup {
  GroupTag tag = GroupTag::H_n;
  int p = 3;
  long q = 3;
  Poly modulus;
  Poly g, Q;  // for the G groups
  std::vector<DirichletChar> members;
};

// all characters of order dividing p modulo M
std::vector<DirichletChar> order_p_characters(int p, long q, const Poly& M);
CharGroup char_group_H(int p, long q, int n);
CharGroup char_group_H_odd(int p, long q, int n);
CharGroup char_group_G(int p, long q, const Poly& g);
CharGroup char_group_G_gQ(int p, long q, const Poly& g, const Poly& Q);
std::vector<DirichletChar> primitive_members(const CharGroup& G);
// cardinalities predicted in closed form
mpz_class predicted_H_size(long q, int p, int n);
mpz_class predicted_H_odd_size(long q, int p, int n);

// route (i): group average is 1 or 0; route (ii): structural criterion
bool perp_by_average(const Poly& F, const CharGroup& G);
bool perp_by_structure(const Poly& F, const CharGroup& G);
bool perp_membership(const Poly& F, const CharGroup& G);  // throws when routes disagree

CycInt chi_f_ordinary(const CurveParams& f, const Poly& c, int psi_a = 1);
CycInt chi_f_ordinary_decomposed(const CurveParams& f, const Poly& c, int psi_a = 1);
// chi_{f0} for f0 = r/g as a table modulo g^2
DirichletChar chi_ordinary_table(int p, long q, const Poly& r, const Poly& g);

struct PropL2Result {
  bool ok = false;
  bool infinity_ramified = false;  // deg g = d - 1
  bool equal_without_factor = false;  // L(u, chi_f) = L(u, f, psi)
  CycInt delta;
};
// L(u, chi_f) = (1 - delta u) L(u, f, psi) with delta as printed: psi(tr f(inf))
// when deg h = deg g = d, 1 otherwise.
PropL2Result verify_prop_l2(const CurveParams& f);
// sum over monic F coprime to g of chi_f(F) u^{deg F}, through degree maxdeg
LPoly ordinary_char_l(const CurveParams& f, int maxdeg);

LPoly dirichlet_l(const DirichletChar& chi);
// sum of chi(F) u^{deg F} over monic F of degree < degQ; coefficient degQ is checked to vanish
LPoly dirichlet_l_of(int p, long q, int degQ, const std::function<CycInt(const Poly&)>& chi);

// f -> chi_{f} on H_g = {r/g : deg r < deg g, (r, g) = 1} against the primitive part of G mod g^2
struct OrdinaryBijection {
  std::size_t hg_size = 0;
  std::size_t primitive_count = 0;  // |G^pr|
  std::size_t distinct_images = 0;
  bool all_primitive = false;
  bool all_in_group = false;
  bool periodic = false;
  std::uint64_t phi_g = 0;
  bool ok() const {
    return all_primitive && all_in_group && periodic && distinct_images == hg_size && hg_size == primitive_count &&
           primitive_count == phi_g;
  }
};
OrdinaryBijection check_ordinary_bijection(int p, long q, const Poly& g);

// sum over f in F_d (odd: AS^{0,odd}_d shape, no constant) of chi_f(F), by direct summation
CycInt family_char_sum(int p, long q, int d, const Poly& F, bool odd);
// the same sum predicted from perp membership in the groups modulo x^d and x^{d+1}
std::int64_t three_case_value(const Poly& F, const CharGroup& Hd, const CharGroup& Hd1);

enum class SplitType { split, inert };
SplitType quad_split_type(int p, long q, const Poly& Q);
// quadratic character modulo x
CycInt chi_x(int p, long q, const Poly& F);

}  // namespace asmoments
