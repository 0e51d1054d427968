#pragma once
#include <functional>
#include <vector>

#include "asmoments/lfun.hpp"

namespace asmoments {

struct FamilySpec {
  FamilyKind kind = FamilyKind::polynomial;
  int p = 3;
  long q = 3;
  int d = 2;
};

void validate_spec(const FamilySpec& s);
// closed-form size; for the ordinary family the exact sum over square-free g
mpz_class family_size_formula(const FamilySpec& s);
// members in lexicographic order of their coefficient data
void enumerate_family(const FamilySpec& s, const std::function<void(const CurveParams&)>& fn);
std::vector<CurveParams> family_members(const FamilySpec& s);
// F_d: polynomial members with zero constant term
std::vector<CurveParams> f_d_members(int p, long q, int d, bool odd = false);

// AS_d = disjoint union over b of (F_d + b)
bool verify_disjoint_union(int p, long q, int d);

struct OrdinaryDecomposition {
  std::size_t members = 0;
  std::size_t decomposed = 0;  // members whose (a, b, r/g) split lands in the expected index set
  bool injective = false;
  bool counts_match = false;  // per g: q phi(g) or q (q - 1) phi(g)
  bool ok() const { return decomposed == members && injective && counts_match; }
};
OrdinaryDecomposition verify_ordinary_decomposition(int p, long q, int d);

struct MomentOptions {
  int jobs = 1;
  double budget = 5e10;  // cap on size * sum of q^n over the point counts needed
  bool fe_half = true;   // odd family: half the point counts plus the functional equation
  int psi_a = 1;
};

struct MomentResult {
  FamilySpec spec;
  int k = 1;
  bool absolute = false;
  std::uint64_t size = 0;
  LPoly sum;       // sum over the family of L^k (or |L|^{2k} as L^k conj(L)^k) in u
  ExactNum value;  // average at u = q^{-1/2}
  double seconds = 0;
  double work = 0;
};

double work_estimate(const FamilySpec& s, const MomentOptions& opt = {});
MomentResult brute_moment(const FamilySpec& s, int k, bool absolute, const MomentOptions& opt = {});
std::vector<MomentResult> moment_sweep(FamilyKind kind, int p, long q, const std::vector<int>& ds, int k, bool absolute,
                                       const MomentOptions& opt = {});

// family average of a per-member exact quantity, parallel over members
CycInt family_sum(const std::vector<CurveParams>& members, const std::function<CycInt(const CurveParams&)>& fn,
                  int jobs = 1);

}  // namespace asmoments
