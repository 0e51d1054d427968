#pragma once
#include <gmpxx.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asmoments/exact.hpp"
#include "asmoments/polyring.hpp"

namespace asmoments {

// [m]_p in {0, ..., p-1}
int residue_class(long m, int p);

// S_l(n, x) = sum_j zeta^{-nj} / (1 - zeta^j x)^l, l = 1, 2, 3
ExactNum s_ell(int ell, long n, const ExactNum& x);
ExactNum s_ell_direct(int ell, long n, const ExactNum& x);
// sum_{j=1}^{p-1} zeta^{-nj} / (1 - zeta^j)
mpq_class s_unit(int p, long n);
ExactNum s_unit_direct(int p, long q, long n);

// alpha_k(l): closed form and the defining sum over b in F_q
ExactNum alpha_k(int p, long q, int k, long ell);
ExactNum alpha_k_sum(int p, long q, int k, long ell);

struct FormulaValue {
  std::optional<ExactNum> exact;
  ComplexVal approx;
  Real tail = 0;            // bound on |approx - limit| from truncation
  int trunc = 0;            // Euler products: largest prime degree included
  double error_term = 0;    // size of the stated O-term, when there is one
  bool asymptotic = true;   // false when the O-term is not smaller than the main term
  std::string note;
};

// truncation degree used when none is given: 12 over F_3, 6 over F_9, about 3^12 primes otherwise
int default_trunc(long q);

// number of monic irreducibles of degree n, as a Real
Real prime_count(long q, int n);

FormulaValue thm11_rhs(int k, int p, long q, int d, int trunc = 0);
ExactNum thm11_k1(int p, long q, int d);
// local factor (1/p) sum_l (1 - zeta^l / sqrt|P|)^{-k} at deg P = n
Real thm11_local(int p, long q, int k, int n);
double thm11_error_term(int p, long q, int k, int d);

ExactNum thm12_cd(int p, long q, int d);
ExactNum thm12_printed(int p, long q, int d);
ExactNum thm12_proof_final(int p, long q, int d);

ExactNum thm13_dd(int p, long q, int d);
ExactNum thm13_printed(int p, long q, int d);

// Split/inert counts of the Q != x by degree: Q splits when x is a square mod Q.
struct SplitCounts {
  std::vector<mpz_class> split, inert;  // index = degree, entry 0 unused
};
SplitCounts split_counts(long q, int maxdeg);
SplitCounts split_counts_enumerated(int p, long q, int maxdeg);

// The local factors of the second-moment generating function for the odd
// family, as rational functions of X = u^{2 deg Q} and Y = v^{p deg Q}.
// printed = the stated A_Q, B_Q; corrected = the factors obtained by summing
// the defining series.
enum class LocalForm { printed, corrected };
// one is the unit of T
template <class T>
T local_inert(const T& X, const T& Y, const T& one, long p, LocalForm form);
template <class T>
T local_split(const T& X, const T& Y, const T& one, long p, LocalForm form);

FormulaValue h_euler(int p, long q, const Real& u, const Real& v, LocalForm form, int trunc = 0);
FormulaValue thm14_leading(int p, long q, LocalForm form = LocalForm::corrected, int trunc = 0);

// Bivariate coefficients of sum d_2(g1(x^2) g2(x)^p) u^{2 deg g1} v^{p deg g2},
// indexed [deg g1][deg g2], for 2 deg g1 + p deg g2 <= total.
using Coeff2 = std::vector<std::vector<mpq_class>>;
Coeff2 pair_series_direct(int p, long q, int total);
// Z(u^2)^3 L(u^2, chi_x) (1 - u^2)^3 H(u, v) expanded to the same range
Coeff2 pair_series_factored(int p, long q, int total, LocalForm form);

FormulaValue g_euler(long q, const Real& u, int trunc = 0);
// E(w, u) at real w and complex u
FormulaValue e_euler(int p, long q, const Real& w, const ComplexVal& u, int trunc = 0);
// F_i(w) with the root of unity index j (i = 1, 2, 3)
FormulaValue f_euler(int i, int p, long q, const Real& w, int j, int trunc = 0);
// E(w, u) power series in w through degree n, exact, from the product over
// primes and from the sum over square-free g
std::vector<ExactNum> e_series_product(int p, long q, const ExactNum& u, int n);
std::vector<ExactNum> e_series_direct(int p, long q, const ExactNum& u, int n);
// coefficients of Z(qu) G(u) through u^n, exact
std::vector<mpz_class> zg_series(int p, long q, int n);

FormulaValue thm15_main(int p, long q, int trunc = 0);
FormulaValue thm15_c0(int p, long q, int d, int trunc = 0);

// Right side of the per-g first moment over AS^ord_{d,g} (deg g = d or d - 1),
// the O-term dropped. main_only keeps just the contour term.
ExactNum prop6_rhs(int p, long q, const Poly& g, int d, bool main_only = false);
// contour term coefficient by summing over R and Q | g directly
ExactNum prop6_main_direct(int p, long q, const Poly& g, int d);

std::pair<mpq_class, mpq_class> rmt_constants(int k);

// short-interval divisor sums
struct DivisorBound {
  mpz_class main;    // binom(n+k-1, k-1) q^{n-d}
  double bound = 0;  // 3 binom(n+k-1,k-1) (k+2)^{2n-h} q^{(h + [n/p] - [(n-h)/p] + 1)/2}, h = n - d
};
DivisorBound divisor_progression_bound(int p, long q, int n, int d, int k);

// univariate rational series over Q
using QSeries = std::vector<mpq_class>;
QSeries qseries_mul(const QSeries& a, const QSeries& b, int n);
QSeries qseries_inv(const QSeries& a, int n);
// coefficients of Z(u) = 1 / (1 - q u) through u^n
QSeries zeta_series(long q, int n);
// coefficient of u^n in num / den; throws DivisionByZero when den(0) = 0
mpq_class perron_coeff(const QSeries& num, const QSeries& den, int n);

}  // namespace asmoments
