#include <map>
#include <random>
#include <set>

#include "asmoments/errors.hpp"
#include "asmoments/polyring.hpp"
#include "doctest.h"

using namespace asmoments;

namespace {

Poly random_poly(std::mt19937& rng, const PolyRing& R, int deg, bool monic) {
  std::uniform_int_distribution<std::uint64_t> d(0, R.q() - 1);
  Poly f;
  f.c.resize(deg + 1);
  for (auto& x : f.c) x = static_cast<Elem>(d(rng));
  if (monic) f.c[deg] = 1;
  if (!f.c[deg]) f.c[deg] = 1;
  f.trim();
  return f;
}

// count ordered k-tuples of monic divisors with product f
std::int64_t brute_dk(const PolyRing& R, const Poly& f, int k) {
  if (k == 1) return 1;
  std::int64_t n = 0;
  for (int d = 0; d <= f.deg(); ++d)
    enumerate_monic(R, d, [&](const Poly& a) {
      Poly qq, rr;
      R.divmod(f, a, qq, rr);
      if (rr.is_zero()) n += brute_dk(R, qq, k - 1);
    });
  return n;
}

}  // namespace

TEST_CASE("enumeration") {
  PolyRing R3(make_field(3, 1)), R9(make_field(3, 2));
  auto m0 = monic_polys(R3, 0);
  CHECK(m0.size() == 1);
  CHECK(m0[0] == R3.one());
  CHECK(monic_polys(R3, 2).size() == 9);
  auto m = monic_polys(R9, 3);
  CHECK(m.size() == 729);
  std::set<Poly> s(m.begin(), m.end());
  CHECK(s.size() == 729);
  for (std::uint64_t i = 0; i < m.size(); ++i) CHECK(R9.monic_index(m[i]) == i);
  // lexicographic, constant term first
  CHECK(m[1].c[2] == 1);
  CHECK(m[0].c[0] == 0);
}

TEST_CASE("factorization") {
  PolyRing R(make_field(3, 1));
  auto f1 = R.factorize(Poly({1, 0, 1}));
  REQUIRE(f1.size() == 1);
  CHECK(f1[0].mult == 1);
  auto f2 = R.factorize(Poly({2, 0, 1}));
  REQUIRE(f2.size() == 2);
  CHECK(f2[0].P == Poly({1, 1}));
  CHECK(f2[1].P == Poly({2, 1}));
  CHECK_THROWS_AS(R.factorize(Poly()), RejectedParameter);

  std::mt19937 rng(3);
  for (auto e : {1, 2}) {
    PolyRing S(make_field(3, e));
    for (int it = 0; it < 40; ++it) {
      Poly f = random_poly(rng, S, 6, false);
      if (it % 4 == 0) f = S.mul(f, S.mul(Poly({1, 1}), Poly({1, 1})));
      if (it % 5 == 0) f = S.mul(f, S.compose_xk(Poly({2, 1}), 3));
      auto fs = S.factorize(f);
      Poly prod = S.one();
      for (auto& fc : fs) {
        CHECK(S.is_monic(fc.P));
        // irreducible: no factor found by the distinct-degree test
        Poly h = S.x();
        for (int d = 1; 2 * d <= fc.P.deg(); ++d) {
          h = S.powmod(h, mpz_class(static_cast<unsigned long>(S.q())), fc.P);
          CHECK(S.gcd(fc.P, S.sub(h, S.x())).deg() == 0);
        }
        prod = S.mul(prod, S.pow(fc.P, fc.mult));
      }
      CHECK(prod == S.monic(f));
    }
  }
}

TEST_CASE("irreducible counts match the necklace formula") {
  PolyRing R(make_field(3, 1));
  for (int n = 1; n <= 5; ++n) CHECK(monic_irreducibles(R, n).size() == count_irreducibles(3, n).get_ui());
  PolyRing R5(make_field(5, 1));
  CHECK(monic_irreducibles(R5, 3).size() == count_irreducibles(5, 3).get_ui());
}

TEST_CASE("arithmetic functions") {
  for (auto e : {1, 2}) {
    PolyRing R(make_field(3, e));
    CHECK(R.divisor_k(R.one(), 2) == 1);
    CHECK(R.divisor_k(Poly({1, 0, 1}), 2) == (e == 1 ? 2 : 4));
    CHECK(R.divisor_k(Poly({0, 0, 1}), 3) == 6);
    CHECK(R.euler_phi(R.x()) == R.q() - 1);
    CHECK(R.moebius(Poly({0, 0, 1})) == 0);
    CHECK(R.moebius(R.mul(R.x(), Poly({2, 1}))) == 1);
  }
  PolyRing R(make_field(3, 1));
  CHECK_THROWS_AS(R.divisor_k(Poly({1, 2}), 2), RejectedParameter);
  for (int n = 0; n <= 3; ++n)
    enumerate_monic(R, n, [&](const Poly& f) {
      for (int k = 1; k <= 3; ++k) CHECK(R.divisor_k(f, k) == brute_dk(R, f, k));
      // phi by counting units
      std::uint64_t units = 0, tot = R.norm(f);
      for (std::uint64_t i = 0; i < tot; ++i)
        if (R.gcd(R.residue_from_index(i), f).deg() == 0) ++units;
      CHECK(R.euler_phi(f) == units);
      // squarefree agrees with moebius
      CHECK(R.is_squarefree(f) == (R.moebius(f) != 0));
    });
  std::mt19937 rng(5);
  for (int it = 0; it < 30; ++it) {
    Poly a = random_poly(rng, R, 3, true), b = random_poly(rng, R, 4, true);
    if (R.gcd(a, b).deg() != 0) continue;
    CHECK(R.divisor_k(R.mul(a, b), 3) == R.divisor_k(a, 3) * R.divisor_k(b, 3));
  }
}

TEST_CASE("root sums") {
  PolyRing R(make_field(3, 1));
  auto F = R.field();
  RatFn fx{R.x(), R.one()};
  std::mt19937 rng(9);
  for (int k = 1; k <= 5; ++k) {
    Poly c = random_poly(rng, R, k, true);
    CHECK(R.root_sum_eval(fx, c) == F->neg(c.c[k - 1]));
  }
  RatFn inv{R.one(), R.x()};
  CHECK(R.root_sum_eval(inv, Poly({F->neg(2), 1})) == F->inv(2));
  CHECK_THROWS_AS(R.root_sum_eval(inv, Poly({0, 1})), RejectedParameter);

  // extension-field oracle with c irreducible cubic
  auto F27 = make_field(3, 3);
  auto cubics = monic_irreducibles(R, 3);
  for (int it = 0; it < 30; ++it) {
    Poly c = cubics[it % cubics.size()];
    RatFn f = R.make_ratfn(random_poly(rng, R, 4, false), random_poly(rng, R, 2, true));
    if (R.gcd(f.den, c).deg() != 0) continue;
    // a root of c in F_27
    Elem alpha = 0;
    for (Elem a = 0; a < 27; ++a) {
      Elem v = 0;
      for (int i = 3; i >= 0; --i) v = F27->add(F27->mul(v, a), F27->from_int(c.c[i]));
      if (!v) {
        alpha = a;
        break;
      }
    }
    auto ev = [&](const Poly& g, Elem x) {
      Elem v = 0;
      for (int i = g.deg(); i >= 0; --i) v = F27->add(F27->mul(v, x), F27->from_int(g.c[i]));
      return v;
    };
    Elem s = 0, a = alpha;
    for (int j = 0; j < 3; ++j) {
      s = F27->add(s, F27->mul(ev(f.num, a), F27->inv(ev(f.den, a))));
      a = F27->pow(a, 3);
    }
    REQUIRE(s < 3);
    CHECK(R.root_sum_eval(f, c) == s);
    CHECK(R.root_sum_eval_matrix(f, c) == s);
  }
  // linearity in f, additivity over coprime factorizations of c
  PolyRing R9(make_field(3, 2));
  for (int it = 0; it < 30; ++it) {
    RatFn f = R9.make_ratfn(random_poly(rng, R9, 3, false), random_poly(rng, R9, 1, true));
    RatFn g{random_poly(rng, R9, 2, false), f.den};
    Poly c1 = random_poly(rng, R9, 2, true), c2 = random_poly(rng, R9, 3, true);
    if (R9.gcd(c1, c2).deg() || R9.gcd(c1, f.den).deg() || R9.gcd(c2, f.den).deg()) continue;
    auto F9 = R9.field();
    CHECK(R9.root_sum_eval(f, R9.mul(c1, c2)) == F9->add(R9.root_sum_eval(f, c1), R9.root_sum_eval(f, c2)));
    RatFn fg{R9.add(f.num, g.num), f.den};
    CHECK(R9.root_sum_eval(fg, c1) == F9->add(R9.root_sum_eval(f, c1), R9.root_sum_eval(g, c1)));
    CHECK(R9.root_sum_eval_matrix(f, R9.mul(c1, c2)) == R9.root_sum_eval(f, R9.mul(c1, c2)));
  }
}
