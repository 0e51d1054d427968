#include <random>
#include <set>

#include "asmoments/chars.hpp"
#include "asmoments/errors.hpp"
#include "asmoments/families.hpp"
#include "doctest.h"

using namespace asmoments;

namespace {

Poly random_poly(std::mt19937& rng, const PolyRing& R, int deg) {
  std::uniform_int_distribution<std::uint64_t> d(0, R.q() - 1);
  std::vector<Elem> c(deg + 1);
  for (auto& x : c) x = static_cast<Elem>(d(rng));
  if (!c[deg]) c[deg] = 1;
  return Poly(c);
}

}  // namespace

TEST_CASE("chi_f for polynomial f") {
  const PolyRing& R = ring_for(3, 3);
  auto f = make_curve(FamilyKind::polynomial, 3, 3, Poly({0, 1, 2, 0, 1}));
  CHECK(chi_f_polynomial(f, R.x()).is_zero());
  CHECK(chi_f_polynomial(f, R.mul(R.x(), Poly({1, 1}))).is_zero());
  // single root alpha = 1: value psi(tr f(1/1))
  CHECK(chi_f_polynomial(f, R.linear(1)) == CycInt::zeta_pow(3, R.field()->trace(R.eval(f.f.num, 1))));
  std::mt19937 rng(1);
  for (int it = 0; it < 100; ++it) {
    Poly a = R.monic(random_poly(rng, R, 1 + it % 4));
    Poly b = R.monic(random_poly(rng, R, 1 + it % 3));
    CHECK(chi_f_polynomial(f, R.mul(a, b)) == chi_f_polynomial(f, a) * chi_f_polynomial(f, b));
  }
}

TEST_CASE("correspondence with Dirichlet characters") {
  for (int d : {1, 2, 4}) {
    auto fd = f_d_members(3, 3, d);
    std::set<std::vector<std::int8_t>> tables;
    for (auto& f : fd) {
      auto r = verify_char_correspondence(f);
      CHECK(r.periodic);
      CHECK(r.primitive);
      CHECK(r.order_p);
      CHECK(r.l_identity);
      tables.insert(chi_f_table(f).table);
    }
    std::size_t expect = 2;
    for (int i = 0; i < d - d / 3 - 1; ++i) expect *= 3;
    CHECK(fd.size() == expect);
    CHECK(tables.size() == expect);
    // primitive part of H_{d+1} is exactly the image
    auto H = char_group_H(3, 3, d + 1);
    auto pr = primitive_members(H);
    CHECK(pr.size() == expect);
    for (auto& c : pr) CHECK(tables.count(c.table));
  }
  auto f9 = f_d_members(3, 9, 2);
  for (std::size_t i = 0; i < f9.size(); i += 7) CHECK(verify_char_correspondence(f9[i]).ok());
  CHECK_THROWS_AS(verify_char_correspondence(CurveParams{FamilyKind::polynomial, 3, 3, 3, RatFn{Poly({0, 2, 0, 1}), Poly({1})}}),
                  RejectedParameter);
}

TEST_CASE("character groups") {
  CHECK(char_group_H(3, 3, 2).members.size() == 3);
  // p | n: the kernel of x -> x^p is larger than the p-coprime count
  CHECK(char_group_H(3, 3, 3).members.size() == 9);
  CHECK(predicted_H_size(3, 3, 3) == 9);
  CHECK(char_group_H(3, 3, 4).members.size() == 9);
  CHECK(char_group_H(3, 3, 5).members.size() == 27);
  CHECK(char_group_H(3, 9, 3).members.size() == 81);
  CHECK(char_group_H_odd(3, 3, 6).members.size() == 9);
  CHECK(char_group_H_odd(3, 3, 5).members.size() == 3);
  CHECK(char_group_H_odd(3, 3, 8).members.size() == 27);

  const PolyRing& R = ring_for(3, 3);
  for (auto G : {char_group_H(3, 3, 4), char_group_H_odd(3, 3, 6), char_group_G(3, 3, R.mul(R.x(), R.linear(1)))}) {
    // closure and principal member
    std::set<std::vector<std::int8_t>> tabs;
    for (auto& m : G.members) tabs.insert(m.table);
    bool principal = false;
    for (auto& m : G.members) principal = principal || m.is_principal();
    CHECK(principal);
    for (std::size_t i = 0; i < G.members.size(); i += 2)
      for (std::size_t j = 0; j < G.members.size(); j += 3) CHECK(tabs.count(char_product(G.members[i], G.members[j]).table));
    // orthogonality over every residue
    std::uint64_t N = R.norm(G.modulus);
    for (std::uint64_t i = 0; i < N; ++i) {
      Poly r = R.residue_from_index(i);
      if (r.is_zero() || R.gcd(r, G.modulus).deg() > 0) continue;
      CycInt s(3, 0);
      for (auto& m : G.members) s += m(r);
      bool is0 = s.is_zero(), isn = s == CycInt(3, static_cast<std::int64_t>(G.members.size()));
      CHECK((is0 || isn));
    }
  }

  Poly g = R.mul(R.x(), R.linear(1));
  auto G = char_group_G(3, 3, g);
  CHECK(G.members.size() == 9);
  CHECK(primitive_members(G).size() == 4);
  CHECK(R.euler_phi(g) == 4);
  auto GQ = char_group_G_gQ(3, 3, g, R.x());
  CHECK(GQ.members.size() == 3);
  CHECK_THROWS_AS(char_group_G(3, 3, R.mul(R.x(), R.x())), RejectedParameter);
}

TEST_CASE("perp membership: two routes") {
  const PolyRing& R = ring_for(3, 3);
  auto H6 = char_group_H(3, 3, 6);
  auto Hodd = char_group_H_odd(3, 3, 6);
  Poly g = R.mul(R.x(), R.linear(2));
  auto G = char_group_G(3, 3, g);
  for (auto* grp : {&H6, &Hodd, &G}) CHECK(perp_membership(R.one(), *grp));
  CHECK(perp_membership(R.pow(Poly({1, 1}), 3), H6));
  for (int n = 0; n <= 4; ++n)
    enumerate_monic(R, n, [&](const Poly& F) {
      if (F.coef(0) == 0) return;
      CHECK_NOTHROW(perp_membership(F, Hodd));
      CHECK_NOTHROW(perp_membership(F, H6));
      if (R.gcd(F, g).deg() == 0) CHECK_NOTHROW(perp_membership(F, G));
    });
}

TEST_CASE("three-case family sum") {
  const PolyRing& R = ring_for(3, 3);
  for (int d : {2, 4}) {
    auto Hd = char_group_H(3, 3, d), Hd1 = char_group_H(3, 3, d + 1);
    for (int n = 0; n <= 4; ++n)
      enumerate_monic(R, n, [&](const Poly& F) {
        if (F.coef(0) == 0) return;
        CHECK(family_char_sum(3, 3, d, F, false) == CycInt(3, three_case_value(F, Hd, Hd1)));
      });
  }
  auto Hd = char_group_H_odd(3, 3, 5), Hd1 = char_group_H_odd(3, 3, 6);
  for (int n = 0; n <= 4; ++n)
    enumerate_monic(R, n, [&](const Poly& F) {
      if (F.coef(0) == 0) return;
      CHECK(family_char_sum(3, 3, 5, F, true) == CycInt(3, three_case_value(F, Hd, Hd1)));
    });
}

TEST_CASE("ordinary characters") {
  const PolyRing& R = ring_for(3, 3);
  const auto& K = *R.field();
  std::mt19937 rng(8);
  Poly g = R.mul(R.x(), R.mul(R.linear(1), R.linear(2)));
  auto f = make_curve(FamilyKind::ordinary, 3, 3, Poly({1, 1, 0, 2}), g);
  CHECK(chi_f_ordinary(f, R.mul(R.x(), Poly({1, 0, 1}))).is_zero());
  // pure linear part
  for (Elem a = 1; a < 3; ++a) {
    auto fa = make_curve(FamilyKind::ordinary, 3, 3, Poly({0, a}), R.one());
    for (int it = 0; it < 20; ++it) {
      Poly c = R.monic(random_poly(rng, R, 1 + it % 4));
      int k = c.deg();
      CHECK(chi_f_ordinary(fa, c) == CycInt::zeta_pow(3, K.trace(K.neg(K.mul(a, c.coef(k - 1))))));
    }
  }
  for (int it = 0; it < 50; ++it) {
    bool ram = it % 2;
    Poly gg;
    do gg = R.monic(random_poly(rng, R, ram ? 2 : 3));
    while (!R.is_squarefree(gg));
    Poly h;
    do h = random_poly(rng, R, 3);
    while (R.gcd(h, gg).deg() != 0 || (ram && h.deg() != 3));
    auto fo = make_curve(FamilyKind::ordinary, 3, 3, h, gg);
    Poly c = R.monic(random_poly(rng, R, 1 + it % 5));
    CHECK(chi_f_ordinary(fo, c) == chi_f_ordinary_decomposed(fo, c));
  }
}

TEST_CASE("ordinary correspondence") {
  const PolyRing& R = ring_for(3, 3);
  Poly g = R.mul(R.x(), R.mul(R.linear(1), R.linear(2)));
  // h = 2g + r: delta = psi(tr 2)
  auto f = make_curve(FamilyKind::ordinary, 3, 3, R.add(R.scale(g, 2), Poly({1})), g);
  auto r = verify_prop_l2(f);
  CHECK(r.delta == CycInt::zeta_pow(3, 2));
  CHECK(r.ok);
  auto f0 = make_curve(FamilyKind::ordinary, 3, 3, Poly({1, 0, 1}), g);
  CHECK(verify_prop_l2(f0).delta == CycInt(3, 1));
  std::size_t n = 0;
  for (std::uint64_t i = 0; i < 27; ++i) {
    Poly rr = R.residue_from_index(i);
    if (rr.is_zero() || R.gcd(rr, g).deg() > 0) continue;
    for (Elem b = 0; b < 3; ++b) {
      auto fb = make_curve(FamilyKind::ordinary, 3, 3, R.add(rr, R.scale(g, b)), g);
      CHECK(verify_prop_l2(fb).ok);
      ++n;
    }
  }
  CHECK(n == 24);
  for (int deg = 1; deg <= 3; ++deg)
    enumerate_monic(R, deg, [&](const Poly& gg) {
      if (!R.is_squarefree(gg)) return;
      auto b = check_ordinary_bijection(3, 3, gg);
      CHECK(b.ok());
    });
}

TEST_CASE("Dirichlet L-functions and the quadratic character") {
  const PolyRing& R = ring_for(3, 3);
  auto Lx = dirichlet_l_of(3, 3, 1, [](const Poly& F) { return chi_x(3, 3, F); });
  CHECK(Lx.size() == 1);
  auto H = char_group_H(3, 3, 3);
  CHECK_THROWS_AS(dirichlet_l(H.members[0]), RejectedParameter);
  for (auto& c : H.members) {
    if (c.is_principal()) continue;
    CHECK(static_cast<int>(dirichlet_l(c).size()) <= 3);
    // order-p characters are even
    for (int n = 1; n <= 3; ++n)
      enumerate_monic(R, n, [&](const Poly& F) {
        CycInt s(3, 0);
        for (Elem a = 1; a < 3; ++a) s += c(R.scale(F, a));
        CHECK(s == c(F).scaled(2));
      });
  }
  CHECK(quad_split_type(3, 3, R.linear(1)) == SplitType::split);
  CHECK(quad_split_type(3, 3, R.linear(2)) == SplitType::inert);
  CHECK_THROWS_AS(quad_split_type(3, 3, R.x()), RejectedParameter);
  CHECK_THROWS_AS(quad_split_type(3, 3, R.mul(R.linear(1), R.linear(2))), RejectedParameter);
  // prod over P of (1 - chi_x(P) u^{deg P})^{-1} = 1 through u^6
  std::vector<mpz_class> ser(7, 0);
  ser[0] = 1;
  for (int n = 1; n <= 6; ++n)
    for (auto& P : monic_irreducibles(R, n)) {
      if (P == R.x()) continue;
      int s = quad_split_type(3, 3, P) == SplitType::split ? 1 : -1;
      // reciprocity: chi_x(P) = (-1/q)^{deg P} (x/P), and -1 is a non-square mod 3
      CHECK(chi_x(3, 3, P) == CycInt(3, n % 2 ? -s : s));
      for (int j = n; j <= 6; ++j) ser[j] += s * ser[j - n];  // multiply by 1/(1 - s u^n)
    }
  for (int j = 1; j <= 6; ++j) CHECK(ser[j] == 0);
}
