#include <set>

#include "asmoments/errors.hpp"
#include "asmoments/exact.hpp"
#include "asmoments/gf.hpp"
#include "doctest.h"

using namespace asmoments;

namespace {

// reference irreducibility: no root and (degree 4) no quadratic factor, by brute force
bool has_root(const std::vector<int>& m, int p) {
  for (int a = 0; a < p; ++a) {
    long v = 0;
    for (int i = static_cast<int>(m.size()) - 1; i >= 0; --i) v = (v * a + m[i]) % p;
    if (v == 0) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("make_field rejects bad characteristic") {
  CHECK_THROWS_AS(make_field(2, 1), RejectedParameter);
  CHECK_THROWS_AS(make_field(9, 1), RejectedParameter);
  CHECK_THROWS_AS(make_field(3, 0), RejectedParameter);
}

TEST_CASE("canonical moduli") {
  CHECK(make_field(3, 1)->modulus() == std::vector<int>{0, 1});
  // least monic irreducible quadratic over F_3, low coefficient first
  std::vector<int> best;
  for (int c0 = 0; c0 < 3 && best.empty(); ++c0)
    for (int c1 = 0; c1 < 3 && best.empty(); ++c1)
      if (!has_root({c0, c1, 1}, 3)) best = {c0, c1, 1};
  CHECK(make_field(3, 2)->modulus() == best);
  auto m = make_field(5, 3)->modulus();
  CHECK(m.size() == 4);
  CHECK_FALSE(has_root(m, 5));
}

TEST_CASE("Frobenius fixes every element") {
  for (auto [p, e] : std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {3, 3}, {3, 6}, {5, 2}}) {
    auto F = make_field(p, e);
    for (Elem x = 0; x < F->size(); ++x) REQUIRE(F->pow(x, F->size()) == x);
  }
}

TEST_CASE("field axioms by table and slow path agree") {
  auto F = make_field(3, 7);  // above the full-table threshold
  auto G = make_field(3, 2);
  for (Elem a = 0; a < 200; a += 7)
    for (Elem b = 0; b < 200; b += 11) {
      CHECK(F->sub(F->add(a, b), b) == a);
      if (b) CHECK(F->mul(F->mul(a, b), F->inv(b)) == a);
    }
  for (Elem a = 0; a < 9; ++a)
    for (Elem b = 0; b < 9; ++b)
      for (Elem c = 0; c < 9; ++c)
        CHECK(G->mul(a, G->add(b, c)) == G->add(G->mul(a, b), G->mul(a, c)));
}

TEST_CASE("absolute trace") {
  auto F9 = make_field(3, 2);
  CHECK(F9->trace(1) == 2);
  CHECK(F9->trace(0) == 0);
  auto F27 = make_field(3, 3);
  for (Elem x = 0; x < 27; ++x) {
    Elem s = F27->add(F27->add(x, F27->pow(x, 3)), F27->pow(x, 9));
    REQUIRE(s < 3);
    CHECK(F27->trace(x) == static_cast<int>(s));
    CHECK(F27->trace(x) == F27->trace_by_powers(x));
  }
  // linear and surjective
  auto F = make_field(5, 2);
  std::set<int> img;
  for (Elem a = 0; a < F->size(); ++a) {
    img.insert(F->trace(a));
    for (Elem b = 0; b < F->size(); b += 3) CHECK(F->trace(F->add(a, b)) == (F->trace(a) + F->trace(b)) % 5);
  }
  CHECK(img.size() == 5);
}

TEST_CASE("psi is a homomorphism") {
  CHECK(psi_value(0, 3).is_one());
  CHECK(psi_value(1, 3) == CycInt::zeta_pow(3, 1));
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) CHECK(psi_value(a, 5) * psi_value(b, 5) == psi_value(a + b, 5));
  CycInt s(5, 0);
  for (int c = 0; c < 5; ++c) s += psi_value(c, 5);
  CHECK(s.is_zero());
}

TEST_CASE("embeddings") {
  auto F9 = make_field(3, 2);
  auto F729 = make_field(3, 6);
  FieldElem one{F9, 1};
  CHECK(embed(one, F729).v == 1);
  for (Elem x = 0; x < 9; ++x) {
    FieldElem fx{F9, x};
    CHECK(abs_trace(embed(fx, F729)) == (3 * abs_trace(fx)) % 3);
  }
  auto F81 = make_field(3, 4);
  for (Elem x = 0; x < 9; ++x) {
    FieldElem fx{F9, x};
    CHECK(abs_trace(embed(fx, F81)) == (2 * abs_trace(fx)) % 3);
  }
  auto emb = make_embedding(3, 2, 3);
  Elem r = emb->image_of_gen();
  const auto& m = F9->modulus();
  Elem v = 0;
  for (int i = 2; i >= 0; --i) v = F729->add(F729->mul(v, r), F729->from_int(m[i]));
  CHECK(v == 0);
  for (Elem a = 0; a < 9; ++a)
    for (Elem b = 0; b < 9; ++b) {
      CHECK((*emb)(F9->add(a, b)) == F729->add((*emb)(a), (*emb)(b)));
      CHECK((*emb)(F9->mul(a, b)) == F729->mul((*emb)(a), (*emb)(b)));
    }
  CHECK_THROWS_AS(embed(FieldElem{F9, 1}, make_field(3, 3)), RejectedParameter);
}
