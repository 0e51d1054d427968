#include <random>

#include "asmoments/errors.hpp"
#include "asmoments/exact.hpp"
#include "doctest.h"

using namespace asmoments;

namespace {

ExactNum random_exact(std::mt19937& rng, int p, long q) {
  ExactNum x = ExactNum::zero(p, q);
  std::uniform_int_distribution<int> d(-4, 4);
  ExactNum tt = ExactNum::t(p, q);
  for (int i = 0; i < 2 * p; ++i) {
    ExactNum z = ExactNum::zeta_pow(p, q, d(rng));
    mpq_class r(d(rng), 1 + (d(rng) + 4) % 3);
    r.canonicalize();
    x += z * tt.pow(i) * r;
  }
  return x;
}

CycInt random_cyc(std::mt19937& rng, int p) {
  std::uniform_int_distribution<int> d(-20, 20);
  CycInt x(p, 0);
  for (int j = 0; j < p; ++j) x += CycInt::zeta_pow(p, j).scaled(d(rng));
  return x;
}

double cabs_diff(const ComplexVal& a, const ComplexVal& b) { return (a - b).abs().convert_to<double>(); }

}  // namespace

TEST_CASE("cyclotomic basics") {
  CHECK(CycInt(3, 1).conj().is_one());
  CycInt z = CycInt::zeta_pow(3, 1);
  CycInt zc = z.conj();
  CHECK(zc[0] == -1);
  CHECK(zc[1] == -1);
  for (int p : {3, 5, 7}) {
    // cyclotomic relation and Galois sums
    CycInt s(p, 0);
    for (int j = 0; j < p; ++j) s += CycInt::zeta_pow(p, j);
    CHECK(s.is_zero());
    for (int n = -3; n < 2 * p; ++n) {
      CycInt g(p, 0);
      for (int j = 0; j < p; ++j) g += CycInt::zeta_pow(p, static_cast<long>(j) * n);
      CHECK(g == CycInt(p, n % p == 0 ? p : 0));
    }
  }
  std::mt19937 rng(1);
  for (int i = 0; i < 100; ++i) {
    CycInt x = random_cyc(rng, 5);
    ComplexVal e = x.embed();
    ComplexVal n = (x * x.conj()).embed();
    CHECK(std::abs(n.real_d() - (e.re * e.re + e.im * e.im).convert_to<double>()) < 1e-9);
    CHECK(std::abs(n.imag_d()) < 1e-9);
  }
  CHECK_THROWS_AS(CycInt(3, 5).div_exact(2), ConsistencyFailure);
}

TEST_CASE("radical ring relations") {
  for (auto [p, q] : std::vector<std::pair<int, long>>{{3, 3}, {3, 9}, {5, 5}, {3, 27}}) {
    ExactNum t = ExactNum::t(p, q);
    CHECK(t.pow(2 * p) == ExactNum::rational(p, q, q));
    ExactNum sq = ExactNum::sqrt_q(p, q);
    CHECK(sq * sq == ExactNum::rational(p, q, q));
    CHECK((sq * sq) / ExactNum::rational(p, q, q) == ExactNum::one(p, q));
    // cyclotomic polynomial at zeta
    ExactNum s = ExactNum::zero(p, q);
    for (int j = 0; j < p; ++j) s += ExactNum::zeta_pow(p, q, j);
    CHECK(s.is_zero());
    double tv = t.embed().real_d();
    CHECK(tv == doctest::Approx(std::pow(double(q), 1.0 / (2 * p))));
    CHECK(sq.embed().real_d() == doctest::Approx(std::sqrt(double(q))));
  }
  CHECK(ExactNum::sqrt_q(7, 7).embed().real_d() == doctest::Approx(std::sqrt(7.0)));
}

TEST_CASE("ring axioms and division") {
  std::mt19937 rng(7);
  for (auto [p, q] : std::vector<std::pair<int, long>>{{3, 3}, {3, 9}, {5, 5}}) {
    for (int i = 0; i < 6; ++i) {
      ExactNum a = random_exact(rng, p, q), b = random_exact(rng, p, q), c = random_exact(rng, p, q);
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * (b + c) == a * b + a * c);
      if (!b.is_zero()) {
        CHECK((a / b) * b == a);
        CHECK(b / b == ExactNum::one(p, q));
        ComplexVal lhs = (a / b).embed(), rhs = a.embed() / b.embed();
        CHECK(cabs_diff(lhs, rhs) < 1e-12 * std::max(1.0, rhs.abs().convert_to<double>()));
      }
      ComplexVal e1 = (a * c).embed(), e2 = a.embed() * c.embed();
      CHECK(cabs_diff(e1, e2) < 1e-12 * std::max(1.0, e2.abs().convert_to<double>()));
      CHECK(a.conj().conj() == a);
    }
  }
  ExactNum one = ExactNum::one(3, 3);
  ExactNum w = one - ExactNum::sqrt_q(3, 3) * ExactNum::zeta_pow(3, 3, 1);
  CHECK(w.inverse() * w == one);
  CHECK_THROWS_AS(one / ExactNum::zero(3, 3), DivisionByZero);
}

TEST_CASE("complex embedding") {
  ComplexVal z = (ExactNum::one(3, 3) + ExactNum::zeta_pow(3, 3, 1)).embed();
  CHECK(z.real_d() == doctest::Approx(0.5));
  CHECK(z.imag_d() == doctest::Approx(0.8660254037844386));
  CHECK(ExactNum::t_pow(5, 5, 5).embed().real_d() == doctest::Approx(std::sqrt(5.0)));
  CHECK(ExactNum::q_pow(3, 9, 1, 3).embed().real_d() == doctest::Approx(std::pow(9.0, 1.0 / 3)));
  CHECK_THROWS_AS(ExactNum::q_pow(3, 3, 1, 5), RejectedParameter);
  CHECK_THROWS_AS(embed_complex(ExactNum::one(3, 3), 40), RejectedParameter);
  ComplexVal hi = embed_complex(ExactNum::sqrt_q(3, 3), 200);
  CHECK(hi.real_d() == doctest::Approx(std::sqrt(3.0)));
}
