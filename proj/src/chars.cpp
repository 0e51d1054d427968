#include "asmoments/chars.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "asmoments/errors.hpp"

namespace asmoments {

namespace {

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

std::uint64_t residue_count(long q, const Poly& M) {
  if (M.deg() < 0) throw RejectedParameter("zero modulus");
  std::uint64_t n = ipow(static_cast<std::uint64_t>(q), M.deg());
  if (M.deg() > 40 || n > (1u << 24)) throw BudgetExceeded("character table too large", 0);
  return n;
}

bool coprime(const PolyRing& R, const Poly& a, const Poly& M) { return !a.is_zero() && R.gcd(a, M).deg() == 0; }

CurveParams bare_curve(FamilyKind kind, int p, long q, const Poly& num) {
  CurveParams c;
  c.kind = kind;
  c.p = p;
  c.q = q;
  c.f = RatFn{num, Poly({1})};
  c.d = num.deg();
  return c;
}

// enumerate polynomials with free coefficients at the given positions
void for_each_supported(const PolyRing& R, const std::vector<int>& pos, bool lead_nonzero,
                        const std::function<void(const Poly&)>& fn) {
  std::uint64_t q = R.q();
  std::size_t m = pos.size();
  std::vector<Elem> dig(m, 0);
  int top = pos.empty() ? 0 : *std::max_element(pos.begin(), pos.end());
  while (true) {
    std::vector<Elem> c(top + 1, 0);
    for (std::size_t i = 0; i < m; ++i) c[pos[i]] = dig[i];
    Poly f(c);
    if (!lead_nonzero || (m > 0 && f.deg() == top)) fn(f);
    std::size_t i = 0;
    while (i < m && ++dig[i] == q) dig[i++] = 0;
    if (i == m) break;
  }
}

}  // namespace

// ---- DirichletChar

int DirichletChar::exponent(const Poly& F) const {
  const PolyRing& R = ring();
  Poly r = R.mod(F, modulus);
  return table[R.residue_index(r)];
}

CycInt DirichletChar::operator()(const Poly& F) const {
  int e = exponent(F);
  return e < 0 ? CycInt(p, 0) : CycInt::zeta_pow(p, e);
}

bool DirichletChar::is_principal() const {
  return std::all_of(table.begin(), table.end(), [](std::int8_t e) { return e <= 0; });
}

DirichletChar char_product(const DirichletChar& a, const DirichletChar& b) {
  if (a.modulus != b.modulus) throw RejectedParameter("characters with different moduli");
  DirichletChar r = a;
  for (std::size_t i = 0; i < r.table.size(); ++i)
    if (r.table[i] >= 0) r.table[i] = static_cast<std::int8_t>((a.table[i] + b.table[i]) % a.p);
  return r;
}

bool trivial_mod(const DirichletChar& chi, const Poly& Q1) {
  const PolyRing& R = chi.ring();
  int k = chi.modulus.deg() - Q1.deg();
  std::uint64_t n = ipow(static_cast<std::uint64_t>(chi.q), k);
  for (std::uint64_t s = 0; s < n; ++s) {
    Poly r = R.add(R.one(), R.mul(Q1, R.residue_from_index(s)));
    int e = chi.table[R.residue_index(R.mod(r, chi.modulus))];
    if (e > 0) return false;
  }
  return true;
}

bool is_primitive(const DirichletChar& chi) {
  const PolyRing& R = chi.ring();
  if (chi.modulus.deg() == 0) return true;
  for (auto& fc : R.factorize(chi.modulus))
    if (trivial_mod(chi, R.div(chi.modulus, fc.P))) return false;
  return true;
}

int char_order(const DirichletChar& chi) { return chi.is_principal() ? 1 : chi.p; }

// ---- chi_f for polynomial f

int chi_f_polynomial_exp(const CurveParams& f, const Poly& c) {
  const PolyRing& R = f.ring();
  if (c.is_zero() || c.coef(0) == 0) return -1;
  if (c.deg() == 0 || f.f.num.is_zero()) return 0;
  int n = f.f.num.deg();
  RatFn rev{R.reverse(f.f.num, n), R.monomial(n)};
  Elem v = R.root_sum_eval(rev, R.monic(c));
  return R.field()->trace(v) % f.p;
}

CycInt chi_f_polynomial(const CurveParams& f, const Poly& c, int psi_a) {
  int e = chi_f_polynomial_exp(f, c);
  if (e < 0) return CycInt(f.p, 0);
  return CycInt::zeta_pow(f.p, static_cast<long>(e) * psi_a);
}

namespace {

DirichletChar chi_poly_table_mod(const CurveParams& f, int n) {
  const PolyRing& R = f.ring();
  DirichletChar chi;
  chi.p = f.p;
  chi.q = f.q;
  chi.modulus = R.monomial(n);
  std::uint64_t N = residue_count(f.q, chi.modulus);
  chi.table.resize(N);
  for (std::uint64_t i = 0; i < N; ++i)
    chi.table[i] = static_cast<std::int8_t>(chi_f_polynomial_exp(f, R.residue_from_index(i)));
  return chi;
}

}  // namespace

DirichletChar chi_f_table(const CurveParams& f) {
  if (f.kind == FamilyKind::ordinary) throw RejectedParameter("chi_f_table needs a polynomial-family curve");
  return chi_poly_table_mod(f, f.d + 1);
}

LPoly dirichlet_l_of(int p, long q, int degQ, const std::function<CycInt(const Poly&)>& chi) {
  const PolyRing& R = ring_for(p, q);
  LPoly L;
  for (int j = 0; j <= degQ; ++j) {
    CycInt s(p, 0);
    enumerate_monic(R, j, [&](const Poly& F) { s += chi(F); });
    L.push_back(s);
  }
  if (!L.back().is_zero()) throw ConsistencyFailure("character sum over a full period is nonzero");
  L.pop_back();
  while (L.size() > 1 && L.back().is_zero()) L.pop_back();
  return L;
}

LPoly dirichlet_l(const DirichletChar& chi) {
  if (chi.is_principal()) throw RejectedParameter("principal character: the L-series diverges");
  return dirichlet_l_of(chi.p, chi.q, chi.modulus.deg(), [&](const Poly& F) { return chi(F); });
}

CorrespondenceResult verify_char_correspondence(const CurveParams& f) {
  if (!in_family(f) || f.kind == FamilyKind::ordinary) throw RejectedParameter("curve outside the polynomial families");
  if (f.f.num.coef(0)) throw RejectedParameter("nonzero constant term");
  const PolyRing& R = f.ring();
  CorrespondenceResult res;
  DirichletChar chi = chi_f_table(f);
  res.periodic = true;
  for (int k = f.d + 1; k <= f.d + 2 && res.periodic; ++k)
    enumerate_monic(R, k, [&](const Poly& c) {
      if (res.periodic && chi_f_polynomial_exp(f, c) != chi.exponent(c)) res.periodic = false;
    });
  res.primitive = is_primitive(chi);
  res.order_p = !chi.is_principal();
  LPoly lhs = dirichlet_l(chi);
  LPoly L = l_from_point_counts(f);
  LPoly rhs = lpoly_mul(LPoly{CycInt(f.p, 1), CycInt(f.p, -1)}, L);
  while (rhs.size() > 1 && rhs.back().is_zero()) rhs.pop_back();
  res.l_identity = lhs == rhs;
  return res;
}

// ---- groups

std::string tag_name(GroupTag t) {
  switch (t) {
    case GroupTag::H_n: return "H_n";
    case GroupTag::H_odd_n: return "H_odd_n";
    case GroupTag::G_mod_g2: return "G_mod_g2";
    case GroupTag::G_gQ: return "G_gQ";
  }
  return "?";
}

std::vector<DirichletChar> order_p_characters(int p, long q, const Poly& M) {
  const PolyRing& R = ring_for(p, q);
  std::uint64_t N = residue_count(q, M);
  mpz_class pe(p);
  // label U/U^p: h * b_k^c gets label(h) + c e_k
  std::vector<std::vector<std::uint8_t>> lab(N);
  std::vector<char> seen(N, 0), unit(N, 0);
  std::vector<std::uint64_t> H;
  for (std::uint64_t i = 0; i < N; ++i) {
    Poly u = R.residue_from_index(i);
    if (!coprime(R, u, M)) continue;
    unit[i] = 1;
    std::uint64_t j = R.residue_index(R.powmod(u, pe, M));
    if (!seen[j]) {
      seen[j] = 1;
      H.push_back(j);
    }
  }
  int r = 0;
  for (std::uint64_t i = 0; i < N; ++i) {
    if (!unit[i] || seen[i]) continue;
    Poly b = R.residue_from_index(i);
    std::vector<std::uint64_t> add;
    for (std::uint64_t h : H) {
      Poly cur = R.residue_from_index(h);
      for (int c = 1; c < p; ++c) {
        cur = R.mulmod(cur, b, M);
        std::uint64_t j = R.residue_index(cur);
        if (seen[j]) throw ConsistencyFailure("coset labelling collision");
        seen[j] = 1;
        lab[j] = lab[h];
        lab[j].resize(r + 1, 0);
        lab[j][r] = static_cast<std::uint8_t>(c);
        add.push_back(j);
      }
    }
    H.insert(H.end(), add.begin(), add.end());
    ++r;
  }
  std::vector<DirichletChar> out;
  std::uint64_t count = ipow(static_cast<std::uint64_t>(p), r);
  std::vector<int> lam(r, 0);
  for (std::uint64_t li = 0; li < count; ++li) {
    std::uint64_t t = li;
    for (int k = 0; k < r; ++k) {
      lam[k] = static_cast<int>(t % p);
      t /= p;
    }
    DirichletChar chi;
    chi.p = p;
    chi.q = q;
    chi.modulus = M;
    chi.table.assign(N, -1);
    for (std::uint64_t i = 0; i < N; ++i) {
      if (!unit[i]) continue;
      int v = 0;
      for (std::size_t k = 0; k < lab[i].size(); ++k) v += lam[k] * lab[i][k];
      chi.table[i] = static_cast<std::int8_t>(v % p);
    }
    out.push_back(std::move(chi));
  }
  return out;
}

mpz_class predicted_H_size(long q, int p, int n) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), q, n - 1 - (n - 1) / p);
  return r;
}

mpz_class predicted_H_odd_size(long q, int p, int n) {
  int m = n - 1;
  int free = (m + 1) / 2 - m / p + m / (2 * p);
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), q, free);
  return r;
}

CharGroup char_group_H(int p, long q, int n) {
  if (n < 1) throw RejectedParameter("H_n needs n >= 1");
  const PolyRing& R = ring_for(p, q);
  CharGroup G;
  G.tag = GroupTag::H_n;
  G.p = p;
  G.q = q;
  G.modulus = R.monomial(n);
  G.members = order_p_characters(p, q, G.modulus);
  if (mpz_class(static_cast<unsigned long>(G.members.size())) != predicted_H_size(q, p, n))
    throw ConsistencyFailure("|H_n| differs from the closed form");
  return G;
}

CharGroup char_group_H_odd(int p, long q, int n) {
  if (n < 1) throw RejectedParameter("H_odd needs n >= 1");
  const PolyRing& R = ring_for(p, q);
  CharGroup G;
  G.tag = GroupTag::H_odd_n;
  G.p = p;
  G.q = q;
  G.modulus = R.monomial(n);
  std::vector<int> pos;
  for (int j = 1; j <= n - 1; j += 2)
    if (j % p) pos.push_back(j);
  for_each_supported(R, pos, false, [&](const Poly& f) {
    G.members.push_back(chi_poly_table_mod(bare_curve(FamilyKind::odd, p, q, f), n));
  });
  std::set<std::vector<std::int8_t>> distinct;
  for (auto& m : G.members) distinct.insert(m.table);
  if (distinct.size() != G.members.size()) throw ConsistencyFailure("H_odd members are not distinct");
  if (mpz_class(static_cast<unsigned long>(G.members.size())) != predicted_H_odd_size(q, p, n))
    throw ConsistencyFailure("|H_odd| differs from the closed form");
  return G;
}

CharGroup char_group_G_gQ(int p, long q, const Poly& g, const Poly& Q) {
  const PolyRing& R = ring_for(p, q);
  if (!R.is_monic(g) || !R.is_squarefree(g) || g.deg() < 1) throw RejectedParameter("g must be monic squarefree");
  if (!R.is_monic(Q) || !R.mod(g, Q).is_zero()) throw RejectedParameter("Q must be a monic divisor of g");
  CharGroup G;
  G.tag = GroupTag::G_gQ;
  G.p = p;
  G.q = q;
  G.g = g;
  G.Q = Q;
  G.modulus = R.mul(g, Q);
  G.members = order_p_characters(p, q, G.modulus);
  if (G.members.size() != R.norm(Q)) throw ConsistencyFailure("|G_gQ| differs from |Q|");
  return G;
}

CharGroup char_group_G(int p, long q, const Poly& g) {
  CharGroup G = char_group_G_gQ(p, q, g, g);
  G.tag = GroupTag::G_mod_g2;
  return G;
}

std::vector<DirichletChar> primitive_members(const CharGroup& G) {
  std::vector<DirichletChar> out;
  for (auto& m : G.members)
    if (is_primitive(m)) out.push_back(m);
  return out;
}

bool perp_by_average(const Poly& F, const CharGroup& G) {
  CycInt s(G.p, 0);
  for (auto& m : G.members) s += m(F);
  auto n = static_cast<std::int64_t>(G.members.size());
  if (s == CycInt(G.p, n)) return true;
  if (s.is_zero()) return false;
  throw ConsistencyFailure("group average is neither 0 nor 1");
}

bool perp_by_structure(const Poly& F, const CharGroup& G) {
  const PolyRing& R = ring_for(G.p, G.q);
  const Poly& M = G.modulus;
  if (!coprime(R, F, M)) throw RejectedParameter("F must be coprime to the modulus");
  Poly r = R.mod(F, M);
  int n = M.deg();
  switch (G.tag) {
    case GroupTag::H_n:
      // F = R(x^p) mod x^n
      for (int j = 0; j < n; ++j)
        if (j % G.p && r.coef(j)) return false;
      return true;
    case GroupTag::H_odd_n: {
      // F in R*S with R = {a(x^2)}, S = {b(x^p)} modulo x^n, both units
      std::vector<int> even, pth;
      for (int j = 0; j < n; ++j) {
        if (j % 2 == 0) even.push_back(j);
        if (j % G.p == 0) pth.push_back(j);
      }
      std::vector<Poly> Rs, Ss;
      for_each_supported(R, even, false, [&](const Poly& a) {
        if (a.coef(0)) Rs.push_back(a);
      });
      for_each_supported(R, pth, false, [&](const Poly& b) {
        if (b.coef(0)) Ss.push_back(b);
      });
      for (auto& a : Rs)
        for (auto& b : Ss)
          if (R.mulmod(a, b, M) == r) return true;
      return false;
    }
    case GroupTag::G_mod_g2:
    case GroupTag::G_gQ: {
      // p-th power modulo gQ
      mpz_class pe(G.p);
      std::uint64_t N = residue_count(G.q, M);
      for (std::uint64_t i = 0; i < N; ++i) {
        Poly u = R.residue_from_index(i);
        if (coprime(R, u, M) && R.powmod(u, pe, M) == r) return true;
      }
      return false;
    }
  }
  return false;
}

bool perp_membership(const Poly& F, const CharGroup& G) {
  bool a = perp_by_average(F, G);
  bool b = perp_by_structure(F, G);
  if (a != b) throw ConsistencyFailure("perp routes disagree for " + ring_for(G.p, G.q).str(F));
  return a;
}

// ---- ordinary family

CycInt chi_f_ordinary(const CurveParams& f, const Poly& c, int psi_a) {
  if (f.kind != FamilyKind::ordinary) throw RejectedParameter("needs an ordinary-family curve");
  return psi_f(f, f.ring().monic(c), psi_a);
}

CycInt chi_f_ordinary_decomposed(const CurveParams& f, const Poly& c0, int psi_a) {
  if (f.kind != FamilyKind::ordinary) throw RejectedParameter("needs an ordinary-family curve");
  const PolyRing& R = f.ring();
  const auto& K = *R.field();
  const Poly& h = f.f.num;
  const Poly& g = f.f.den;
  Poly c = R.monic(c0);
  if (!coprime(R, c, g)) return CycInt(f.p, 0);
  int k = c.deg();
  if (k == 0) return CycInt(f.p, 1);
  // h = (a x + b) g + r
  Poly quo, r;
  R.divmod(h, g, quo, r);
  Elem a = quo.coef(1), b = quo.coef(0);
  int e = 0;
  e += K.trace(K.neg(K.mul(a, c.coef(k - 1))));  // chi_{ax}
  e += K.trace(K.scale(b, k % f.p));              // chi_b
  if (!r.is_zero()) e += K.trace(R.root_sum_eval(RatFn{r, g}, c));
  return CycInt::zeta_pow(f.p, static_cast<long>(e) * psi_a);
}

DirichletChar chi_ordinary_table(int p, long q, const Poly& r, const Poly& g) {
  const PolyRing& R = ring_for(p, q);
  DirichletChar chi;
  chi.p = p;
  chi.q = q;
  chi.modulus = R.mul(g, g);
  std::uint64_t N = residue_count(q, chi.modulus);
  chi.table.resize(N);
  RatFn f{r, g};
  for (std::uint64_t i = 0; i < N; ++i) {
    Poly c = R.residue_from_index(i);
    if (!coprime(R, c, g)) {
      chi.table[i] = -1;
    } else if (c.deg() == 0 || r.is_zero()) {
      chi.table[i] = 0;
    } else {
      chi.table[i] = static_cast<std::int8_t>(R.field()->trace(R.root_sum_eval(f, R.monic(c))) % p);
    }
  }
  return chi;
}

LPoly ordinary_char_l(const CurveParams& f, int maxdeg) {
  const PolyRing& R = f.ring();
  LPoly L;
  for (int j = 0; j <= maxdeg; ++j) {
    CycInt s(f.p, 0);
    enumerate_monic(R, j, [&](const Poly& F) { s += chi_f_ordinary(f, F); });
    L.push_back(s);
  }
  return L;
}

PropL2Result verify_prop_l2(const CurveParams& f) {
  if (f.kind != FamilyKind::ordinary || !in_family(f)) throw RejectedParameter("needs an ordinary-family curve");
  const PolyRing& R = f.ring();
  const auto& K = *R.field();
  PropL2Result res;
  const Poly& h = f.f.num;
  const Poly& g = f.f.den;
  res.infinity_ramified = g.deg() == f.d - 1;
  if (h.deg() == f.d && g.deg() == f.d) {
    Elem finf = K.mul(h.lead(), K.inv(g.lead()));
    res.delta = CycInt::zeta_pow(f.p, K.trace(finf));
  } else {
    res.delta = CycInt(f.p, 1);
  }
  LPoly L = l_from_point_counts(f);
  int top = static_cast<int>(L.size()) + 1;
  LPoly lhs = ordinary_char_l(f, top);
  LPoly rhs = lpoly_mul(LPoly{CycInt(f.p, 1), -res.delta}, L);
  rhs.resize(top + 1, CycInt(f.p, 0));
  LPoly plain = L;
  plain.resize(top + 1, CycInt(f.p, 0));
  res.ok = lhs == rhs;
  res.equal_without_factor = lhs == plain;
  return res;
}

OrdinaryBijection check_ordinary_bijection(int p, long q, const Poly& g) {
  const PolyRing& R = ring_for(p, q);
  CharGroup G = char_group_G(p, q, g);
  OrdinaryBijection res;
  res.phi_g = R.euler_phi(g);
  res.primitive_count = primitive_members(G).size();
  std::set<std::vector<std::int8_t>> group_tables, images;
  for (auto& m : G.members) group_tables.insert(m.table);
  res.all_primitive = true;
  res.all_in_group = true;
  res.periodic = true;
  CurveParams cp;
  cp.kind = FamilyKind::ordinary;
  cp.p = p;
  cp.q = q;
  cp.d = g.deg();
  std::uint64_t N = ipow(static_cast<std::uint64_t>(q), g.deg());
  for (std::uint64_t i = 0; i < N; ++i) {
    Poly r = R.residue_from_index(i);
    if (!coprime(R, r, g)) continue;
    ++res.hg_size;
    DirichletChar chi = chi_ordinary_table(p, q, r, g);
    if (!is_primitive(chi)) res.all_primitive = false;
    if (!group_tables.count(chi.table)) res.all_in_group = false;
    images.insert(chi.table);
    cp.f = RatFn{r, g};
    int top = 2 * g.deg() + 1;
    for (int k = 2 * g.deg(); k <= top && res.periodic; ++k)
      enumerate_monic(R, k, [&](const Poly& c) {
        if (res.periodic && !(chi_f_ordinary(cp, c) == chi(c))) res.periodic = false;
      });
  }
  res.distinct_images = images.size();
  return res;
}

CycInt family_char_sum(int p, long q, int d, const Poly& F, bool odd) {
  const PolyRing& R = ring_for(p, q);
  std::vector<int> pos;
  for (int j = 1; j <= d; ++j)
    if (j % p && (!odd || j % 2)) pos.push_back(j);
  CycInt s(p, 0);
  for_each_supported(R, pos, true, [&](const Poly& f) {
    s += chi_f_polynomial(bare_curve(odd ? FamilyKind::odd : FamilyKind::polynomial, p, q, f), F);
  });
  return s;
}

std::int64_t three_case_value(const Poly& F, const CharGroup& Hd, const CharGroup& Hd1) {
  auto a = static_cast<std::int64_t>(Hd.members.size());
  auto b = static_cast<std::int64_t>(Hd1.members.size());
  if (!perp_membership(F, Hd)) return 0;
  if (!perp_membership(F, Hd1)) return -a;
  return b - a;
}

// ---- quadratic character modulo x

SplitType quad_split_type(int p, long q, const Poly& Q) {
  const PolyRing& R = ring_for(p, q);
  if (q % 2 == 0) throw RejectedParameter("needs odd characteristic");
  if (!R.is_monic(Q) || !R.is_irreducible(Q) || Q == R.x()) throw RejectedParameter("Q must be monic irreducible and not x");
  mpz_class e;
  mpz_ui_pow_ui(e.get_mpz_t(), q, Q.deg());
  e = (e - 1) / 2;
  return R.powmod(R.x(), e, Q) == R.one() ? SplitType::split : SplitType::inert;
}

CycInt chi_x(int p, long q, const Poly& F) {
  const PolyRing& R = ring_for(p, q);
  Elem c = F.coef(0);
  if (!c) return CycInt(p, 0);
  Elem v = R.field()->pow(c, static_cast<std::uint64_t>((q - 1) / 2));
  return CycInt(p, v == 1 ? 1 : -1);
}

}  // namespace asmoments
