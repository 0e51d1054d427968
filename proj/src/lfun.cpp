#include "asmoments/lfun.hpp"

#include <map>
#include <mutex>
#include <numeric>

#include "asmoments/chars.hpp"
#include "asmoments/errors.hpp"

namespace asmoments {

std::string kind_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::polynomial: return "polynomial";
    case FamilyKind::odd: return "odd";
    case FamilyKind::ordinary: return "ordinary";
  }
  return "?";
}

FamilyKind parse_kind(const std::string& s) {
  if (s == "polynomial" || s == "poly") return FamilyKind::polynomial;
  if (s == "odd") return FamilyKind::odd;
  if (s == "ordinary" || s == "ord") return FamilyKind::ordinary;
  throw RejectedParameter("unknown family kind: " + s);
}

int field_degree(int p, long q) {
  int e = 0;
  long x = q;
  while (x > 1 && x % p == 0) {
    x /= p;
    ++e;
  }
  if (x != 1 || e == 0) throw RejectedParameter("q must be a power of p");
  return e;
}

const PolyRing& ring_for(int p, long q) {
  static std::mutex mu;
  static std::map<std::pair<int, long>, std::unique_ptr<PolyRing>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{p, q}];
  if (!slot) slot = std::make_unique<PolyRing>(make_field(p, field_degree(p, q)));
  return *slot;
}

const PolyRing& CurveParams::ring() const { return ring_for(p, q); }

bool in_family(const CurveParams& c) {
  const PolyRing& R = c.ring();
  const Poly& h = c.f.num;
  const Poly& g = c.f.den;
  switch (c.kind) {
    case FamilyKind::polynomial:
    case FamilyKind::odd: {
      if (g != R.one() || h.deg() != c.d || c.d < 1) return false;
      if (std::gcd(c.d, c.p) != 1) return false;
      for (int j = 1; j <= h.deg(); ++j)
        if (j % c.p == 0 && h.coef(j)) return false;
      if (c.kind == FamilyKind::odd) {
        if (c.d % 2 == 0) return false;
        for (int j = 0; j <= h.deg(); j += 2)
          if (h.coef(j)) return false;
      }
      return true;
    }
    case FamilyKind::ordinary: {
      if (!R.is_monic(g) || !R.is_squarefree(g) || h.is_zero()) return false;
      if (R.gcd(h, g).deg() != 0) return false;
      if (g.deg() == c.d && h.deg() <= c.d) return true;
      if (g.deg() == c.d - 1 && h.deg() == c.d) return true;
      return false;
    }
  }
  return false;
}

CurveParams make_curve(FamilyKind kind, int p, long q, const Poly& num, const Poly& den) {
  CurveParams c;
  c.kind = kind;
  c.p = p;
  c.q = q;
  const PolyRing& R = ring_for(p, q);
  if (kind == FamilyKind::ordinary) {
    c.f = RatFn{num, den};
    c.d = std::max(num.deg(), den.deg());
  } else {
    if (den != R.one()) throw RejectedParameter("polynomial family with a denominator");
    c.f = RatFn{num, den};
    c.d = num.deg();
  }
  if (!in_family(c)) throw RejectedParameter("curve data violates the family conditions");
  return c;
}

// ---- trace tables

TraceTable::TraceTable(int p, long q, int n, const Poly& den, int maxdeg) : p_(p), maxdeg_(maxdeg) {
  e_ = field_degree(p, q);
  K_ = (maxdeg + 1) * e_;
  auto emb = make_embedding(p, e_, n);
  const auto& K = *emb->dst();
  const auto& Fq = *emb->src();
  std::vector<Elem> gden(den.c.size());
  for (std::size_t i = 0; i < den.c.size(); ++i) gden[i] = (*emb)(den.c[i]);
  std::vector<Elem> ybasis(e_);
  for (int i = 0; i < e_; ++i) {
    std::vector<int> cf(e_, 0);
    cf[i] = 1;
    ybasis[i] = (*emb)(Fq.pack(cf));
  }
  std::uint64_t N = K.size();
  T_.reserve(N * K_);
  std::vector<std::uint8_t> row(K_);
  for (std::uint64_t a = 0; a < N; ++a) {
    Elem alpha = static_cast<Elem>(a);
    Elem gv = 0;
    for (int i = static_cast<int>(gden.size()) - 1; i >= 0; --i) gv = K.add(K.mul(gv, alpha), gden[i]);
    if (!gv) continue;
    Elem w = K.inv(gv);
    for (int j = 0; j <= maxdeg; ++j) {
      for (int i = 0; i < e_; ++i) row[j * e_ + i] = static_cast<std::uint8_t>(K.trace(K.mul(w, ybasis[i])));
      w = K.mul(w, alpha);
    }
    T_.insert(T_.end(), row.begin(), row.end());
    ++rows_;
  }
}

std::vector<std::int64_t> TraceTable::histogram(const Poly& num) const {
  if (num.deg() > maxdeg_) throw RejectedParameter("numerator degree above trace table width");
  std::vector<std::pair<int, int>> cols;
  for (int j = 0; j <= num.deg(); ++j) {
    Elem c = num.c[j];
    for (int i = 0; i < e_; ++i) {
      int digit = static_cast<int>(c % p_);
      c /= p_;
      if (digit) cols.emplace_back(j * e_ + i, digit);
    }
  }
  std::vector<std::int64_t> h(p_, 0);
  const std::uint8_t* base = T_.data();
  if (cols.empty()) {
    h[0] = static_cast<std::int64_t>(rows_);
    return h;
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    const std::uint8_t* row = base + r * K_;
    int v = 0;
    for (auto& [col, dg] : cols) v += dg * row[col];
    ++h[v % p_];
  }
  return h;
}

std::shared_ptr<const TraceTable> trace_table(int p, long q, int n, const Poly& den, int maxdeg) {
  static std::mutex mu;
  static std::map<std::tuple<int, long, int, std::vector<Elem>, int>, std::shared_ptr<const TraceTable>> cache;
  static std::size_t entries = 0;
  auto key = std::make_tuple(p, q, n, den.c, maxdeg);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto t = std::make_shared<const TraceTable>(p, q, n, den, maxdeg);
  std::lock_guard<std::mutex> lock(mu);
  if (++entries > 256) {
    cache.clear();
    entries = 1;
  }
  return cache.emplace(key, t).first->second;
}

namespace {

CycInt hist_to_cyc(const std::vector<std::int64_t>& h, int p, int psi_a) {
  std::vector<std::int64_t> full(p, 0);
  for (int c = 0; c < p; ++c) full[(static_cast<long>(c) * psi_a % p + p) % p] += h[c];
  return CycInt::from_full(p, full);
}

int table_width(const CurveParams& f) { return std::max(f.f.num.deg(), 0); }

// value of f at infinity when it is not a pole
Elem value_at_infinity(const CurveParams& f) {
  const PolyRing& R = f.ring();
  if (f.f.num.deg() < f.f.den.deg()) return 0;
  return R.field()->mul(f.f.num.lead(), R.field()->inv(f.f.den.lead()));
}

}  // namespace

CycInt point_count_sum(const CurveParams& f, int n, int psi_a) {
  if (n < 1) throw RejectedParameter("n must be positive");
  auto tab = trace_table(f.p, f.q, n, f.f.den, table_width(f));
  return hist_to_cyc(tab->histogram(f.f.num), f.p, psi_a);
}

CycInt complete_point_count_sum(const CurveParams& f, int n, int psi_a) {
  CycInt s = point_count_sum(f, n, psi_a);
  if (!f.infinity_is_pole()) {
    int tr = f.ring().field()->trace(value_at_infinity(f));
    s += CycInt::zeta_pow(f.p, static_cast<long>(n) * tr * psi_a);
  }
  return s;
}

int genus(const CurveParams& f) {
  const PolyRing& R = f.ring();
  int poles = 0, orders = 0;
  if (f.f.den.deg() > 0) {
    for (auto& fc : R.factorize(f.f.den)) {
      if (fc.mult % f.p == 0) throw RejectedParameter("pole order divisible by p");
      poles += fc.P.deg();  // geometric points
      orders += fc.P.deg() * fc.mult;
    }
  }
  int inf = f.f.num.deg() - f.f.den.deg();
  if (inf > 0) {
    if (inf % f.p == 0) throw RejectedParameter("pole order divisible by p");
    ++poles;
    orders += inf;
  }
  if (poles == 0) return 0;
  int r = poles - 1;
  int twice = (f.p - 1) * (r - 1 + orders);
  return twice / 2;
}

int l_degree(const CurveParams& f) { return 2 * genus(f) / (f.p - 1); }

LPoly l_from_sums(const std::vector<CycInt>& S, int len) {
  int p = S.empty() ? 3 : S[0].p();
  LPoly a;
  a.push_back(CycInt(p, 1));
  for (int n = 1; n < len; ++n) {
    CycInt acc(p, 0);
    for (int i = 1; i <= n; ++i) acc += S[i - 1] * a[n - i];
    a.push_back(acc.div_exact(n));
  }
  return a;
}

LPoly l_from_point_counts(const CurveParams& f, const LOptions& opt) {
  int D = l_degree(f);
  if (opt.fe_half && f.kind == FamilyKind::odd && D >= 2) {
    int half = D / 2;
    std::vector<CycInt> S;
    for (int n = 1; n <= half; ++n) S.push_back(complete_point_count_sum(f, n, opt.psi_a));
    LPoly a = l_from_sums(S, half + 1);
    a.resize(D + 1);
    // real coefficients, root number 1: a_{D-j} = q^{D/2-j} a_j
    for (int j = 0; j < half; ++j) {
      std::int64_t qp = 1;
      for (int i = 0; i < half - j; ++i) qp *= f.q;
      a[D - j] = a[j].scaled(qp);
    }
    return a;
  }
  std::vector<CycInt> S;
  for (int n = 1; n <= D + 2; ++n) S.push_back(complete_point_count_sum(f, n, opt.psi_a));
  LPoly a = l_from_sums(S, D + 3);
  if (!a[D + 1].is_zero() || !a[D + 2].is_zero())
    throw ConsistencyFailure("L-function has nonzero coefficients beyond its degree");
  a.resize(D + 1);
  return a;
}

CycInt psi_f(const CurveParams& f, const Poly& F, int psi_a) {
  const PolyRing& R = f.ring();
  if (F.deg() == 0) return CycInt(f.p, 1);
  if (R.gcd(F, f.f.den).deg() > 0) return CycInt(f.p, 0);
  Elem v = R.root_sum_eval(f.f, F);
  return CycInt::zeta_pow(f.p, static_cast<long>(R.field()->trace(v)) * psi_a);
}

LPoly l_from_char_sums(const CurveParams& f, int psi_a) {
  const PolyRing& R = f.ring();
  int D = l_degree(f);
  bool unram_inf = !f.infinity_is_pole();
  int top = D + (unram_inf ? 1 : 0);
  LPoly aff;
  for (int j = 0; j <= top + 2; ++j) {
    CycInt s(f.p, 0);
    enumerate_monic(R, j, [&](const Poly& F) { s += psi_f(f, F, psi_a); });
    aff.push_back(s);
  }
  LPoly a = aff;
  if (unram_inf) {
    // divide by (1 - delta u)
    int tr = R.field()->trace(value_at_infinity(f));
    CycInt delta = CycInt::zeta_pow(f.p, static_cast<long>(tr) * psi_a);
    for (std::size_t j = 1; j < a.size(); ++j) a[j] = aff[j] + delta * a[j - 1];
  }
  for (std::size_t j = D + 1; j < a.size(); ++j)
    if (!a[j].is_zero()) throw ConsistencyFailure("character-sum L-function exceeds its degree");
  a.resize(D + 1);
  return a;
}

FEResult functional_equation_check(const LPoly& L, int p, long q) {
  FEResult r;
  int D = static_cast<int>(L.size()) - 1;
  auto ctx = exact_ctx(p, q);
  // q^{x/2} = t^{p x}
  r.epsilon = ExactNum(ctx, L[D]) * ExactNum(ctx, L[0].conj()).inverse() * ExactNum::t_pow(p, q, -static_cast<long>(p) * D);
  r.ok = true;
  for (int j = 0; j <= D; ++j) {
    ExactNum rhs = r.epsilon * ExactNum::t_pow(p, q, static_cast<long>(p) * (2 * j - D)) * ExactNum(ctx, L[D - j].conj());
    if (ExactNum(ctx, L[j]) != rhs) {
      r.ok = false;
      break;
    }
  }
  r.unit = (r.epsilon * r.epsilon.conj()) == ExactNum::one(p, q);
  return r;
}

std::vector<ComplexVal> complex_roots(const std::vector<ComplexVal>& coeffs, unsigned bits) {
  unsigned old = precision_bits();
  if (bits && bits != old) set_precision_bits(bits);
  int D = static_cast<int>(coeffs.size()) - 1;
  std::vector<ComplexVal> z;
  if (D < 1) return z;
  // Aberth iteration on the monic normalisation; the roots are the
  // eigenvalues of the companion matrix
  std::vector<ComplexVal> c(coeffs.size());
  for (int i = 0; i <= D; ++i) c[i] = coeffs[i] / coeffs[D];
  Real rad = 0;
  for (int i = 0; i < D; ++i) rad = boost::multiprecision::max(rad, boost::multiprecision::pow(c[i].abs(), Real(1) / Real(D - i)));
  if (rad == 0) rad = 1;
  Real pi2 = 2 * real_pi();
  for (int i = 0; i < D; ++i) {
    Real ang = pi2 * (Real(i) + Real(0.25)) / D + Real(0.4);
    z.emplace_back(rad * boost::multiprecision::cos(ang), rad * boost::multiprecision::sin(ang));
  }
  Real eps = boost::multiprecision::pow(Real(2), -static_cast<int>(precision_bits()) + 6);
  bool conv = false;
  for (int it = 0; it < 1000 && !conv; ++it) {
    Real maxstep = 0;
    for (int i = 0; i < D; ++i) {
      ComplexVal P = c[D], dP;
      for (int k = D - 1; k >= 0; --k) {
        dP = dP * z[i] + P;
        P = P * z[i] + c[k];
      }
      if (P.abs() == 0) continue;
      ComplexVal ratio = P / dP;
      ComplexVal s;
      for (int j = 0; j < D; ++j)
        if (j != i) s = s + ComplexVal(1, 0) / (z[i] - z[j]);
      ComplexVal w = ratio / (ComplexVal(1, 0) - ratio * s);
      z[i] = z[i] - w;
      Real st = w.abs() / boost::multiprecision::max(Real(1), z[i].abs());
      if (st > maxstep) maxstep = st;
    }
    if (maxstep < eps) conv = true;
  }
  if (bits && bits != old) set_precision_bits(old);
  if (!conv) throw NumericalFailure("root finder did not converge");
  return z;
}

Real max_rh_deviation(const LPoly& L, long q) {
  std::vector<ComplexVal> c;
  for (auto& a : L) c.push_back(a.embed());
  while (c.size() > 1 && c.back().abs() == 0) c.pop_back();
  Real target = 1 / boost::multiprecision::sqrt(Real(q));
  Real dev = 0;
  for (auto& z : complex_roots(c)) dev = boost::multiprecision::max(dev, boost::multiprecision::abs(z.abs() - target));
  return dev;
}

bool rh_check(const LPoly& L, long q, double tol) { return max_rh_deviation(L, q) < tol; }

LPoly lpoly_mul(const LPoly& a, const LPoly& b) {
  if (a.empty() || b.empty()) return {};
  int p = a[0].p();
  LPoly r(a.size() + b.size() - 1, CycInt(p, 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

LPoly lpoly_conj(const LPoly& a) {
  LPoly r;
  for (auto& x : a) r.push_back(x.conj());
  return r;
}

ExactNum lpoly_at_inv_sqrt_q(const LPoly& L, int p, long q) {
  return eval_cyc_poly(L, ExactNum::t_pow(p, q, -p));
}

bool afe_absolute_identity(const CurveParams& f, int k) {
  if (f.kind == FamilyKind::ordinary) throw RejectedParameter("needs a polynomial-family curve");
  const PolyRing& R = f.ring();
  LPoly L = l_from_point_counts(f);
  ExactNum v = lpoly_at_inv_sqrt_q(L, f.p, f.q);
  ExactNum lhs = (v * v.conj()).pow(k);
  int N = k * (f.d - 1);
  auto ctx = exact_ctx(f.p, f.q);
  std::vector<ExactNum> B;
  for (int n = 0; n <= N; ++n) {
    CycInt s(f.p, 0);
    enumerate_monic(R, n, [&](const Poly& F) { s += psi_f(f, F).scaled(R.divisor_k(F, k)); });
    B.push_back(ExactNum(ctx, s));
  }
  ExactNum rhs(ctx);
  for (int a = 0; a <= N; ++a)
    for (int b = 0; a + b <= N; ++b) {
      ExactNum term = B[a] * B[b].conj() * ExactNum::t_pow(f.p, f.q, -static_cast<long>(f.p) * (a + b));
      rhs += term;
      if (a + b <= N - 1) rhs += term;
    }
  return lhs == rhs;
}

bool afe_odd_identity(const CurveParams& f) {
  if (f.kind != FamilyKind::odd) throw RejectedParameter("needs an odd-family curve");
  const PolyRing& R = f.ring();
  int p = f.p, d = f.d;
  long q = f.q;
  auto ctx = exact_ctx(p, q);
  LPoly L = l_from_point_counts(f);
  ExactNum u = ExactNum::t_pow(p, q, -p);
  ExactNum one = ExactNum::one(p, q);
  ExactNum lchi = (one - u) * lpoly_at_inv_sqrt_q(L, p, q);
  ExactNum lhs = lchi * lchi;
  std::vector<ExactNum> b;
  for (int j = 0; j <= d - 1; ++j) {
    CycInt s(p, 0);
    enumerate_monic(R, j, [&](const Poly& F) { s += chi_f_polynomial(f, F).scaled(R.divisor_k(F, 2)); });
    b.push_back(ExactNum(ctx, s));
  }
  ExactNum sq = ExactNum::sqrt_q(p, q);
  ExactNum rhs(ctx);
  for (int j = 0; j <= d - 2; ++j) rhs += b[j] * u.pow(j) * mpq_class(2);
  if (d >= 1) rhs += (one - u) * (one - u) * b[d - 1] * u.pow(d - 1);
  ExactNum w = u.pow(d);
  for (int j = 0; j <= d - 2; ++j) rhs += w * ((u - sq) * mpq_class(d - j) - ExactNum::rational(p, q, 2)) * b[j];
  return lhs == rhs;
}

}  // namespace asmoments
