#include "asmoments/families.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include "asmoments/errors.hpp"

namespace asmoments {

namespace {

mpz_class zpow(long b, long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), b, e);
  return r;
}

std::uint64_t upow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// all polynomials with coefficients free at pos (the last position nonzero)
void supported_polys(const PolyRing& R, const std::vector<int>& pos, const std::function<void(const Poly&)>& fn) {
  std::uint64_t q = R.q();
  if (pos.empty()) return;
  std::size_t m = pos.size();
  int top = pos.back();
  // lexicographic with the low coefficients most significant
  std::uint64_t n = upow(q, static_cast<int>(m));
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    std::vector<Elem> c(top + 1, 0);
    std::uint64_t t = idx;
    for (std::size_t i = m; i-- > 0;) {
      c[pos[i]] = static_cast<Elem>(t % q);
      t /= q;
    }
    if (c[top] == 0) continue;
    fn(Poly(c));
  }
}

void ordinary_for_g(const PolyRing& R, int p, long q, int d, const Poly& g,
                    const std::function<void(const CurveParams&)>& fn) {
  std::uint64_t qq = R.q();
  int hdeg = d;
  bool exact_deg = g.deg() == d - 1;
  std::uint64_t n = upow(qq, hdeg + 1);
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    std::vector<Elem> c(hdeg + 1, 0);
    std::uint64_t t = idx;
    for (int i = hdeg; i >= 0; --i) {
      c[hdeg - i] = static_cast<Elem>(t % qq);
      t /= qq;
    }
    Poly h(c);
    if (h.is_zero() || (exact_deg && h.deg() != d)) continue;
    if (R.gcd(h, g).deg() != 0) continue;
    CurveParams cp;
    cp.kind = FamilyKind::ordinary;
    cp.p = p;
    cp.q = q;
    cp.d = d;
    cp.f = RatFn{h, g};
    fn(cp);
  }
}

}  // namespace

void validate_spec(const FamilySpec& s) {
  if (!is_prime(s.p) || s.p == 2) throw RejectedParameter("p must be an odd prime");
  field_degree(s.p, s.q);
  if (s.d < 1) throw RejectedParameter("d must be positive");
  switch (s.kind) {
    case FamilyKind::polynomial:
      if (s.d % s.p == 0) throw RejectedParameter("polynomial family needs gcd(d, p) = 1");
      break;
    case FamilyKind::odd:
      if (s.d % s.p == 0 || s.d % 2 == 0) throw RejectedParameter("odd family needs gcd(d, 2p) = 1");
      break;
    case FamilyKind::ordinary:
      break;
  }
}

mpz_class family_size_formula(const FamilySpec& s) {
  validate_spec(s);
  long q = s.q;
  int p = s.p, d = s.d;
  switch (s.kind) {
    case FamilyKind::polynomial:
      return q * (q - 1) * zpow(q, d - d / p - 1);
    case FamilyKind::odd:
      return (q - 1) * zpow(q, (d - 1) / 2 - (d - 1) / p + (d - 1) / (2 * p));
    case FamilyKind::ordinary: {
      const PolyRing& R = ring_for(p, q);
      mpz_class total = 0;
      for (int dg : {d, d - 1}) {
        mpz_class w = dg == d ? mpz_class(q) : mpz_class(q * (q - 1));
        enumerate_monic(R, dg, [&](const Poly& g) {
          if (R.is_squarefree(g)) total += w * mpz_class(static_cast<unsigned long>(R.euler_phi(g)));
        });
      }
      return total;
    }
  }
  return 0;
}

void enumerate_family(const FamilySpec& s, const std::function<void(const CurveParams&)>& fn) {
  validate_spec(s);
  const PolyRing& R = ring_for(s.p, s.q);
  auto make = [&](const Poly& f) {
    CurveParams cp;
    cp.kind = s.kind;
    cp.p = s.p;
    cp.q = s.q;
    cp.d = s.d;
    cp.f = RatFn{f, R.one()};
    return cp;
  };
  switch (s.kind) {
    case FamilyKind::polynomial: {
      std::vector<int> pos{0};
      for (int j = 1; j <= s.d; ++j)
        if (j % s.p) pos.push_back(j);
      supported_polys(R, pos, [&](const Poly& f) { fn(make(f)); });
      break;
    }
    case FamilyKind::odd: {
      std::vector<int> pos;
      for (int j = 1; j <= s.d; j += 2)
        if (j % s.p) pos.push_back(j);
      supported_polys(R, pos, [&](const Poly& f) { fn(make(f)); });
      break;
    }
    case FamilyKind::ordinary:
      for (int dg : {s.d, s.d - 1})
        enumerate_monic(R, dg, [&](const Poly& g) {
          if (R.is_squarefree(g)) ordinary_for_g(R, s.p, s.q, s.d, g, fn);
        });
      break;
  }
}

std::vector<CurveParams> family_members(const FamilySpec& s) {
  std::vector<CurveParams> out;
  enumerate_family(s, [&](const CurveParams& c) { out.push_back(c); });
  mpz_class expect = family_size_formula(s);
  if (mpz_class(static_cast<unsigned long>(out.size())) != expect)
    throw ConsistencyFailure("family size differs from the closed form");
  return out;
}

std::vector<CurveParams> f_d_members(int p, long q, int d, bool odd) {
  FamilySpec s{odd ? FamilyKind::odd : FamilyKind::polynomial, p, q, d};
  std::vector<CurveParams> out;
  enumerate_family(s, [&](const CurveParams& c) {
    if (c.f.num.coef(0) == 0) out.push_back(c);
  });
  return out;
}

bool verify_disjoint_union(int p, long q, int d) {
  const PolyRing& R = ring_for(p, q);
  FamilySpec s{FamilyKind::polynomial, p, q, d};
  auto all = family_members(s);
  auto fd = f_d_members(p, q, d);
  if (fd.size() * static_cast<std::size_t>(q) != all.size()) return false;
  std::set<std::vector<Elem>> seen;
  std::set<std::vector<Elem>> members;
  for (auto& c : all) members.insert(c.f.num.c);
  for (auto& f : fd)
    for (Elem b = 0; b < static_cast<Elem>(q); ++b) {
      Poly g = R.add(f.f.num, R.constant(b));
      if (!members.count(g.c) || !seen.insert(g.c).second) return false;
    }
  return seen.size() == all.size();
}

OrdinaryDecomposition verify_ordinary_decomposition(int p, long q, int d) {
  const PolyRing& R = ring_for(p, q);
  OrdinaryDecomposition res;
  FamilySpec s{FamilyKind::ordinary, p, q, d};
  std::map<std::vector<Elem>, std::uint64_t> per_g;
  std::set<std::tuple<std::vector<Elem>, Elem, Elem, std::vector<Elem>>> keys;
  enumerate_family(s, [&](const CurveParams& c) {
    ++res.members;
    const Poly& h = c.f.num;
    const Poly& g = c.f.den;
    ++per_g[g.c];
    Poly quo, r;
    R.divmod(h, g, quo, r);
    bool ok = r.deg() < g.deg() && R.gcd(r, g).deg() == 0 && (g.deg() > 0 || r.is_zero());
    if (g.deg() == d) ok = ok && quo.deg() <= 0;
    else ok = ok && quo.deg() == 1;
    if (ok) ++res.decomposed;
    keys.insert({g.c, quo.coef(1), quo.coef(0), r.c});
  });
  res.injective = keys.size() == res.members;
  res.counts_match = true;
  for (auto& [gc, n] : per_g) {
    Poly g(gc);
    std::uint64_t phi = R.euler_phi(g);
    std::uint64_t want = g.deg() == d ? q * phi : q * (q - 1) * phi;
    if (n != want) res.counts_match = false;
  }
  return res;
}

double work_estimate(const FamilySpec& s, const MomentOptions& opt) {
  mpz_class size = family_size_formula(s);
  int D = s.kind == FamilyKind::ordinary ? 2 * s.d - 2 : s.d - 1;
  int nmax = (s.kind == FamilyKind::odd && opt.fe_half) ? D / 2 : D + 2;
  double per = 0;
  for (int n = 1; n <= nmax; ++n) per += std::pow(static_cast<double>(s.q), n) * (s.d + 1);
  return size.get_d() * per;
}

CycInt family_sum(const std::vector<CurveParams>& members, const std::function<CycInt(const CurveParams&)>& fn,
                  int jobs) {
  int p = members.empty() ? 3 : members[0].p;
  jobs = std::max(1, jobs);
  std::vector<CycInt> part(jobs, CycInt(p, 0));
  std::vector<std::exception_ptr> errs(jobs);
  auto run = [&](int w) {
    try {
      for (std::size_t i = w; i < members.size(); i += jobs) part[w] += fn(members[i]);
    } catch (...) {
      errs[w] = std::current_exception();
    }
  };
  if (jobs == 1) {
    run(0);
  } else {
    std::vector<std::thread> th;
    for (int w = 0; w < jobs; ++w) th.emplace_back(run, w);
    for (auto& t : th) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  CycInt s(p, 0);
  for (auto& x : part) s += x;
  return s;
}

MomentResult brute_moment(const FamilySpec& s, int k, bool absolute, const MomentOptions& opt) {
  if (k < 1) throw RejectedParameter("k must be positive");
  auto t0 = std::chrono::steady_clock::now();
  MomentResult res;
  res.spec = s;
  res.k = k;
  res.absolute = absolute;
  res.work = work_estimate(s, opt);
  if (res.work > opt.budget) throw BudgetExceeded("moment exceeds the work budget", 0);
  auto members = family_members(s);
  res.size = members.size();
  int jobs = std::max(1, opt.jobs);
  std::vector<LPoly> part(jobs);
  std::vector<std::exception_ptr> errs(jobs);
  LOptions lo;
  lo.fe_half = opt.fe_half;
  lo.psi_a = opt.psi_a;
  auto add = [](LPoly& acc, const LPoly& x) {
    if (acc.size() < x.size()) acc.resize(x.size(), CycInt(x[0].p(), 0));
    for (std::size_t i = 0; i < x.size(); ++i) acc[i] += x[i];
  };
  auto run = [&](int w) {
    try {
      for (std::size_t i = w; i < members.size(); i += jobs) {
        LPoly L = l_from_point_counts(members[i], lo);
        LPoly base = absolute ? lpoly_mul(L, lpoly_conj(L)) : L;
        LPoly pw = base;
        for (int j = 1; j < k; ++j) pw = lpoly_mul(pw, base);
        add(part[w], pw);
      }
    } catch (...) {
      errs[w] = std::current_exception();
    }
  };
  if (jobs == 1) {
    run(0);
  } else {
    std::vector<std::thread> th;
    for (int w = 0; w < jobs; ++w) th.emplace_back(run, w);
    for (auto& t : th) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  for (auto& pp : part) add(res.sum, pp);
  if (res.sum.empty()) res.sum.push_back(CycInt(s.p, 0));
  res.value = lpoly_at_inv_sqrt_q(res.sum, s.p, s.q) * mpq_class(1, static_cast<unsigned long>(res.size));
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::vector<MomentResult> moment_sweep(FamilyKind kind, int p, long q, const std::vector<int>& ds, int k, bool absolute,
                                       const MomentOptions& opt) {
  std::vector<MomentResult> out;
  for (int d : ds) out.push_back(brute_moment(FamilySpec{kind, p, q, d}, k, absolute, opt));
  return out;
}

}  // namespace asmoments
