#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "asmoments/errors.hpp"
#include "asmoments/families.hpp"
#include "asmoments/formulas.hpp"
#include "asmoments/harness.hpp"
#include "asmoments/lfun.hpp"

using namespace asmoments;

namespace {

std::vector<Elem> parse_coeffs(const std::string& s) {
  std::vector<Elem> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(static_cast<Elem>(std::stoul(tok)));
  return v;
}

// "a/b" or "q^e" with e rational, e.g. q^-1/2
Real parse_point(const std::string& s, long q) {
  if (s.rfind("q^", 0) == 0) {
    mpq_class e(s.substr(2));
    e.canonicalize();
    return pow(Real(q), Real(e.get_num().get_str()) / Real(e.get_den().get_str()));
  }
  mpq_class r(s);
  r.canonicalize();
  return Real(r.get_num().get_str()) / Real(r.get_den().get_str());
}

std::string lpoly_str(const LPoly& L) {
  std::string s;
  for (std::size_t j = 0; j < L.size(); ++j) s += (j ? " " : "") + L[j].str();
  return s;
}

void print_value(const FormulaValue& v) {
  if (v.exact) std::cout << "exact " << v.exact->str() << "\n";
  std::cout << "value " << fmt_complex(v.approx, 15) << "\n";
  std::cout << "tail " << fmt_real(v.tail, 6) << "\n";
  if (v.trunc) std::cout << "trunc " << v.trunc << "\n";
  if (v.error_term > 0) std::cout << "error_term " << v.error_term << (v.asymptotic ? "" : " (not asymptotic)") << "\n";
  if (!v.note.empty()) std::cout << "note " << v.note << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moments of Artin-Schreier L-functions: brute force, closed forms, verification"};
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = 1;
  double budget = 5e10;
  unsigned precision = 106;
  std::string profile = "desk";
  app.add_option("--jobs", jobs, "worker threads for member loops")->check(CLI::PositiveNumber);
  app.add_option("--budget", budget, "work cap per brute-force moment");
  app.add_option("--precision", precision, "MPFR working precision in bits")->check(CLI::Range(53u, 100000u));
  app.add_option("--profile", profile, "smoke | desk | extended");

  int p = 3, d = 2, k = 1;
  long q = 3;
  std::string kind = "polynomial";
  auto add_pq = [&](CLI::App* s) {
    s->add_option("-p", p, "characteristic");
    s->add_option("-q", q, "field size");
  };

  auto* lf = app.add_subcommand("lfun", "L-function of one curve");
  add_pq(lf);
  std::string num, den = "1";
  lf->add_option("--kind", kind, "polynomial | odd | ordinary");
  lf->add_option("--num", num, "numerator coefficients, low degree first, packed field elements")->required();
  lf->add_option("--den", den, "denominator coefficients (ordinary family)");

  auto* fm = app.add_subcommand("family-moment", "brute-force family moment at u = q^{-1/2}");
  add_pq(fm);
  bool absolute = false;
  fm->add_option("--kind", kind, "polynomial | odd | ordinary");
  fm->add_option("-d", d, "degree");
  fm->add_option("-k", k, "moment");
  fm->add_flag("--absolute", absolute, "average |L|^{2k} instead of L^k");

  auto* ee = app.add_subcommand("euler-eval", "truncated Euler products");
  add_pq(ee);
  std::string product = "G", at = "q^-2", at2 = "1";
  int trunc = 0, j = 0;
  ee->add_option("--product", product, "G | E | F1 | F2 | F3 | H | thm11k")
      ->check(CLI::IsMember({"G", "E", "F1", "F2", "F3", "H", "thm11k"}));
  ee->add_option("--at", at, "point: a/b or q^e (w for E and F, u for G and H)");
  ee->add_option("--at2", at2, "second point: u for E, v for H");
  ee->add_option("--trunc", trunc, "largest prime degree");
  ee->add_option("-k", k, "moment for thm11k");
  ee->add_option("-d", d, "degree for thm11k");
  ee->add_option("-j", j, "root of unity index for F_i");

  auto* vf = app.add_subcommand("verify", "run verification cases");
  bool all = false, no_timing = false;
  std::string case_id, format = "json", out;
  int criterion = 0;
  VerificationCase vc;
  vf->add_flag("--all", all, "every case of the profile");
  vf->add_option("--case", case_id, "a single case id");
  vf->add_option("--criterion", criterion, "the cases of one acceptance criterion (1-9)");
  vf->add_option("-p", vc.p);
  vf->add_option("-q", vc.q);
  vf->add_option("-d", vc.d);
  vf->add_option("-k", vc.k);
  vf->add_option("-n", vc.n);
  vf->add_option("--ds", vc.ds)->delimiter(',');
  vf->add_option("--band", vc.band);
  vf->add_option("--format", format, "json | csv | markdown");
  vf->add_option("--out", out, "write the report here instead of stdout");
  vf->add_flag("--no-timing", no_timing, "omit the timing block");

  auto* rp = app.add_subcommand("report", "convert a JSON report");
  std::string in;
  rp->add_option("--in", in, "JSON report")->required()->check(CLI::ExistingFile);
  rp->add_option("--format", format, "json | csv | markdown");
  rp->add_option("--out", out);
  rp->add_flag("--no-timing", no_timing);

  CLI11_PARSE(app, argc, argv);

  try {
    set_precision_bits(precision);
    if (*lf) {
      auto c = make_curve(parse_kind(kind), p, q, Poly(parse_coeffs(num)), Poly(parse_coeffs(den)));
      LPoly L = l_from_point_counts(c);
      auto fe = functional_equation_check(L, p, q);
      std::cout << "degree " << L.size() - 1 << "\n";
      std::cout << "coefficients " << lpoly_str(L) << "\n";
      std::cout << "at_q^-1/2 " << lpoly_at_inv_sqrt_q(L, p, q).str() << "\n";
      std::cout << "functional_equation " << (fe.ok ? "ok" : "fails") << " epsilon " << fe.epsilon.str() << "\n";
      std::cout << "rh_max_deviation " << fmt_real(max_rh_deviation(L, q), 6) << "\n";
      return 0;
    }
    if (*fm) {
      MomentOptions o;
      o.jobs = jobs;
      o.budget = budget;
      auto m = brute_moment({parse_kind(kind), p, q, d}, k, absolute, o);
      std::cout << "size " << m.size << "\n";
      std::cout << "exact " << m.value.str() << "\n";
      std::cout << "value " << fmt_complex(m.value.embed(), 15) << "\n";
      std::cout << "seconds " << m.seconds << "\n";
      return 0;
    }
    if (*ee) {
      Real w = parse_point(at, q);
      FormulaValue v;
      if (product == "G")
        v = g_euler(q, w, trunc);
      else if (product == "E")
        v = e_euler(p, q, w, ComplexVal(parse_point(at2, q), Real(0)), trunc);
      else if (product == "F1" || product == "F2" || product == "F3")
        v = f_euler(product[1] - '0', p, q, w, j, trunc);
      else if (product == "H")
        v = h_euler(p, q, w, parse_point(at2, q), LocalForm::corrected, trunc);
      else
        v = thm11_rhs(k, p, q, d, trunc);
      print_value(v);
      return 0;
    }
    ReportFormat fmt = parse_format(format);
    if (*rp) {
      std::ifstream f(in);
      std::stringstream buf;
      buf << f.rdbuf();
      Report r = report_from_json(buf.str());
      if (out.empty())
        std::cout << report_emit(r, fmt, !no_timing);
      else
        write_report(r, fmt, out, !no_timing);
      return 0;
    }
    std::vector<VerificationCase> cases;
    if (all)
      cases = profile_cases(profile);
    else if (criterion)
      cases = criterion_cases(criterion);
    else if (!case_id.empty()) {
      vc.id = case_id;
      cases.push_back(vc);
    } else {
      throw RejectedParameter("verify needs --all, --criterion or --case");
    }
    RunOptions ro;
    ro.jobs = jobs;
    ro.budget = budget;
    Report r = run_cases(cases, ro, all ? profile : "custom");
    if (out.empty())
      std::cout << report_emit(r, fmt, !no_timing);
    else
      write_report(r, fmt, out, !no_timing);
    for (auto& row : r.rows) std::cerr << row.verdict << "  " << row.id << "  " << row.summary << "\n";
    return report_ok(r) ? 0 : 1;
  } catch (const RejectedParameter& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
