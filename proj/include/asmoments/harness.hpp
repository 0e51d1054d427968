#pragma once
#include <string>
#include <utility>
#include <vector>

#include "asmoments/exact.hpp"
#include "asmoments/polyring.hpp"
#include "json.hpp"

namespace asmoments {

using ojson = nlohmann::ordered_json;

enum class Mode { exact, band };
std::string mode_name(Mode m);

struct VerificationCase {
  std::string id;
  int p = 3;
  long q = 3;
  int d = 2;
  int k = 1;
  std::vector<int> ds;  // sweeps (thm1.4-leading, thm1.5-const)
  int n = 0;            // size parameter: series degree, grid bound, enumeration depth
  double band = 0;      // relative band for band-mode cases
};

struct RunOptions {
  int jobs = 1;
  double budget = 5e10;
};

struct CaseRow {
  std::string id;
  ojson params;
  Mode mode = Mode::exact;
  std::string verdict;  // pass | fail | skip | flag (a reported discrepancy that is not binding)
  std::string summary;
  ojson values;  // exact values as coordinate strings, decimals at 15 digits
  bool has_margin = false;
  double band = 0;
  double margin = 0;  // band minus the observed relative gap; >= 0 passes
  double seconds = 0;
  double work = 0;
};

struct Report {
  std::string profile;
  unsigned precision = 0;
  std::vector<CaseRow> rows;
};

std::vector<VerificationCase> profile_cases(const std::string& profile);
// the cases one acceptance criterion runs, 1..9
std::vector<VerificationCase> criterion_cases(int criterion);

CaseRow verify(const VerificationCase& c, const RunOptions& opt = {});
// Cases run one after another; opt.jobs goes to the member loops.
Report run_cases(const std::vector<VerificationCase>& cases, const RunOptions& opt, const std::string& profile);
bool report_ok(const Report& r);

// Short-interval divisor sum: all F = x^{n-d} A*(x) + g with deg g < n - d,
// A*(x) = x^d A(1/x) after scaling A(0) to 1.
struct DivisorCheck {
  mpz_class lhs, main;
  double bound = 0;
  std::uint64_t terms = 0;
  bool within = false;
};
DivisorCheck divisor_progression(int p, long q, int n, int d, int k, const Poly& A);
CaseRow check_divisor_progression(int p, long q, int n, int d, int k, const Poly& A);

// average over the polynomial family of prod psi_f(P_i)^{h_i}
ExactNum char_average(int p, long q, int d, const std::vector<std::pair<Poly, int>>& factors);
CaseRow check_char_average(int p, long q, int d, const std::vector<std::pair<Poly, int>>& factors);

enum class ReportFormat { json, csv, markdown };
ReportFormat parse_format(const std::string& s);
std::string report_emit(const Report& r, ReportFormat f, bool with_timing = true);
void write_report(const Report& r, ReportFormat f, const std::string& path, bool with_timing = true);
Report report_from_json(const std::string& text);

ojson exact_json(const ExactNum& x);
ExactNum exact_from_json(int p, long q, const ojson& j);

}  // namespace asmoments
