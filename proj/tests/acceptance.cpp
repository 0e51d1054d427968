// One line per acceptance criterion: "criterion N: PASS|FAIL  <detail>".
// Usage: acceptance [N ...]; no arguments runs all ten.
#include <iostream>
#include <string>
#include <vector>

#include "asmoments/harness.hpp"

using namespace asmoments;

namespace {

// pinned tolerances
constexpr double kLeadingBand = 0.25;   // cubic leading coefficient, relative
constexpr double kConstantBand = 0.10;  // ordinary first moment at the largest d, relative
// exact cases compare in the exact ring: zero difference, no tolerance
// RH deviation tolerance 1e-8 is fixed inside the lfun-rh case

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& o, const std::string& s) { o.detail += (o.detail.empty() ? "" : "; ") + s; }

Outcome run_criterion(int n) {
  Outcome out;
  if (n == 10) {
    RunOptions a, b;
    a.jobs = 1;
    b.jobs = 2;
    auto cases = profile_cases("desk");
    std::string r1 = report_emit(run_cases(cases, a, "desk"), ReportFormat::json, false);
    std::string r2 = report_emit(run_cases(cases, b, "desk"), ReportFormat::json, false);
    std::string r3 = report_emit(run_cases(cases, a, "desk"), ReportFormat::json, false);
    out.pass = r1 == r2 && r1 == r3;
    note(out, std::to_string(cases.size()) + " desk cases, jobs 1/2/1 reports " +
                  (out.pass ? "byte-identical" : "differ"));
    return out;
  }
  auto cases = criterion_cases(n);
  for (auto& c : cases) {
    if (c.id == "thm1.4-leading") c.band = kLeadingBand;
    if (c.id == "thm1.5-const") c.band = kConstantBand;
  }
  for (auto& c : cases) {
    CaseRow r = verify(c);
    std::cerr << "  [" << n << "] " << r.verdict << " " << r.id << " " << r.params.dump() << ": " << r.summary << "\n";
    // a flag is a reported statement-vs-assembly discrepancy; the binding check is the assembled form
    if (r.verdict == "flag") {
      note(out, r.id + " " + r.params.dump() + " flagged");
      continue;
    }
    if (r.verdict != "pass") {
      out.pass = false;
      note(out, r.id + " " + r.params.dump() + " " + r.verdict + " (" + r.summary + ")");
    }
  }
  if (out.detail.empty()) note(out, std::to_string(cases.size()) + " cases pass");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::stoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= 10; ++i) which.push_back(i);
  bool all = true;
  for (int n : which) {
    Outcome o;
    try {
      o = run_criterion(n);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
