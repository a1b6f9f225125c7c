// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance_test                 all criteria
//   acceptance_test --criterion 4   one criterion (ctest registers each separately)
// Exit code 0 iff every selected criterion passes.

#include "bts/suites.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace {

using namespace bts;

struct Criterion {
  int id;
  std::string what;
  std::function<SuiteResult()> run;
};

std::vector<Criterion> criteria() {
  RunConfig cfg;  // p = 3, precision 12, truncation 30, radius 2, e = 2
  return {
      {1, "Stirling identity for n <= 12", [] { return suite_stirling(12); }},
      {2, "Mahler roundtrip, 20 polynomials of degree <= 8, p in {3, 5}, 50 points, precision 12",
       [cfg] { return suite_mahler(cfg, {3, 5}, 20, 8, 50); }},
      {3, "overconvergence |c_k| <= p^(-pk/(p-1)), 50 series, k <= 30",
       [cfg] { return suite_overconvergence(cfg, 50); }},
      {4, "norm laws, 200 products, r in {p^-1, p^-1/2, p^-1/4}, Dirac norm 1",
       [cfg] { return suite_norm(cfg, {Rational(1), Rational(1, 2), Rational(1, 4)}, 200); }},
      {5, "p-valuation axioms on 100 elements of U_x0^(2) and of the edge group",
       [cfg] { return suite_pvaluation(cfg); }},
      {6, "root-space decomposition roundtrip and uniqueness, 100 per facet type",
       [cfg] { return suite_decomposition(cfg); }},
      {7, "conjugation covariance and face monotonicity, 50 triples each",
       [cfg] { return suite_covariance(cfg, 50); }},
      {8, "gluing maps norm-decreasing on a radius-2 window, r in {p^-1, p^-1/2}, identity and cocycle",
       [cfg] { return suite_gluing(cfg, {Rational(1), Rational(1, 2)}); }},
      {9, "sheaf stalks, constancy, gluing and exactness of triv -> P1 -> St",
       [cfg] { return suite_sheaf(cfg, {1, 2}); }},
      {10, "comparison square and naturality on a radius-2 window, r = p^-1",
       [cfg] { return suite_comparison(cfg, Rational(1), 1); }},
      {11, "lower p-series of U_x0^(2) in SL2(Z/3^6)", [cfg] { return suite_lower_p_series(cfg, 6); }},
  };
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  bool verbose = false;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  app.add_flag("-v,--verbose", verbose, "print every check and the suite notes");
  CLI11_PARSE(app, argc, argv);

  bool all_ok = true;
  for (const auto& c : criteria()) {
    if (only && c.id != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    SuiteResult r;
    std::string error;
    try {
      r = c.run();
    } catch (const std::exception& ex) {
      error = ex.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = error.empty() && r.ok();
    all_ok = all_ok && ok;
    std::cout << "criterion " << c.id << ": " << (ok ? "PASS" : "FAIL") << "  " << c.what << "  [" << r.checked()
              << " checks, " << static_cast<int>(secs * 1000) << " ms]\n";
    if (!error.empty()) std::cout << "  error: " << error << "\n";
    if (const CheckReport* f = r.first_failure()) std::cout << "  first failure (" << f->name << "): " << f->counterexample << "\n";
    if (verbose || !ok) {
      for (const auto& k : r.checks) std::cout << "    " << (k.ok ? "ok  " : "FAIL") << " " << k.name << " (" << k.checked << ")\n";
      for (const auto& n : r.notes) std::cout << "    note: " << n << "\n";
    }
  }
  return all_ok ? 0 : 1;
}
