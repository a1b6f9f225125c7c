// bts_cli: command-line front end for the library.
//
// Output is JSON unless --format says otherwise.  Exit codes: 0 success,
// 1 a property check failed, 2 bad input, 3 precision exhausted.

#include "bts/suites.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

using namespace bts;
using nlohmann::json;

struct Options {
  int p = 3;
  int precision = 12;
  unsigned seed = 1;
  std::string format = "json";
  long e = 2;
  int radius = 1;
  long order = 30;
  int samples = 100;
  std::string facet = "0:0";
  std::string face;
  std::string g;
  std::string rep = "trivial";
  std::string suite = "all";
  std::string coeffs;
  std::string r = "-1,-1/2";
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

/// "n:b" for a vertex, "n:b|n':b'" for an edge; "x0" is 0:0.
TreeFacet parse_facet(int p, const std::string& text) {
  std::vector<TreeVertex> vs;
  for (const auto& part : split(text == "x0" ? "0:0" : text, '|')) {
    auto colon = part.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("vertex '" + part + "' is not of the form n:b");
    vs.push_back(make_vertex(p, std::stol(part.substr(0, colon)), to_big(parse_rational(part.substr(colon + 1)))));
  }
  TreeFacet f(vs);
  if (!f.is_vertex()) {
    auto nb = tree_neighbors(p, f.vertices[0]);
    if (std::find(nb.begin(), nb.end(), f.vertices[1]) == nb.end()) throw std::invalid_argument("'" + text + "' is not an edge of the tree");
  }
  return f;
}

/// "-1,-1/2" -> rho values {1, 1/2} with r = p^-rho.
std::vector<Rational> parse_r(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& item : split(text, ',')) {
    Rational a = parse_rational(item);
    if (a >= Rational(0) || a < Rational(-1)) throw std::invalid_argument("r exponent " + item + " is outside [-1, 0)");
    out.push_back(-a);
  }
  if (out.empty()) throw std::invalid_argument("no r exponents given");
  return out;
}

void require_e2(long e) {
  if (e < 2) throw std::invalid_argument("--e must be >= 2");
}

void emit(const Options& o, const json& j, const std::string& text = {}, const std::string& dot = {}) {
  if (o.format == "json") {
    std::cout << j.dump(2) << "\n";
  } else if (o.format == "text") {
    std::cout << (text.empty() ? j.dump(2) + "\n" : text);
  } else if (!dot.empty()) {
    std::cout << dot;
  } else {
    throw std::invalid_argument("this command has no dot output");
  }
}

json factors_json(const Factors<BigRational>& f) { return {{"c", f.c.str()}, {"t", f.t.str()}, {"a", f.a.str()}}; }

int cmd_tree(const Options& o) {
  Window w = tree_window(o.p, o.radius);
  json facets = json::array();
  std::ostringstream text;
  text << "tree window p = " << o.p << ", radius " << o.radius << ": " << w.of_dimension(0).size() << " vertices, "
       << w.of_dimension(1).size() << " edges\n";
  for (std::size_t i = 0; i < w.size(); ++i) {
    json star = json::array();
    for (auto j : w.star(i)) star.push_back(w[j].id());
    facets.push_back({{"id", w[i].id()}, {"type", w[i].is_vertex() ? "vertex" : "edge"}, {"label", w[i].label(o.p)}, {"star", star}});
    text << "  " << (w[i].is_vertex() ? "vertex " : "edge   ") << w[i].id() << "  star " << star.size() << "\n";
  }
  json j{{"p", o.p}, {"radius", o.radius}, {"vertices", w.of_dimension(0).size()}, {"edges", w.of_dimension(1).size()}, {"facets", facets}};
  emit(o, j, text.str(), to_dot<TreeFacet>(w, [&](std::size_t i) { return w[i].id(); }));
  return 0;
}

int cmd_levels(const Options& o) {
  TreeFacet f = parse_facet(o.p, o.facet);
  Standardized st = standardize(o.p, f);
  json basis = json::array();
  for (const auto& b : ordered_basis(o.p, f, o.e)) basis.push_back(b.to_string());
  json j{{"facet", f.id()}, {"apartment_facet", st.facet.label()}, {"frame", st.h.to_string()},
         {"levels", filtration_spec(st.facet, o.e).to_json()}, {"ordered_basis", basis}};
  emit(o, j);
  return 0;
}

int cmd_member(const Options& o) {
  TreeFacet f = parse_facet(o.p, o.facet);
  ExactSL2 g(parse_matrix(o.p, o.g));
  auto r = member_detail(o.p, g, f, o.e);
  json j{{"g", g.to_string()}, {"facet", f.id()}, {"e", o.e}, {"member", r.member}};
  if (r.factors) j["factors_in_frame"] = factors_json(*r.factors);
  if (!r.member) j["violated"] = r.violated;
  emit(o, j, std::string(r.member ? "member" : "not a member: " + r.violated) + "\n");
  return 0;
}

int cmd_omega(const Options& o) {
  require_e2(o.e);
  TreeFacet f = parse_facet(o.p, o.facet);
  ExactSL2 g(parse_matrix(o.p, o.g));
  Omega w = omega(o.p, g, f, o.e);
  emit(o, {{"g", g.to_string()}, {"facet", f.id()}, {"e", o.e}, {"omega", w.to_string()}, {"omega_ring", w.ring_string()}},
       "omega = " + w.to_string() + ", omega_ring = " + w.ring_string() + "\n");
  return 0;
}

std::vector<BigRational> parse_coeffs(const std::string& text) {
  std::vector<BigRational> a;
  for (const auto& item : split(text, ',')) a.push_back(to_big(parse_rational(item)));
  if (a.empty()) throw std::invalid_argument("--coeffs needs at least one coefficient");
  return a;
}

/// Mahler coefficients of a polynomial, by finite differences and by Stirling numbers.
int cmd_mahler(const Options& o) {
  PadicContext ctx(o.p, o.precision);
  auto a = parse_coeffs(o.coeffs);
  long n = std::max<long>(o.order, static_cast<long>(a.size()) - 1);
  auto samples = mahler_coeffs(ctx, 1, n, [&](const MultiIndex& m) {
    BigRational acc = 0;
    for (std::size_t k = a.size(); k-- > 0;) acc = acc * m[0] + a[k];
    return acc;
  });
  auto stir = power_to_mahler(ctx, PowerSeries{a, TailBound::zero()}, n);
  bool agree = true;
  for (std::size_t k = 0; k < samples.coeffs.size(); ++k) agree = agree && samples.coeffs[k] == stir.coeffs[k];
  emit(o, {{"mahler", to_json(stir)}, {"finite_differences_agree", agree}});
  return agree ? 0 : 1;
}

/// r-norms of a univariate series (--coeffs) or of the Dirac distribution of g
/// in the chart of U_F^(e).
int cmd_norm(const Options& o) {
  PadicContext ctx(o.p, o.precision);
  DistSeries s;
  if (!o.g.empty()) {
    require_e2(o.e);
    TreeFacet f = parse_facet(o.p, o.facet);
    SL2Chart chart = SL2Chart::of(ctx, f, o.e);
    s = dirac(chart, chart.coords(ExactSL2(parse_matrix(o.p, o.g))), o.order);
  } else {
    auto a = parse_coeffs(o.coeffs);
    s = zero_series(ctx, {Rational(1)}, static_cast<long>(a.size()) - 1);
    for (std::size_t k = 0; k < a.size(); ++k) s.coeffs[k] = ctx.rational(a[k]);
    s.tail = TailBound::zero();
  }
  json norms = json::array();
  std::string text;
  for (const auto& rho : parse_r(o.r)) {
    RNorm n = norm_r(s, rho);
    norms.push_back({{"r", "p^-" + to_string(rho)}, {"norm", n.to_string()}, {"certified", n.certified()}});
    text += "r = p^-" + to_string(rho) + ": " + n.to_string() + "\n";
  }
  emit(o, {{"series", to_json(s)}, {"norms", norms}}, text);
  return 0;
}

/// Gluing map U_{F'}^(e) -> U_F^(e) for a face F' (--face) of F (--facet).
int cmd_glue(const Options& o) {
  require_e2(o.e);
  PadicContext ctx(o.p, o.precision);
  TreeFacet f = parse_facet(o.p, o.facet);
  TreeFacet f1 = o.face.empty() ? f : parse_facet(o.p, o.face);
  if (!is_face(f1, f)) throw std::invalid_argument(f1.id() + " is not a face of " + f.id());
  SL2Chart tgt = SL2Chart::of(ctx, f, o.e), src = SL2Chart::in_frame_of(ctx, f1, o.e, f);
  GluingMap m = gluing_map(src, tgt, o.order);
  json images = json::array(), checks = json::array();
  for (const auto& s : m.images) images.push_back(to_json(s));
  bool ok = true;
  for (const auto& rho : parse_r(o.r)) {
    CheckReport r = norm_decreasing_check(m, rho, "norm-decreasing at r = p^-" + to_string(rho));
    ok = ok && r.ok;
    checks.push_back(r.to_json());
  }
  emit(o, {{"face", f1.id()}, {"facet", f.id()}, {"e", o.e}, {"images", images}, {"checks", checks}});
  return ok ? 0 : 1;
}

int cmd_sheaf(const Options& o) {
  if (o.e < 1) throw std::invalid_argument("--e must be >= 1");
  ConstructibleSheaf sh = ss_sheaf(rep_by_name(o.rep, o.p), o.e, tree_window(o.p, o.radius));
  json j = sh.system.to_json();
  j["e"] = o.e;
  j["radius"] = o.radius;
  emit(o, j, sh.system.dimension_table(), sh.system.to_dot());
  return 0;
}

int cmd_check(const Options& o) {
  RunConfig cfg;
  cfg.p = o.p;
  cfg.precision = o.precision;
  cfg.order = o.order;
  cfg.e = o.e;
  cfg.radius = o.radius;
  cfg.rhos = parse_r(o.r);
  cfg.seed = o.seed;
  cfg.samples = o.samples;
  require_e2(cfg.e);
  std::vector<std::string> names = o.suite == "all" ? suite_names() : split(o.suite, ',');
  json results = json::array();
  std::string text;
  bool ok = true;
  for (const auto& name : names) {
    SuiteResult r = run_suite(name, cfg);
    ok = ok && r.ok();
    results.push_back(r.to_json());
    text += name + ": " + (r.ok() ? "pass" : "FAIL") + " (" + std::to_string(r.checked()) + " checks)\n";
    if (const CheckReport* f = r.first_failure()) text += "  first counterexample (" + f->name + "): " + f->counterexample + "\n";
  }
  emit(o, {{"config", cfg.to_json()}, {"ok", ok}, {"suites", results}}, text);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  if (const char* env = std::getenv("BTS_PRECISION")) o.precision = std::atoi(env);
  if (const char* env = std::getenv("BTS_SEED")) o.seed = static_cast<unsigned>(std::strtoul(env, nullptr, 10));

  CLI::App app{"Bruhat-Tits filtrations, distribution algebras and sheaves on the SL2 tree"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--p", o.p, "odd prime")->check(CLI::PositiveNumber);
  app.add_option("--precision", o.precision, "p-adic precision in digits (env BTS_PRECISION)");
  app.add_option("--seed", o.seed, "seed for randomized suites (env BTS_SEED)");
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text", "dot"}));

  auto* tree = app.add_subcommand("tree", "dump a ball of the tree");
  tree->add_option("--radius", o.radius, "ball radius")->check(CLI::NonNegativeNumber);

  auto* levels = app.add_subcommand("levels", "filtration levels and ordered basis of U_F^(e)");
  auto* member = app.add_subcommand("member", "membership of g in U_F^(e) with its factors");
  auto* omega_cmd = app.add_subcommand("omega", "p-valuation of g on U_F^(e)");
  for (auto* c : {levels, member, omega_cmd}) {
    c->add_option("--facet", o.facet, "facet id n:b or n:b|n':b'");
    c->add_option("--e", o.e, "level");
  }
  for (auto* c : {member, omega_cmd}) c->add_option("--g", o.g, "matrix [[a,b],[c,d]], entries rational or p^v*u")->required();

  auto* mahler = app.add_subcommand("mahler", "Mahler coefficients of a polynomial");
  mahler->add_option("--coeffs", o.coeffs, "power-basis coefficients a0,a1,...")->required();
  mahler->add_option("--order", o.order, "truncation");

  auto* norm = app.add_subcommand("norm", "r-norms of a series or of a Dirac distribution");
  auto* glue = app.add_subcommand("glue", "gluing map between face charts");
  auto* g_opt = norm->add_option("--g", o.g, "group element (Dirac distribution)");
  norm->add_option("--coeffs", o.coeffs, "univariate coefficients d0,d1,...")->excludes(g_opt);
  for (auto* c : {norm, glue}) {
    c->add_option("--facet", o.facet, "facet id");
    c->add_option("--e", o.e, "level");
    c->add_option("--order", o.order, "truncation");
    c->add_option("--r", o.r, "r exponents a/b in [-1, 0), r = p^(a/b)");
  }
  glue->add_option("--face", o.face, "face of --facet (defaults to the facet)");

  auto* sheaf = app.add_subcommand("sheaf", "the sheaf of coinvariants of a representation on a window");
  sheaf->add_option("--rep", o.rep, "trivial | p1-functions | steinberg");
  sheaf->add_option("--e", o.e, "level");
  sheaf->add_option("--radius", o.radius, "window radius");

  auto* check = app.add_subcommand("check", "run property suites");
  std::string suites_help = "all";
  for (const auto& s : suite_names()) suites_help += " | " + s;
  check->add_option("--suite", o.suite, suites_help);
  check->add_option("--samples", o.samples, "sample count for group suites");
  check->add_option("--e", o.e, "level");
  check->add_option("--radius", o.radius, "window radius");
  check->add_option("--order", o.order, "truncation");
  check->add_option("--r", o.r, "r exponents");
  check->callback([&] {
    if (!check->count("--radius")) o.radius = 2;
  });

  CLI11_PARSE(app, argc, argv);

  try {
    bool prime = o.p >= 3 && o.p % 2;
    for (int d = 3; prime && d * d <= o.p; d += 2) prime = o.p % d != 0;
    if (!prime) throw std::invalid_argument("--p must be an odd prime");
    if (*tree) return cmd_tree(o);
    if (*levels) return cmd_levels(o);
    if (*member) return cmd_member(o);
    if (*omega_cmd) return cmd_omega(o);
    if (*mahler) return cmd_mahler(o);
    if (*norm) return cmd_norm(o);
    if (*glue) return cmd_glue(o);
    if (*sheaf) return cmd_sheaf(o);
    if (*check) return cmd_check(o);
  } catch (const PrecisionError& ex) {
    std::cerr << "precision exhausted: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}
