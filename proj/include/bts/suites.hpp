#pragma once

// Seeded property suites shared by `bts_cli check` and the acceptance runner.
// Every suite returns CheckReports; a suite passes iff all of them do.

#include "bts/mahler.hpp"
#include "bts/sheaf.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace bts {

struct RunConfig {
  int p = 3;
  int precision = 12;
  long order = 30;  // truncation for series and gluing maps
  long e = 2;
  int radius = 2;
  std::vector<Rational> rhos{Rational(1), Rational(1, 2)};  // r = p^-rho
  unsigned seed = 1;
  int samples = 100;

  nlohmann::json to_json() const {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& x : rhos) r.push_back("p^-" + to_string(x));
    return {{"p", p}, {"precision", precision}, {"order", order}, {"e", e},
            {"radius", radius}, {"r", r}, {"seed", seed}, {"samples", samples}};
  }
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckReport> checks;
  std::vector<std::string> notes;

  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.ok; });
  }
  const CheckReport* first_failure() const {
    for (const auto& c : checks)
      if (!c.ok) return &c;
    return nullptr;
  }
  long checked() const {
    long n = 0;
    for (const auto& c : checks) n += c.checked;
    return n;
  }
  nlohmann::json to_json() const {
    nlohmann::json j{{"suite", suite}, {"ok", ok()}, {"checked", checked()}, {"checks", nlohmann::json::array()}};
    for (const auto& c : checks) j["checks"].push_back(c.to_json());
    if (!notes.empty()) j["notes"] = notes;
    return j;
  }
};

namespace detail {

inline const TreeFacet& x0_facet() {
  static const TreeFacet f = TreeFacet::vertex(TreeVertex{});
  return f;
}
inline const TreeFacet& edge01_facet() {
  static const TreeFacet f = TreeFacet::edge(TreeVertex{0, Rational(0)}, TreeVertex{-1, Rational(0)});
  return f;
}

/// Random element of SL2(Q_p) from unipotents with entries of valuation -2..3.
template <class Rng>
ExactSL2 random_sl2(Rng& rng, int p) {
  std::uniform_int_distribution<int> num(-9, 9), pw(-2, 3);
  ExactSL2 g = ExactSL2::identity(0);
  for (int i = 0; i < 3; ++i)
    g = g * ExactSL2::upper(BigRational(num(rng)) * pow_p(p, pw(rng))) * ExactSL2::lower(BigRational(num(rng)) * pow_p(p, pw(rng)));
  return g;
}

inline BigRational poly_eval(const std::vector<BigRational>& a, const BigRational& x) {
  BigRational acc = 0;
  for (std::size_t n = a.size(); n-- > 0;) acc = acc * x + a[n];
  return acc;
}

/// Known to the context's full precision and equal.
inline bool equal_to_precision(const Padic& a, const Padic& b, int precision) {
  Padic d = a - b;
  return d.is_exact_zero() || (d.is_zero() && d.valuation_lower_bound() >= precision);
}

}  // namespace detail

// --- series --------------------------------------------------------------

/// x^n = sum_k S(n,k) (x)_k as integer polynomials, n <= n_max.
inline SuiteResult suite_stirling(long n_max = 12) {
  CheckReport r("power = sum of Stirling-weighted falling factorials");
  for (long n = 0; n <= n_max; ++n) {
    std::vector<BigInt> sum(static_cast<std::size_t>(n) + 1, 0);
    for (long k = 0; k <= n; ++k) {
      auto ff = falling_factorial(k);
      for (std::size_t i = 0; i < ff.size(); ++i) sum[i] += stirling(n, k) * ff[i];
    }
    ++r.checked;
    for (long i = 0; i <= n; ++i)
      if (sum[static_cast<std::size_t>(i)] != (i == n ? 1 : 0))
        r.fail("n = " + std::to_string(n) + ": coefficient of x^" + std::to_string(i) + " is " + sum[static_cast<std::size_t>(i)].str());
  }
  return {"stirling", {r}, {}};
}

/// eval(mahler_coeffs(f)) = f on grid points, and power_to_mahler = finite differences.
inline SuiteResult suite_mahler(const RunConfig& cfg, const std::vector<int>& primes, int polys = 20, long degree = 8, int points = 50) {
  CheckReport round("Mahler roundtrip on grid points"), agree("power_to_mahler = finite differences");
  std::mt19937_64 rng(cfg.seed);
  for (int p : primes) {
    PadicContext ctx(p, cfg.precision);
    std::uniform_int_distribution<int> num(-60, 60), den(1, 12), pt(0, 10'000);
    for (int t = 0; t < polys; ++t) {
      std::vector<BigRational> a;
      for (long n = 0; n <= degree; ++n) {
        int d = den(rng);
        while (d % p == 0) d = den(rng);
        a.push_back(BigRational(num(rng), d));
      }
      auto s = mahler_coeffs(ctx, 1, degree, [&](const MultiIndex& m) { return detail::poly_eval(a, m[0]); });
      for (int i = 0; i < points; ++i) {
        long x = i < 10 ? i : pt(rng);
        ++round.checked;
        if (!detail::equal_to_precision(eval_mahler(s, {ctx.integer(x)}), ctx.rational(detail::poly_eval(a, x)), cfg.precision))
          round.fail("p = " + std::to_string(p) + ", polynomial " + std::to_string(t) + ", x = " + std::to_string(x));
      }
      auto via = power_to_mahler(ctx, PowerSeries{a, TailBound::zero()}, degree);
      ++agree.checked;
      for (std::size_t k = 0; k < s.coeffs.size(); ++k)
        if (!detail::equal_to_precision(via.coeffs[k], s.coeffs[k], cfg.precision))
          agree.fail("p = " + std::to_string(p) + ", polynomial " + std::to_string(t) + ", k = " + std::to_string(k));
    }
  }
  return {"mahler", {round, agree}, {}};
}

/// Random series with |a_n| <= p^-n; every |c_k| <= p^(-pk/(p-1)) for k <= order.
/// The weaker bound v(c_k) >= k + v_p(k!) is reported alongside.
inline SuiteResult suite_overconvergence(const RunConfig& cfg, int series = 50) {
  CheckReport claimed("|c_k| <= p^(-pk/(p-1)) for |a_n| <= p^-n");
  CheckReport weak("v(c_k) >= k + v_p(k!)");
  std::mt19937_64 rng(cfg.seed);
  const int p = cfg.p;
  std::uniform_int_distribution<int> unit(1, 50), extra(0, 2);
  Rational tightest(1000);
  for (int t = 0; t < series; ++t) {
    std::vector<BigRational> a;
    for (long n = 0; n <= cfg.order; ++n) {
      int u = unit(rng);
      while (u % p == 0) u = unit(rng);
      long v = n + (t % 2 ? extra(rng) : 0);
      a.push_back(BigRational(ipow(p, v)) * (n % 2 ? -u : u));
    }
    auto c = power_to_mahler_exact(a, cfg.order);
    DecayReport d = decay_check(p, c, Rational(0), Rational(1));
    claimed.checked += d.checked;
    tightest = std::min(tightest, d.observed);
    if (!d.ok) claimed.fail("series " + std::to_string(t) + ": k = " + std::to_string(d.first_violation) + ", v(c_k) = " +
                            std::to_string(valuation_of(c[static_cast<std::size_t>(d.first_violation)], p)) + " < " +
                            to_string(Rational(p * d.first_violation, p - 1)));
    for (long k = 0; k <= cfg.order; ++k) {
      const BigRational& ck = c[static_cast<std::size_t>(k)];
      ++weak.checked;
      if (ck != 0 && valuation_of(ck, p) < k + factorial_valuation(k, p)) weak.fail("series " + std::to_string(t) + ", k = " + std::to_string(k));
    }
  }
  return {"overconvergence", {claimed, weak}, {"tightest observed s = p^-" + to_string(tightest) + ", claimed p^-" + to_string(Rational(p, p - 1))}};
}

/// Submultiplicativity and visible multiplicativity of norm_r on abelian
/// products, and ||delta_g||_r = 1 in additive and SL2 charts.
inline SuiteResult suite_norm(const RunConfig& cfg, const std::vector<Rational>& rhos, int products = 200) {
  CheckReport sub("submultiplicativity"), mult("multiplicativity when the attaining indices survive truncation"),
      dirac_one("norm of Dirac distributions is 1");
  PadicContext ctx(cfg.p, cfg.precision);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> num(-40, 40), val(0, 4), keep(0, 2);
  const std::vector<Rational> ones(2, Rational(1));
  auto random_series = [&] {
    DistSeries s = zero_series(ctx, ones, 6);
    for (auto& c : s.coeffs)
      if (keep(rng) == 0) c = ctx.integer(num(rng)) * ctx.power_of_p(val(rng));
    return s;
  };
  for (int i = 0; i < products; ++i) {
    auto x = random_series(), y = random_series();
    auto xy = mul_abelian(x, y);
    for (const auto& rho : rhos) {
      RNorm nx = norm_r(x, rho), ny = norm_r(y, rho), nxy = norm_r(xy, rho);
      if (nx.is_zero() || ny.is_zero()) continue;
      ++sub.checked;
      if (nxy.exponent && *nxy.exponent > *nx.exponent + *ny.exponent)
        sub.fail("product " + std::to_string(i) + " at rho = " + to_string(rho));
      if (multiplicativity_visible(x, y, rho)) {
        ++mult.checked;
        if (!nxy.exponent || *nxy.exponent != *nx.exponent + *ny.exponent)
          mult.fail("product " + std::to_string(i) + " at rho = " + to_string(rho));
      }
    }
  }
  AdditiveChart z2(ctx, 2);
  std::uniform_int_distribution<int> big(-300, 300), den(1, 20);
  for (int i = 0; i < 40; ++i) {
    auto rand_zp = [&] {
      int d = den(rng);
      while (d % cfg.p == 0) d = den(rng);
      return ctx.rational(BigRational(big(rng), d));
    };
    auto d = dirac(z2, {rand_zp(), rand_zp()}, 6);
    for (const auto& rho : rhos) {
      RNorm n = norm_r(d, rho);
      ++dirac_one.checked;
      if (!n.certified() || !n.exponent || *n.exponent != Rational(0)) dirac_one.fail("additive Dirac " + std::to_string(i) + ": " + n.to_string());
    }
  }
  for (const auto& f : {detail::x0_facet(), detail::edge01_facet()}) {
    SL2Chart chart = SL2Chart::of(ctx, f, cfg.e);
    for (int i = 0; i < 10; ++i) {
      ExactSL2 g = random_member(rng, cfg.p, f, cfg.e);
      auto d = dirac(chart, chart.coords(g), 4);
      for (const auto& rho : rhos) {
        RNorm n = norm_r(d, rho);
        ++dirac_one.checked;
        if (!n.certified() || !n.exponent || *n.exponent != Rational(0)) dirac_one.fail("Dirac at " + g.to_string() + ": " + n.to_string());
      }
    }
  }
  return {"norm", {sub, mult, dirac_one}, {}};
}

// --- groups --------------------------------------------------------------

inline SuiteResult suite_pvaluation(const RunConfig& cfg) {
  SuiteResult out{"pvaluation", {}, {}};
  std::mt19937_64 rng(cfg.seed);
  for (const auto& f : {detail::x0_facet(), detail::edge01_facet()}) {
    std::vector<ExactSL2> samples;
    for (int i = 0; i < cfg.samples; ++i) samples.push_back(random_member(rng, cfg.p, f, cfg.e + i % 3));
    for (auto r : check_pvaluation(cfg.p, samples, f, cfg.e)) {
      r.name += (f.is_vertex() ? " (vertex)" : " (edge)");
      out.checks.push_back(std::move(r));
    }
  }
  return out;
}

/// Factor-reassemble roundtrip, and injectivity of the product map: factors
/// drawn at their levels come back unchanged.
inline SuiteResult suite_decomposition(const RunConfig& cfg) {
  CheckReport round("factor then reassemble"), unique("factors of a product are the factors used");
  std::mt19937_64 rng(cfg.seed);
  Window w = tree_window(cfg.p, cfg.radius);
  for (std::size_t dim : {0u, 1u}) {
    auto ids = w.of_dimension(dim);
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    for (int i = 0; i < cfg.samples; ++i) {
      const TreeFacet& f = w[ids[pick(rng)]];
      Standardized st = standardize(cfg.p, f);
      FiltrationGroupSpec spec = filtration_spec(st.facet, cfg.e);
      ExactSL2 g = random_member(rng, cfg.p, f, cfg.e, 3).conjugate_by(st.h);
      auto r = root_space_factor(cfg.p, g, spec);
      ++round.checked;
      if (!r.member || !(r.factors->product() == g)) round.fail(f.id() + ": " + g.to_string());

      BigRational c = pow_p(cfg.p, spec.lower.min_integer()) * random_zp(rng, cfg.p);
      BigRational t = 1 + pow_p(cfg.p, spec.torus) * random_zp(rng, cfg.p);
      BigRational a = pow_p(cfg.p, spec.upper.min_integer()) * random_zp(rng, cfg.p);
      Factors<BigRational> want{c, t, a};
      auto back = root_space_factor(cfg.p, want.product(), spec);
      ++unique.checked;
      if (!back.member || back.factors->c != c || back.factors->t != t || back.factors->a != a)
        unique.fail(f.id() + ": c = " + c.str() + ", t = " + t.str() + ", a = " + a.str());
    }
  }
  return {"decomposition", {round, unique}, {}};
}

/// g in U_z iff h g h^-1 in U_{hz}; g in U_{F'} implies g in U_F for F' <= F.
inline SuiteResult suite_covariance(const RunConfig& cfg, int triples = 50) {
  CheckReport cov("conjugation covariance"), mono("face monotonicity");
  std::mt19937_64 rng(cfg.seed);
  Window w = tree_window(cfg.p, cfg.radius);
  std::uniform_int_distribution<std::size_t> pick(0, w.size() - 1);
  for (int i = 0; i < triples; ++i) {
    const TreeFacet& z = w[pick(rng)];
    ExactSL2 h = detail::random_sl2(rng, cfg.p);
    ExactSL2 g = i % 3 ? random_member(rng, cfg.p, z, cfg.e) : detail::random_sl2(rng, cfg.p);
    ++cov.checked;
    if (membership(cfg.p, g, z, cfg.e) != membership(cfg.p, g.conjugate_by(h), act(cfg.p, h.matrix(), z), cfg.e))
      cov.fail("g = " + g.to_string() + ", h = " + h.to_string() + ", z = " + z.id());
  }
  for (int i = 0; i < triples; ++i) {
    std::size_t big = pick(rng);
    const auto& faces = w.faces(big);
    std::size_t small = faces[std::uniform_int_distribution<std::size_t>(0, faces.size() - 1)(rng)];
    ExactSL2 g = i % 3 ? random_member(rng, cfg.p, w[small], cfg.e) : detail::random_sl2(rng, cfg.p);
    ++mono.checked;
    if (membership(cfg.p, g, w[small], cfg.e) && !membership(cfg.p, g, w[big], cfg.e))
      mono.fail("g = " + g.to_string() + " in U at " + w[small].id() + " but not at " + w[big].id());
  }
  return {"covariance", {cov, mono}, {}};
}

/// Gluing maps for every face pair of the window: norm-decreasing for each r,
/// identity law, and cocycle laws (with identities and through a level change).
inline SuiteResult suite_gluing(const RunConfig& cfg, const std::vector<Rational>& rhos) {
  CheckReport norms("gluing maps are norm-decreasing"), ident("identity law"), cocycle("cocycle law");
  PadicContext ctx(cfg.p, cfg.precision);
  Window w = tree_window(cfg.p, cfg.radius);
  const long n = cfg.order;
  for (std::size_t f = 0; f < w.size(); ++f) {
    SL2Chart tgt = SL2Chart::of(ctx, w[f], cfg.e);
    GluingMap id = gluing_map(tgt, tgt, n);
    ++ident.checked;
    for (std::size_t i = 0; i < 3; ++i) {
      MultiIndex a(3, 0);
      a[i] = 1;
      const DistSeries& s = id.images[i];
      for (std::size_t k = 0; k < s.index.size(); ++k)
        if (!(s.coeffs[k] == (s.index[k] == a ? ctx.one() : ctx.zero()))) ident.fail("sigma^FF(b_" + std::to_string(i) + ") at " + w[f].id());
    }
    for (auto f1 : w.faces(f)) {
      if (f1 == f) continue;
      SL2Chart src = SL2Chart::in_frame_of(ctx, w[f1], cfg.e, w[f]);
      SL2Chart deeper = SL2Chart::in_frame_of(ctx, w[f1], cfg.e + 1, w[f]);
      GluingMap s = gluing_map(src, tgt, n);
      std::string pair = w[f1].id() + " <= " + w[f].id();
      for (const auto& rho : rhos) {
        CheckReport r = norm_decreasing_check(s, rho, pair);
        norms.checked += r.checked;
        if (!r.ok) norms.fail(pair + " at rho = " + to_string(rho) + ": " + r.counterexample);
      }
      ++cocycle.checked;
      if (!same_images(compose(id, s), s)) cocycle.fail("sigma^FF o sigma^F'F != sigma^F'F for " + pair);
      ++cocycle.checked;
      if (!same_images(compose(s, gluing_map(src, src, n)), s)) cocycle.fail("sigma^F'F o sigma^F'F' != sigma^F'F for " + pair);
      // U_{F'}^(e+1) <= U_{F'}^(e) <= U_F^(e)
      GluingMap down = gluing_map(deeper, src, n), direct = gluing_map(deeper, tgt, n);
      ++cocycle.checked;
      if (!same_images(compose(s, down), direct)) cocycle.fail("level chain through " + pair);
      for (const auto& rho : rhos) {
        CheckReport r = norm_decreasing_check(direct, rho, pair + " from level " + std::to_string(cfg.e + 1));
        norms.checked += r.checked;
        if (!r.ok) norms.fail(r.name + " at rho = " + to_string(rho) + ": " + r.counterexample);
      }
    }
  }
  return {"gluing", {norms, ident, cocycle}, {}};
}

inline SuiteResult suite_lower_p_series(const RunConfig& cfg, long modulus_exp = 6) {
  auto rep = lower_p_series_check(cfg.p, detail::x0_facet(), cfg.e, modulus_exp);
  CheckReport r("images of U^(e+1) and P_2(U^(e)) coincide mod p^" + std::to_string(modulus_exp));
  r.checked = static_cast<long>(rep.order_next);
  if (!rep.equal) r.fail("|P_2| = " + std::to_string(rep.order_h) + ", |U^(e+1)| = " + std::to_string(rep.order_next));
  if (!rep.normal) r.fail("image of U^(e+1) is not normal");
  return {"lower-p-series", {r}, {rep.to_json().dump()}};
}

// --- sheaves -------------------------------------------------------------

/// Stalks, constancy, gluing on star covers and stalkwise exactness for the
/// preset representations at the given levels.
inline SuiteResult suite_sheaf(const RunConfig& cfg, const std::vector<long>& levels) {
  SuiteResult out{"sheaf", {}, {}};
  Window w = tree_window(cfg.p, cfg.radius);
  SteinbergSequence seq = steinberg_sequence(cfg.p);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, w.size() - 1);
  for (long e : levels) {
    std::string at = " (e = " + std::to_string(e) + ")";
    for (const SmoothRep* v : {&seq.triv, &seq.p1, &seq.st}) {
      ConstructibleSheaf sh = ss_sheaf(*v, e, w);
      CheckReport laws = laws_check(sh.system);
      CheckReport stalks = stalk_check(sh.system);
      auto coinv = stalk_coinvariant_check(*v, e, sh);
      CheckReport glue("gluing equalizer on star covers: " + v->name);
      for (std::size_t a = 0; a < w.size(); ++a)
        for (std::size_t b = a + 1; b < w.size(); ++b) {
          CheckReport r = gluing_check(sh.system, {a, b});
          glue.checked += r.checked;
          if (!r.ok) glue.fail(r.name + ": " + r.counterexample);
        }
      for (int t = 0; t < 10; ++t) {
        CheckReport r = gluing_check(sh.system, {pick(rng), pick(rng), pick(rng), pick(rng)});
        glue.checked += r.checked;
        if (!r.ok) glue.fail(r.name + ": " + r.counterexample);
      }
      for (CheckReport* r : {&laws, &stalks, &coinv[0], &coinv[1], &glue}) {
        r->name += at;
        out.checks.push_back(*r);
      }
    }
    ExactnessReport ex = exactness_check(seq.triv, seq.p1, seq.st, seq.iota, seq.pi, e, w);
    CheckReport dims("dimension identity 1 + p = p + 1 at level-one facets" + at);
    std::size_t level_one = 0;
    for (const auto& row : ex.rows) {
      if (row.d_mid != static_cast<std::size_t>(cfg.p) + 1) continue;
      ++level_one;
      ++dims.checked;
      if (row.d_sub != 1 || row.d_quot != static_cast<std::size_t>(cfg.p)) dims.fail("dims at " + row.facet);
    }
    ex.check.name += at;
    out.checks.push_back(ex.check);
    out.checks.push_back(dims);
    out.notes.push_back(std::to_string(level_one) + " of " + std::to_string(w.size()) + " facets act through level one" + at);

    Matrix delta0(static_cast<std::size_t>(cfg.p) + 1, 1);
    delta0(0, 0) = 1;
    CheckReport control("non-equivariant map is rejected" + at);
    control.checked = 1;
    if (exactness_check(seq.triv, seq.p1, seq.st, delta0, seq.pi, e, w).check.ok) control.fail("delta_0 passed as a map of representations");
    out.checks.push_back(control);
  }
  return out;
}

/// The comparison square for trivial and P^1(F_p)-functions (and Steinberg),
/// and naturality along the Steinberg sequence.
inline SuiteResult suite_comparison(const RunConfig& cfg, const Rational& rho, long e) {
  SuiteResult out{"comparison", {}, {}};
  Window w = tree_window(cfg.p, cfg.radius);
  SteinbergSequence seq = steinberg_sequence(cfg.p);
  auto ct = comparison_check(seq.triv, rho, e, w);
  auto cp = comparison_check(seq.p1, rho, e, w);
  auto cs = comparison_check(seq.st, rho, e, w);
  for (const ComparisonReport* c : {&ct, &cp, &cs}) {
    out.checks.push_back(c->square);
    out.checks.push_back(c->iso);
    out.checks.push_back(laws_check(c->mr.system));
  }
  out.checks.push_back(comparison_naturality(ct, cp, seq.iota, "trivial -> p1-functions"));
  out.checks.push_back(comparison_naturality(cp, cs, seq.pi, "p1-functions -> steinberg"));
  out.notes.push_back("bracket " + ct.bracket.to_json().dump());
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"stirling", "mahler", "overconvergence", "norm", "pvaluation", "decomposition",
                                              "covariance", "gluing", "sheaf", "comparison", "lower-p-series"};
  return names;
}

/// Suite by name with the run configuration's parameters.
inline SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
  if (name == "stirling") return suite_stirling();
  if (name == "mahler") return suite_mahler(cfg, {cfg.p});
  if (name == "overconvergence") return suite_overconvergence(cfg);
  if (name == "norm") return suite_norm(cfg, cfg.rhos);
  if (name == "pvaluation") return suite_pvaluation(cfg);
  if (name == "decomposition") return suite_decomposition(cfg);
  if (name == "covariance") return suite_covariance(cfg);
  if (name == "gluing") return suite_gluing(cfg, cfg.rhos);
  if (name == "sheaf") return suite_sheaf(cfg, {cfg.e - 1, cfg.e});
  if (name == "comparison") return suite_comparison(cfg, cfg.rhos.front(), cfg.e - 1);
  if (name == "lower-p-series") return suite_lower_p_series(cfg);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace bts
