#pragma once

// Truncated distribution series  delta = sum_alpha d_alpha b^alpha,  b_i = h_i - 1,
// over an ordered basis h_1, ..., h_d of a uniform group, together with
//   ||delta||_r = sup |d_alpha| r^(tau alpha),   tau alpha = sum_i w_i alpha_i,
// Dirac expansions, the pairing with Mahler series, and the gluing maps between
// the groups of two facets.
//
// Monomials are ordered products b_1^alpha_1 ... b_d^alpha_d.  Only products that
// never need to reorder them are offered: the abelian product, Dirac products
// through the group law, and substitutions that send each b'_i into a single
// variable of the target with the variables kept in order.
//
// r is always p^(-rho) with rho rational in (0, 1], and norms are reported as
// exact exponents of p.

#include "bts/filtration.hpp"
#include "bts/mahler.hpp"

namespace bts {

using Coords = std::vector<Padic>;

struct DistSeries {
  int p = 3;
  IndexTable index;
  std::vector<Padic> coeffs;
  std::vector<Rational> weights;  // w_i, one per basis direction
  TailBound tail;                 // for |alpha| > N
  bool commutative = true;

  std::size_t dim() const { return index.dim(); }
  long order() const { return index.order(); }

  const Padic& coeff(const MultiIndex& a) const {
    auto i = index.find(a);
    if (!i) throw std::out_of_range("index beyond truncation");
    return coeffs[*i];
  }

  Rational tau(const MultiIndex& a) const {
    Rational t(0);
    for (std::size_t i = 0; i < a.size(); ++i) t += weights[i] * Rational(a[i]);
    return t;
  }

  Rational min_weight() const { return *std::min_element(weights.begin(), weights.end()); }

  /// Largest degree with a coefficient that is not an exact zero; -1 if none.
  long top_degree() const {
    long top = -1;
    for (std::size_t i = 0; i < index.size(); ++i)
      if (!coeffs[i].is_exact_zero()) top = std::max(top, degree(index[i]));
    return top;
  }
};

inline DistSeries zero_series(const PadicContext& ctx, std::vector<Rational> weights, long n, bool commutative = true) {
  DistSeries s{ctx.p, IndexTable(weights.size(), n), {}, std::move(weights), TailBound::zero(), commutative};
  s.coeffs.assign(s.index.size(), ctx.zero());
  return s;
}

inline DistSeries monomial(const PadicContext& ctx, std::vector<Rational> weights, long n, const MultiIndex& a,
                           const Padic& c, bool commutative = true) {
  DistSeries s = zero_series(ctx, std::move(weights), n, commutative);
  auto i = s.index.find(a);
  if (!i) throw std::out_of_range("monomial beyond truncation");
  s.coeffs[*i] = c;
  return s;
}

inline DistSeries operator+(DistSeries x, const DistSeries& y) {
  if (x.index.size() != y.index.size() || x.dim() != y.dim()) throw std::invalid_argument("series shapes differ");
  for (std::size_t i = 0; i < x.coeffs.size(); ++i) x.coeffs[i] += y.coeffs[i];
  if (y.tail.kind == TailBound::Kind::Unknown || x.tail.exact()) {
    x.tail = y.tail;
  } else if (!y.tail.exact()) {
    Rational s = std::min(x.tail.slope, y.tail.slope);
    x.tail = TailBound::affine(std::min(x.tail.offset, y.tail.offset), s);
  }
  return x;
}

inline DistSeries operator-(DistSeries x, const DistSeries& y) {
  DistSeries neg = y;
  for (auto& c : neg.coeffs) c = -c;
  return std::move(x) + neg;
}

/// ||delta||_r as a power of p.
struct RNorm {
  std::optional<Rational> exponent;  // max over retained terms; nullopt when all vanish exactly
  std::optional<Rational> bound;     // upper bound for discarded terms and lost digits; nullopt if none
  bool unbounded = false;            // the tail bound does not decay at this r

  bool certified() const { return !unbounded && (!bound || (exponent && *bound <= *exponent)); }
  bool strictly_certified() const { return !unbounded && (!bound || (exponent && *bound < *exponent)); }
  bool is_zero() const { return !exponent && !bound && !unbounded; }

  /// exponent, or the certified upper bound when nothing retained survives
  std::optional<Rational> upper() const {
    if (unbounded) throw PrecisionError("norm is not bounded by the tail data");
    if (!bound) return exponent;
    if (!exponent) return bound;
    return std::max(*exponent, *bound);
  }

  std::string to_string() const {
    if (unbounded) return "unbounded";
    if (is_zero()) return "0";
    std::string s = exponent ? "p^" + bts::to_string(*exponent) : "0";
    if (!certified()) s += " (tail up to p^" + bts::to_string(*bound) + ")";
    return s;
  }
};

inline RNorm norm_r(const DistSeries& s, const Rational& rho) {
  if (rho <= Rational(0) || rho > Rational(1)) throw std::invalid_argument("r must be p^-rho with 0 < rho <= 1");
  RNorm out;
  auto raise = [](std::optional<Rational>& slot, const Rational& x) {
    if (!slot || x > *slot) slot = x;
  };
  for (std::size_t i = 0; i < s.index.size(); ++i) {
    const Padic& c = s.coeffs[i];
    if (c.is_exact_zero()) continue;
    Rational w = rho * s.tau(s.index[i]);
    if (c.is_zero()) {
      raise(out.bound, -Rational(c.valuation_lower_bound()) - w);
    } else {
      raise(out.exponent, -Rational(c.valuation()) - w);
    }
  }
  switch (s.tail.kind) {
    case TailBound::Kind::Exact: break;
    case TailBound::Kind::Unknown: out.unbounded = true; break;
    case TailBound::Kind::Affine: {
      // |d_alpha| r^tau <= p^(-offset - (slope + rho w_min) n) for n = |alpha| > N
      Rational decay = s.tail.slope + rho * s.min_weight();
      if (decay < Rational(0)) {
        out.unbounded = true;
      } else {
        raise(out.bound, -s.tail.offset - decay * Rational(s.order() + 1));
      }
      break;
    }
  }
  return out;
}

namespace detail {

/// Lower bound for v(d_alpha) over all alpha of degree n, retained or not; nullopt for +inf.
inline std::optional<Rational> degree_valuation(const DistSeries& s, long n) {
  if (n > s.order()) {
    if (s.tail.exact()) return std::nullopt;
    if (!s.tail.known()) throw PrecisionError("series has no tail bound");
    return s.tail.offset + s.tail.slope * Rational(n);
  }
  std::optional<Rational> lo;
  for (std::size_t i = 0; i < s.index.size(); ++i) {
    if (degree(s.index[i]) != n || s.coeffs[i].is_exact_zero()) continue;
    Rational v(s.coeffs[i].valuation_lower_bound());
    if (!lo || v < *lo) lo = v;
  }
  return lo;
}

/// off with v(d_alpha) >= off + slope |alpha| for every alpha; nullopt if the series is 0.
/// The tail slope must be >= slope.
inline std::optional<Rational> envelope(const DistSeries& s, const Rational& slope) {
  std::optional<Rational> off;
  for (long n = 0; n <= s.order(); ++n) {
    auto v = degree_valuation(s, n);
    if (v && (!off || *v - slope * Rational(n) < *off)) off = *v - slope * Rational(n);
  }
  if (!s.tail.exact()) {
    if (!s.tail.known()) throw PrecisionError("series has no tail bound");
    if (s.tail.slope < slope) throw std::logic_error("envelope slope above the tail slope");
    if (!off || s.tail.offset < *off) off = s.tail.offset;
  }
  return off;
}

inline long ceil_to_long(const Rational& q) { return static_cast<long>(ceil_of(q)); }

}  // namespace detail

/// delta(f) = sum_alpha d_alpha c_alpha, with the discarded terms folded into the precision.
inline Padic pair(const DistSeries& d, const MahlerSeries& f) {
  if (d.dim() != f.dim()) throw std::invalid_argument("pairing needs matching dimensions");
  const long nd = d.order(), nf = f.order(), lo = std::min(nd, nf), hi = std::max(nd, nf);
  Padic acc = Padic::exact_zero(d.p, d.coeffs.empty() ? 1 : d.coeffs[0].cap());
  std::optional<Rational> err;
  auto lower = [&](const Rational& x) {
    if (!err || x < *err) err = x;
  };
  for (std::size_t i = 0; i < d.index.size(); ++i) {
    const MultiIndex& a = d.index[i];
    if (degree(a) > lo) continue;
    acc += d.coeffs[i] * f.coeff(a);
  }
  // one side retained, the other from its tail bound
  auto mixed = [&](const std::vector<Padic>& coeffs, const IndexTable& idx, const TailBound& other) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      long n = degree(idx[i]);
      if (n <= lo || coeffs[i].is_exact_zero() || other.exact()) continue;
      if (!other.known()) throw PrecisionError("pairing needs a tail bound");
      lower(Rational(coeffs[i].valuation_lower_bound()) + other.offset + other.slope * Rational(n));
    }
  };
  if (nd > lo) mixed(d.coeffs, d.index, f.tail);
  if (nf > lo) mixed(f.coeffs, f.index, d.tail);
  if (!d.tail.exact() && !f.tail.exact()) {
    if (!d.tail.known() || !f.tail.known()) throw PrecisionError("pairing needs a tail bound");
    Rational slope = d.tail.slope + f.tail.slope;
    if (slope < Rational(0)) throw PrecisionError("pairing does not converge on the tail bounds");
    lower(d.tail.offset + f.tail.offset + slope * Rational(hi + 1));
  }
  if (err) acc += Padic::zero_to(d.p, acc.cap(), detail::ceil_to_long(*err));
  return acc;
}

/// Cauchy product in the commutative ring, truncated at min(N1, N2).  Retained
/// coefficients are exact; the tail bound comes from affine envelopes of both factors.
inline DistSeries mul_abelian(const DistSeries& x, const DistSeries& y) {
  if (!x.commutative || !y.commutative) throw std::invalid_argument("abelian product needs a commutative basis");
  if (x.weights != y.weights) throw std::invalid_argument("series over different bases");
  const long n = std::min(x.order(), y.order());
  DistSeries out{x.p, IndexTable(x.dim(), n), {}, x.weights, TailBound::zero(), true};
  const int cap = x.coeffs.empty() ? 1 : x.coeffs[0].cap();
  for (std::size_t g = 0; g < out.index.size(); ++g) {
    const MultiIndex& gamma = out.index[g];
    Padic acc = Padic::exact_zero(x.p, cap);
    for (std::size_t i = 0; i < x.index.size(); ++i) {
      const MultiIndex& a = x.index[i];
      MultiIndex b(gamma.size());
      bool ok = true;
      for (std::size_t k = 0; k < gamma.size() && ok; ++k) {
        b[k] = gamma[k] - a[k];
        ok = b[k] >= 0;
      }
      if (!ok || x.coeffs[i].is_exact_zero()) continue;
      acc += x.coeffs[i] * y.coeff(b);
    }
    out.coeffs.push_back(acc);
  }
  if (x.tail.exact() && y.tail.exact() && x.top_degree() + y.top_degree() <= n) return out;
  std::optional<Rational> slope;
  for (const DistSeries* s : {&x, &y})
    if (!s->tail.exact()) slope = slope ? std::min(*slope, s->tail.slope) : s->tail.slope;
  auto ox = detail::envelope(x, slope.value_or(Rational(0))), oy = detail::envelope(y, slope.value_or(Rational(0)));
  if (ox && oy) out.tail = TailBound::affine(*ox + *oy, slope.value_or(Rational(0)));
  return out;
}

/// Index (in IndexTable order) of the last retained term attaining the norm; nullopt if none.
inline std::optional<std::size_t> attaining_index(const DistSeries& s, const Rational& rho) {
  RNorm nm = norm_r(s, rho);
  if (!nm.exponent) return std::nullopt;
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < s.index.size(); ++i) {
    const Padic& c = s.coeffs[i];
    if (c.is_zero()) continue;
    if (-Rational(c.valuation()) - rho * s.tau(s.index[i]) == *nm.exponent) last = i;
  }
  return last;
}

/// Whether ||xy||_r = ||x||_r ||y||_r is visible at the product's truncation: both
/// norms are attained strictly above everything uncertain, and the sum of the
/// last attaining indices (a monomial order, so that coefficient has a single
/// dominant contribution) is retained.
inline bool multiplicativity_visible(const DistSeries& x, const DistSeries& y, const Rational& rho) {
  RNorm nx = norm_r(x, rho), ny = norm_r(y, rho);
  if (!nx.strictly_certified() || !ny.strictly_certified()) return false;
  auto ix = attaining_index(x, rho), iy = attaining_index(y, rho);
  if (!ix || !iy) return false;
  return degree(x.index[*ix]) + degree(y.index[*iy]) <= std::min(x.order(), y.order());
}

/// A group with an ordered basis h_1, ..., h_d and coordinates
/// (a_1, ..., a_d) <-> h_1^a_1 ... h_d^a_d in Z_p^d.
class GroupChart {
 public:
  virtual ~GroupChart() = default;
  virtual std::size_t dim() const = 0;
  virtual bool commutative() const = 0;
  virtual std::vector<Rational> weights() const = 0;
  virtual Coords mul(const Coords& x, const Coords& y) const = 0;
  virtual Coords inverse(const Coords& x) const = 0;
  virtual const PadicContext& context() const = 0;

  Coords identity() const { return Coords(dim(), context().zero()); }
};

/// Z_p^d with the standard basis; the group law is addition.
class AdditiveChart : public GroupChart {
 public:
  AdditiveChart(PadicContext ctx, std::size_t d, std::vector<Rational> weights = {})
      : ctx_(ctx), d_(d), w_(weights.empty() ? std::vector<Rational>(d, Rational(1)) : std::move(weights)) {}

  std::size_t dim() const override { return d_; }
  bool commutative() const override { return true; }
  std::vector<Rational> weights() const override { return w_; }
  const PadicContext& context() const override { return ctx_; }
  Coords mul(const Coords& x, const Coords& y) const override {
    Coords z;
    for (std::size_t i = 0; i < d_; ++i) z.push_back(x[i] + y[i]);
    return z;
  }
  Coords inverse(const Coords& x) const override {
    Coords z;
    for (const auto& c : x) z.push_back(-c);
    return z;
  }

 private:
  PadicContext ctx_;
  std::size_t d_;
  std::vector<Rational> w_;
};

/// q^x for q in 1 + pZ_p and x in Z_p, from x mod p^k: q^(p^k) = 1 mod p^(v(q-1)+k).
inline Padic pow_zp(const Padic& q, const Padic& x) {
  if (x.is_exact_zero()) return Padic::from_integer(q.prime(), q.cap(), 1);
  long k = std::min<long>(x.abs_precision(), q.cap());
  long t = (q - Padic::from_integer(q.prime(), q.cap(), 1)).valuation_lower_bound();
  return q.pow(static_cast<long>(x.residue(k))) + Padic::zero_to(q.prime(), q.cap(), t + k);
}

/// x in Z_p with q^x = a, for a, q in 1 + p^t Z_p and v(q - 1) = t, one digit at a time.
inline Padic discrete_log(const Padic& a, const Padic& q) {
  const int p = q.prime(), cap = q.cap();
  const Padic one = Padic::from_integer(p, cap, 1);
  const long t = (q - one).valuation();
  if (!(a - one).is_exact_zero() && (a - one).valuation_lower_bound() < t)
    throw std::invalid_argument("discrete log: argument outside 1 + p^" + std::to_string(t) + "Z_p");
  BigInt n = 0, pj = 1;
  for (long j = 0; j < cap; ++j, pj *= p) {
    Padic z = a / q.pow(static_cast<long>(n)) - one;
    if (z.is_exact_zero()) return n == 0 ? Padic::exact_zero(p, cap) : Padic::from_integer(p, cap, n);
    if (z.is_zero()) {
      if (z.valuation_lower_bound() <= t + j) return Padic::from_integer(p, cap, n, j);
      continue;
    }
    long v = z.valuation();
    if (v < t + j) throw std::logic_error("discrete log lost its invariant");
    if (v > t + j) continue;
    BigInt digit = BigInt(z.unit() % static_cast<std::uint64_t>(p));
    n += digit * pj;
  }
  return Padic::from_integer(p, cap, n, cap);
}

/// Coordinates on U_F^(e) for an apartment facet F, conjugated by a frame h:
/// the group is h^-1 U h with basis h^-1 u-(p^l-) h, h^-1 t(q) h, h^-1 u+(p^l+) h,
/// q = 1 + p^(e+1).  h is the standardizing element of the facet (or of a larger
/// facet, so that the charts of a face pair share a frame).
class SL2Chart : public GroupChart {
 public:
  SL2Chart(PadicContext ctx, FiltrationGroupSpec spec, ExactSL2 frame)
      : ctx_(ctx), spec_(std::move(spec)), frame_(std::move(frame)),
        lo_(spec_.lower.min_integer()), hi_(spec_.upper.min_integer()),
        q_(ctx.one() + ctx.power_of_p(spec_.torus)) {
    if (spec_.e < 2) throw std::invalid_argument("charts need e >= 2");
    TreeFacet f = tree_facet_of(spec_.facet);
    for (const auto& b : ordered_basis(ctx_.p, spec_)) w_.push_back(Rational(omega(ctx_.p, b, f, spec_.e).omega_ring));
  }

  /// Chart of U_F^(e) for a tree facet in its own frame.
  static SL2Chart of(const PadicContext& ctx, const TreeFacet& f, long e) {
    Standardized st = standardize(ctx.p, f);
    return SL2Chart(ctx, filtration_spec(st.facet, e), st.h);
  }
  /// Chart of U_F^(e) in the frame of another facet (normally a cofacet of F).
  static SL2Chart in_frame_of(const PadicContext& ctx, const TreeFacet& f, long e, const TreeFacet& frame_facet) {
    Standardized st = standardize_with(ctx.p, f, standardize(ctx.p, frame_facet).h);
    return SL2Chart(ctx, filtration_spec(st.facet, e), st.h);
  }

  std::size_t dim() const override { return 3; }
  bool commutative() const override { return false; }
  std::vector<Rational> weights() const override { return w_; }
  const PadicContext& context() const override { return ctx_; }
  const FiltrationGroupSpec& spec() const { return spec_; }
  const ExactSL2& frame() const { return frame_; }

  /// Basis elements in global coordinates.
  std::vector<ExactSL2> basis() const {
    std::vector<ExactSL2> out;
    for (const auto& b : ordered_basis(ctx_.p, spec_)) out.push_back(b.conjugate_by(frame_.inverse()));
    return out;
  }

  SL2<Padic> element(const Coords& x) const {
    if (x.size() != 3) throw std::invalid_argument("SL2 chart has three coordinates");
    SL2<Padic> g = SL2<Padic>::lower(ctx_.power_of_p(lo_) * x[0]) * SL2<Padic>::torus(pow_zp(q_, x[1])) *
                   SL2<Padic>::upper(ctx_.power_of_p(hi_) * x[2]);
    return g.conjugate_by(lift(frame_.inverse(), ctx_.one()));
  }

  Coords coords(const SL2<Padic>& g) const {
    SL2<Padic> g0 = g.conjugate_by(lift(frame_, ctx_.one()));
    FactorResult<Padic> r = root_space_factor(ctx_.p, g0, spec_);
    if (!r.member) throw std::invalid_argument("element outside the chart's group: " + r.violated);
    const Factors<Padic>& f = *r.factors;
    return {f.c / ctx_.power_of_p(lo_), discrete_log(f.t, q_), f.a / ctx_.power_of_p(hi_)};
  }
  /// Exact factorization first, so that coordinates which vanish come back as exact zeros.
  Coords coords(const ExactSL2& g) const {
    ExactSL2 g0 = g.conjugate_by(frame_);
    FactorResult<BigRational> r = root_space_factor(ctx_.p, g0, spec_);
    if (!r.member) throw std::invalid_argument("element outside the chart's group: " + r.violated);
    const Factors<BigRational>& f = *r.factors;
    Padic x2 = f.t == 1 ? ctx_.zero() : discrete_log(ctx_.rational(f.t), q_);
    return {ctx_.rational(f.c / pow_p(ctx_.p, lo_)), x2, ctx_.rational(f.a / pow_p(ctx_.p, hi_))};
  }

  Coords mul(const Coords& x, const Coords& y) const override { return coords(element(x) * element(y)); }
  Coords inverse(const Coords& x) const override { return coords(element(x).inverse()); }

 private:
  PadicContext ctx_;
  FiltrationGroupSpec spec_;
  ExactSL2 frame_;
  long lo_, hi_;
  Padic q_;
  std::vector<Rational> w_;
};

/// delta_h = prod_i (1 + b_i)^(a_i) = sum_alpha prod_i C(a_i, alpha_i) b^alpha.
/// The binomials are p-adic integers, which is the tail bound.
inline DistSeries dirac(const GroupChart& chart, const Coords& a, long n) {
  if (a.size() != chart.dim()) throw std::invalid_argument("coordinate vector has the wrong length");
  const PadicContext& ctx = chart.context();
  DistSeries s{ctx.p, IndexTable(chart.dim(), n), {}, chart.weights(), TailBound::affine(0, 0), chart.commutative()};
  std::vector<std::vector<Padic>> binom(a.size());
  bool identity = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (long k = 0; k <= n; ++k) binom[i].push_back(padic_binomial(a[i], k));
    identity = identity && a[i].is_exact_zero();
  }
  for (std::size_t j = 0; j < s.index.size(); ++j) {
    Padic c = ctx.one();
    for (std::size_t i = 0; i < a.size(); ++i) c = c * binom[i][static_cast<std::size_t>(s.index[j][i])];
    s.coeffs.push_back(c);
  }
  if (identity) s.tail = TailBound::zero();
  return s;
}

/// delta_g1 delta_g2 = delta_(g1 g2), computed through the group law.
inline DistSeries mul_dirac(const GroupChart& chart, const Coords& g1, const Coords& g2, long n) {
  return dirac(chart, chart.mul(g1, g2), n);
}

/// log(1 + b_i) = sum_{k >= 1} (-1)^(k+1) b_i^k / k.  Since v(k) <= (k-1)/(p-1) the
/// discarded terms satisfy v >= 1/(p-1) - k/(p-1).
inline DistSeries lie_embed(const GroupChart& chart, std::size_t i, long n) {
  if (i >= chart.dim()) throw std::out_of_range("basis index");
  if (n < 1) throw std::invalid_argument("truncation must be >= 1");
  const PadicContext& ctx = chart.context();
  DistSeries s = zero_series(ctx, chart.weights(), n, chart.commutative());
  for (long k = 1; k <= n; ++k) {
    MultiIndex a(chart.dim(), 0);
    a[i] = k;
    s.coeffs[*s.index.find(a)] = ctx.rational(BigRational(k % 2 ? 1 : -1, k));
  }
  s.tail = TailBound::affine(Rational(1, ctx.p - 1), Rational(-1, ctx.p - 1));
  return s;
}

/// sigma: D(H') -> D(H) for H' <= H, on generators: sigma(b'_i) = delta_(h'_i) - 1
/// written in the basis of H.  var[i] is the only target variable sigma(b'_i) involves
/// (npos when h'_i = 1).
struct GluingMap {
  std::vector<DistSeries> images;
  std::vector<std::size_t> var;
  std::vector<Rational> source_weights;
  std::vector<Rational> target_weights;
  long order = 0;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Gluing map from the coordinates of the source basis in the target chart.
inline GluingMap gluing_map(const GroupChart& target, const std::vector<Coords>& source_basis,
                            std::vector<Rational> source_weights, long n) {
  GluingMap m;
  m.order = n;
  m.source_weights = std::move(source_weights);
  m.target_weights = target.weights();
  DistSeries one = monomial(target.context(), target.weights(), n, MultiIndex(target.dim(), 0), target.context().one(),
                            target.commutative());
  for (const auto& x : source_basis) {
    std::size_t var = GluingMap::npos;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j].is_exact_zero()) continue;
      if (var != GluingMap::npos)
        throw std::domain_error("generator image mixes basis directions; substitution would need reordering");
      var = j;
    }
    m.var.push_back(var);
    m.images.push_back(dirac(target, x, n) - one);
  }
  return m;
}

inline GluingMap gluing_map(const SL2Chart& source, const SL2Chart& target, long n) {
  std::vector<Coords> xs;
  for (const auto& h : source.basis()) xs.push_back(target.coords(h));
  return gluing_map(target, xs, source.weights(), n);
}

namespace detail {

/// Coefficients of a series that involves only variable j, as a polynomial in b_j up to n.
inline std::vector<Padic> univariate(const DistSeries& s, std::size_t j, long n) {
  std::vector<Padic> out;
  for (long k = 0; k <= n; ++k) {
    MultiIndex a(s.dim(), 0);
    if (j != GluingMap::npos) a[j] = k;
    out.push_back(j == GluingMap::npos && k > 0 ? Padic::exact_zero(s.p, s.coeffs[0].cap()) : s.coeff(a));
  }
  return out;
}

inline std::vector<Padic> mul_trunc(const std::vector<Padic>& x, const std::vector<Padic>& y) {
  std::vector<Padic> z(x.size(), Padic::exact_zero(x[0].prime(), x[0].cap()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_exact_zero()) continue;
    for (std::size_t j = 0; i + j < x.size(); ++j) z[i + j] += x[i] * y[j];
  }
  return z;
}

}  // namespace detail

/// sigma(delta) = sum_alpha d_alpha prod_i sigma(b'_i)^(alpha_i).  Each sigma(b'_i)
/// lives in one variable and the variables increase with i, so the ordered product
/// is a product of univariate series.  sigma(b'_i) has no constant term, so degree
/// <= N in the image only sees degree <= N in delta and the retained part is exact;
/// the tail uses |alpha| <= |beta| and integrality of the generator images.
inline DistSeries gluing_apply(const GluingMap& m, const DistSeries& d) {
  if (d.dim() != m.images.size()) throw std::invalid_argument("series is not over the source basis");
  std::size_t last = 0;
  bool any = false;
  for (auto v : m.var) {
    if (v == GluingMap::npos) continue;
    if (any && v <= last) throw std::domain_error("substitution does not keep the variable order");
    last = v;
    any = true;
  }
  const long n = std::min(d.order(), m.order);
  const PadicContext ctx(d.p, d.coeffs.empty() ? 1 : d.coeffs[0].cap());
  const std::size_t dt = m.target_weights.size();
  DistSeries out = zero_series(ctx, m.target_weights, n, m.images.empty() || m.images[0].commutative);

  // powers[i][k] = sigma(b'_i)^k as a univariate polynomial in its variable
  std::vector<std::vector<std::vector<Padic>>> powers(m.images.size());
  for (std::size_t i = 0; i < m.images.size(); ++i) {
    auto base = detail::univariate(m.images[i], m.var[i], n);
    std::vector<Padic> acc(static_cast<std::size_t>(n) + 1, ctx.zero());
    acc[0] = ctx.one();
    powers[i].push_back(acc);
    for (long k = 1; k <= n; ++k) powers[i].push_back(detail::mul_trunc(powers[i].back(), base));
  }
  for (std::size_t a = 0; a < d.index.size(); ++a) {
    const MultiIndex& alpha = d.index[a];
    if (degree(alpha) > n || d.coeffs[a].is_exact_zero()) continue;
    for (std::size_t b = 0; b < out.index.size(); ++b) {
      const MultiIndex& beta = out.index[b];
      Padic c = d.coeffs[a];
      for (std::size_t k = 0; k < dt && !c.is_exact_zero(); ++k) {
        // target variable k is fed by at most one source index
        std::size_t src = GluingMap::npos;
        for (std::size_t i = 0; i < m.var.size(); ++i)
          if (m.var[i] == k && alpha[i] > 0) src = i;
        if (src == GluingMap::npos) {
          if (beta[k] != 0) c = ctx.zero();
          continue;
        }
        c = c * powers[src][static_cast<std::size_t>(alpha[src])][static_cast<std::size_t>(beta[k])];
      }
      for (std::size_t i = 0; i < m.var.size() && !c.is_exact_zero(); ++i)
        if (m.var[i] == GluingMap::npos && alpha[i] > 0) c = ctx.zero();
      out.coeffs[b] += c;
    }
  }
  if (d.tail.exact() && d.top_degree() <= 0) return out;
  Rational slope = d.tail.exact() ? Rational(0) : std::min(d.tail.slope, Rational(0));
  auto off = detail::envelope(d, slope);
  if (off) out.tail = TailBound::affine(*off, slope);
  return out;
}

/// sigma_outer o sigma_inner on generators.
inline GluingMap compose(const GluingMap& outer, const GluingMap& inner) {
  GluingMap m;
  m.order = std::min(outer.order, inner.order);
  m.source_weights = inner.source_weights;
  m.target_weights = outer.target_weights;
  for (std::size_t i = 0; i < inner.images.size(); ++i) {
    m.images.push_back(gluing_apply(outer, inner.images[i]));
    m.var.push_back(inner.var[i] == GluingMap::npos ? GluingMap::npos : outer.var[inner.var[i]]);
  }
  return m;
}

/// Generator images agree at the common truncation and precision.
inline bool same_images(const GluingMap& a, const GluingMap& b) {
  if (a.images.size() != b.images.size()) return false;
  for (std::size_t i = 0; i < a.images.size(); ++i) {
    const DistSeries &x = a.images[i], &y = b.images[i];
    const long n = std::min(x.order(), y.order());
    for (std::size_t k = 0; k < x.index.size(); ++k) {
      if (degree(x.index[k]) > n) continue;
      if (!(x.coeffs[k] == y.coeff(x.index[k]))) return false;
    }
  }
  return true;
}

/// ||sigma(b'_i)||_r <= ||b'_i||_r = r^(w'_i) for every generator, certified.
inline CheckReport norm_decreasing_check(const GluingMap& m, const Rational& rho, const std::string& name) {
  CheckReport rep(name);
  for (std::size_t i = 0; i < m.images.size(); ++i) {
    ++rep.checked;
    RNorm nm = norm_r(m.images[i], rho);
    Rational limit = -rho * m.source_weights[i];
    if (nm.unbounded) {
      rep.fail("generator " + std::to_string(i) + ": tail bound does not decay");
    } else if (auto u = nm.upper(); u && *u > limit) {
      rep.fail("generator " + std::to_string(i) + ": norm " + nm.to_string() + " > p^" + to_string(limit));
    }
  }
  return rep;
}

/// r_m = p^(-1/p^m).  For r = p^-rho the largest m with r_m <= r brackets
/// H_(r) = H cap U_r(h) for H = U_F^(e):  P_(m+1)(H) = U_F^(e+m) <= H_(r) <= H.
struct HrBracket {
  long m = 0;
  long inner_level = 0;  // e + m
  long outer_level = 0;  // e

  nlohmann::json to_json() const {
    return {{"m", m}, {"inner", "U^(" + std::to_string(inner_level) + ")"}, {"outer", "U^(" + std::to_string(outer_level) + ")"}};
  }
};

inline HrBracket hr_bracket(int p, const Rational& rho, long e) {
  if (rho <= Rational(0) || rho > Rational(1)) throw std::invalid_argument("r must be p^-rho with 0 < rho <= 1");
  long m = 0;
  BigInt pm = p;
  // r_(m+1) <= r  iff  p^(m+1) rho <= 1
  while (BigRational(pm) * to_big(rho) <= 1) {
    ++m;
    pm *= p;
  }
  return {m, e + m, e};
}

inline nlohmann::json to_json(const DistSeries& s) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (std::size_t i = 0; i < s.index.size(); ++i) {
    if (s.coeffs[i].is_exact_zero()) continue;
    coeffs.push_back({{"alpha", s.index[i]}, {"d", s.coeffs[i].to_string()}});
  }
  nlohmann::json w = nlohmann::json::array();
  for (const auto& x : s.weights) w.push_back(to_string(x));
  return {{"p", s.p}, {"dim", s.dim()}, {"order", s.order()}, {"weights", w}, {"tail", s.tail.to_string()},
          {"commutative", s.commutative}, {"coeffs", coeffs}};
}

}  // namespace bts
