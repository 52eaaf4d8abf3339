#pragma once

// Payment-monotonicity verification for deterministic pricing functions:
// the exact z-system characterization, its Motzkin-alternative certificate
// dual, the simpler sufficient/necessary conditions, and grid-based
// refutation oracles for payment and allocation monotonicity of menus.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "eval.hpp"
#include "json_io.hpp"
#include "lp.hpp"
#include "model.hpp"
#include "rational.hpp"

namespace mechlab {

// A valuation pair x <= y whose payments strictly decrease, together with
// the generating pair (a, b) of bundles and the marginal values z on a\b.
struct MonotoneWitness {
  Mask a = 0, b = 0;
  std::vector<std::pair<int, Rat>> z;  // (1-based good, value), goods of a\b
  Valuation x, y;
  Rat pay_x, pay_y;
};

// Motzkin multipliers proving the z-system of a pair (a, b) infeasible.
struct PairCertificate {
  Mask a = 0, b = 0;
  std::vector<std::pair<Mask, Rat>> lambda;  // over nonempty C subseteq a\b
  std::vector<std::pair<Mask, Rat>> mu;      // over C with finite p(b|C)
};

struct MonotonicityVerdict {
  bool monotonic = true;
  std::optional<MonotoneWitness> witness;     // set iff !monotonic
  std::vector<PairCertificate> certificates;  // one per scanned pair iff monotonic
};

enum class MonotoneScope { MenuRange, AllSubsets };

namespace detail {

inline std::vector<int> mask_goods(Mask m, int k) {
  std::vector<int> out;
  for (int i = 0; i < k; ++i)
    if (m & (Mask(1) << i)) out.push_back(i);
  return out;
}

// Finite-priced candidate sets.  MenuRange drops sets shadowed by an
// equally priced proper superset (never chosen under index-consistent
// tie-breaking); the verdict is scope-independent, the scan just shrinks.
inline std::vector<Mask> monotone_scope_sets(const DetPricing& p, MonotoneScope scope) {
  const Mask nb = Mask(1) << p.k;
  std::vector<Mask> sets;
  for (Mask a = 0; a < nb; ++a) {
    if (p.at(a).is_inf()) continue;
    if (scope == MonotoneScope::MenuRange) {
      bool shadowed = false;
      for (Mask s = a + 1; s < nb && !shadowed; ++s)
        if (subset_of(a, s) && s != a && p.at(s) == p.at(a)) shadowed = true;
      if (shadowed) continue;
    }
    sets.push_back(a);
  }
  return sets;
}

struct PairSystem {
  std::vector<int> goods;                      // goods of a\b (0-based, ascending)
  std::vector<std::pair<Mask, Rat>> v;         // all nonempty C subseteq a\b
  std::vector<std::pair<Mask, Rat>> w_finite;  // C with finite p(b|C)
};

// v(C) = p(a) - p(a\C)  (finite: subsets of a finite-priced set stay finite
// under a nondecreasing pricing); w(C) = p(b|C) - p(b), kept only if finite.
inline PairSystem pair_system(const DetPricing& p, Mask a, Mask b) {
  PairSystem sys;
  const Mask diff = a & ~b;
  sys.goods = mask_goods(diff, p.k);
  for (Mask c = 1; c <= diff; ++c) {  // nonempty subsets of diff, ascending
    if ((c & diff) != c) continue;
    sys.v.emplace_back(c, p.at(a).finite() - p.at(a & ~c).finite());
    if (!p.at(b | c).is_inf()) sys.w_finite.emplace_back(c, p.at(b | c).finite() - p.at(b).finite());
  }
  return sys;
}

}  // namespace detail

// Motzkin multipliers for the pair (a, b): lambda, mu >= 0, both nonzero,
// with sum lambda_C 1_C = sum mu_C 1_C and sum lambda v >= sum mu w.
// Exists iff the z-system of the pair is infeasible.
inline std::optional<PairCertificate> motzkin_certificate(const DetPricing& p, Mask a, Mask b) {
  validate_det_pricing(p);
  if (!det_pricing_nondecreasing(p)) throw InputError("motzkin_certificate: pricing must be nondecreasing");
  if (p.at(a).is_inf() || p.at(b).is_inf() || !(p.at(a) > p.at(b)))
    throw InputError("motzkin_certificate: needs finite prices with p(a) > p(b)");
  if (subset_of(a, b) || subset_of(b, a))
    throw InputError("motzkin_certificate: needs an incomparable pair");
  const detail::PairSystem sys = detail::pair_system(p, a, b);
  const std::size_t nl = sys.v.size(), nm = sys.w_finite.size();
  lp::LpProblem prob;
  prob.maximize = true;
  prob.objective.assign(nl + nm, Rat(0));
  prob.bounds.assign(nl + nm, lp::nonneg_var());
  for (int good : sys.goods) {
    lp::LinearConstraint c;
    c.coeffs.assign(nl + nm, Rat(0));
    for (std::size_t j = 0; j < nl; ++j)
      if (sys.v[j].first & (Mask(1) << good)) c.coeffs[j] = 1;
    for (std::size_t j = 0; j < nm; ++j)
      if (sys.w_finite[j].first & (Mask(1) << good)) c.coeffs[nl + j] = -1;
    c.rel = lp::Rel::Eq;
    c.rhs = 0;
    prob.constraints.push_back(std::move(c));
  }
  {
    lp::LinearConstraint c;  // sum lambda v - sum mu w >= 0
    c.coeffs.assign(nl + nm, Rat(0));
    for (std::size_t j = 0; j < nl; ++j) c.coeffs[j] = sys.v[j].second;
    for (std::size_t j = 0; j < nm; ++j) c.coeffs[nl + j] = -sys.w_finite[j].second;
    c.rel = lp::Rel::Ge;
    c.rhs = 0;
    prob.constraints.push_back(std::move(c));
  }
  {
    lp::LinearConstraint c;  // normalization; forces lambda != 0 and mu != 0
    c.coeffs.assign(nl + nm, Rat(1));
    c.rel = lp::Rel::Eq;
    c.rhs = 1;
    prob.constraints.push_back(std::move(c));
  }
  const lp::LpOutcome out = lp::solve(prob);
  if (std::holds_alternative<lp::LpInfeasible>(out)) return std::nullopt;
  const lp::LpOptimal& opt = std::get<lp::LpOptimal>(out);
  PairCertificate cert;
  cert.a = a;
  cert.b = b;
  for (std::size_t j = 0; j < nl; ++j)
    if (opt.point[j] != 0) cert.lambda.emplace_back(sys.v[j].first, opt.point[j]);
  for (std::size_t j = 0; j < nm; ++j)
    if (opt.point[nl + j] != 0) cert.mu.emplace_back(sys.w_finite[j].first, opt.point[nl + j]);
  return cert;
}

// Exact payment-monotonicity check for a nondecreasing deterministic
// pricing: for every in-scope incomparable pair with p(a) > p(b), either
// the z-system is infeasible (certificate recorded) or a feasible z yields
// a replayed witness pair x <= y with s(x) > s(y).
inline MonotonicityVerdict check_det_monotonic(const DetPricing& p,
                                               MonotoneScope scope = MonotoneScope::MenuRange) {
  validate_det_pricing(p);
  if (p.k > 10) throw CapError("check_det_monotonic: k > 10");
  if (!det_pricing_nondecreasing(p)) throw InputError("check_det_monotonic: pricing must be nondecreasing");
  const std::vector<Mask> sets = detail::monotone_scope_sets(p, scope);
  Rat max_price(0);
  for (const ExtPrice& e : p.prices)
    if (!e.is_inf() && e.finite() > max_price) max_price = e.finite();
  const Menu menu = menu_from_det_pricing(p);

  MonotonicityVerdict verdict;
  for (Mask a : sets)
    for (Mask b : sets) {
      if (subset_of(a, b) || subset_of(b, a)) continue;  // covers a == b
      if (!(p.at(a) > p.at(b))) continue;
      // Fast path: restricted submodularity at the pair certifies it.
      const ExtPrice join = p.at(a | b);
      if (!join.is_inf() && p.at(a).finite() + p.at(b).finite() >=
                                join.finite() + p.at(a & b).finite()) {
        PairCertificate cert;
        cert.a = a;
        cert.b = b;
        cert.lambda.emplace_back(a & ~b, Rat(1, 2));
        cert.mu.emplace_back(a & ~b, Rat(1, 2));
        verdict.certificates.push_back(std::move(cert));
        continue;
      }
      const detail::PairSystem sys = detail::pair_system(p, a, b);
      const std::size_t nz = sys.goods.size();
      const auto var_of = [&](int good) {
        return std::size_t(std::lower_bound(sys.goods.begin(), sys.goods.end(), good) -
                           sys.goods.begin());
      };
      std::vector<lp::HalfSpace> weak, strict;
      for (const auto& [c, v] : sys.v) {  // z(C) >= v  ->  -z(C) <= -v
        lp::HalfSpace h;
        h.coeffs.assign(nz, Rat(0));
        for (int good : detail::mask_goods(c, p.k)) h.coeffs[var_of(good)] = -1;
        h.rhs = -v;
        weak.push_back(std::move(h));
      }
      for (const auto& [c, w] : sys.w_finite) {  // z(C) < w
        lp::HalfSpace h;
        h.coeffs.assign(nz, Rat(0));
        for (int good : detail::mask_goods(c, p.k)) h.coeffs[var_of(good)] = 1;
        h.rhs = w;
        strict.push_back(std::move(h));
      }
      if (const auto z = lp::strict_feasible(nz, weak, strict)) {
        MonotoneWitness w;
        w.a = a;
        w.b = b;
        Rat zsum(0);
        for (std::size_t j = 0; j < nz; ++j) zsum += abs((*z)[j]);
        const Rat big = 1 + max_price + zsum;
        Valuation x, y;
        x.coords.assign(p.k, Rat(0));
        y.coords.assign(p.k, Rat(0));
        for (std::size_t j = 0; j < nz; ++j) {
          w.z.emplace_back(sys.goods[j] + 1, (*z)[j]);
          x.coords[sys.goods[j]] = (*z)[j];
          y.coords[sys.goods[j]] = (*z)[j];
        }
        for (int good : detail::mask_goods(a & b, p.k)) x.coords[good] = y.coords[good] = big;
        for (int good : detail::mask_goods(b & ~a, p.k)) y.coords[good] = big;
        const ChoiceResult cx = buyer_choice(menu, x, TieRule::IndexConsistent);
        const ChoiceResult cy = buyer_choice(menu, y, TieRule::IndexConsistent);
        w.x = std::move(x);
        w.y = std::move(y);
        w.pay_x = menu.entries[cx.chosen].price;
        w.pay_y = menu.entries[cy.chosen].price;
        if (!dominated_by(w.x, w.y) || !(w.pay_x > w.pay_y))
          throw std::logic_error("check_det_monotonic: witness construction must replay");
        verdict.monotonic = false;
        verdict.witness = std::move(w);
        verdict.certificates.clear();
        return verdict;
      }
      auto cert = motzkin_certificate(p, a, b);
      if (!cert)
        throw std::logic_error("check_det_monotonic: infeasible z-system must have a certificate");
      verdict.certificates.push_back(std::move(*cert));
    }
  return verdict;
}

// Sufficient condition: submodularity restricted to pairs with unequal
// prices.  Returns the first violating pair (lex by masks) or nullopt.
inline std::optional<std::pair<Mask, Mask>> check_sufficient_restricted_submod(const DetPricing& p) {
  validate_det_pricing(p);
  const Mask nb = Mask(1) << p.k;
  for (Mask a = 0; a < nb; ++a)
    for (Mask b = a + 1; b < nb; ++b) {
      if (p.at(a) == p.at(b)) continue;
      if (!(p.at(a) + p.at(b) >= p.at(a | b) + p.at(a & b))) return std::make_pair(a, b);
    }
  return std::nullopt;
}

// Necessary condition: decreasing marginal prices.  Scans pairwise disjoint
// (A, {i}, J) with p(A|i) > p(A|J); returns the first counter-triple.
inline std::optional<std::tuple<Mask, int, Mask>> check_necessary(const DetPricing& p) {
  validate_det_pricing(p);
  const Mask nb = Mask(1) << p.k;
  for (Mask a = 0; a < nb; ++a)
    for (int i = 0; i < p.k; ++i) {
      if (a & (Mask(1) << i)) continue;
      const Mask rest = Mask(nb - 1) & ~a & ~(Mask(1) << i);
      for (Mask j = 1; j <= rest; ++j) {
        if ((j & rest) != j) continue;
        const Mask ai = a | (Mask(1) << i), aj = a | j;
        if (!(p.at(ai) > p.at(aj))) continue;
        if (!(p.at(ai) + p.at(aj) >= p.at(aj | (Mask(1) << i)) + p.at(a)))
          return std::make_tuple(a, i, j);
      }
    }
  return std::nullopt;
}

enum class GridCheck { Payment, Allocation };

// Refutation oracle: evaluates the menu on every dominance pair of the
// grid; a violation refutes the property, Ok proves nothing off the grid.
inline std::optional<std::pair<Valuation, Valuation>> grid_oracle(const Menu& menu, TieRule rule,
                                                                  const std::vector<Valuation>& grid,
                                                                  GridCheck check) {
  validate_menu(menu);
  std::vector<std::size_t> chosen(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) chosen[i] = buyer_choice(menu, grid[i], rule).chosen;
  for (const auto& [i, j] : dominance_pairs(grid)) {
    const MenuEntry& ei = menu.entries[chosen[i]];
    const MenuEntry& ej = menu.entries[chosen[j]];
    const bool ok = check == GridCheck::Payment ? ei.price <= ej.price
                                                : allocation_leq(ei.alloc, ej.alloc);
    if (!ok) return std::make_pair(grid[i], grid[j]);
  }
  return std::nullopt;
}

// Product grid over per-coordinate value lists, lexicographic order.
inline std::vector<Valuation> product_grid(int k, const std::vector<Rat>& values) {
  if (k < 1 || k > 10) throw InputError("product_grid: k out of range");
  std::vector<Valuation> out;
  Valuation cur;
  cur.coords.assign(k, Rat(0));
  const auto rec = [&](auto&& self, int pos) -> void {
    if (pos == k) {
      out.push_back(cur);
      return;
    }
    for (const Rat& v : values) {
      cur.coords[pos] = v;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);
  return out;
}

// Product grid with per-coordinate value lists.
inline std::vector<Valuation> product_grid(const std::vector<std::vector<Rat>>& per_coord) {
  const int k = static_cast<int>(per_coord.size());
  if (k < 1 || k > 10) throw InputError("product_grid: k out of range");
  std::vector<Valuation> out;
  Valuation cur;
  cur.coords.assign(k, Rat(0));
  const auto rec = [&](auto&& self, int pos) -> void {
    if (pos == k) {
      out.push_back(cur);
      return;
    }
    for (const Rat& v : per_coord[pos]) {
      cur.coords[pos] = v;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);
  return out;
}

inline std::vector<Rat> step_values(const Rat& step, const Rat& top) {
  std::vector<Rat> values;
  for (Rat v(0); v <= top; v += step) values.push_back(v);
  return values;
}

// Structured search for an allocation-monotonicity violation of a menu:
// scans the product grid over {0} ∪ D per coordinate, where D collects all
// pairwise differences of menu prices plus a dominating constant M — the
// join closure of the proof's c·1_S probe points.  On this grid, if any
// dominance pair violates q(x) <= q(y), then some pair differing in a
// single coordinate does (walk the chain from x to y one coordinate raise
// at a time: allocations cannot be nondecreasing across every step and
// decrease overall), so only single-raise pairs are scanned.
inline std::optional<std::pair<Valuation, Valuation>> search_allocation_violation(
    const Menu& menu, TieRule rule = TieRule::TieFavorable) {
  validate_menu(menu);
  if (menu.k > 10) throw CapError("search_allocation_violation: k > 10");
  Rat max_price(0);
  std::vector<Rat> diffs;
  for (const MenuEntry& e : menu.entries) {
    if (e.price > max_price) max_price = e.price;
    for (const MenuEntry& f : menu.entries) {
      const Rat d = e.price - f.price;
      if (d > 0) diffs.push_back(d);
    }
  }
  diffs.push_back(max_price + 1);
  std::sort(diffs.begin(), diffs.end());
  diffs.erase(std::unique(diffs.begin(), diffs.end()), diffs.end());
  std::vector<Rat> values = diffs;
  values.insert(values.begin(), Rat(0));

  std::map<std::vector<Rat>, Allocation> memo;
  const auto alloc_at = [&](const Valuation& x) -> const Allocation& {
    auto it = memo.find(x.coords);
    if (it == memo.end())
      it = memo.emplace(x.coords, menu.entries[buyer_choice(menu, x, rule).chosen].alloc).first;
    return it->second;
  };
  std::optional<std::pair<Valuation, Valuation>> found;
  Valuation cur;
  cur.coords.assign(menu.k, Rat(0));
  const auto rec = [&](auto&& self, int pos) -> void {
    if (found) return;
    if (pos == menu.k) {
      const Allocation& qx = alloc_at(cur);
      for (int i = 0; i < menu.k && !found; ++i)
        for (const Rat& d : diffs) {
          if (!(d > cur.coords[i])) continue;
          Valuation raised = cur;
          raised.coords[i] = d;
          if (!allocation_leq(qx, alloc_at(raised))) {
            found = std::make_pair(cur, raised);
            break;
          }
        }
      return;
    }
    for (const Rat& v : values) {
      cur.coords[pos] = v;
      self(self, pos + 1);
      if (found) return;
    }
  };
  rec(rec, 0);
  return found;
}

// ----- JSON views -----

inline Json monotonicity_verdict_to_json(const MonotonicityVerdict& verdict) {
  Json j;
  if (verdict.monotonic) {
    j["status"] = "monotonic";
    Json certs = Json::array();
    for (const PairCertificate& c : verdict.certificates) {
      Json jc;
      jc["pair"] = Json::array({c.a, c.b});
      Json jl = Json::object(), jm = Json::object();
      for (const auto& [m, r] : c.lambda) jl[std::to_string(m)] = rat_to_json(r);
      for (const auto& [m, r] : c.mu) jm[std::to_string(m)] = rat_to_json(r);
      jc["lambda"] = std::move(jl);
      jc["mu"] = std::move(jm);
      certs.push_back(std::move(jc));
    }
    j["certificates"] = std::move(certs);
  } else {
    const MonotoneWitness& w = *verdict.witness;
    j["status"] = "not-monotonic";
    j["pair"] = Json::array({w.a, w.b});
    Json jz = Json::object();
    for (const auto& [good, value] : w.z) jz[std::to_string(good)] = rat_to_json(value);
    j["z"] = std::move(jz);
    j["x"] = rat_vector_to_json(w.x.coords);
    j["y"] = rat_vector_to_json(w.y.coords);
    j["pay_x"] = rat_to_json(w.pay_x);
    j["pay_y"] = rat_to_json(w.pay_y);
  }
  return j;
}

}  // namespace mechlab
