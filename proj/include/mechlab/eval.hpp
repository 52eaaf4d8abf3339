#pragma once

// Buyer-side evaluation of a menu: which entry a valuation picks under a
// given tie-breaking rule, expected revenue, incentive checks, and the
// canonical (lowest consistent) price of a bundle.

#include <algorithm>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lp.hpp"
#include "model.hpp"
#include "rational.hpp"

namespace mechlab {

// All rules select within the payoff-maximizing entries:
//  SellerFavorable  — max payment, then lexicographically-largest allocation;
//  BuyerFavorable   — a coordinatewise-maximal allocation (lex-largest such);
//  TieFavorable     — max payment first, then as BuyerFavorable;
//  IndexConsistent  — deterministic menus only: max payment, then largest
//                     sum of 1-based good indices, then largest bitmask
//                     (a fixed total order, hence tie-consistent).
enum class TieRule { SellerFavorable, BuyerFavorable, TieFavorable, IndexConsistent };

struct ChoiceResult {
  std::size_t chosen;              // index into menu.entries
  Rat payoff;                      // buyer payoff b(x), always >= 0
  std::vector<std::size_t> ties;   // all payoff-maximizing entries, ascending
};

namespace detail {

inline bool lex_less(const Allocation& a, const Allocation& b) { return a.coords < b.coords; }

inline std::size_t pick_buyer_favorable(const Menu& menu, const std::vector<std::size_t>& pool) {
  std::size_t best = pool.front();
  bool have = false;
  for (std::size_t j : pool) {
    bool maximal = true;
    for (std::size_t i : pool)
      if (i != j && allocation_leq(menu.entries[j].alloc, menu.entries[i].alloc) &&
          !(menu.entries[i].alloc == menu.entries[j].alloc))
        maximal = false;
    if (!maximal) continue;
    if (!have || lex_less(menu.entries[best].alloc, menu.entries[j].alloc)) {
      best = j;
      have = true;
    }
  }
  return best;
}

}  // namespace detail

inline ChoiceResult buyer_choice(const Menu& menu, const Valuation& x, TieRule rule) {
  if (x.k() != menu.k) throw InputError("buyer_choice: valuation arity mismatch");
  ChoiceResult res;
  std::vector<Rat> payoff(menu.entries.size());
  for (std::size_t j = 0; j < menu.entries.size(); ++j)
    payoff[j] = dot(menu.entries[j].alloc, x) - menu.entries[j].price;
  Rat best = payoff[0];
  for (const Rat& p : payoff) best = std::max(best, p);
  for (std::size_t j = 0; j < payoff.size(); ++j)
    if (payoff[j] == best) res.ties.push_back(j);
  res.payoff = best;

  std::vector<std::size_t> pool = res.ties;
  const auto keep_max_price = [&]() {
    Rat top = menu.entries[pool.front()].price;
    for (std::size_t j : pool) top = std::max(top, menu.entries[j].price);
    std::vector<std::size_t> out;
    for (std::size_t j : pool)
      if (menu.entries[j].price == top) out.push_back(j);
    pool = std::move(out);
  };
  switch (rule) {
    case TieRule::SellerFavorable: {
      keep_max_price();
      std::size_t pick = pool.front();
      for (std::size_t j : pool)
        if (detail::lex_less(menu.entries[pick].alloc, menu.entries[j].alloc)) pick = j;
      res.chosen = pick;
      break;
    }
    case TieRule::BuyerFavorable:
      res.chosen = detail::pick_buyer_favorable(menu, pool);
      break;
    case TieRule::TieFavorable:
      keep_max_price();
      res.chosen = detail::pick_buyer_favorable(menu, pool);
      break;
    case TieRule::IndexConsistent: {
      if (!menu_is_deterministic(menu))
        throw InputError("buyer_choice: IndexConsistent needs a deterministic menu");
      keep_max_price();
      const auto key = [&](std::size_t j) {
        const Mask m = menu.entries[j].alloc.mask();
        long isum = 0;
        for (int i = 0; i < menu.k; ++i)
          if (m & (Mask(1) << i)) isum += i + 1;
        return std::pair<long, Mask>(isum, m);
      };
      std::size_t pick = pool.front();
      for (std::size_t j : pool)
        if (key(pick) < key(j)) pick = j;
      res.chosen = pick;
      break;
    }
  }
  return res;
}

// Expected payment of the buyer-choice mechanism on a finitely supported
// valuation distribution.  Zero-probability atoms contribute nothing.
inline Rat revenue(const Menu& menu, const ValuationDist& dist, TieRule rule) {
  if (dist.k != menu.k) throw InputError("revenue: arity mismatch");
  Rat total(0);
  for (const Atom& a : dist.atoms) {
    if (a.prob == 0) continue;
    total += a.prob * menu.entries[buyer_choice(menu, a.x, rule).chosen].price;
  }
  return total;
}

// Direct assignment of an outcome to each atom (in atom order).
struct AssignedOutcome {
  Allocation alloc;
  Rat payment;
};

struct IcViolation {
  std::size_t atom;                   // the deviating atom
  std::optional<std::size_t> target;  // preferred atom's outcome; nullopt = IR/NPT
  Rat slack;                          // by how much the constraint fails (> 0)
  std::string kind;                   // "ic" | "ir" | "npt"
};

// Checks every ordered atom pair for incentive compatibility and each atom
// for individual rationality / no-positive-transfers.  Returns the most
// violated constraint, or nullopt when the assignment is implementable.
inline std::optional<IcViolation> verify_ic_ir(const std::vector<AssignedOutcome>& outcomes,
                                               const ValuationDist& dist) {
  if (outcomes.size() != dist.atoms.size())
    throw InputError("verify_ic_ir: one outcome per atom required");
  std::optional<IcViolation> worst;
  const auto consider = [&](IcViolation v) {
    if (!worst || v.slack > worst->slack) worst = std::move(v);
  };
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const Rat own = dot(outcomes[i].alloc, dist.atoms[i].x) - outcomes[i].payment;
    if (own < 0) consider(IcViolation{i, std::nullopt, -own, "ir"});
    if (outcomes[i].payment < 0) consider(IcViolation{i, std::nullopt, -outcomes[i].payment, "npt"});
    for (std::size_t j = 0; j < outcomes.size(); ++j) {
      if (i == j) continue;
      const Rat other = dot(outcomes[j].alloc, dist.atoms[i].x) - outcomes[j].payment;
      if (other > own) consider(IcViolation{i, j, other - own, "ic"});
    }
  }
  return worst;
}

// Canonical deterministic bundle prices: the cheapest menu bundle covering
// each A (infinite when nothing covers A).  Total and nondecreasing; agrees
// with the menu's own prices on undominated entries.
inline DetPricing canonical_det_price(const Menu& menu) {
  if (!menu_is_deterministic(menu))
    throw InputError("canonical_det_price: menu has fractional allocations");
  if (menu.k > 20) throw InputError("canonical_det_price: k too large");
  DetPricing p;
  p.k = menu.k;
  p.prices.assign(std::size_t(1) << menu.k, ExtPrice::infinity());
  for (Mask a = 0; a < p.prices.size(); ++a) {
    for (const MenuEntry& e : menu.entries) {
      if (!subset_of(a, e.alloc.mask())) continue;
      const ExtPrice cand(e.price);
      if (cand < p.prices[a]) p.prices[a] = cand;
    }
  }
  validate_det_pricing(p);
  return p;
}

// Canonical price of an arbitrary lottery g, computed twice:
//   (a) as the buyer-side gap  sup_x { g·x - b(x) }  via an LP, and
//   (b) as the cheapest dominating convex combination of menu entries.
// The two routes are exact LP duals and must agree; disagreement is an
// internal error, never a tolerance.
inline ExtPrice canonical_general_price(const Menu& menu, const Allocation& g) {
  if (g.k() != menu.k) throw InputError("canonical_general_price: arity mismatch");
  for (const Rat& c : g.coords)
    if (c < 0 || c > 1) throw InputError("canonical_general_price: g outside [0,1]^k");

  const std::size_t k = static_cast<std::size_t>(menu.k);
  const std::size_t ne = menu.entries.size();

  // (a) variables x in R_+^k and t >= 0 (= b(x)); maximize g·x - t
  //     subject to t >= q_j·x - s_j for every entry.
  lp::LpProblem gap;
  gap.maximize = true;
  gap.objective.assign(k + 1, Rat(0));
  for (std::size_t i = 0; i < k; ++i) gap.objective[i] = g.coords[i];
  gap.objective[k] = -1;
  gap.bounds.assign(k + 1, lp::nonneg_var());
  for (const MenuEntry& e : menu.entries) {
    lp::LinearConstraint c;
    c.coeffs.assign(k + 1, Rat(0));
    for (std::size_t i = 0; i < k; ++i) c.coeffs[i] = e.alloc.coords[i];
    c.coeffs[k] = -1;
    c.rel = lp::Rel::Le;
    c.rhs = e.price;
    gap.constraints.push_back(std::move(c));
  }
  const lp::LpOutcome gap_out = lp::solve(gap);
  if (std::holds_alternative<lp::LpInfeasible>(gap_out))
    throw std::logic_error("canonical_general_price: gap LP cannot be infeasible");

  // (b) lambda >= 0, sum lambda = 1, sum lambda_j q_j >= g; minimize sum lambda_j s_j.
  lp::LpProblem mix;
  mix.maximize = false;
  mix.objective.resize(ne);
  for (std::size_t j = 0; j < ne; ++j) mix.objective[j] = menu.entries[j].price;
  mix.bounds.assign(ne, lp::nonneg_var());
  for (std::size_t i = 0; i < k; ++i) {
    lp::LinearConstraint c;
    c.coeffs.resize(ne);
    for (std::size_t j = 0; j < ne; ++j) c.coeffs[j] = menu.entries[j].alloc.coords[i];
    c.rel = lp::Rel::Ge;
    c.rhs = g.coords[i];
    mix.constraints.push_back(std::move(c));
  }
  {
    lp::LinearConstraint c;
    c.coeffs.assign(ne, Rat(1));
    c.rel = lp::Rel::Eq;
    c.rhs = 1;
    mix.constraints.push_back(std::move(c));
  }
  const lp::LpOutcome mix_out = lp::solve(mix);
  if (std::holds_alternative<lp::LpUnbounded>(mix_out))
    throw std::logic_error("canonical_general_price: mix LP cannot be unbounded");

  const bool gap_inf = std::holds_alternative<lp::LpUnbounded>(gap_out);
  const bool mix_inf = std::holds_alternative<lp::LpInfeasible>(mix_out);
  if (gap_inf != mix_inf)
    throw std::logic_error("canonical_general_price: dual routes disagree on finiteness");
  if (gap_inf) return ExtPrice::infinity();
  const Rat a = std::get<lp::LpOptimal>(gap_out).value;
  const Rat b = std::get<lp::LpOptimal>(mix_out).value;
  if (a != b) throw std::logic_error("canonical_general_price: dual routes disagree");
  return ExtPrice(a);
}

// Menu of all finitely priced bundles of a total pricing.
inline Menu menu_from_det_pricing(const DetPricing& p) {
  std::vector<MenuEntry> entries;
  for (Mask m = 0; m < p.prices.size(); ++m)
    if (!p.prices[m].is_inf())
      entries.push_back(MenuEntry{indicator_allocation(p.k, m), p.prices[m].finite()});
  return make_menu(p.k, std::move(entries));
}

inline Menu menu_from_sym_pricing(const SymPricing& p) { return menu_from_det_pricing(det_from_sym(p)); }

}  // namespace mechlab
