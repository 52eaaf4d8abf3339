#pragma once

// Exact optimal-revenue functionals on finitely supported distributions:
// one-good posted price, separate / bundled / partition selling, the full
// incentive-compatible LP, its payment- and allocation-monotone
// relaxations, and brute-force-with-pruning deterministic mechanisms.
// Every result carries a witness mechanism that replays to the reported
// value exactly.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "eval.hpp"
#include "json_io.hpp"
#include "lattice.hpp"
#include "lp.hpp"
#include "model.hpp"
#include "rational.hpp"

namespace mechlab {

// ----- results and witnesses -----

struct PostedPrice {
  Rat price;  // one good
};
struct PerGoodPrices {
  std::vector<Rat> prices;  // separate selling (equal entries = shared price)
};
struct PartitionPrices {
  BundlingPartition part;
  std::vector<Rat> prices;  // one price per block
};
struct MenuWitness {
  Menu menu;
};
enum class MonotoneMode { None, Payment, Allocation };
// Outcome per point; points may extend the support (augmentation atoms).
struct AssignmentPlan {
  std::vector<Valuation> points;
  std::vector<AssignedOutcome> outcomes;
  MonotoneMode mode = MonotoneMode::None;
};
struct DetPlan {
  DetPricing pricing;
  std::vector<Mask> assignment;  // bundle per atom, in atom order
};
struct SymPlan {
  SymPricing pricing;
  std::vector<int> levels;  // bundle size per atom, in atom order
};

using RevenueWitness =
    std::variant<PostedPrice, PerGoodPrices, PartitionPrices, MenuWitness, AssignmentPlan, DetPlan, SymPlan>;

struct RevenueResult {
  Rat value;
  RevenueWitness witness;
};

// ----- posted-price functionals -----

// Optimal posted price for one good: max over support values t of
// t * P[X >= t]; the witness is the smallest optimal price.
inline RevenueResult myerson_rev(const ValuationDist& dist) {
  validate_dist(dist);
  if (dist.k != 1) throw InputError("myerson_rev: needs a one-good distribution");
  std::vector<Rat> support;
  for (const Atom& a : dist.atoms) support.push_back(a.x.coords[0]);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  Rat best(-1), best_t(0);
  for (const Rat& t : support) {
    Rat tail(0);
    for (const Atom& a : dist.atoms)
      if (a.x.coords[0] >= t) tail += a.prob;
    const Rat val = t * tail;
    if (val > best) {
      best = val;
      best_t = t;
    }
  }
  return RevenueResult{best, PostedPrice{best_t}};
}

inline RevenueResult srev(const ValuationDist& dist) {
  validate_dist(dist);
  Rat total(0);
  PerGoodPrices w;
  for (int i = 0; i < dist.k; ++i) {
    RevenueResult r = myerson_rev(marginal(dist, MarginalMode::PerGood, i));
    total += r.value;
    w.prices.push_back(std::get<PostedPrice>(r.witness).price);
  }
  return RevenueResult{total, std::move(w)};
}

inline RevenueResult brev(const ValuationDist& dist) {
  validate_dist(dist);
  RevenueResult r = myerson_rev(marginal(dist, MarginalMode::Sum));
  PartitionPrices w;
  w.part.k = dist.k;
  w.part.blocks = {(Mask(1) << dist.k) - 1};
  w.prices = {std::get<PostedPrice>(r.witness).price};
  return RevenueResult{r.value, std::move(w)};
}

// Separate selling restricted to one shared price across all goods.
inline RevenueResult symsrev(const ValuationDist& dist) {
  validate_dist(dist);
  std::vector<ValuationDist> margs;
  std::vector<Rat> support;
  for (int i = 0; i < dist.k; ++i) {
    margs.push_back(marginal(dist, MarginalMode::PerGood, i));
    for (const Atom& a : margs.back().atoms) support.push_back(a.x.coords[0]);
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  Rat best(-1), best_t(0);
  for (const Rat& t : support) {
    Rat val(0);
    for (const ValuationDist& m : margs) {
      Rat tail(0);
      for (const Atom& a : m.atoms)
        if (a.x.coords[0] >= t) tail += a.prob;
      val += t * tail;
    }
    if (val > best) {
      best = val;
      best_t = t;
    }
  }
  return RevenueResult{best, PerGoodPrices{std::vector<Rat>(dist.k, best_t)}};
}

inline RevenueResult partition_rev(const ValuationDist& dist, const BundlingPartition& part) {
  validate_dist(dist);
  if (part.k != dist.k) throw InputError("partition_rev: arity mismatch");
  validate_partition(part);
  Rat total(0);
  PartitionPrices w;
  w.part = part;
  for (Mask block : part.blocks) {
    RevenueResult r = myerson_rev(marginal_mask_sum(dist, block));
    total += r.value;
    w.prices.push_back(std::get<PostedPrice>(r.witness).price);
  }
  return RevenueResult{total, std::move(w)};
}

// All partitions of {1..k} into nonempty blocks (Bell(k) of them),
// deterministic order.
inline std::vector<BundlingPartition> all_partitions(int k) {
  if (k < 1 || k > 10) throw InputError("all_partitions: k out of range");
  std::vector<BundlingPartition> out;
  std::vector<Mask> blocks;
  const auto rec = [&](auto&& self, int good) -> void {
    if (good == k) {
      out.push_back(BundlingPartition{k, blocks});
      return;
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b] |= Mask(1) << good;
      self(self, good + 1);
      blocks[b] &= ~(Mask(1) << good);
    }
    blocks.push_back(Mask(1) << good);
    self(self, good + 1);
    blocks.pop_back();
  };
  rec(rec, 0);
  return out;
}

// ----- the incentive-compatible LP and its monotone relaxations -----

namespace detail {

// Shared LP: variables q(x) in [0,1]^k and b(x) >= 0 per atom; maximize
// sum f(x) (q(x)·x - b(x)) under IC for all ordered pairs, NPT, and the
// requested monotonicity constraints on dominance pairs.
inline std::pair<Rat, std::vector<AssignedOutcome>> solve_ic_lp(const ValuationDist& dist,
                                                                MonotoneMode mode) {
  const std::size_t n = dist.atoms.size();
  const std::size_t k = static_cast<std::size_t>(dist.k);
  const auto qvar = [&](std::size_t i, std::size_t c) { return i * k + c; };
  const auto bvar = [&](std::size_t i) { return n * k + i; };
  lp::LpProblem prob;
  prob.maximize = true;
  prob.objective.assign(n * k + n, Rat(0));
  prob.bounds.assign(n * k, lp::boxed_var(Rat(0), Rat(1)));
  prob.bounds.resize(n * k + n, lp::nonneg_var());
  for (std::size_t i = 0; i < n; ++i) {
    const Atom& a = dist.atoms[i];
    for (std::size_t c = 0; c < k; ++c) prob.objective[qvar(i, c)] = a.prob * a.x.coords[c];
    prob.objective[bvar(i)] = -a.prob;
  }
  // IC: b(x_i) >= b(x_j) + q(x_j)·(x_i - x_j)
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      lp::LinearConstraint c;
      c.coeffs.assign(n * k + n, Rat(0));
      c.coeffs[bvar(i)] = 1;
      c.coeffs[bvar(j)] = -1;
      for (std::size_t cc = 0; cc < k; ++cc)
        c.coeffs[qvar(j, cc)] = dist.atoms[j].x.coords[cc] - dist.atoms[i].x.coords[cc];
      c.rel = lp::Rel::Ge;
      c.rhs = 0;
      prob.constraints.push_back(std::move(c));
    }
  // NPT: q(x_i)·x_i - b(x_i) >= 0
  for (std::size_t i = 0; i < n; ++i) {
    lp::LinearConstraint c;
    c.coeffs.assign(n * k + n, Rat(0));
    for (std::size_t cc = 0; cc < k; ++cc) c.coeffs[qvar(i, cc)] = dist.atoms[i].x.coords[cc];
    c.coeffs[bvar(i)] = -1;
    c.rel = lp::Rel::Ge;
    c.rhs = 0;
    prob.constraints.push_back(std::move(c));
  }
  if (mode != MonotoneMode::None) {
    const auto pairs = dominance_pairs(atom_points(dist));
    for (const auto& [i, j] : pairs) {
      if (mode == MonotoneMode::Payment) {
        // s(x_i) <= s(x_j): q_i·x_i - b_i - q_j·x_j + b_j <= 0
        lp::LinearConstraint c;
        c.coeffs.assign(n * k + n, Rat(0));
        for (std::size_t cc = 0; cc < k; ++cc) {
          c.coeffs[qvar(i, cc)] += dist.atoms[i].x.coords[cc];
          c.coeffs[qvar(j, cc)] -= dist.atoms[j].x.coords[cc];
        }
        c.coeffs[bvar(i)] = -1;
        c.coeffs[bvar(j)] = 1;
        c.rel = lp::Rel::Le;
        c.rhs = 0;
        prob.constraints.push_back(std::move(c));
      } else {
        for (std::size_t cc = 0; cc < k; ++cc) {
          lp::LinearConstraint c;
          c.coeffs.assign(n * k + n, Rat(0));
          c.coeffs[qvar(i, cc)] = 1;
          c.coeffs[qvar(j, cc)] = -1;
          c.rel = lp::Rel::Le;
          c.rhs = 0;
          prob.constraints.push_back(std::move(c));
        }
      }
    }
  }
  const lp::LpOutcome out = lp::solve(prob);
  if (!std::holds_alternative<lp::LpOptimal>(out))
    throw std::logic_error("solve_ic_lp: the IC polytope is nonempty and bounded");
  const lp::LpOptimal& opt = std::get<lp::LpOptimal>(out);
  std::vector<AssignedOutcome> outcomes(n);
  for (std::size_t i = 0; i < n; ++i) {
    Allocation q;
    q.coords.resize(k);
    for (std::size_t c = 0; c < k; ++c) q.coords[c] = opt.point[qvar(i, c)];
    Rat s = dot(q, dist.atoms[i].x) - opt.point[bvar(i)];
    outcomes[i] = AssignedOutcome{std::move(q), std::move(s)};
  }
  return {opt.value, std::move(outcomes)};
}

}  // namespace detail

// Optimal mechanism revenue (finite support): the witness menu is the set
// of distinct optimal outcomes plus the opt-out entry.
inline RevenueResult lp_rev(const ValuationDist& dist) {
  validate_dist(dist);
  auto [value, outcomes] = detail::solve_ic_lp(dist, MonotoneMode::None);
  std::vector<MenuEntry> entries;
  for (const AssignedOutcome& o : outcomes) {
    bool dup = false;
    for (const MenuEntry& e : entries) {
      if (e.alloc == o.alloc) {
        if (e.price != o.payment)
          throw std::logic_error("lp_rev: equal allocations must earn equal payments under IC");
        dup = true;
      }
    }
    if (!dup) entries.push_back(MenuEntry{o.alloc, o.payment});
  }
  return RevenueResult{value, MenuWitness{make_menu(dist.k, std::move(entries))}};
}

namespace detail {

inline RevenueResult monotone_relaxation(const ValuationDist& dist, MonotoneMode mode, bool augment) {
  validate_dist(dist);
  const ValuationDist work = augment ? diagonal_augment(dist) : dist;
  auto [value, outcomes] = detail::solve_ic_lp(work, mode);
  AssignmentPlan plan;
  plan.points = atom_points(work);
  plan.outcomes = std::move(outcomes);
  plan.mode = mode;
  return RevenueResult{value, std::move(plan)};
}

}  // namespace detail

// Upper bound on payment-monotone mechanism revenue: the IC LP plus
// s(x) <= s(y) on all dominance pairs of the (optionally diagonal-
// augmented) point set.  A relaxation: constraints bind only at atoms.
inline RevenueResult monrev_relaxed(const ValuationDist& dist, bool augment = true) {
  return detail::monotone_relaxation(dist, MonotoneMode::Payment, augment);
}

// Same with q(x) <= q(y) componentwise (allocation monotonicity).
inline RevenueResult amonrev_relaxed(const ValuationDist& dist, bool augment = true) {
  return detail::monotone_relaxation(dist, MonotoneMode::Allocation, augment);
}

// ----- deterministic mechanisms by assignment enumeration -----

enum class DetMode { General, Supermodular };

constexpr std::uint64_t kDefaultAssignmentCap = std::uint64_t(1) << 20;

namespace detail {

// value[i][B] = x_i(B)
inline std::vector<std::vector<Rat>> bundle_values(const ValuationDist& dist) {
  const std::size_t nb = std::size_t(1) << dist.k;
  std::vector<std::vector<Rat>> val(dist.atoms.size(), std::vector<Rat>(nb, Rat(0)));
  for (std::size_t i = 0; i < dist.atoms.size(); ++i)
    for (Mask m = 1; m < nb; ++m) {
      const int low = [&] {
        for (int b = 0; b < dist.k; ++b)
          if (m & (Mask(1) << b)) return b;
        return 0;
      }();
      val[i][m] = val[i][m & (m - 1)] + dist.atoms[i].x.coords[low];
    }
  return val;
}

// Componentwise-maximal solution of the difference-constraint system of a
// fixed assignment (General mode): shortest paths from the empty bundle.
// Returns nullopt when the assignment is not implementable.
struct DiffSolve {
  Rat value;
  std::vector<std::optional<Rat>> price;  // nullopt = unconstrained (inf)
};
inline std::optional<DiffSolve> general_leaf(const ValuationDist& dist,
                                             const std::vector<std::vector<Rat>>& val,
                                             const std::vector<Mask>& assign) {
  const std::size_t nb = std::size_t(1) << dist.k;
  // Edge (u -> v, w) encodes p(v) <= p(u) + w.
  struct Edge {
    Mask u, v;
    Rat w;
  };
  std::vector<Edge> edges;
  for (Mask m = 1; m < nb; ++m) {
    for (int b = 0; b < dist.k; ++b)
      if (m & (Mask(1) << b)) edges.push_back(Edge{m, m & ~(Mask(1) << b), Rat(0)});  // nondecreasing
    edges.push_back(Edge{m, 0, Rat(0)});                                              // p >= 0
  }
  for (std::size_t i = 0; i < dist.atoms.size(); ++i)
    for (Mask b = 0; b < nb; ++b)
      if (b != assign[i]) edges.push_back(Edge{b, assign[i], val[i][assign[i]] - val[i][b]});
  std::vector<std::optional<Rat>> d(nb);
  d[0] = Rat(0);
  bool changed = true;
  for (std::size_t pass = 0; pass < nb && changed; ++pass) {
    changed = false;
    for (const Edge& e : edges) {
      if (!d[e.u]) continue;
      const Rat cand = *d[e.u] + e.w;
      if (!d[e.v] || *d[e.v] > cand) {
        d[e.v] = cand;
        changed = true;
      }
    }
  }
  if (changed) return std::nullopt;  // still relaxing after |V| passes: negative cycle
  if (!(d[0] && *d[0] == 0)) throw std::logic_error("general_leaf: source distance must stay 0");
  Rat value(0);
  for (std::size_t i = 0; i < dist.atoms.size(); ++i) {
    if (!d[assign[i]]) throw std::logic_error("general_leaf: assigned bundle unreachable");
    value += dist.atoms[i].prob * *d[assign[i]];
  }
  return DiffSolve{std::move(value), std::move(d)};
}

// LP over bundle prices for a fixed assignment with supermodularity added.
inline std::optional<std::pair<Rat, std::vector<Rat>>> supermod_leaf(
    const ValuationDist& dist, const std::vector<std::vector<Rat>>& val,
    const std::vector<Mask>& assign) {
  const std::size_t nb = std::size_t(1) << dist.k;
  const auto var = [](Mask m) { return std::size_t(m) - 1; };  // p(0) == 0 is implicit
  lp::LpProblem prob;
  prob.maximize = true;
  prob.objective.assign(nb - 1, Rat(0));
  prob.bounds.assign(nb - 1, lp::nonneg_var());
  for (std::size_t i = 0; i < dist.atoms.size(); ++i)
    if (assign[i] != 0) prob.objective[var(assign[i])] += dist.atoms[i].prob;
  const auto add = [&](std::vector<std::pair<Mask, Rat>> terms, const Rat& rhs) {
    lp::LinearConstraint c;
    c.coeffs.assign(nb - 1, Rat(0));
    for (const auto& [m, coef] : terms)
      if (m != 0) c.coeffs[var(m)] += coef;
    c.rel = lp::Rel::Le;
    c.rhs = rhs;
    prob.constraints.push_back(std::move(c));
  };
  for (std::size_t i = 0; i < dist.atoms.size(); ++i)
    for (Mask b = 0; b < nb; ++b) {
      if (b == assign[i]) continue;
      // p(a_i) - p(b) <= x_i(a_i) - x_i(b)
      add({{assign[i], Rat(1)}, {b, Rat(-1)}}, val[i][assign[i]] - val[i][b]);
    }
  for (Mask m = 1; m < nb; ++m)
    for (int b = 0; b < dist.k; ++b)
      if (m & (Mask(1) << b)) add({{m & ~(Mask(1) << b), Rat(1)}, {m, Rat(-1)}}, Rat(0));
  for (Mask a = 0; a < nb; ++a)
    for (int i = 0; i < dist.k; ++i) {
      if (a & (Mask(1) << i)) continue;
      for (int j = i + 1; j < dist.k; ++j) {
        if (a & (Mask(1) << j)) continue;
        const Mask mi = a | (Mask(1) << i), mj = a | (Mask(1) << j);
        // p(A+i) + p(A+j) - p(A+i+j) - p(A) <= 0
        add({{mi, Rat(1)}, {mj, Rat(1)}, {mi | mj, Rat(-1)}, {a, Rat(-1)}}, Rat(0));
      }
    }
  const lp::LpOutcome out = lp::solve(prob);
  if (std::holds_alternative<lp::LpInfeasible>(out)) return std::nullopt;
  if (!std::holds_alternative<lp::LpOptimal>(out))
    throw std::logic_error("supermod_leaf: objective is bounded by participation");
  const lp::LpOptimal& opt = std::get<lp::LpOptimal>(out);
  std::vector<Rat> prices(nb, Rat(0));
  for (Mask m = 1; m < nb; ++m) prices[m] = opt.point[var(m)];
  return std::make_pair(opt.value, std::move(prices));
}

struct DetSearch {
  bool found = false;
  Rat best = Rat(0);
  std::vector<Mask> best_assign;
  std::vector<std::optional<Rat>> best_prices;  // nullopt entries = inf
};

}  // namespace detail

// Optimal deterministic-mechanism revenue by exact enumeration of the map
// atoms -> bundles, with an LP (or exact shortest-path solve) per leaf.
// Sound prunes only; ties resolve to the lexicographically smallest
// assignment.  Supermodular mode restricts to supermodular bundle pricings.
inline RevenueResult drev(const ValuationDist& dist, DetMode mode,
                          std::uint64_t cap = kDefaultAssignmentCap) {
  validate_dist(dist);
  if (dist.k > 12) throw CapError("drev: k too large for bundle enumeration");
  const std::size_t nb = std::size_t(1) << dist.k;
  {
    BigInt total(1);
    for (std::size_t i = 0; i < dist.atoms.size(); ++i) total *= BigInt(nb);
    if (total > BigInt(cap))
      throw CapError("drev: assignment space (2^k)^n exceeds the cap of " + std::to_string(cap));
  }
  const std::vector<std::vector<Rat>> val = detail::bundle_values(dist);
  const std::size_t n = dist.atoms.size();
  const Mask full = Mask(nb - 1);
  detail::DetSearch search;
  std::vector<Mask> assign(n, 0);
  // tail_max[i] = max revenue the atoms from i on could possibly pay (IR).
  std::vector<Rat> tail_max(n + 1, Rat(0));
  for (std::size_t i = n; i-- > 0;) tail_max[i] = tail_max[i + 1] + dist.atoms[i].prob * val[i][full];

  const auto leaf = [&]() {
    const auto filter = detail::general_leaf(dist, val, assign);
    if (!filter) return;
    if (search.found && filter->value <= search.best) return;  // supermod <= general
    if (mode == DetMode::General) {
      search.found = true;
      search.best = filter->value;
      search.best_assign = assign;
      search.best_prices = filter->price;
      return;
    }
    const auto sol = detail::supermod_leaf(dist, val, assign);
    if (!sol) return;
    if (!search.found || sol->first > search.best) {
      search.found = true;
      search.best = sol->first;
      search.best_assign = assign;
      search.best_prices.assign(nb, std::nullopt);
      for (Mask m = 0; m < nb; ++m) search.best_prices[m] = sol->second[m];
    }
  };
  const auto dfs = [&](auto&& self, std::size_t depth, const Rat& sold) -> void {
    if (search.found && sold + tail_max[depth] <= search.best) return;
    if (depth == n) {
      leaf();
      return;
    }
    for (Mask b = 0; b <= full; ++b) {
      bool ok = true;
      for (std::size_t s = 0; s < depth && ok; ++s)
        if (val[s][assign[s]] + val[depth][b] < val[s][b] + val[depth][assign[s]]) ok = false;
      if (!ok) continue;
      assign[depth] = b;
      self(self, depth + 1, sold + dist.atoms[depth].prob * val[depth][b]);
    }
    assign[depth] = 0;
  };
  dfs(dfs, 0, Rat(0));
  if (!search.found) throw std::logic_error("drev: the all-empty assignment is always feasible");

  DetPlan plan;
  plan.pricing.k = dist.k;
  plan.pricing.prices.resize(nb);
  for (Mask m = 0; m < nb; ++m)
    plan.pricing.prices[m] =
        search.best_prices[m] ? ExtPrice(*search.best_prices[m]) : ExtPrice::infinity();
  plan.assignment = search.best_assign;
  return RevenueResult{search.best, std::move(plan)};
}

// Optimal symmetric deterministic-mechanism revenue: assignments are bundle
// sizes; a buyer of type x values a size-m bundle at the sum of its m
// largest coordinates.
inline RevenueResult symdrev(const ValuationDist& dist, DetMode mode,
                             std::uint64_t cap = kDefaultAssignmentCap) {
  validate_dist(dist);
  const int k = dist.k;
  const std::size_t n = dist.atoms.size();
  {
    BigInt total(1);
    for (std::size_t i = 0; i < n; ++i) total *= BigInt(k + 1);
    if (total > BigInt(cap))
      throw CapError("symdrev: assignment space (k+1)^n exceeds the cap of " + std::to_string(cap));
  }
  // top[i][m] = sum of the m largest coordinates of x_i
  std::vector<std::vector<Rat>> top(n, std::vector<Rat>(k + 1, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Rat> c = dist.atoms[i].x.coords;
    std::sort(c.begin(), c.end(), [](const Rat& a, const Rat& b) { return b < a; });
    for (int m = 1; m <= k; ++m) top[i][m] = top[i][m - 1] + c[m - 1];
  }
  // Atoms with identical top-profiles and probabilities are interchangeable:
  // restricting to level sequences nondecreasing inside each such group
  // keeps both the optimum and the lexicographically smallest optimizer.
  std::vector<bool> tied_to_prev(n, false);
  for (std::size_t i = 1; i < n; ++i)
    tied_to_prev[i] = top[i] == top[i - 1] && dist.atoms[i].prob == dist.atoms[i - 1].prob;

  // Componentwise-maximal prices for a fixed level assignment without the
  // supermodularity rows: shortest paths on the level line (exact).
  struct LineSolve {
    Rat value;
    std::vector<std::optional<Rat>> price;
  };
  const auto line_leaf = [&](const std::vector<int>& levels) -> std::optional<LineSolve> {
    struct Edge {
      int u, v;
      Rat w;
    };
    std::vector<Edge> edges;
    for (int m = 1; m <= k; ++m) edges.push_back(Edge{m, m - 1, Rat(0)});  // nondecreasing
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j <= k; ++j)
        if (j != levels[i]) edges.push_back(Edge{j, levels[i], top[i][levels[i]] - top[i][j]});
    std::vector<std::optional<Rat>> d(k + 1);
    d[0] = Rat(0);
    bool changed = true;
    for (int pass = 0; pass <= k && changed; ++pass) {
      changed = false;
      for (const Edge& e : edges) {
        if (!d[e.u]) continue;
        const Rat cand = *d[e.u] + e.w;
        if (!d[e.v] || *d[e.v] > cand) {
          d[e.v] = cand;
          changed = true;
        }
      }
    }
    if (changed) return std::nullopt;
    if (!(d[0] && *d[0] == 0)) throw std::logic_error("symdrev: source distance must stay 0");
    Rat value(0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!d[levels[i]]) throw std::logic_error("symdrev: assigned level unreachable");
      value += dist.atoms[i].prob * *d[levels[i]];
    }
    return LineSolve{std::move(value), std::move(d)};
  };

  const auto leaf_lp = [&](const std::vector<int>& levels) -> std::optional<std::pair<Rat, std::vector<Rat>>> {
    lp::LpProblem prob;  // vars p(1..k); p(0) == 0 implicit
    prob.maximize = true;
    prob.objective.assign(k, Rat(0));
    prob.bounds.assign(k, lp::nonneg_var());
    for (std::size_t i = 0; i < n; ++i)
      if (levels[i] > 0) prob.objective[levels[i] - 1] += dist.atoms[i].prob;
    const auto add = [&](std::initializer_list<std::pair<int, Rat>> terms, const Rat& rhs) {
      lp::LinearConstraint c;
      c.coeffs.assign(k, Rat(0));
      for (const auto& [m, coef] : terms)
        if (m != 0) c.coeffs[m - 1] += coef;
      c.rel = lp::Rel::Le;
      c.rhs = rhs;
      prob.constraints.push_back(std::move(c));
    };
    for (std::size_t i = 0; i < n; ++i)
      for (int j = 0; j <= k; ++j) {
        if (j == levels[i]) continue;
        add({{levels[i], Rat(1)}, {j, Rat(-1)}}, top[i][levels[i]] - top[i][j]);
      }
    for (int m = 1; m <= k; ++m) add({{m - 1, Rat(1)}, {m, Rat(-1)}}, Rat(0));
    if (mode == DetMode::Supermodular)
      for (int m = 1; m < k; ++m)
        add({{m, Rat(2)}, {m - 1, Rat(-1)}, {m + 1, Rat(-1)}}, Rat(0));
    const lp::LpOutcome out = lp::solve(prob);
    if (std::holds_alternative<lp::LpInfeasible>(out)) return std::nullopt;
    if (!std::holds_alternative<lp::LpOptimal>(out))
      throw std::logic_error("symdrev: objective is bounded by participation");
    const lp::LpOptimal& opt = std::get<lp::LpOptimal>(out);
    std::vector<Rat> levels_prices(k + 1, Rat(0));
    for (int m = 1; m <= k; ++m) levels_prices[m] = opt.point[m - 1];
    return std::make_pair(opt.value, std::move(levels_prices));
  };

  bool found = false;
  Rat best(0);
  std::vector<int> best_levels;
  std::vector<std::optional<Rat>> best_prices;  // nullopt entries = inf
  std::vector<int> levels(n, 0);
  std::vector<Rat> tail_max(n + 1, Rat(0));
  for (std::size_t i = n; i-- > 0;) tail_max[i] = tail_max[i + 1] + dist.atoms[i].prob * top[i][k];
  const auto leaf = [&]() {
    const auto lin = line_leaf(levels);
    if (!lin) return;
    if (found && lin->value <= best) return;  // supermodular <= unconstrained
    if (mode == DetMode::General) {
      found = true;
      best = lin->value;
      best_levels = levels;
      best_prices = lin->price;
      return;
    }
    const auto sol = leaf_lp(levels);
    if (!sol) return;
    if (!found || sol->first > best) {
      found = true;
      best = sol->first;
      best_levels = levels;
      best_prices.assign(k + 1, std::nullopt);
      for (int m = 0; m <= k; ++m) best_prices[m] = sol->second[m];
    }
  };
  const auto dfs = [&](auto&& self, std::size_t depth, const Rat& sold) -> void {
    if (found && sold + tail_max[depth] <= best) return;
    if (depth == n) {
      leaf();
      return;
    }
    const int from = tied_to_prev[depth] ? levels[depth - 1] : 0;
    for (int m = from; m <= k; ++m) {
      bool ok = true;
      for (std::size_t s = 0; s < depth && ok; ++s)
        if (top[s][levels[s]] + top[depth][m] < top[s][m] + top[depth][levels[s]]) ok = false;
      if (!ok) continue;
      levels[depth] = m;
      self(self, depth + 1, sold + dist.atoms[depth].prob * top[depth][m]);
    }
    levels[depth] = 0;
  };
  dfs(dfs, 0, Rat(0));
  if (!found) throw std::logic_error("symdrev: the all-zero assignment is always feasible");

  SymPlan plan;
  for (int m = 0; m <= k; ++m)
    plan.pricing.levels.push_back(best_prices[m] ? ExtPrice(*best_prices[m]) : ExtPrice::infinity());
  plan.levels = best_levels;
  return RevenueResult{best, std::move(plan)};
}

// ----- witness replay -----

// Menu of all bundle unions of a partition priced additively.
inline Menu partition_menu(const BundlingPartition& part, const std::vector<Rat>& prices) {
  validate_partition(part);
  if (part.blocks.size() != prices.size()) throw InputError("partition_menu: price per block required");
  std::vector<MenuEntry> entries;
  const std::size_t nblocks = part.blocks.size();
  if (nblocks > 20) throw CapError("partition_menu: too many blocks");
  for (Mask pick = 0; pick < (Mask(1) << nblocks); ++pick) {
    Mask bundle = 0;
    Rat price(0);
    for (std::size_t b = 0; b < nblocks; ++b)
      if (pick & (Mask(1) << b)) {
        bundle |= part.blocks[b];
        price += prices[b];
      }
    entries.push_back(MenuEntry{indicator_allocation(part.k, bundle), price});
  }
  return make_menu(part.k, std::move(entries));
}

inline Menu separate_sale_menu(int k, const std::vector<Rat>& prices) {
  BundlingPartition part;
  part.k = k;
  for (int i = 0; i < k; ++i) part.blocks.push_back(Mask(1) << i);
  return partition_menu(part, prices);
}

// Replays a result's witness against the distribution under seller-favorable
// tie-breaking and reports the first discrepancy (nullopt = exact match).
inline std::optional<std::string> verify_witness(const RevenueResult& result,
                                                 const ValuationDist& dist) {
  const auto check_menu = [&](const Menu& menu) -> std::optional<std::string> {
    const Rat replay = revenue(menu, dist, TieRule::SellerFavorable);
    if (replay != result.value)
      return "menu replay " + rat_to_string(replay) + " != value " + rat_to_string(result.value);
    return std::nullopt;
  };
  if (std::holds_alternative<PostedPrice>(result.witness)) {
    if (dist.k != 1) return "posted-price witness on a multi-good distribution";
    const Rat& p = std::get<PostedPrice>(result.witness).price;
    return check_menu(make_menu(1, {MenuEntry{indicator_allocation(1, 1), p}}));
  }
  if (std::holds_alternative<PerGoodPrices>(result.witness))
    return check_menu(separate_sale_menu(dist.k, std::get<PerGoodPrices>(result.witness).prices));
  if (std::holds_alternative<PartitionPrices>(result.witness)) {
    const PartitionPrices& w = std::get<PartitionPrices>(result.witness);
    return check_menu(partition_menu(w.part, w.prices));
  }
  if (std::holds_alternative<MenuWitness>(result.witness))
    return check_menu(std::get<MenuWitness>(result.witness).menu);
  if (std::holds_alternative<DetPlan>(result.witness)) {
    const DetPlan& w = std::get<DetPlan>(result.witness);
    if (w.assignment.size() != dist.atoms.size()) return "det plan arity mismatch";
    for (std::size_t i = 0; i < dist.atoms.size(); ++i)
      if (w.pricing.at(w.assignment[i]).is_inf()) return "atom assigned an unsold bundle";
    return check_menu(menu_from_det_pricing(w.pricing));
  }
  if (std::holds_alternative<SymPlan>(result.witness)) {
    const SymPlan& w = std::get<SymPlan>(result.witness);
    if (w.levels.size() != dist.atoms.size()) return "sym plan arity mismatch";
    return check_menu(menu_from_sym_pricing(w.pricing));
  }
  // AssignmentPlan: a direct outcome table over (a superset of) the support.
  const AssignmentPlan& w = std::get<AssignmentPlan>(result.witness);
  if (w.points.size() != w.outcomes.size()) return "assignment plan arity mismatch";
  ValuationDist carrier;
  carrier.k = dist.k;
  Rat replay(0);
  for (std::size_t i = 0; i < w.points.size(); ++i) {
    Rat prob(0);
    for (const Atom& a : dist.atoms)
      if (a.x == w.points[i]) prob = a.prob;
    replay += prob * w.outcomes[i].payment;
    carrier.atoms.push_back(Atom{w.points[i], prob});
  }
  for (const Atom& a : dist.atoms) {
    bool present = false;
    for (const Valuation& p : w.points)
      if (p == a.x) present = true;
    if (!present) return "assignment plan misses a support atom";
  }
  if (replay != result.value)
    return "assignment replay " + rat_to_string(replay) + " != value " + rat_to_string(result.value);
  if (const auto bad = verify_ic_ir(w.outcomes, carrier))
    return "assignment plan violates " + bad->kind + " at atom " + std::to_string(bad->atom);
  for (const auto& [i, j] : dominance_pairs(w.points)) {
    if (w.mode == MonotoneMode::Payment && w.outcomes[i].payment > w.outcomes[j].payment)
      return "assignment plan breaks payment monotonicity";
    if (w.mode == MonotoneMode::Allocation &&
        !allocation_leq(w.outcomes[i].alloc, w.outcomes[j].alloc))
      return "assignment plan breaks allocation monotonicity";
  }
  return std::nullopt;
}

// ----- JSON views -----

inline Json revenue_witness_to_json(const RevenueWitness& witness) {
  Json j;
  if (std::holds_alternative<PostedPrice>(witness)) {
    j["kind"] = "posted-price";
    j["price"] = rat_to_json(std::get<PostedPrice>(witness).price);
  } else if (std::holds_alternative<PerGoodPrices>(witness)) {
    j["kind"] = "per-good-prices";
    j["prices"] = rat_vector_to_json(std::get<PerGoodPrices>(witness).prices);
  } else if (std::holds_alternative<PartitionPrices>(witness)) {
    const PartitionPrices& w = std::get<PartitionPrices>(witness);
    j["kind"] = "partition-prices";
    Json blocks = Json::array();
    for (Mask b : w.part.blocks) blocks.push_back(std::to_string(b));
    j["blocks"] = std::move(blocks);
    j["prices"] = rat_vector_to_json(w.prices);
  } else if (std::holds_alternative<MenuWitness>(witness)) {
    j["kind"] = "menu";
    j["menu"] = menu_to_json(std::get<MenuWitness>(witness).menu);
  } else if (std::holds_alternative<AssignmentPlan>(witness)) {
    const AssignmentPlan& w = std::get<AssignmentPlan>(witness);
    j["kind"] = "assignment";
    Json rows = Json::array();
    for (std::size_t i = 0; i < w.points.size(); ++i)
      rows.push_back(Json{{"x", rat_vector_to_json(w.points[i].coords)},
                          {"q", rat_vector_to_json(w.outcomes[i].alloc.coords)},
                          {"s", rat_to_json(w.outcomes[i].payment)}});
    j["rows"] = std::move(rows);
  } else if (std::holds_alternative<DetPlan>(witness)) {
    const DetPlan& w = std::get<DetPlan>(witness);
    j["kind"] = "det-pricing";
    j["pricing"] = det_pricing_to_json(w.pricing);
    Json assign = Json::array();
    for (Mask m : w.assignment) assign.push_back(std::to_string(m));
    j["assignment"] = std::move(assign);
  } else {
    const SymPlan& w = std::get<SymPlan>(witness);
    j["kind"] = "sym-pricing";
    j["pricing"] = sym_pricing_to_json(w.pricing);
    j["levels"] = w.levels;
  }
  return j;
}

inline Json revenue_result_to_json(const RevenueResult& result) {
  Json j;
  j["value"] = rat_to_json(result.value);
  j["witness"] = revenue_witness_to_json(result.witness);
  return j;
}

}  // namespace mechlab
