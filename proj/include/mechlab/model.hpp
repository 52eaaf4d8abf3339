#pragma once

// Domain types for a single buyer and k goods, plus the handful of
// operations on valuation distributions that everything else builds on.
// Subsets of the goods {1..k} are k-bit masks; bit i-1 is good i.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace mechlab {

using Mask = std::uint32_t;

inline int popcount(Mask m) {
  int c = 0;
  for (; m; m &= m - 1) ++c;
  return c;
}

inline bool subset_of(Mask a, Mask b) { return (a & ~b) == 0; }

// Buyer valuation x in R_+^k.
struct Valuation {
  std::vector<Rat> coords;

  int k() const { return static_cast<int>(coords.size()); }
  friend bool operator==(const Valuation& a, const Valuation& b) { return a.coords == b.coords; }
  friend bool operator<(const Valuation& a, const Valuation& b) { return a.coords < b.coords; }
};

// Componentwise x <= y.
inline bool dominated_by(const Valuation& x, const Valuation& y) {
  if (x.coords.size() != y.coords.size()) return false;
  for (std::size_t i = 0; i < x.coords.size(); ++i)
    if (x.coords[i] > y.coords[i]) return false;
  return true;
}

// Lottery over goods, q in [0,1]^k.
struct Allocation {
  std::vector<Rat> coords;

  int k() const { return static_cast<int>(coords.size()); }
  bool is_zero() const {
    for (const Rat& c : coords)
      if (c != 0) return false;
    return true;
  }
  bool is_deterministic() const {
    for (const Rat& c : coords)
      if (c != 0 && c != 1) return false;
    return true;
  }
  // Bitmask of a 0/1 allocation; only meaningful when is_deterministic().
  Mask mask() const {
    Mask m = 0;
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (coords[i] == 1) m |= Mask(1) << i;
    return m;
  }
  friend bool operator==(const Allocation& a, const Allocation& b) { return a.coords == b.coords; }
  friend bool operator<(const Allocation& a, const Allocation& b) { return a.coords < b.coords; }
};

inline Allocation indicator_allocation(int k, Mask m) {
  Allocation a;
  a.coords.assign(k, Rat(0));
  for (int i = 0; i < k; ++i)
    if (m & (Mask(1) << i)) a.coords[i] = 1;
  return a;
}

// Componentwise q <= r.
inline bool allocation_leq(const Allocation& q, const Allocation& r) {
  for (std::size_t i = 0; i < q.coords.size(); ++i)
    if (q.coords[i] > r.coords[i]) return false;
  return true;
}

inline Rat dot(const Allocation& q, const Valuation& x) {
  Rat s(0);
  for (std::size_t i = 0; i < q.coords.size(); ++i) s += q.coords[i] * x.coords[i];
  return s;
}

struct MenuEntry {
  Allocation alloc;
  Rat price;  // >= 0 (no positive transfers)

  friend bool operator==(const MenuEntry& a, const MenuEntry& b) {
    return a.alloc == b.alloc && a.price == b.price;
  }
};

// Finite menu; the buyer picks a payoff-maximizing entry.  Always contains
// the opt-out entry (zero allocation, zero price), so participation is
// individually rational by construction.
struct Menu {
  int k = 0;
  std::vector<MenuEntry> entries;

  friend bool operator==(const Menu& a, const Menu& b) { return a.k == b.k && a.entries == b.entries; }
};

inline void validate_menu(const Menu& menu) {
  if (menu.k < 1) throw InputError("menu: k must be >= 1");
  bool has_zero = false;
  for (std::size_t j = 0; j < menu.entries.size(); ++j) {
    const MenuEntry& e = menu.entries[j];
    const std::string at = "entries[" + std::to_string(j) + "]";
    if (e.alloc.k() != menu.k) throw InputError("menu: " + at + ".q has wrong length");
    for (const Rat& c : e.alloc.coords)
      if (c < 0 || c > 1) throw InputError("menu: " + at + ".q outside [0,1]");
    if (e.price < 0) throw InputError("menu: " + at + ".s negative");
    if (e.alloc.is_zero()) {
      if (e.price != 0) throw InputError("menu: " + at + " allocates nothing at a nonzero price");
      has_zero = true;
    }
    for (std::size_t i = 0; i < j; ++i)
      if (menu.entries[i].alloc == e.alloc)
        throw InputError("menu: duplicate allocation at entries[" + std::to_string(j) + "]");
  }
  if (!has_zero) throw InputError("menu: missing the (0,...,0 ; 0) opt-out entry");
}

// Convenience constructor: appends the opt-out entry when absent, then validates.
inline Menu make_menu(int k, std::vector<MenuEntry> entries) {
  Menu m;
  m.k = k;
  m.entries = std::move(entries);
  bool has_zero = false;
  for (const MenuEntry& e : m.entries)
    if (e.alloc.is_zero()) has_zero = true;
  if (!has_zero) m.entries.push_back(MenuEntry{indicator_allocation(k, 0), Rat(0)});
  validate_menu(m);
  return m;
}

inline bool menu_is_deterministic(const Menu& menu) {
  for (const MenuEntry& e : menu.entries)
    if (!e.alloc.is_deterministic()) return false;
  return true;
}

// Total price assignment on all 2^k bundles; prices[mask] is the bundle's
// price, possibly infinite; prices[0] must be 0.
struct DetPricing {
  int k = 0;
  std::vector<ExtPrice> prices;  // size 1 << k

  const ExtPrice& at(Mask m) const { return prices[m]; }
  friend bool operator==(const DetPricing& a, const DetPricing& b) {
    return a.k == b.k && a.prices == b.prices;
  }
};

inline void validate_det_pricing(const DetPricing& p) {
  if (p.k < 1) throw InputError("pricing: k must be >= 1");
  if (p.k > 20) throw InputError("pricing: k too large (max 20)");
  if (p.prices.size() != (std::size_t(1) << p.k))
    throw InputError("pricing: must assign a price to every one of the 2^k bundles");
  if (!(p.prices[0] == ExtPrice(Rat(0)))) throw InputError("pricing: empty bundle must cost 0");
  for (std::size_t m = 0; m < p.prices.size(); ++m)
    if (!p.prices[m].is_inf() && p.prices[m].finite() < 0)
      throw InputError("pricing: negative price at bundle " + std::to_string(m));
}

// p(A) <= p(B) whenever A is a subset of B (infinite prices sit on top).
inline bool det_pricing_nondecreasing(const DetPricing& p) {
  const Mask full = (Mask(1) << p.k) - 1;
  for (Mask a = 0; a <= full; ++a)
    for (int i = 0; i < p.k; ++i) {
      const Mask b = a | (Mask(1) << i);
      if (b != a && p.at(a) > p.at(b)) return false;
    }
  return true;
}

// Symmetric bundle pricing: price depends only on the bundle size.
// levels[m] is the price of any size-m bundle; levels[0] must be 0.
struct SymPricing {
  std::vector<ExtPrice> levels;  // size k + 1

  int k() const { return static_cast<int>(levels.size()) - 1; }
  friend bool operator==(const SymPricing& a, const SymPricing& b) { return a.levels == b.levels; }
};

inline void validate_sym_pricing(const SymPricing& p) {
  if (p.levels.size() < 2) throw InputError("symmetric pricing: need levels 0..k with k >= 1");
  if (!(p.levels[0] == ExtPrice(Rat(0)))) throw InputError("symmetric pricing: level 0 must cost 0");
  for (std::size_t m = 1; m < p.levels.size(); ++m)
    if (!p.levels[m].is_inf() && p.levels[m].finite() < 0)
      throw InputError("symmetric pricing: negative price at level " + std::to_string(m));
  // Canonical shape: once a level is unsold, all larger levels are unsold.
  for (std::size_t m = 1; m + 1 < p.levels.size(); ++m)
    if (p.levels[m].is_inf() && !p.levels[m + 1].is_inf())
      throw InputError("symmetric pricing: finite level above an infinite one");
}

inline DetPricing det_from_sym(const SymPricing& p) {
  DetPricing d;
  d.k = p.k();
  d.prices.resize(std::size_t(1) << d.k);
  for (Mask m = 0; m < d.prices.size(); ++m) d.prices[m] = p.levels[popcount(m)];
  return d;
}

// Partition of the k goods into disjoint nonempty blocks covering all goods.
struct BundlingPartition {
  int k = 0;
  std::vector<Mask> blocks;
};

inline void validate_partition(const BundlingPartition& part) {
  if (part.k < 1) throw InputError("partition: k must be >= 1");
  const Mask full = (Mask(1) << part.k) - 1;
  Mask seen = 0;
  for (Mask b : part.blocks) {
    if (b == 0) throw InputError("partition: empty block");
    if (b & ~full) throw InputError("partition: block mentions a good beyond k");
    if (b & seen) throw InputError("partition: overlapping blocks");
    seen |= b;
  }
  if (seen != full) throw InputError("partition: blocks do not cover all goods");
}

struct Atom {
  Valuation x;
  Rat prob;  // >= 0; zero-probability atoms are legal carriers of constraints
};

// Finitely supported valuation distribution.  Probabilities sum to 1;
// atoms are pairwise distinct; explicit zero-probability atoms are allowed
// (they carry incentive and monotonicity constraints without weight).
struct ValuationDist {
  int k = 0;
  std::vector<Atom> atoms;
};

inline void validate_dist(const ValuationDist& dist) {
  if (dist.k < 1) throw InputError("distribution: k must be >= 1");
  if (dist.atoms.empty()) throw InputError("distribution: no atoms");
  Rat total(0);
  for (std::size_t i = 0; i < dist.atoms.size(); ++i) {
    const Atom& a = dist.atoms[i];
    const std::string at = "atoms[" + std::to_string(i) + "]";
    if (a.x.k() != dist.k) throw InputError("distribution: " + at + ".x has wrong length");
    for (const Rat& c : a.x.coords)
      if (c < 0) throw InputError("distribution: " + at + ".x has a negative coordinate");
    if (a.prob < 0) throw InputError("distribution: " + at + ".p negative");
    total += a.prob;
    for (std::size_t j = 0; j < i; ++j)
      if (dist.atoms[j].x == a.x) throw InputError("distribution: duplicate atom at " + at);
  }
  if (total != 1) throw InputError("distribution: probabilities sum to " + rat_to_string(total) + ", not 1");
}

// All ordered index pairs (i, j), i != j, with points[i] <= points[j]
// componentwise, in lexicographic (i, j) order.
inline std::vector<std::pair<std::size_t, std::size_t>> dominance_pairs(
    const std::vector<Valuation>& points) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      if (dominated_by(points[i], points[j])) out.emplace_back(i, j);
    }
  return out;
}

enum class MarginalMode { PerGood, Sum, Max };

// One-good pushforward distribution (k = 1), equal values merged.
inline ValuationDist pushforward(const ValuationDist& dist, const std::vector<Rat>& values) {
  std::map<Rat, Rat> mass;
  for (std::size_t i = 0; i < dist.atoms.size(); ++i) mass[values[i]] += dist.atoms[i].prob;
  ValuationDist out;
  out.k = 1;
  for (const auto& [v, p] : mass) out.atoms.push_back(Atom{Valuation{{v}}, p});
  return out;
}

// Sum of the coordinates selected by `mask`, per atom, as a one-good dist.
inline ValuationDist marginal_mask_sum(const ValuationDist& dist, Mask mask) {
  std::vector<Rat> vals;
  vals.reserve(dist.atoms.size());
  for (const Atom& a : dist.atoms) {
    Rat s(0);
    for (int i = 0; i < dist.k; ++i)
      if (mask & (Mask(1) << i)) s += a.x.coords[i];
    vals.push_back(s);
  }
  return pushforward(dist, vals);
}

// Marginal of good `good` (0-based) / sum of all goods / max of all goods.
inline ValuationDist marginal(const ValuationDist& dist, MarginalMode mode, int good = 0) {
  switch (mode) {
    case MarginalMode::PerGood: {
      if (good < 0 || good >= dist.k) throw InputError("marginal: good index out of range");
      std::vector<Rat> vals;
      for (const Atom& a : dist.atoms) vals.push_back(a.x.coords[good]);
      return pushforward(dist, vals);
    }
    case MarginalMode::Sum:
      return marginal_mask_sum(dist, (Mask(1) << dist.k) - 1);
    case MarginalMode::Max: {
      std::vector<Rat> vals;
      for (const Atom& a : dist.atoms) {
        Rat m = a.x.coords[0];
        for (int i = 1; i < dist.k; ++i) m = std::max(m, a.x.coords[i]);
        vals.push_back(m);
      }
      return pushforward(dist, vals);
    }
  }
  throw std::logic_error("marginal: bad mode");
}

inline bool is_diagonal(const Valuation& x) {
  for (std::size_t i = 1; i < x.coords.size(); ++i)
    if (x.coords[i] != x.coords[0]) return false;
  return true;
}

// Appends, at probability zero, the diagonal point (max_i x_i)·(1,...,1)
// for every non-diagonal atom, deduplicated and skipping points that are
// already atoms.  Leaves diagonal-only distributions unchanged.
inline ValuationDist diagonal_augment(const ValuationDist& dist) {
  ValuationDist out = dist;
  std::vector<Valuation> added;
  for (const Atom& a : dist.atoms) {
    if (is_diagonal(a.x)) continue;
    Rat m = a.x.coords[0];
    for (int i = 1; i < dist.k; ++i) m = std::max(m, a.x.coords[i]);
    Valuation diag;
    diag.coords.assign(dist.k, m);
    bool present = false;
    for (const Atom& b : dist.atoms)
      if (b.x == diag) present = true;
    for (const Valuation& v : added)
      if (v == diag) present = true;
    if (!present) {
      added.push_back(diag);
      out.atoms.push_back(Atom{diag, Rat(0)});
    }
  }
  return out;
}

inline std::vector<Valuation> atom_points(const ValuationDist& dist) {
  std::vector<Valuation> pts;
  pts.reserve(dist.atoms.size());
  for (const Atom& a : dist.atoms) pts.push_back(a.x);
  return pts;
}

}  // namespace mechlab
