#pragma once

// Structural properties of bundle pricings on the subset lattice, and the
// supermodular majorant constructions.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "model.hpp"
#include "rational.hpp"

namespace mechlab {

enum class LatticeProperty {
  Nondecreasing,
  Submodular,
  Supermodular,
  SeparablySubadditive,
  SeparablySuperadditive,
};

// Witness is the first violating pair in lexicographic bitmask order
// (or the first violating level for symmetric pricings).
struct PropertyVerdict {
  bool holds = true;
  std::optional<std::pair<Mask, Mask>> pair_witness;
  std::optional<int> level_witness;
};

// Checks `prop` for a total pricing, over all relevant subset pairs, or —
// when `restrict_to` is given — only pairs with both sets in that family
// (prices at unions/intersections are still read from the total pricing).
// Infinite prices follow the saturating comparison convention.
inline PropertyVerdict check_det(const DetPricing& p, LatticeProperty prop,
                                 const std::optional<std::vector<Mask>>& restrict_to = std::nullopt) {
  validate_det_pricing(p);
  const Mask full = (Mask(1) << p.k) - 1;
  std::vector<bool> in_scope(std::size_t(1) << p.k, true);
  if (restrict_to) {
    in_scope.assign(std::size_t(1) << p.k, false);
    for (Mask m : *restrict_to) {
      if (m > full) throw InputError("check_det: scope set beyond 2^k");
      in_scope[m] = true;
    }
  }
  PropertyVerdict verdict;
  const auto fail = [&](Mask a, Mask b) {
    verdict.holds = false;
    verdict.pair_witness = std::make_pair(a, b);
  };
  switch (prop) {
    case LatticeProperty::Nondecreasing:
      for (Mask a = 0; a <= full && verdict.holds; ++a) {
        if (!in_scope[a]) continue;
        for (Mask b = a; b <= full; ++b) {
          if (!in_scope[b] || !subset_of(a, b)) continue;
          if (p.at(a) > p.at(b)) {
            fail(a, b);
            break;
          }
        }
      }
      break;
    case LatticeProperty::Submodular:
    case LatticeProperty::Supermodular:
      for (Mask a = 0; a <= full && verdict.holds; ++a) {
        if (!in_scope[a]) continue;
        for (Mask b = a + 1; b <= full; ++b) {
          if (!in_scope[b]) continue;
          const ExtPrice lhs = p.at(a) + p.at(b);
          const ExtPrice rhs = p.at(a | b) + p.at(a & b);
          const bool ok = prop == LatticeProperty::Submodular ? lhs >= rhs : lhs <= rhs;
          if (!ok) {
            fail(a, b);
            break;
          }
        }
      }
      break;
    case LatticeProperty::SeparablySubadditive:
    case LatticeProperty::SeparablySuperadditive:
      for (Mask a = 1; a <= full && verdict.holds; ++a) {
        if (!in_scope[a]) continue;
        for (Mask b = a + 1; b <= full; ++b) {
          if (!in_scope[b] || (a & b) != 0) continue;
          const ExtPrice parts = p.at(a) + p.at(b);
          const ExtPrice whole = p.at(a | b);
          const bool ok =
              prop == LatticeProperty::SeparablySubadditive ? whole <= parts : whole >= parts;
          if (!ok) {
            fail(a, b);
            break;
          }
        }
      }
      break;
  }
  return verdict;
}

// Supermodularity of a symmetric pricing == nondecreasing marginals
// d(m) = p(m) - p(m-1), with d(m) = inf whenever p(m) = inf.
inline PropertyVerdict check_sym(const SymPricing& p, LatticeProperty prop) {
  if (prop != LatticeProperty::Supermodular)
    throw InputError("check_sym: only the Supermodular check is defined on levels");
  validate_sym_pricing(p);
  const int k = p.k();
  PropertyVerdict verdict;
  const auto d = [&](int m) -> ExtPrice {
    if (p.levels[m].is_inf()) return ExtPrice::infinity();
    return ExtPrice(p.levels[m].finite() - p.levels[m - 1].finite());
  };
  for (int m = 2; m <= k; ++m) {
    if (d(m) < d(m - 1)) {
      verdict.holds = false;
      verdict.level_witness = m;
      break;
    }
  }
  return verdict;
}

// Supermodular majorant of a finite total pricing, built bottom-up:
//   p'(0) = 0,  p'({i}) = p({i}),
//   p'(A) = max{ p(A), max over i != j in A of
//                p'(A\{i}) + p'(A\{j}) - p'(A\{i,j}) }.
// Satisfies p <= p' <= 2^(|A|-1) p pointwise. Among supermodular
// majorants that agree with p on singletons, p' is pointwise minimal
// at every bundle of size <= 3 (an induction over bundle size; the
// subtracted term is then a pinned singleton or zero). It is not
// minimal over all supermodular majorants: raising a singleton above
// p({i}) can relax a binding supermodularity row and yield a majorant
// that is strictly cheaper on a larger bundle.
inline DetPricing supermod_majorant_det(const DetPricing& p) {
  validate_det_pricing(p);
  for (const ExtPrice& pr : p.prices)
    if (pr.is_inf())
      throw InputError("supermod_majorant_det: prices must be finite (pre-replace inf)");
  DetPricing out;
  out.k = p.k;
  out.prices.resize(p.prices.size());
  std::vector<Rat> val(p.prices.size());
  std::vector<Mask> by_size;
  for (Mask m = 0; m < p.prices.size(); ++m) by_size.push_back(m);
  std::stable_sort(by_size.begin(), by_size.end(),
                   [](Mask a, Mask b) { return popcount(a) < popcount(b); });
  for (Mask m : by_size) {
    const int sz = popcount(m);
    if (sz == 0) {
      val[m] = 0;
    } else if (sz == 1) {
      val[m] = p.at(m).finite();
    } else {
      Rat best = p.at(m).finite();
      for (int i = 0; i < p.k; ++i) {
        if (!(m & (Mask(1) << i))) continue;
        for (int j = i + 1; j < p.k; ++j) {
          if (!(m & (Mask(1) << j))) continue;
          const Mask mi = m & ~(Mask(1) << i), mj = m & ~(Mask(1) << j);
          const Rat cand = val[mi] + val[mj] - val[mi & mj];
          best = std::max(best, cand);
        }
      }
      val[m] = best;
    }
    out.prices[m] = ExtPrice(val[m]);
  }
  return out;
}

// Symmetric analogue: monotonize the marginals and re-accumulate.
// Satisfies (1/k) p' <= p <= p'.
inline SymPricing supermod_majorant_sym(const SymPricing& p) {
  validate_sym_pricing(p);
  for (const ExtPrice& lv : p.levels)
    if (lv.is_inf())
      throw InputError("supermod_majorant_sym: levels must be finite (pre-replace inf)");
  const int k = p.k();
  SymPricing out;
  out.levels.resize(k + 1);
  out.levels[0] = ExtPrice(Rat(0));
  Rat run(0), dmax(0);
  for (int m = 1; m <= k; ++m) {
    const Rat d = p.levels[m].finite() - p.levels[m - 1].finite();
    dmax = std::max(dmax, d);
    run += dmax;
    out.levels[m] = ExtPrice(run);
  }
  return out;
}

// H(k) = 1 + 1/2 + ... + 1/k, exactly.
inline Rat harmonic(int k) {
  if (k < 1) throw InputError("harmonic: k must be >= 1");
  Rat h(0);
  for (int m = 1; m <= k; ++m) h += Rat(1) / Rat(m);
  return h;
}

}  // namespace mechlab
