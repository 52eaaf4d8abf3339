#pragma once

// Exact rational linear programming.  Dense two-phase tableau simplex with
// Bland's anti-cycling rule; every pivot choice is by smallest index, so
// results are bit-for-bit deterministic.  Any Optimal outcome is re-checked
// against the original constraints and bounds before being returned.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rational.hpp"

namespace mechlab::lp {

enum class Rel { Le, Eq, Ge };

struct LinearConstraint {
  std::vector<Rat> coeffs;
  Rel rel = Rel::Le;
  Rat rhs;
};

// Half-open sides are encoded by an empty optional.
struct VarBounds {
  std::optional<Rat> lower;
  std::optional<Rat> upper;
};

inline VarBounds free_var() { return VarBounds{}; }
inline VarBounds nonneg_var() { return VarBounds{Rat(0), std::nullopt}; }
inline VarBounds boxed_var(const Rat& lo, const Rat& hi) { return VarBounds{lo, hi}; }

struct LpProblem {
  bool maximize = true;
  std::vector<Rat> objective;               // size n
  std::vector<LinearConstraint> constraints;
  std::vector<VarBounds> bounds;            // size n
};

struct LpOptimal {
  Rat value;
  std::vector<Rat> point;
};
struct LpInfeasible {};
struct LpUnbounded {};
using LpOutcome = std::variant<LpOptimal, LpInfeasible, LpUnbounded>;

constexpr std::size_t kMaxLpSize = 4096;

namespace detail {

// Tableau over nonnegative variables: rows[i] holds the constraint row with
// rhs in the last slot; `basis[i]` is the column basic in row i.
struct Tableau {
  std::vector<std::vector<Rat>> rows;
  std::vector<std::size_t> basis;
  std::size_t ncols = 0;  // excludes the rhs slot

  void pivot(std::size_t l, std::size_t e, std::vector<Rat>& reduced) {
    std::vector<Rat>& prow = rows[l];
    const Rat piv = prow[e];
    for (Rat& v : prow) v /= piv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == l || rows[i][e] == 0) continue;
      const Rat f = rows[i][e];
      for (std::size_t j = 0; j <= ncols; ++j)
        if (prow[j] != 0) rows[i][j] -= f * prow[j];
    }
    if (reduced[e] != 0) {
      const Rat f = reduced[e];
      for (std::size_t j = 0; j <= ncols; ++j)
        if (prow[j] != 0) reduced[j] -= f * prow[j];
    }
    basis[l] = e;
  }

  // Maximizes the cost vector encoded in `reduced` (already canonicalized
  // w.r.t. the basis).  Returns false on unboundedness.
  bool optimize(std::vector<Rat>& reduced, const std::vector<bool>& banned) {
    // Bland's rule terminates; the guard only trips on an internal bug.
    for (long guard = 0; guard < 20'000'000; ++guard) {
      std::size_t enter = ncols;
      for (std::size_t j = 0; j < ncols; ++j)
        if (!banned[j] && reduced[j] > 0) {
          enter = j;
          break;
        }
      if (enter == ncols) return true;
      std::size_t leave = rows.size();
      Rat best_ratio(0);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][enter] <= 0) continue;
        Rat ratio = rows[i][ncols] / rows[i][enter];
        if (leave == rows.size() || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == rows.size()) return false;
      pivot(leave, enter, reduced);
    }
    throw std::logic_error("lp: pivot guard exceeded (anti-cycling failure)");
  }
};

inline std::vector<Rat> reduced_costs(const Tableau& t, const std::vector<Rat>& cost) {
  std::vector<Rat> r = cost;
  r.resize(t.ncols + 1, Rat(0));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const Rat cb = cost[t.basis[i]];
    if (cb == 0) continue;
    for (std::size_t j = 0; j <= t.ncols; ++j)
      if (t.rows[i][j] != 0) r[j] -= cb * t.rows[i][j];
  }
  return r;
}

}  // namespace detail

// Exact primal simplex.  Deterministic; throws CapError past 4096 variables
// or constraints and std::logic_error if the solution fails re-verification.
inline LpOutcome solve(const LpProblem& prob) {
  const std::size_t n = prob.objective.size();
  if (prob.bounds.size() != n)
    throw std::invalid_argument("lp: bounds/objective size mismatch");
  if (n > kMaxLpSize || prob.constraints.size() > kMaxLpSize)
    throw CapError("lp: more than " + std::to_string(kMaxLpSize) + " variables or constraints");
  for (const LinearConstraint& c : prob.constraints)
    if (c.coeffs.size() != n) throw std::invalid_argument("lp: constraint arity mismatch");

  // Shift/split every variable onto [0, inf).
  enum class VKind { LowerShift, UpperShift, Split };
  struct VMap {
    VKind kind;
    std::size_t col = 0, col2 = 0;
    Rat shift;
  };
  std::vector<VMap> vmap(n);
  std::size_t ntrans = 0;
  struct CoreRow {
    std::vector<Rat> a;
    Rel rel;
    Rat rhs;
  };
  std::vector<CoreRow> core;
  std::vector<std::pair<std::size_t, Rat>> range_rows;  // (trans col, width) for two-sided bounds
  for (std::size_t j = 0; j < n; ++j) {
    const VarBounds& b = prob.bounds[j];
    if (b.lower && b.upper && *b.upper < *b.lower) return LpInfeasible{};
    if (b.lower) {
      vmap[j] = VMap{VKind::LowerShift, ntrans++, 0, *b.lower};
      if (b.upper) range_rows.emplace_back(vmap[j].col, *b.upper - *b.lower);
    } else if (b.upper) {
      vmap[j] = VMap{VKind::UpperShift, ntrans++, 0, *b.upper};
    } else {
      vmap[j] = VMap{VKind::Split, ntrans, ntrans + 1, Rat(0)};
      ntrans += 2;
    }
  }
  for (const auto& [col, width] : range_rows) {
    CoreRow row;
    row.a.assign(ntrans, Rat(0));
    row.a[col] = 1;
    row.rel = Rel::Le;
    row.rhs = width;
    core.push_back(std::move(row));
  }
  for (const LinearConstraint& c : prob.constraints) {
    CoreRow row;
    row.a.assign(ntrans, Rat(0));
    row.rel = c.rel;
    row.rhs = c.rhs;
    for (std::size_t j = 0; j < n; ++j) {
      if (c.coeffs[j] == 0) continue;
      switch (vmap[j].kind) {
        case VKind::LowerShift:
          row.a[vmap[j].col] += c.coeffs[j];
          row.rhs -= c.coeffs[j] * vmap[j].shift;
          break;
        case VKind::UpperShift:
          row.a[vmap[j].col] -= c.coeffs[j];
          row.rhs -= c.coeffs[j] * vmap[j].shift;
          break;
        case VKind::Split:
          row.a[vmap[j].col] += c.coeffs[j];
          row.a[vmap[j].col2] -= c.coeffs[j];
          break;
      }
    }
    core.push_back(std::move(row));
  }

  // Normalize rhs >= 0, then append slack / surplus / artificial columns.
  const std::size_t m = core.size();
  for (CoreRow& row : core) {
    if (row.rhs < 0) {
      for (Rat& v : row.a) v = -v;
      row.rhs = -row.rhs;
      row.rel = row.rel == Rel::Le ? Rel::Ge : (row.rel == Rel::Ge ? Rel::Le : Rel::Eq);
    }
  }
  std::size_t nslack = 0, nart = 0;
  for (const CoreRow& row : core) {
    if (row.rel != Rel::Eq) ++nslack;
    if (row.rel != Rel::Le) ++nart;
  }
  detail::Tableau t;
  t.ncols = ntrans + nslack + nart;
  t.rows.assign(m, std::vector<Rat>(t.ncols + 1, Rat(0)));
  t.basis.assign(m, 0);
  std::vector<bool> artificial(t.ncols, false);
  {
    std::size_t next_slack = ntrans, next_art = ntrans + nslack;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < ntrans; ++j) t.rows[i][j] = core[i].a[j];
      t.rows[i][t.ncols] = core[i].rhs;
      if (core[i].rel == Rel::Le) {
        t.rows[i][next_slack] = 1;
        t.basis[i] = next_slack++;
      } else if (core[i].rel == Rel::Ge) {
        t.rows[i][next_slack++] = -1;
        t.rows[i][next_art] = 1;
        artificial[next_art] = true;
        t.basis[i] = next_art++;
      } else {
        t.rows[i][next_art] = 1;
        artificial[next_art] = true;
        t.basis[i] = next_art++;
      }
    }
  }

  const std::vector<bool> none(t.ncols, false);
  if (nart > 0) {
    std::vector<Rat> phase1(t.ncols + 1, Rat(0));
    for (std::size_t j = 0; j < t.ncols; ++j)
      if (artificial[j]) phase1[j] = -1;
    std::vector<Rat> r = detail::reduced_costs(t, phase1);
    if (!t.optimize(r, none)) throw std::logic_error("lp: phase 1 unbounded");
    Rat infeas(0);
    for (std::size_t i = 0; i < m; ++i)
      if (artificial[t.basis[i]]) infeas += t.rows[i][t.ncols];
    if (infeas > 0) return LpInfeasible{};
    // Pivot lingering (degenerate) artificials out; drop redundant rows.
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (!artificial[t.basis[i]]) {
        keep.push_back(i);
        continue;
      }
      std::size_t enter = t.ncols;
      for (std::size_t j = 0; j < t.ncols; ++j)
        if (!artificial[j] && t.rows[i][j] != 0) {
          enter = j;
          break;
        }
      if (enter == t.ncols) continue;  // all-zero row: redundant
      std::vector<Rat> dummy(t.ncols + 1, Rat(0));
      t.pivot(i, enter, dummy);
      keep.push_back(i);
    }
    if (keep.size() != t.rows.size()) {
      std::vector<std::vector<Rat>> rows2;
      std::vector<std::size_t> basis2;
      for (std::size_t i : keep) {
        rows2.push_back(std::move(t.rows[i]));
        basis2.push_back(t.basis[i]);
      }
      t.rows = std::move(rows2);
      t.basis = std::move(basis2);
    }
  }

  std::vector<Rat> cost(t.ncols + 1, Rat(0));
  for (std::size_t j = 0; j < n; ++j) {
    const Rat cj = prob.maximize ? prob.objective[j] : -prob.objective[j];
    if (cj == 0) continue;
    switch (vmap[j].kind) {
      case VKind::LowerShift:
        cost[vmap[j].col] += cj;
        break;
      case VKind::UpperShift:
        cost[vmap[j].col] -= cj;
        break;
      case VKind::Split:
        cost[vmap[j].col] += cj;
        cost[vmap[j].col2] -= cj;
        break;
    }
  }
  std::vector<Rat> r = detail::reduced_costs(t, cost);
  if (!t.optimize(r, artificial)) return LpUnbounded{};

  std::vector<Rat> trans(t.ncols, Rat(0));
  for (std::size_t i = 0; i < t.rows.size(); ++i) trans[t.basis[i]] = t.rows[i][t.ncols];
  std::vector<Rat> x(n);
  for (std::size_t j = 0; j < n; ++j) {
    switch (vmap[j].kind) {
      case VKind::LowerShift:
        x[j] = vmap[j].shift + trans[vmap[j].col];
        break;
      case VKind::UpperShift:
        x[j] = vmap[j].shift - trans[vmap[j].col];
        break;
      case VKind::Split:
        x[j] = trans[vmap[j].col] - trans[vmap[j].col2];
        break;
    }
  }

  // Exact re-verification of the returned witness.
  for (std::size_t j = 0; j < n; ++j) {
    if (prob.bounds[j].lower && x[j] < *prob.bounds[j].lower)
      throw std::logic_error("lp: solution violates a lower bound");
    if (prob.bounds[j].upper && x[j] > *prob.bounds[j].upper)
      throw std::logic_error("lp: solution violates an upper bound");
  }
  for (const LinearConstraint& c : prob.constraints) {
    Rat lhs(0);
    for (std::size_t j = 0; j < n; ++j)
      if (c.coeffs[j] != 0) lhs += c.coeffs[j] * x[j];
    const bool ok = c.rel == Rel::Le ? lhs <= c.rhs : (c.rel == Rel::Ge ? lhs >= c.rhs : lhs == c.rhs);
    if (!ok) throw std::logic_error("lp: solution violates a constraint");
  }
  Rat value(0);
  for (std::size_t j = 0; j < n; ++j)
    if (prob.objective[j] != 0) value += prob.objective[j] * x[j];
  return LpOptimal{value, std::move(x)};
}

// One closed half-space a·z <= rhs (interpreted strictly, a·z < rhs, when
// passed in the `strict` list below).
struct HalfSpace {
  std::vector<Rat> coeffs;
  Rat rhs;
};

// Decides whether some z satisfies every weak constraint and every strict
// constraint strictly, by maximizing a single slack added to all strict
// rows.  Returns a witness (re-verified exactly) or nullopt.
inline std::optional<std::vector<Rat>> strict_feasible(std::size_t nvars,
                                                       const std::vector<HalfSpace>& weak,
                                                       const std::vector<HalfSpace>& strict,
                                                       bool cap_slack = false) {
  LpProblem prob;
  prob.maximize = true;
  prob.objective.assign(nvars + 1, Rat(0));
  prob.objective[nvars] = 1;  // the slack
  prob.bounds.assign(nvars, free_var());
  prob.bounds.push_back(cap_slack ? boxed_var(Rat(0), Rat(1)) : VarBounds{Rat(0), std::nullopt});
  for (const HalfSpace& h : weak) {
    LinearConstraint c;
    c.coeffs = h.coeffs;
    c.coeffs.resize(nvars + 1, Rat(0));
    c.rel = Rel::Le;
    c.rhs = h.rhs;
    prob.constraints.push_back(std::move(c));
  }
  for (const HalfSpace& h : strict) {
    LinearConstraint c;
    c.coeffs = h.coeffs;
    c.coeffs.resize(nvars + 1, Rat(0));
    c.coeffs[nvars] = 1;
    c.rel = Rel::Le;
    c.rhs = h.rhs;
    prob.constraints.push_back(std::move(c));
  }
  LpOutcome out = solve(prob);
  if (std::holds_alternative<LpInfeasible>(out)) return std::nullopt;
  if (std::holds_alternative<LpUnbounded>(out)) {
    if (cap_slack) throw std::logic_error("lp: capped slack LP cannot be unbounded");
    return strict_feasible(nvars, weak, strict, /*cap_slack=*/true);
  }
  const LpOptimal& opt = std::get<LpOptimal>(out);
  if (!strict.empty() && opt.value <= 0) return std::nullopt;
  std::vector<Rat> z(opt.point.begin(), opt.point.begin() + nvars);
  for (const HalfSpace& h : weak) {
    Rat lhs(0);
    for (std::size_t j = 0; j < nvars; ++j) lhs += h.coeffs[j] * z[j];
    if (!(lhs <= h.rhs)) throw std::logic_error("strict_feasible: weak constraint violated");
  }
  for (const HalfSpace& h : strict) {
    Rat lhs(0);
    for (std::size_t j = 0; j < nvars; ++j) lhs += h.coeffs[j] * z[j];
    if (!(lhs < h.rhs)) throw std::logic_error("strict_feasible: strict constraint not strict");
  }
  return z;
}

}  // namespace mechlab::lp
