#pragma once

// Quadratic mechanisms: exact positive-definite linear algebra, the
// truncated quadratic menu (allocation, payment, payoff), necessary-
// condition screens on A and its inverse, and the piecewise payoff
// function of the two-good separably-superadditive counterexample.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json_io.hpp"
#include "model.hpp"
#include "rational.hpp"

namespace mechlab {

using Matrix = std::vector<std::vector<Rat>>;

// Truncated quadratic mechanism data: symmetric positive definite A and a
// positive truncation vector v with A·v ≤ e (so allocations stay in [0,1]).
struct QuadSpec {
  Matrix A;
  std::vector<Rat> v;
  int k() const { return static_cast<int>(v.size()); }
};

namespace detail {

// Exact determinant by fraction-free-enough Gaussian elimination on Rat.
inline Rat det(Matrix m) {
  const std::size_t n = m.size();
  Rat result(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) return Rat(0);
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      result = -result;
    }
    result *= m[col][col];
    for (std::size_t row = col + 1; row < n; ++row) {
      if (m[row][col] == 0) continue;
      const Rat factor = m[row][col] / m[col][col];
      for (std::size_t j = col; j < n; ++j) m[row][j] -= factor * m[col][j];
    }
  }
  return result;
}

inline Matrix leading_block(const Matrix& a, std::size_t m) {
  Matrix b(m, std::vector<Rat>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) b[i][j] = a[i][j];
  return b;
}

}  // namespace detail

inline bool matrix_symmetric(const Matrix& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != a.size()) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (a[i][j] != a[j][i]) return false;
  }
  return true;
}

// Sylvester test: all leading principal minors strictly positive, exactly.
inline bool matrix_positive_definite(const Matrix& a) {
  if (!matrix_symmetric(a)) return false;
  for (std::size_t m = 1; m <= a.size(); ++m)
    if (!(detail::det(detail::leading_block(a, m)) > 0)) return false;
  return true;
}

inline void validate_quad_spec(const QuadSpec& spec) {
  const std::size_t k = spec.v.size();
  if (k == 0 || spec.A.size() != k) throw InputError("quad: A and v dimensions disagree");
  for (const auto& row : spec.A)
    if (row.size() != k) throw InputError("quad: A is not square");
  if (!matrix_symmetric(spec.A)) throw InputError("quad: A is not symmetric");
  if (!matrix_positive_definite(spec.A)) throw InputError("quad: A is not positive definite");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(spec.v[i] > 0)) throw InputError("quad: v must be strictly positive");
    Rat row(0);
    for (std::size_t j = 0; j < k; ++j) row += spec.A[i][j] * spec.v[j];
    if (!(row <= 1)) throw InputError("quad: A·v exceeds the all-ones vector");
  }
}

// Exact inverse of a symmetric positive definite matrix (Gauss-Jordan),
// verified by multiplying back to the identity.
inline Matrix invert_pd(const Matrix& a) {
  if (!matrix_symmetric(a)) throw InputError("invert_pd: matrix is not symmetric");
  if (!matrix_positive_definite(a)) throw InputError("invert_pd: matrix is not positive definite");
  const std::size_t n = a.size();
  Matrix work = a, inv(n, std::vector<Rat>(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (work[pivot][col] == 0) ++pivot;  // PD ensures a pivot exists
    std::swap(work[pivot], work[col]);
    std::swap(inv[pivot], inv[col]);
    const Rat d = work[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      work[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || work[row][col] == 0) continue;
      const Rat factor = work[row][col];
      for (std::size_t j = 0; j < n; ++j) {
        work[row][j] -= factor * work[col][j];
        inv[row][j] -= factor * inv[col][j];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Rat cell(0);
      for (std::size_t l = 0; l < n; ++l) cell += a[i][l] * inv[l][j];
      if (cell != Rat(i == j ? 1 : 0)) throw std::logic_error("invert_pd: A·A⁻¹ != I");
    }
  return inv;
}

struct QuadEval {
  Allocation q;
  Rat payment;  // s(x) = q(x)·x − b(x)
  Rat payoff;   // b(x), the buyer's payoff at x
};

// Truncated quadratic menu outcome at x ≥ 0: with x̃ = x ∧ v, allocate
// q_i = (A·x̃)_i below the cap and 1 at or above it; the payoff is
// b(x) = ½x̃ᵀAx̃ + Σ_i [x_i − v_i]₊ and the payment is q(x)·x − b(x).
inline QuadEval quad_eval(const QuadSpec& spec, const Valuation& x) {
  validate_quad_spec(spec);
  const int k = spec.k();
  if (static_cast<int>(x.coords.size()) != k) throw InputError("quad_eval: dimension mismatch");
  std::vector<Rat> xt(k);
  for (int i = 0; i < k; ++i) {
    if (x.coords[i] < 0) throw InputError("quad_eval: x must be nonnegative");
    xt[i] = x.coords[i] < spec.v[i] ? x.coords[i] : spec.v[i];
  }
  QuadEval out;
  out.q.coords.assign(k, Rat(0));
  Rat b(0);
  for (int i = 0; i < k; ++i) {
    Rat ax(0);
    for (int j = 0; j < k; ++j) ax += spec.A[i][j] * xt[j];
    out.q.coords[i] = x.coords[i] < spec.v[i] ? ax : Rat(1);
    b += ax * xt[i];
    if (x.coords[i] > spec.v[i]) b += 2 * (x.coords[i] - spec.v[i]);
  }
  b /= 2;
  out.payoff = b;
  Rat qx(0);
  for (int i = 0; i < k; ++i) qx += out.q.coords[i] * x.coords[i];
  out.payment = qx - b;
  return out;
}

// Payoff alone (the b above), usable on its own for grid convexity checks.
inline Rat quad_b(const QuadSpec& spec, const Valuation& x) { return quad_eval(spec, x).payoff; }

// Bundle price over the allocation space: p(g) = ½gᵀA⁻¹g, with A⁻¹ given.
inline Rat quad_alloc_price(const Matrix& ainv, const std::vector<Rat>& g) {
  const std::size_t n = ainv.size();
  if (g.size() != n) throw InputError("quad_alloc_price: dimension mismatch");
  Rat out(0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out += g[i] * ainv[i][j] * g[j];
  return out / 2;
}

struct ScreenEntry {
  int i = 0, j = 0;  // 1-based row/column
  Rat value;
};

struct QuadScreens {
  bool amon_necessary = true;  // all off-diagonal entries of A nonnegative
  bool subm_necessary = true;  // all off-diagonal entries of A⁻¹ nonpositive
  std::vector<ScreenEntry> amon_offenders;  // negative A entries, i < j
  std::vector<ScreenEntry> subm_offenders;  // positive A⁻¹ entries, i < j
};

inline QuadScreens quad_screens(const QuadSpec& spec) {
  validate_quad_spec(spec);
  const Matrix ainv = invert_pd(spec.A);
  QuadScreens out;
  const int k = spec.k();
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      if (spec.A[i][j] < 0) {
        out.amon_necessary = false;
        out.amon_offenders.push_back({i + 1, j + 1, spec.A[i][j]});
      }
      if (ainv[i][j] > 0) {
        out.subm_necessary = false;
        out.subm_offenders.push_back({i + 1, j + 1, ainv[i][j]});
      }
    }
  return out;
}

// The two-good payoff that is nondecreasing, nonexpansive, convex, and
// separably superadditive but not supermodular: b(x) = [f(x̃)]₊ +
// [x₁−1]₊ + [x₂−1]₊ with f(x) = (x₁²+x₂²+x₁+x₂−x₁x₂−2)/3 and x̃ = x ∧ 1.
inline Rat subadd_not_am_b(const Valuation& x) {
  if (x.coords.size() != 2) throw InputError("subadd_not_am_b: needs two goods");
  const Rat one(1);
  const Rat x1 = x.coords[0] < one ? x.coords[0] : one;
  const Rat x2 = x.coords[1] < one ? x.coords[1] : one;
  const Rat f = (x1 * x1 + x2 * x2 + x1 + x2 - x1 * x2 - 2) / 3;
  Rat b = f > 0 ? f : Rat(0);
  if (x.coords[0] > one) b += x.coords[0] - one;
  if (x.coords[1] > one) b += x.coords[1] - one;
  return b;
}

// ----- JSON views -----

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix: expected a nonempty array of rows");
  Matrix a;
  for (const Json& row : j) {
    if (!row.is_array()) throw InputError("matrix: row is not an array");
    std::vector<Rat> r;
    for (const Json& cell : row) r.push_back(rat_from_json(cell, "matrix entry"));
    a.push_back(std::move(r));
  }
  return a;
}

inline Json matrix_to_json(const Matrix& a) {
  Json rows = Json::array();
  for (const auto& row : a) rows.push_back(rat_vector_to_json(row));
  return rows;
}

inline QuadSpec quad_spec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("A") || !j.contains("v"))
    throw InputError("quad spec: expected {\"A\":…, \"v\":…}");
  QuadSpec spec;
  spec.A = matrix_from_json(j.at("A"));
  if (!j.at("v").is_array()) throw InputError("quad spec: v is not an array");
  for (const Json& cell : j.at("v")) spec.v.push_back(rat_from_json(cell, "v entry"));
  validate_quad_spec(spec);
  return spec;
}

inline Json quad_spec_to_json(const QuadSpec& spec) {
  return Json{{"A", matrix_to_json(spec.A)}, {"v", rat_vector_to_json(spec.v)}};
}

inline Json quad_screens_to_json(const QuadScreens& s) {
  const auto entries = [](const std::vector<ScreenEntry>& v) {
    Json arr = Json::array();
    for (const ScreenEntry& e : v)
      arr.push_back(Json{{"i", e.i}, {"j", e.j}, {"value", rat_to_json(e.value)}});
    return arr;
  };
  return Json{{"amon_necessary", s.amon_necessary},
              {"amon_offenders", entries(s.amon_offenders)},
              {"subm_necessary", s.subm_necessary},
              {"subm_offenders", entries(s.subm_offenders)}};
}

// The three-good counterexample spec used throughout tests and scenarios.
inline QuadSpec quad_counterexample_spec() {
  QuadSpec spec;
  spec.A = {{Rat(6), Rat(3), Rat(1)}, {Rat(3), Rat(6), Rat(3)}, {Rat(1), Rat(3), Rat(6)}};
  spec.v = {Rat(1, 15), Rat(1, 15), Rat(1, 15)};
  return spec;
}

}  // namespace mechlab
