#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <vector>

#include "mechlab/lp.hpp"
#include "test_util.hpp"

using namespace mechlab;
using lp::LinearConstraint;
using lp::LpOptimal;
using lp::LpOutcome;
using lp::LpProblem;
using lp::Rel;

using testutil::vertex_oracle;

TEST_CASE("simplex solves hand-checked programs") {
  SECTION("max x + y, x + y <= 1, box [0,1]^2") {
    LpProblem p;
    p.objective = {Rat(1), Rat(1)};
    p.bounds = {lp::boxed_var(Rat(0), Rat(1)), lp::boxed_var(Rat(0), Rat(1))};
    p.constraints.push_back({{Rat(1), Rat(1)}, Rel::Le, Rat(1)});
    const auto out = lp::solve(p);
    REQUIRE(std::holds_alternative<LpOptimal>(out));
    CHECK(std::get<LpOptimal>(out).value == 1);
  }
  SECTION("minimization with equality rows") {
    LpProblem p;
    p.maximize = false;
    p.objective = {Rat(2), Rat(3)};
    p.bounds = {lp::nonneg_var(), lp::nonneg_var()};
    p.constraints.push_back({{Rat(1), Rat(1)}, Rel::Eq, Rat(4)});
    p.constraints.push_back({{Rat(1), Rat(0)}, Rel::Ge, Rat(1)});
    const auto out = lp::solve(p);
    REQUIRE(std::holds_alternative<LpOptimal>(out));
    CHECK(std::get<LpOptimal>(out).value == 2 * 4);  // all mass on the cheap var
  }
  SECTION("free variables may go negative") {
    LpProblem p;
    p.maximize = false;
    p.objective = {Rat(1)};
    p.bounds = {lp::free_var()};
    p.constraints.push_back({{Rat(1)}, Rel::Ge, Rat(-5)});
    const auto out = lp::solve(p);
    REQUIRE(std::holds_alternative<LpOptimal>(out));
    CHECK(std::get<LpOptimal>(out).value == -5);
  }
  SECTION("unbounded detection") {
    LpProblem p;
    p.objective = {Rat(1)};
    p.bounds = {lp::nonneg_var()};
    CHECK(std::holds_alternative<lp::LpUnbounded>(lp::solve(p)));
  }
  SECTION("infeasible detection") {
    LpProblem p;
    p.objective = {Rat(1)};
    p.bounds = {lp::nonneg_var()};
    p.constraints.push_back({{Rat(1)}, Rel::Le, Rat(-1)});
    CHECK(std::holds_alternative<lp::LpInfeasible>(lp::solve(p)));
  }
  SECTION("degenerate ties do not cycle") {
    LpProblem p;
    p.objective = {Rat(1), Rat(1), Rat(1)};
    p.bounds.assign(3, lp::nonneg_var());
    p.constraints.push_back({{Rat(1), Rat(1), Rat(0)}, Rel::Le, Rat(0)});
    p.constraints.push_back({{Rat(0), Rat(1), Rat(1)}, Rel::Le, Rat(0)});
    p.constraints.push_back({{Rat(1), Rat(0), Rat(1)}, Rel::Le, Rat(0)});
    const auto out = lp::solve(p);
    REQUIRE(std::holds_alternative<LpOptimal>(out));
    CHECK(std::get<LpOptimal>(out).value == 0);
  }
}

TEST_CASE("simplex agrees with exhaustive vertex enumeration on boxed programs") {
  testutil::Rng rng(20260815);
  int infeasible_seen = 0;
  for (int t = 0; t < 120; ++t) {
    const std::size_t n = 2 + std::size_t(rng.uniform(0, 1));
    LpProblem p;
    p.maximize = rng.uniform(0, 1) == 0;
    for (std::size_t j = 0; j < n; ++j) {
      p.objective.push_back(Rat(rng.uniform(-4, 4)));
      p.bounds.push_back(lp::boxed_var(Rat(rng.uniform(-2, 0)), Rat(rng.uniform(1, 3))));
    }
    const int rows = int(rng.uniform(1, 4));
    for (int r = 0; r < rows; ++r) {
      LinearConstraint c;
      for (std::size_t j = 0; j < n; ++j) c.coeffs.push_back(Rat(rng.uniform(-3, 3)));
      c.rel = rng.uniform(0, 3) == 0 ? Rel::Ge : Rel::Le;
      c.rhs = Rat(rng.uniform(-2, 4));
      p.constraints.push_back(std::move(c));
    }
    const auto oracle = vertex_oracle(p);
    const LpOutcome out = lp::solve(p);
    if (!oracle) {
      ++infeasible_seen;
      CHECK(std::holds_alternative<lp::LpInfeasible>(out));
      continue;
    }
    REQUIRE(std::holds_alternative<LpOptimal>(out));
    const LpOptimal& opt = std::get<LpOptimal>(out);
    CHECK(opt.value == *oracle);
    // The returned point must itself attain the claimed value.
    Rat at(0);
    for (std::size_t j = 0; j < n; ++j) at += p.objective[j] * opt.point[j];
    CHECK(at == opt.value);
  }
  CHECK(infeasible_seen > 0);  // the sweep exercises both verdicts
}

TEST_CASE("strict feasibility decisions") {
  using lp::HalfSpace;
  SECTION("open interval (0, 1) is nonempty") {
    // -z < 0 and z < 1
    const auto z = lp::strict_feasible(1, {}, {{{Rat(-1)}, Rat(0)}, {{Rat(1)}, Rat(1)}});
    REQUIRE(z.has_value());
    CHECK((*z)[0] > 0);
    CHECK((*z)[0] < 1);
  }
  SECTION("z < 1 and -z < -1 is empty") {
    CHECK_FALSE(lp::strict_feasible(1, {}, {{{Rat(1)}, Rat(1)}, {{Rat(-1)}, Rat(-1)}}));
  }
  SECTION("weak equality pinning with a strict side") {
    // z <= 1, -z <= -1 (so z = 1), and strictly z < 2: feasible at z = 1.
    const auto z = lp::strict_feasible(1, {{{Rat(1)}, Rat(1)}, {{Rat(-1)}, Rat(-1)}},
                                       {{{Rat(1)}, Rat(2)}});
    REQUIRE(z.has_value());
    CHECK((*z)[0] == 1);
  }
  SECTION("pinning against the strict side is infeasible") {
    CHECK_FALSE(lp::strict_feasible(1, {{{Rat(1)}, Rat(1)}, {{Rat(-1)}, Rat(-1)}},
                                    {{{Rat(1)}, Rat(1)}}));
  }
  SECTION("no strict rows reduces to weak feasibility") {
    CHECK(lp::strict_feasible(1, {{{Rat(1)}, Rat(5)}}, {}).has_value());
    CHECK_FALSE(lp::strict_feasible(1, {{{Rat(1)}, Rat(0)}, {{Rat(-1)}, Rat(-1)}}, {}));
  }
  SECTION("unbounded slack direction still yields a witness") {
    // -z < 0 alone: slack can grow without bound; the capped retry must
    // still return some strictly positive z.
    const auto z = lp::strict_feasible(1, {}, {{{Rat(-1)}, Rat(0)}});
    REQUIRE(z.has_value());
    CHECK((*z)[0] > 0);
  }
}

TEST_CASE("strict feasibility agrees with a perturbation oracle on random systems") {
  using lp::HalfSpace;
  testutil::Rng rng(99);
  for (int t = 0; t < 80; ++t) {
    const std::size_t n = 2;
    std::vector<HalfSpace> weak, strict;
    // Box to keep everything bounded, as weak rows.
    for (std::size_t j = 0; j < n; ++j) {
      HalfSpace lo, hi;
      lo.coeffs.assign(n, Rat(0));
      hi.coeffs.assign(n, Rat(0));
      lo.coeffs[j] = -1;
      lo.rhs = Rat(3);
      hi.coeffs[j] = 1;
      hi.rhs = Rat(3);
      weak.push_back(lo);
      weak.push_back(hi);
    }
    const int rows = int(rng.uniform(1, 4));
    for (int r = 0; r < rows; ++r) {
      HalfSpace h;
      for (std::size_t j = 0; j < n; ++j) h.coeffs.push_back(Rat(rng.uniform(-2, 2)));
      h.rhs = Rat(rng.uniform(-2, 2));
      (rng.uniform(0, 1) == 0 ? weak : strict).push_back(h);
    }
    // Oracle: strict system nonempty iff max of min strict slack > 0 over the
    // weak region; reformulated as the same slack LP but solved by the
    // vertex oracle (all variables boxed by construction).
    LpProblem p;
    p.maximize = true;
    p.objective.assign(n + 1, Rat(0));
    p.objective[n] = 1;
    for (std::size_t j = 0; j < n; ++j) p.bounds.push_back(lp::boxed_var(Rat(-3), Rat(3)));
    p.bounds.push_back(lp::boxed_var(Rat(0), Rat(1)));
    for (const HalfSpace& h : weak) {
      LinearConstraint c;
      c.coeffs = h.coeffs;
      c.coeffs.push_back(Rat(0));
      c.rel = Rel::Le;
      c.rhs = h.rhs;
      p.constraints.push_back(std::move(c));
    }
    for (const HalfSpace& h : strict) {
      LinearConstraint c;
      c.coeffs = h.coeffs;
      c.coeffs.push_back(Rat(1));
      c.rel = Rel::Le;
      c.rhs = h.rhs;
      p.constraints.push_back(std::move(c));
    }
    const auto oracle = vertex_oracle(p);
    const bool oracle_feasible = oracle && (strict.empty() || *oracle > 0);
    const auto z = lp::strict_feasible(n, weak, strict);
    CHECK(z.has_value() == oracle_feasible);
  }
}
