// Payment-monotonicity machinery: hand traces on the two-good example
// pricings, the exact alternative between a feasible z-system and a Motzkin
// certificate on random pricings, independent witness replays, and the
// grid / structured-search refutation oracles.
#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "mechlab/monotone.hpp"
#include "mechlab/scenarios.hpp"
#include "test_util.hpp"

using namespace mechlab;

namespace {

// The z-system of an incomparable pair (a, b) with finite p(a) > p(b),
// rebuilt from its definition: z over the goods of a\b with
//   z(C) >= p(a) - p(a\C)        for every nonempty C subseteq a\b,
//   z(C) <  p(b|C) - p(b)        for every such C with p(b|C) finite.
struct ZSystem {
  std::vector<int> goods;  // 0-based, ascending
  std::vector<lp::HalfSpace> weak, strict;
};

ZSystem z_system(const DetPricing& p, Mask a, Mask b) {
  ZSystem sys;
  const Mask diff = a & ~b;
  for (int g = 0; g < p.k; ++g)
    if (diff & (Mask(1) << g)) sys.goods.push_back(g);
  const auto var_of = [&](int good) {
    return std::size_t(std::lower_bound(sys.goods.begin(), sys.goods.end(), good) -
                       sys.goods.begin());
  };
  for (Mask c = 1; c <= diff; ++c) {
    if ((c & diff) != c) continue;
    lp::HalfSpace lo;  // -z(C) <= -(p(a) - p(a\C))
    lo.coeffs.assign(sys.goods.size(), Rat(0));
    for (int g = 0; g < p.k; ++g)
      if (c & (Mask(1) << g)) lo.coeffs[var_of(g)] = -1;
    lo.rhs = -(p.at(a).finite() - p.at(a & ~c).finite());
    sys.weak.push_back(std::move(lo));
    if (!p.at(b | c).is_inf()) {
      lp::HalfSpace hi;  // z(C) < p(b|C) - p(b)
      hi.coeffs.assign(sys.goods.size(), Rat(0));
      for (int g = 0; g < p.k; ++g)
        if (c & (Mask(1) << g)) hi.coeffs[var_of(g)] = 1;
      hi.rhs = p.at(b | c).finite() - p.at(b).finite();
      sys.strict.push_back(std::move(hi));
    }
  }
  return sys;
}

// Builds the violating valuation pair from a feasible z and replays it on
// the expanded menu: x <= y coordinatewise yet the buyer at x pays more.
void replay_z_witness(const DetPricing& p, Mask a, Mask b, const ZSystem& sys,
                      const std::vector<Rat>& z) {
  Rat max_price(0), zsum(0);
  for (const ExtPrice& e : p.prices)
    if (!e.is_inf()) max_price = std::max(max_price, e.finite());
  for (const Rat& v : z) zsum += abs(v);
  const Rat big = 1 + max_price + zsum;
  Valuation x, y;
  x.coords.assign(p.k, Rat(0));
  y.coords.assign(p.k, Rat(0));
  for (std::size_t j = 0; j < sys.goods.size(); ++j)
    x.coords[std::size_t(sys.goods[j])] = y.coords[std::size_t(sys.goods[j])] = z[j];
  for (int g = 0; g < p.k; ++g) {
    if ((a & b) & (Mask(1) << g)) x.coords[std::size_t(g)] = y.coords[std::size_t(g)] = big;
    if ((b & ~a) & (Mask(1) << g)) y.coords[std::size_t(g)] = big;
  }
  REQUIRE(dominated_by(x, y));
  const Menu menu = menu_from_det_pricing(p);
  const Rat pay_x = menu.entries[buyer_choice(menu, x, TieRule::IndexConsistent).chosen].price;
  const Rat pay_y = menu.entries[buyer_choice(menu, y, TieRule::IndexConsistent).chosen].price;
  CHECK(pay_x > pay_y);
}

void require_valid_certificate(const DetPricing& p, const PairCertificate& cert) {
  const Mask diff = cert.a & ~cert.b;
  REQUIRE(diff != 0);
  REQUIRE_FALSE(cert.lambda.empty());
  REQUIRE_FALSE(cert.mu.empty());
  for (const auto& [c, r] : cert.lambda) {
    REQUIRE(c != 0);
    REQUIRE(subset_of(c, diff));
    REQUIRE(r > 0);
  }
  for (const auto& [c, r] : cert.mu) {
    REQUIRE(c != 0);
    REQUIRE(subset_of(c, diff));
    REQUIRE(r > 0);
    REQUIRE_FALSE(p.at(cert.b | c).is_inf());
  }
  for (int g = 0; g < p.k; ++g) {
    if (!(diff & (Mask(1) << g))) continue;
    Rat lhs(0), rhs(0);
    for (const auto& [c, r] : cert.lambda)
      if (c & (Mask(1) << g)) lhs += r;
    for (const auto& [c, r] : cert.mu)
      if (c & (Mask(1) << g)) rhs += r;
    CHECK(lhs == rhs);  // per-good balance of the multipliers
  }
  Rat value(0);
  for (const auto& [c, r] : cert.lambda) value += r * (p.at(cert.a).finite() - p.at(cert.a & ~c).finite());
  for (const auto& [c, r] : cert.mu) value -= r * (p.at(cert.b | c).finite() - p.at(cert.b).finite());
  CHECK(value >= 0);
}

}  // namespace

TEST_CASE("two-good example pricings: hand-traced verdicts") {
  SECTION("additive-gap pricing is not payment monotone") {
    const DetPricing p = fig1_left_pricing();  // (0, 1, 2, 4)
    const MonotonicityVerdict verdict = check_det_monotonic(p);
    REQUIRE_FALSE(verdict.monotonic);
    REQUIRE(verdict.witness.has_value());
    const MonotoneWitness& w = *verdict.witness;
    CHECK(w.a == Mask(2));
    CHECK(w.b == Mask(1));
    REQUIRE(w.z.size() == 1);
    CHECK(w.z[0].first == 2);  // 1-based good
    CHECK(w.z[0].second >= 2);
    CHECK(w.z[0].second < 3);
    // Slack maximization lands on the lower end of [2, 3).
    CHECK(w.z[0].second == 2);
    CHECK(w.x.coords == std::vector<Rat>{Rat(0), Rat(2)});
    CHECK(w.y.coords == std::vector<Rat>{Rat(7), Rat(2)});
    CHECK(w.pay_x == 2);
    CHECK(w.pay_y == 1);
    CHECK(verdict.certificates.empty());
    // The same pair violates payment monotonicity under buyer-favorable
    // tie-breaking as well.
    const Menu menu = menu_from_det_pricing(p);
    CHECK(menu.entries[buyer_choice(menu, w.x, TieRule::BuyerFavorable).chosen].price == 2);
    CHECK(menu.entries[buyer_choice(menu, w.y, TieRule::BuyerFavorable).chosen].price == 1);
  }
  SECTION("equal singleton prices leave no pair to scan") {
    const DetPricing p = fig1_right_pricing();  // (0, 1, 1, 4)
    const MonotonicityVerdict verdict = check_det_monotonic(p);
    CHECK(verdict.monotonic);
    CHECK(verdict.certificates.empty());
  }
  SECTION("submodular pricing certifies through the fast path") {
    const DetPricing p = fig1_bottom_pricing();  // (0, 3/2, 2, 3)
    const MonotonicityVerdict verdict = check_det_monotonic(p);
    CHECK(verdict.monotonic);
    REQUIRE(verdict.certificates.size() == 1);
    const PairCertificate& cert = verdict.certificates[0];
    CHECK(cert.a == Mask(2));
    CHECK(cert.b == Mask(1));
    CHECK(cert.lambda == std::vector<std::pair<Mask, Rat>>{{Mask(2), Rat(1, 2)}});
    CHECK(cert.mu == std::vector<std::pair<Mask, Rat>>{{Mask(2), Rat(1, 2)}});
    require_valid_certificate(p, cert);
  }
  SECTION("non-nondecreasing pricing is rejected") {
    DetPricing p;
    p.k = 2;
    p.prices = {ExtPrice(Rat(0)), ExtPrice(Rat(2)), ExtPrice(Rat(1)), ExtPrice(Rat(1))};
    CHECK_THROWS_AS(check_det_monotonic(p), InputError);
  }
}

TEST_CASE("pair certificate preconditions") {
  const DetPricing p = fig1_left_pricing();
  CHECK(motzkin_certificate(p, Mask(2), Mask(1)) == std::nullopt);  // z-system feasible
  CHECK_THROWS_AS(motzkin_certificate(p, Mask(3), Mask(1)), InputError);  // comparable
  CHECK_THROWS_AS(motzkin_certificate(p, Mask(1), Mask(2)), InputError);  // p(a) < p(b)
}

TEST_CASE("feasible z-system and Motzkin certificate are exact alternatives") {
  testutil::Rng rng(777);
  int feasible_seen = 0, certified_seen = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + int(trial % 3);
    const DetPricing p = testutil::random_nondecreasing_pricing(rng, k, 5, trial % 2 == 0);
    CAPTURE(trial, det_pricing_to_json(p).dump());
    const Mask nb = Mask(1) << k;
    for (Mask a = 0; a < nb; ++a) {
      if (p.at(a).is_inf()) continue;
      for (Mask b = 0; b < nb; ++b) {
        if (p.at(b).is_inf() || subset_of(a, b) || subset_of(b, a)) continue;
        if (!(p.at(a) > p.at(b))) continue;
        const ZSystem sys = z_system(p, a, b);
        const auto z = lp::strict_feasible(sys.goods.size(), sys.weak, sys.strict);
        const auto cert = motzkin_certificate(p, a, b);
        CAPTURE(a, b);
        REQUIRE(z.has_value() != cert.has_value());
        if (z) {
          ++feasible_seen;
          replay_z_witness(p, a, b, sys, *z);
        } else {
          ++certified_seen;
          require_valid_certificate(p, *cert);
        }
      }
    }
  }
  // The sweep must exercise both sides of the alternative.
  CHECK(feasible_seen > 0);
  CHECK(certified_seen > 0);
}

TEST_CASE("full verdicts on random pricings") {
  testutil::Rng rng(31337);
  int monotonic_seen = 0, violated_seen = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + int(trial % 3);
    const DetPricing p = testutil::random_nondecreasing_pricing(rng, k, 5, trial % 3 == 0);
    CAPTURE(trial, det_pricing_to_json(p).dump());
    const MonotonicityVerdict verdict = check_det_monotonic(p);
    const MonotonicityVerdict wide = check_det_monotonic(p, MonotoneScope::AllSubsets);
    CHECK(verdict.monotonic == wide.monotonic);
    if (verdict.monotonic) {
      ++monotonic_seen;
      for (const PairCertificate& cert : verdict.certificates) require_valid_certificate(p, cert);
      CHECK(check_necessary(p) == std::nullopt);  // necessary condition must hold
      if (k == 2) {
        // Grid refutation cannot find a violation on a certified pricing.
        const Menu menu = menu_from_det_pricing(p);
        Rat max_price(0);
        for (const ExtPrice& e : p.prices)
          if (!e.is_inf()) max_price = std::max(max_price, e.finite());
        const auto grid = product_grid(2, step_values(Rat(1, 2), max_price + 1));
        CHECK(grid_oracle(menu, TieRule::IndexConsistent, grid, GridCheck::Payment) ==
              std::nullopt);
      }
    } else {
      ++violated_seen;
      const MonotoneWitness& w = *verdict.witness;
      REQUIRE(dominated_by(w.x, w.y));
      REQUIRE(w.pay_x > w.pay_y);
      // Replay the recorded pair against the menu from scratch.
      const Menu menu = menu_from_det_pricing(p);
      CHECK(menu.entries[buyer_choice(menu, w.x, TieRule::IndexConsistent).chosen].price ==
            w.pay_x);
      CHECK(menu.entries[buyer_choice(menu, w.y, TieRule::IndexConsistent).chosen].price ==
            w.pay_y);
    }
    // Sufficient condition, tested on its own: if restricted submodularity
    // holds the verdict must be monotonic.
    if (!check_sufficient_restricted_submod(p)) CHECK(verdict.monotonic);
    // Necessary condition contrapositive: a counter-triple forces a violation.
    if (check_necessary(p)) CHECK_FALSE(verdict.monotonic);
  }
  CHECK(monotonic_seen > 0);
  CHECK(violated_seen > 0);
}

TEST_CASE("every symmetric pricing is payment monotone") {
  testutil::Rng rng(555);
  for (int trial = 0; trial < 12; ++trial) {
    const int k = 2 + int(trial % 3);
    const SymPricing sym = testutil::random_sym_pricing(rng, k);
    const DetPricing p = det_from_sym(sym);
    CAPTURE(trial, sym_pricing_to_json(sym).dump());
    const MonotonicityVerdict verdict = check_det_monotonic(p);
    CHECK(verdict.monotonic);
  }
}

TEST_CASE("simple sufficient and necessary conditions on the example pricings") {
  SECTION("additive-gap pricing fails both") {
    const DetPricing p = fig1_left_pricing();
    const auto pair = check_sufficient_restricted_submod(p);
    REQUIRE(pair.has_value());
    CHECK(*pair == std::make_pair(Mask(1), Mask(2)));
    const auto triple = check_necessary(p);
    REQUIRE(triple.has_value());
    CHECK(*triple == std::make_tuple(Mask(0), 1, Mask(1)));
  }
  SECTION("equal-singleton pricing passes both") {
    const DetPricing p = fig1_right_pricing();
    CHECK(check_sufficient_restricted_submod(p) == std::nullopt);
    CHECK(check_necessary(p) == std::nullopt);
  }
  SECTION("submodular pricing passes both") {
    const DetPricing p = fig1_bottom_pricing();
    CHECK(check_sufficient_restricted_submod(p) == std::nullopt);
    CHECK(check_necessary(p) == std::nullopt);
  }
}

TEST_CASE("grids and refutation oracles") {
  SECTION("product grid enumerates lexicographically") {
    const auto grid = product_grid(2, {Rat(0), Rat(1)});
    REQUIRE(grid.size() == 4);
    CHECK(grid[0].coords == std::vector<Rat>{Rat(0), Rat(0)});
    CHECK(grid[1].coords == std::vector<Rat>{Rat(0), Rat(1)});
    CHECK(grid[2].coords == std::vector<Rat>{Rat(1), Rat(0)});
    CHECK(grid[3].coords == std::vector<Rat>{Rat(1), Rat(1)});
    CHECK(product_grid({{Rat(0), Rat(1)}, {Rat(0)}, {Rat(2), Rat(3), Rat(4)}}).size() == 6);
    CHECK_THROWS_AS(product_grid(0, {Rat(1)}), InputError);
  }
  SECTION("step values") {
    CHECK(step_values(Rat(1, 2), Rat(2)) ==
          std::vector<Rat>{Rat(0), Rat(1, 2), Rat(1), Rat(3, 2), Rat(2)});
    CHECK(step_values(Rat(3), Rat(2)) == std::vector<Rat>{Rat(0)});
  }
  SECTION("payment violation of the additive-gap pricing on the two-point grid") {
    const Menu menu = menu_from_det_pricing(fig1_left_pricing());
    const Valuation lo{{Rat(1), Rat(23, 10)}}, hi{{Rat(2), Rat(27, 10)}};
    const auto hit = grid_oracle(menu, TieRule::SellerFavorable, {lo, hi}, GridCheck::Payment);
    REQUIRE(hit.has_value());
    CHECK(hit->first.coords == lo.coords);
    CHECK(hit->second.coords == hi.coords);
  }
  SECTION("allocation violation of the supermodular pricing is found structurally") {
    const Menu menu = menu_from_det_pricing(fig1_right_pricing());
    const auto hit = search_allocation_violation(menu);
    REQUIRE(hit.has_value());
    const auto& [x, y] = *hit;
    REQUIRE(dominated_by(x, y));
    const Allocation qx = menu.entries[buyer_choice(menu, x, TieRule::TieFavorable).chosen].alloc;
    const Allocation qy = menu.entries[buyer_choice(menu, y, TieRule::TieFavorable).chosen].alloc;
    CHECK_FALSE(allocation_leq(qx, qy));
  }
  SECTION("submodular pricing has no allocation violation") {
    const Menu menu = menu_from_det_pricing(fig1_bottom_pricing());
    CHECK(search_allocation_violation(menu) == std::nullopt);
  }
}

TEST_CASE("verdict JSON schema") {
  SECTION("violated") {
    const Json j = monotonicity_verdict_to_json(check_det_monotonic(fig1_left_pricing()));
    CHECK(j["status"] == "not-monotonic");
    CHECK(j["pair"] == Json::array({2, 1}));
    CHECK(j["z"]["2"] == "2");
    CHECK(j["x"].is_array());
    CHECK(j["pay_x"] == "2");
    CHECK(j["pay_y"] == "1");
  }
  SECTION("certified") {
    const Json j = monotonicity_verdict_to_json(check_det_monotonic(fig1_bottom_pricing()));
    CHECK(j["status"] == "monotonic");
    REQUIRE(j["certificates"].is_array());
    REQUIRE(j["certificates"].size() == 1);
    CHECK(j["certificates"][0]["pair"] == Json::array({2, 1}));
    CHECK(j["certificates"][0]["lambda"]["2"] == "1/2");
  }
}
