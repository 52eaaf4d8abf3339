#include <catch2/catch_amalgamated.hpp>

#include "mechlab/eval.hpp"
#include "test_util.hpp"

using namespace mechlab;

namespace {

Menu two_good_menu() {
  // (1,0) at 1, (0,1) at 2, plus the opt-out.
  return make_menu(2, {MenuEntry{Allocation{{Rat(1), Rat(0)}}, Rat(1)},
                       MenuEntry{Allocation{{Rat(0), Rat(1)}}, Rat(2)}});
}

}  // namespace

TEST_CASE("tie rules pick different entries on a payoff tie") {
  const Menu menu = two_good_menu();
  const Valuation x{{Rat(2), Rat(3)}};  // both entries give payoff 1

  const ChoiceResult seller = buyer_choice(menu, x, TieRule::SellerFavorable);
  CHECK(menu.entries[seller.chosen].price == 2);

  const ChoiceResult buyer = buyer_choice(menu, x, TieRule::BuyerFavorable);
  // Both allocations are maximal; the lexicographically larger one is (1,0).
  CHECK(menu.entries[buyer.chosen].alloc.coords == std::vector<Rat>{Rat(1), Rat(0)});
  CHECK(menu.entries[buyer.chosen].price == 1);

  const ChoiceResult tie = buyer_choice(menu, x, TieRule::TieFavorable);
  CHECK(menu.entries[tie.chosen].price == 2);  // price filter first

  CHECK(seller.payoff == 1);
  CHECK(seller.ties.size() == 2);
}

TEST_CASE("index-consistent rule orders by index sum then bitmask") {
  const Menu menu = make_menu(3, {MenuEntry{Allocation{{Rat(1), Rat(1), Rat(0)}}, Rat(3)},
                                  MenuEntry{Allocation{{Rat(0), Rat(0), Rat(1)}}, Rat(3)}});
  const Valuation x{{Rat(1), Rat(2), Rat(3)}};  // both priced entries at payoff 0
  const ChoiceResult res = buyer_choice(menu, x, TieRule::IndexConsistent);
  // Index sums tie at 3; the larger bitmask {3} wins over {1,2}.
  CHECK(menu.entries[res.chosen].alloc.mask() == Mask(0b100));

  const Menu frac = make_menu(1, {MenuEntry{Allocation{{Rat(1, 2)}}, Rat(1)}});
  CHECK_THROWS_AS(buyer_choice(frac, Valuation{{Rat(1)}}, TieRule::IndexConsistent), InputError);
}

TEST_CASE("buyer payoff is the exact maximum and never negative") {
  const Menu menu = two_good_menu();
  testutil::Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    Valuation x{{rng.rat(), rng.rat()}};
    const ChoiceResult res = buyer_choice(menu, x, TieRule::SellerFavorable);
    CHECK(res.payoff >= 0);
    for (const MenuEntry& e : menu.entries) CHECK(dot(e.alloc, x) - e.price <= res.payoff);
    CHECK(dot(menu.entries[res.chosen].alloc, x) - menu.entries[res.chosen].price == res.payoff);
  }
}

TEST_CASE("revenue weighs payments by atom probability") {
  const Menu menu = two_good_menu();
  ValuationDist d;
  d.k = 2;
  d.atoms.push_back(Atom{Valuation{{Rat(3), Rat(0)}}, Rat(1, 3)});   // buys (1,0) at 1
  d.atoms.push_back(Atom{Valuation{{Rat(0), Rat(5)}}, Rat(2, 3)});   // buys (0,1) at 2
  CHECK(revenue(menu, d, TieRule::SellerFavorable) == Rat(1, 3) + Rat(4, 3));
  d.atoms[0].prob = Rat(0);
  d.atoms[1].prob = Rat(1);
  CHECK(revenue(menu, d, TieRule::SellerFavorable) == Rat(2));  // zero-mass atom pays nothing
}

TEST_CASE("IC/IR checker flags the right constraint kind") {
  ValuationDist d;
  d.k = 1;
  d.atoms.push_back(Atom{Valuation{{Rat(1)}}, Rat(1, 2)});
  d.atoms.push_back(Atom{Valuation{{Rat(3)}}, Rat(1, 2)});
  std::vector<AssignedOutcome> ok = {{Allocation{{Rat(0)}}, Rat(0)},
                                     {Allocation{{Rat(1)}}, Rat(3)}};
  CHECK_FALSE(verify_ic_ir(ok, d).has_value());

  std::vector<AssignedOutcome> ir_bad = {{Allocation{{Rat(0)}}, Rat(1)},
                                         {Allocation{{Rat(1)}}, Rat(3)}};
  auto v = verify_ic_ir(ir_bad, d);
  REQUIRE(v.has_value());
  CHECK(v->kind == "ir");
  CHECK(v->slack == 1);

  std::vector<AssignedOutcome> ic_bad = {{Allocation{{Rat(1)}}, Rat(1)},
                                         {Allocation{{Rat(1)}}, Rat(3)}};
  v = verify_ic_ir(ic_bad, d);
  REQUIRE(v.has_value());
  CHECK(v->kind == "ic");
  CHECK(v->atom == 1);          // the expensive type envies the cheap outcome
  CHECK(v->slack == 2);

  std::vector<AssignedOutcome> npt_bad = {{Allocation{{Rat(0)}}, Rat(-1)},
                                          {Allocation{{Rat(1)}}, Rat(3)}};
  v = verify_ic_ir(npt_bad, d);
  REQUIRE(v.has_value());
  CHECK(v->kind == "npt");
}

TEST_CASE("canonical deterministic prices are superset minima") {
  testutil::Rng rng(41);
  for (int t = 0; t < 60; ++t) {
    const int k = 2 + int(t % 2);
    const Menu menu = testutil::random_det_menu(rng, k, int(rng.uniform(1, (1 << k) - 1)));
    const DetPricing canon = canonical_det_price(menu);
    CHECK(det_pricing_nondecreasing(canon));
    const Mask full = (Mask(1) << k) - 1;
    for (Mask a = 0; a <= full; ++a) {
      ExtPrice expect = ExtPrice::infinity();
      for (const MenuEntry& e : menu.entries)
        if (subset_of(a, e.alloc.mask()) && ExtPrice(e.price) < expect) expect = ExtPrice(e.price);
      CHECK(canon.at(a) == expect);
    }
  }
}

TEST_CASE("canonical general price on the two separate unit prices") {
  const Menu menu = make_menu(2, {MenuEntry{Allocation{{Rat(1), Rat(0)}}, Rat(1)},
                                  MenuEntry{Allocation{{Rat(0), Rat(1)}}, Rat(1)}});
  CHECK(canonical_general_price(menu, Allocation{{Rat(1, 2), Rat(1, 2)}}) == ExtPrice(Rat(1)));
  CHECK(canonical_general_price(menu, Allocation{{Rat(1), Rat(0)}}) == ExtPrice(Rat(1)));
  CHECK(canonical_general_price(menu, Allocation{{Rat(0), Rat(0)}}) == ExtPrice(Rat(0)));
  // Nothing in the convex hull dominates the full bundle.
  CHECK(canonical_general_price(menu, Allocation{{Rat(1), Rat(1)}}).is_inf());
  CHECK_THROWS_AS(canonical_general_price(menu, Allocation{{Rat(2), Rat(0)}}), InputError);
}

TEST_CASE("general and deterministic canonical prices agree on indicators") {
  // On a deterministic menu, a unit mixture dominating an indicator bundle
  // must put all its weight on superset entries, so the two notions match.
  testutil::Rng rng(42);
  for (int t = 0; t < 40; ++t) {
    const int k = 2 + int(t % 2);
    const Menu menu = testutil::random_det_menu(rng, k, int(rng.uniform(1, (1 << k) - 1)));
    const DetPricing canon = canonical_det_price(menu);
    const Mask full = (Mask(1) << k) - 1;
    for (Mask a = 0; a <= full; ++a) {
      Allocation g;
      g.coords.assign(k, Rat(0));
      for (int i = 0; i < k; ++i)
        if (a & (Mask(1) << i)) g.coords[i] = Rat(1);
      CHECK(canonical_general_price(menu, g) == canon.at(a));
    }
  }
}

TEST_CASE("dual canonical-price routes stay consistent on random probes") {
  // canonical_general_price throws logic_error if its two LP routes ever
  // disagree, so surviving a random sweep is the assertion.
  testutil::Rng rng(43);
  for (int t = 0; t < 60; ++t) {
    const Menu menu = testutil::random_mixed_menu(rng, 2, int(rng.uniform(1, 4)));
    Allocation g;
    for (int i = 0; i < 2; ++i) g.coords.push_back(Rat(rng.uniform(0, 4), 4));
    CHECK_NOTHROW(canonical_general_price(menu, g));
  }
}

TEST_CASE("menus regenerate from pricings with unsold bundles dropped") {
  DetPricing p;
  p.k = 2;
  p.prices = {ExtPrice(Rat(0)), ExtPrice(Rat(1)), ExtPrice(Rat(2)), ExtPrice::infinity()};
  const Menu menu = menu_from_det_pricing(p);
  CHECK(menu.entries.size() == 3);  // the full bundle is not offered
  for (const MenuEntry& e : menu.entries) CHECK(e.alloc.mask() != Mask(0b11));
  const DetPricing back = canonical_det_price(menu);
  CHECK(back.at(0b01) == ExtPrice(Rat(1)));
  CHECK(back.at(0b10) == ExtPrice(Rat(2)));
  CHECK(back.at(0b11).is_inf());
}
