// Command-line surface: one verb per revenue functional, structural
// checks, canonical pricing, monotonicity verdicts, quadratic screens,
// and scenario reproduction.  Exit codes: 0 ok, 1 expectation failed,
// 2 input error, 3 enumeration cap exceeded.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mechlab/scenarios.hpp"

namespace {

using namespace mechlab;

std::string read_source(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json parse_json(const std::string& bytes, const std::string& what) {
  try {
    return Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    throw InputError("invalid JSON in " + what + ": " + e.what());
  }
}

ValuationDist load_dist(const std::string& path) {
  const Instance inst = parse_instance(read_source(path));
  if (!std::holds_alternative<ValuationDist>(inst))
    throw InputError("expected a distribution (object with \"atoms\")");
  return std::get<ValuationDist>(inst);
}

Menu load_menu(const std::string& path) {
  const Instance inst = parse_instance(read_source(path));
  if (!std::holds_alternative<Menu>(inst))
    throw InputError("expected a menu (object with \"entries\")");
  return std::get<Menu>(inst);
}

DetPricing load_det_pricing(const std::string& path) {
  const Instance inst = parse_instance(read_source(path));
  if (!std::holds_alternative<DetPricing>(inst))
    throw InputError("expected a deterministic pricing (object with \"prices\")");
  return std::get<DetPricing>(inst);
}

std::vector<Rat> parse_rat_list(const std::string& text) {
  std::vector<Rat> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(parse_rat(item));
  if (out.empty()) throw InputError("expected a comma-separated list of rationals");
  return out;
}

TieRule parse_rule(const std::string& name) {
  if (name == "seller-favorable") return TieRule::SellerFavorable;
  if (name == "buyer-favorable") return TieRule::BuyerFavorable;
  if (name == "tie-favorable") return TieRule::TieFavorable;
  if (name == "index-consistent") return TieRule::IndexConsistent;
  throw InputError("unknown tie rule: " + name);
}

LatticeProperty parse_property(const std::string& name) {
  if (name == "nondecreasing") return LatticeProperty::Nondecreasing;
  if (name == "submodular") return LatticeProperty::Submodular;
  if (name == "supermodular") return LatticeProperty::Supermodular;
  if (name == "separably-subadditive") return LatticeProperty::SeparablySubadditive;
  if (name == "separably-superadditive") return LatticeProperty::SeparablySuperadditive;
  throw InputError("unknown property: " + name);
}

void print_revenue(const std::string& name, const RevenueResult& result, bool json) {
  if (json)
    std::cout << revenue_result_to_json(result).dump() << "\n";
  else
    std::cout << name << " = " << rat_to_string(result.value) << "\n";
}

Json verdict_to_json(const PropertyVerdict& v) {
  Json j;
  j["holds"] = v.holds;
  if (v.pair_witness)
    j["witness"] = Json::array({v.pair_witness->first, v.pair_witness->second});
  else if (v.level_witness)
    j["witness"] = *v.level_witness;
  else
    j["witness"] = nullptr;
  return j;
}

struct Options {
  std::string input = "-";
  bool json = false;
  std::uint64_t seed = 0;
  long long cap = 1 << 20;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact-rational laboratory for single-buyer multi-good pricing"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--input", opt.input, "JSON instance path, or - for stdin");
  app.add_flag("--json", opt.json, "machine-readable output");
  app.add_option("--seed", opt.seed, "seed for randomized scenario parameters");
  app.add_option("--cap", opt.cap, "enumeration cap for the deterministic optimizers");

  int exit_code = 0;
  const auto value_cmd = [&](const std::string& name, const std::string& help, auto compute) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->callback([&, name, compute] { print_revenue(name, compute(), opt.json); });
    return sub;
  };

  value_cmd("rev", "optimal (unrestricted) revenue of a distribution",
            [&] { return lp_rev(load_dist(opt.input)); });
  value_cmd("srev", "separate per-good sale revenue",
            [&] { return srev(load_dist(opt.input)); });
  value_cmd("brev", "grand-bundle sale revenue", [&] { return brev(load_dist(opt.input)); });
  value_cmd("symsrev", "symmetric separate sale revenue (one shared price)",
            [&] { return symsrev(load_dist(opt.input)); });

  std::string partition_text;
  CLI::App* prev_cmd = app.add_subcommand("prev", "partition (bundle-per-block) sale revenue");
  prev_cmd->add_option("--partition", partition_text, "blocks as 1-based good lists, e.g. [[1,2],[3]]")
      ->required();
  prev_cmd->callback([&] {
    const ValuationDist dist = load_dist(opt.input);
    const Json blocks = parse_json(partition_text, "--partition");
    if (!blocks.is_array()) throw InputError("--partition: expected an array of arrays");
    BundlingPartition part;
    part.k = dist.k;
    for (const Json& block : blocks) {
      if (!block.is_array()) throw InputError("--partition: block is not an array");
      Mask m = 0;
      for (const Json& good : block) {
        if (!good.is_number_integer() || good.get<long long>() < 1 ||
            good.get<long long>() > dist.k)
          throw InputError("--partition: goods are 1-based integers up to k");
        m |= Mask(1) << (good.get<long long>() - 1);
      }
      part.blocks.push_back(m);
    }
    print_revenue("prev", partition_rev(dist, part), opt.json);
  });

  bool supermodular = false;
  CLI::App* drev_cmd = app.add_subcommand("drev", "optimal deterministic-menu revenue");
  drev_cmd->add_flag("--supermodular", supermodular, "restrict to supermodular pricings");
  drev_cmd->callback([&] {
    print_revenue("drev",
                  drev(load_dist(opt.input), supermodular ? DetMode::Supermodular : DetMode::General,
                       opt.cap),
                  opt.json);
  });
  bool sym_supermodular = false;
  CLI::App* symdrev_cmd = app.add_subcommand("symdrev", "optimal symmetric deterministic revenue");
  symdrev_cmd->add_flag("--supermodular", sym_supermodular, "restrict to supermodular pricings");
  symdrev_cmd->callback([&] {
    print_revenue("symdrev",
                  symdrev(load_dist(opt.input),
                          sym_supermodular ? DetMode::Supermodular : DetMode::General, opt.cap),
                  opt.json);
  });

  bool no_augment_mon = false;
  CLI::App* monrev_cmd =
      app.add_subcommand("monrev", "payment-monotone revenue relaxation on the atom set");
  monrev_cmd->add_flag("--no-augment", no_augment_mon, "skip the diagonal augmentation points");
  monrev_cmd->callback(
      [&] { print_revenue("monrev", monrev_relaxed(load_dist(opt.input), !no_augment_mon), opt.json); });
  bool no_augment_amon = false;
  CLI::App* amonrev_cmd =
      app.add_subcommand("amonrev", "allocation-monotone revenue relaxation on the atom set");
  amonrev_cmd->add_flag("--no-augment", no_augment_amon, "skip the diagonal augmentation points");
  amonrev_cmd->callback([&] {
    print_revenue("amonrev", amonrev_relaxed(load_dist(opt.input), !no_augment_amon), opt.json);
  });

  std::string menu_path, x_text, rule_name = "seller-favorable";
  CLI::App* eval_cmd = app.add_subcommand("eval", "buyer choice on a menu at a valuation");
  eval_cmd->add_option("--menu", menu_path, "menu JSON path, or - for stdin")->required();
  eval_cmd->add_option("--x", x_text, "valuation as comma-separated rationals")->required();
  eval_cmd->add_option("--rule", rule_name,
                       "seller-favorable | buyer-favorable | tie-favorable | index-consistent");
  eval_cmd->callback([&] {
    const Menu menu = load_menu(menu_path);
    Valuation x;
    x.coords = parse_rat_list(x_text);
    const ChoiceResult choice = buyer_choice(menu, x, parse_rule(rule_name));
    const MenuEntry& entry = menu.entries[choice.chosen];
    if (opt.json) {
      std::cout << Json{{"q", rat_vector_to_json(entry.alloc.coords)},
                        {"s", rat_to_json(entry.price)},
                        {"payoff", rat_to_json(choice.payoff)},
                        {"ties", choice.ties.size()}}
                       .dump()
                << "\n";
    } else {
      std::cout << "pays " << rat_to_string(entry.price) << ", payoff "
                << rat_to_string(choice.payoff) << ", q = " << rat_vector_to_json(entry.alloc.coords).dump()
                << ", ties " << choice.ties.size() << "\n";
    }
  });

  std::string canon_menu_path, g_text;
  bool canon_det = false;
  CLI::App* canon_cmd = app.add_subcommand("canonical", "canonical pricing of a menu");
  canon_cmd->add_option("--menu", canon_menu_path, "menu JSON path, or - for stdin")->required();
  CLI::Option* g_opt = canon_cmd->add_option("--g", g_text, "allocation as comma-separated rationals");
  CLI::Option* det_opt =
      canon_cmd->add_flag("--det", canon_det, "full deterministic canonical pricing");
  g_opt->excludes(det_opt);
  canon_cmd->callback([&] {
    const Menu menu = load_menu(canon_menu_path);
    if (canon_det) {
      const DetPricing p = canonical_det_price(menu);
      std::cout << det_pricing_to_json(p).dump() << "\n";
      return;
    }
    if (g_text.empty()) throw InputError("canonical: need --g or --det");
    Allocation g;
    g.coords = parse_rat_list(g_text);
    const ExtPrice price = canonical_general_price(menu, g);
    if (opt.json)
      std::cout << Json{{"p0", ext_price_to_json(price)}}.dump() << "\n";
    else
      std::cout << "p0 = " << (price.is_inf() ? "inf" : rat_to_string(price.finite())) << "\n";
  });

  std::string check_pricing_path, property_name;
  CLI::App* check_cmd = app.add_subcommand("check", "structural property of a pricing");
  check_cmd->add_option("--pricing", check_pricing_path, "pricing JSON path, or - for stdin")
      ->required();
  check_cmd->add_option("--property", property_name,
                        "nondecreasing | submodular | supermodular | separably-subadditive | "
                        "separably-superadditive")
      ->required();
  check_cmd->callback([&] {
    const Json j = parse_json(read_source(check_pricing_path), "--pricing");
    const LatticeProperty prop = parse_property(property_name);
    const PropertyVerdict verdict = j.is_object() && j.contains("levels")
                                        ? check_sym(sym_pricing_from_json(j), prop)
                                        : check_det(det_pricing_from_json(j), prop);
    if (opt.json)
      std::cout << verdict_to_json(verdict).dump() << "\n";
    else
      std::cout << property_name << (verdict.holds ? " holds" : " fails") << "\n";
  });

  bool symmetric_majorant = false;
  CLI::App* majorant_cmd =
      app.add_subcommand("majorant", "supermodular majorant of a finite pricing");
  majorant_cmd->add_flag("--symmetric", symmetric_majorant, "treat input as a level pricing");
  majorant_cmd->callback([&] {
    const Json j = parse_json(read_source(opt.input), "--input");
    if (symmetric_majorant)
      std::cout << sym_pricing_to_json(supermod_majorant_sym(sym_pricing_from_json(j))).dump()
                << "\n";
    else
      std::cout << det_pricing_to_json(supermod_majorant_det(det_pricing_from_json(j))).dump()
                << "\n";
  });

  std::string mono_pricing_path;
  CLI::App* mono_cmd =
      app.add_subcommand("monotone", "payment-monotonicity verdict for a deterministic pricing");
  mono_cmd->add_option("--pricing", mono_pricing_path, "pricing JSON path, or - for stdin")
      ->required();
  mono_cmd->callback([&] {
    const MonotonicityVerdict verdict = check_det_monotonic(load_det_pricing(mono_pricing_path));
    if (opt.json)
      std::cout << monotonicity_verdict_to_json(verdict).dump() << "\n";
    else
      std::cout << (verdict.monotonic ? "monotonic" : "not-monotonic") << "\n";
  });

  std::string quad_spec_path;
  CLI::App* quad_cmd = app.add_subcommand("quad", "quadratic mechanism screens");
  quad_cmd->add_option("--spec", quad_spec_path, "quadratic spec JSON path, or - for stdin")
      ->required();
  quad_cmd->callback([&] {
    const QuadSpec spec = quad_spec_from_json(parse_json(read_source(quad_spec_path), "--spec"));
    const QuadScreens screens = quad_screens(spec);
    if (opt.json)
      std::cout << quad_screens_to_json(screens).dump() << "\n";
    else
      std::cout << "amon-necessary " << (screens.amon_necessary ? "holds" : "fails")
                << ", subm-necessary " << (screens.subm_necessary ? "holds" : "fails") << "\n";
  });

  std::string repro_id;
  bool repro_all = false;
  CLI::App* repro_cmd = app.add_subcommand("repro", "run a reproduction scenario");
  repro_cmd->add_option("id", repro_id, "scenario id");
  repro_cmd->add_flag("--all", repro_all, "run every scenario");
  repro_cmd->callback([&] {
    ScenarioParams params;
    params.seed = opt.seed;
    params.cap = opt.cap;
    std::vector<Report> reports;
    if (repro_all) {
      for (const ScenarioInfo& info : list_scenarios()) reports.push_back(run_scenario(info.id, params));
    } else {
      if (repro_id.empty()) throw InputError("repro: need a scenario id or --all");
      reports.push_back(run_scenario(repro_id, params));
    }
    if (opt.json) {
      if (repro_all) {
        Json arr = Json::array();
        for (const Report& rep : reports) arr.push_back(report_to_json(rep));
        std::cout << arr.dump() << "\n";
      } else {
        std::cout << report_to_json(reports.front()).dump() << "\n";
      }
    } else {
      for (const Report& rep : reports) std::cout << report_to_text(rep);
    }
    for (const Report& rep : reports)
      if (!rep.ok()) exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const CapError& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
