#pragma once

// JSON wire formats.  Rationals travel as strings "a" or "a/b"; bundle
// masks as decimal strings; the unsold price as "inf".  parse(serialize(v))
// is the identity for all three instance types.

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "model.hpp"
#include "rational.hpp"

namespace mechlab {

using Json = nlohmann::json;

inline Rat rat_from_json(const Json& j, const std::string& where) {
  if (!j.is_string()) throw InputError(where + ": rational must be a string \"a\" or \"a/b\"");
  try {
    return parse_rat(j.get<std::string>());
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
}

inline Json rat_to_json(const Rat& q) { return Json(rat_to_string(q)); }

inline ExtPrice ext_price_from_json(const Json& j, const std::string& where) {
  if (j.is_string() && j.get<std::string>() == "inf") return ExtPrice::infinity();
  return ExtPrice(rat_from_json(j, where));
}

inline Json ext_price_to_json(const ExtPrice& p) {
  return p.is_inf() ? Json("inf") : rat_to_json(p.finite());
}

inline int k_from_json(const Json& j, const std::string& what) {
  if (!j.contains("k") || !j.at("k").is_number_integer())
    throw InputError(what + ": missing integer field \"k\"");
  return j.at("k").get<int>();
}

inline std::vector<Rat> rat_vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of rationals");
  std::vector<Rat> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(rat_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline Json rat_vector_to_json(const std::vector<Rat>& v) {
  Json arr = Json::array();
  for (const Rat& q : v) arr.push_back(rat_to_json(q));
  return arr;
}

// ----- ValuationDist: {"k":int,"atoms":[{"x":[rat...],"p":rat}]} -----

inline ValuationDist dist_from_json(const Json& j) {
  ValuationDist d;
  d.k = k_from_json(j, "distribution");
  if (!j.contains("atoms") || !j.at("atoms").is_array())
    throw InputError("distribution: missing array field \"atoms\"");
  const Json& atoms = j.at("atoms");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string at = "atoms[" + std::to_string(i) + "]";
    if (!atoms[i].is_object() || !atoms[i].contains("x") || !atoms[i].contains("p"))
      throw InputError(at + ": expected {\"x\":[...],\"p\":...}");
    Atom a;
    a.x.coords = rat_vector_from_json(atoms[i].at("x"), at + ".x");
    a.prob = rat_from_json(atoms[i].at("p"), at + ".p");
    d.atoms.push_back(std::move(a));
  }
  validate_dist(d);
  return d;
}

inline Json dist_to_json(const ValuationDist& d) {
  Json j;
  j["k"] = d.k;
  Json atoms = Json::array();
  for (const Atom& a : d.atoms)
    atoms.push_back(Json{{"x", rat_vector_to_json(a.x.coords)}, {"p", rat_to_json(a.prob)}});
  j["atoms"] = std::move(atoms);
  return j;
}

// ----- Menu: {"k":int,"entries":[{"q":[rat...],"s":rat}]} -----

inline Menu menu_from_json(const Json& j) {
  const int k = k_from_json(j, "menu");
  if (!j.contains("entries") || !j.at("entries").is_array())
    throw InputError("menu: missing array field \"entries\"");
  std::vector<MenuEntry> entries;
  const Json& arr = j.at("entries");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = "entries[" + std::to_string(i) + "]";
    if (!arr[i].is_object() || !arr[i].contains("q") || !arr[i].contains("s"))
      throw InputError(at + ": expected {\"q\":[...],\"s\":...}");
    MenuEntry e;
    e.alloc.coords = rat_vector_from_json(arr[i].at("q"), at + ".q");
    e.price = rat_from_json(arr[i].at("s"), at + ".s");
    entries.push_back(std::move(e));
  }
  return make_menu(k, std::move(entries));
}

inline Json menu_to_json(const Menu& m) {
  Json j;
  j["k"] = m.k;
  Json arr = Json::array();
  for (const MenuEntry& e : m.entries)
    arr.push_back(Json{{"q", rat_vector_to_json(e.alloc.coords)}, {"s", rat_to_json(e.price)}});
  j["entries"] = std::move(arr);
  return j;
}

// ----- DetPricing: {"k":int,"prices":{"<mask-as-decimal>":rat|"inf"}} -----

inline DetPricing det_pricing_from_json(const Json& j) {
  DetPricing p;
  p.k = k_from_json(j, "pricing");
  if (p.k < 1 || p.k > 20) throw InputError("pricing: k out of range");
  if (!j.contains("prices") || !j.at("prices").is_object())
    throw InputError("pricing: missing object field \"prices\"");
  const std::size_t n = std::size_t(1) << p.k;
  p.prices.assign(n, ExtPrice::infinity());
  std::vector<bool> seen(n, false);
  for (const auto& [key, val] : j.at("prices").items()) {
    unsigned long mask = 0;
    try {
      std::size_t pos = 0;
      mask = std::stoul(key, &pos, 10);
      if (pos != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw InputError("pricing: bundle key '" + key + "' is not a decimal bitmask");
    }
    if (mask >= n) throw InputError("pricing: bundle key '" + key + "' exceeds 2^k - 1");
    if (seen[mask]) throw InputError("pricing: duplicate bundle key '" + key + "'");
    seen[mask] = true;
    p.prices[mask] = ext_price_from_json(val, "prices[\"" + key + "\"]");
  }
  for (std::size_t m = 0; m < n; ++m)
    if (!seen[m]) throw InputError("pricing: missing price for bundle " + std::to_string(m));
  validate_det_pricing(p);
  return p;
}

inline Json det_pricing_to_json(const DetPricing& p) {
  Json prices = Json::object();
  for (Mask m = 0; m < p.prices.size(); ++m)
    prices[std::to_string(m)] = ext_price_to_json(p.prices[m]);
  Json j;
  j["k"] = p.k;
  j["prices"] = std::move(prices);
  return j;
}

// ----- SymPricing: {"k":int,"levels":[rat|"inf",...]} (levels 0..k) -----

inline SymPricing sym_pricing_from_json(const Json& j) {
  const int k = k_from_json(j, "symmetric pricing");
  if (!j.contains("levels") || !j.at("levels").is_array())
    throw InputError("symmetric pricing: missing array field \"levels\"");
  const Json& arr = j.at("levels");
  if (static_cast<int>(arr.size()) != k + 1)
    throw InputError("symmetric pricing: need exactly k+1 levels");
  SymPricing p;
  for (std::size_t i = 0; i < arr.size(); ++i)
    p.levels.push_back(ext_price_from_json(arr[i], "levels[" + std::to_string(i) + "]"));
  validate_sym_pricing(p);
  return p;
}

inline Json sym_pricing_to_json(const SymPricing& p) {
  Json arr = Json::array();
  for (const ExtPrice& lv : p.levels) arr.push_back(ext_price_to_json(lv));
  Json j;
  j["k"] = p.k();
  j["levels"] = std::move(arr);
  return j;
}

using Instance = std::variant<ValuationDist, Menu, DetPricing>;

// Dispatches on which of "atoms" / "entries" / "prices" is present.
inline Instance parse_instance(const std::string& bytes) {
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("instance: top level must be a JSON object");
  const int tags = int(j.contains("atoms")) + int(j.contains("entries")) + int(j.contains("prices"));
  if (tags != 1)
    throw InputError("instance: expected exactly one of \"atoms\", \"entries\", \"prices\"");
  if (j.contains("atoms")) return dist_from_json(j);
  if (j.contains("entries")) return menu_from_json(j);
  return det_pricing_from_json(j);
}

inline std::string serialize_instance(const Instance& inst) {
  if (std::holds_alternative<ValuationDist>(inst))
    return dist_to_json(std::get<ValuationDist>(inst)).dump();
  if (std::holds_alternative<Menu>(inst)) return menu_to_json(std::get<Menu>(inst)).dump();
  return det_pricing_to_json(std::get<DetPricing>(inst)).dump();
}

}  // namespace mechlab
