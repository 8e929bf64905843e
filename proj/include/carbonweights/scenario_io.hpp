#pragma once

// JSON scenario files for the three model families, dotted-key overrides,
// and the CSV trajectory export.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "carbonweights/dynamic_solver.hpp"
#include "carbonweights/econ.hpp"
#include "carbonweights/errors.hpp"
#include "carbonweights/iam.hpp"

namespace cw {

using Json = nlohmann::json;

namespace detail {

inline double num(const Json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
    if (!j.at(key).is_number()) throw ParseError(std::string("key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

inline double num_or(const Json& j, const char* key, double fallback) {
    return j.contains(key) && !j.at(key).is_null() ? num(j, key) : fallback;
}

inline Vec vec(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw ParseError(std::string("key '") + key + "' must be an array");
    Vec out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw ParseError(std::string("array '") + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

inline const Json& region_entry(const Json& doc, std::size_t i) {
    if (!doc.contains("regions") || !doc["regions"].is_array() || doc["regions"].size() <= i)
        throw ParseError("scenario needs a 'regions' array");
    return doc["regions"][i];
}

}  // namespace detail

inline std::string scenario_kind(const Json& doc) {
    if (!doc.contains("kind") || !doc["kind"].is_string()) throw ParseError("scenario needs a string 'kind'");
    const auto k = doc["kind"].get<std::string>();
    if (k != "static" && k != "dynamic" && k != "iam") throw ParseError("unknown scenario kind '" + k + "'");
    return k;
}

// ---- static two-region economy --------------------------------------------

inline Json to_json(const EconomyStatic& e) {
    Json doc{{"kind", "static"}, {"eta", e.utility.eta}, {"ebar", e.ebar()}, {"regions", Json::array()}};
    for (const auto* r : {&e.north, &e.south})
        doc["regions"].push_back({{"name", r->name},
                                  {"L", r->population},
                                  {"w", r->endowmentPerCapita},
                                  {"cost", {{"k", r->cost.k}, {"m", r->cost.m}, {"n", r->cost.n}}},
                                  {"damage", {{"d0", r->damage.d0}, {"d1", r->damage.d1}, {"d2", r->damage.d2}}}});
    return doc;
}

inline EconomyStatic static_economy_from_json(const Json& doc) {
    if (scenario_kind(doc) != "static") throw ParseError("expected a static scenario");
    EconomyStatic e;
    e.utility.eta = detail::num(doc, "eta");
    const double ebar = detail::num(doc, "ebar");
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& j = detail::region_entry(doc, i);
        RegionStatic r;
        r.name = j.value("name", i == 0 ? "north" : "south");
        r.population = detail::num(j, "L");
        r.endowmentPerCapita = detail::num(j, "w");
        r.cost = {detail::num(j.at("cost"), "k"), detail::num_or(j.at("cost"), "m", 0.0),
                  detail::num_or(j.at("cost"), "n", 0.0)};
        r.damage = {detail::num_or(j.at("damage"), "d0", 0.0), detail::num(j.at("damage"), "d1"),
                    detail::num(j.at("damage"), "d2"), ebar};
        (i == 0 ? e.north : e.south) = r;
    }
    e.validate();
    return e;
}

// ---- dynamic two-region economy -------------------------------------------
// gL and gw are annual growth rates compounded over `years`.

inline Json to_json(const EconomyDynamic& e) {
    Json doc{{"kind", "dynamic"}, {"eta", e.utility.eta}, {"rho", e.rho},          {"years", e.years},
             {"pi", e.pi},        {"ebar", e.ebar()},     {"regions", Json::array()}};
    for (const auto* r : {&e.north, &e.south})
        doc["regions"].push_back({{"name", r->name},
                                  {"L1", r->population1},
                                  {"w1", r->endowmentPerCapita1},
                                  {"gL", std::pow(r->populationGrowth, 1.0 / e.years) - 1.0},
                                  {"gw", std::pow(r->endowmentGrowth, 1.0 / e.years) - 1.0},
                                  {"cost1", {{"k", r->cost1.k}, {"m", r->cost1.m}, {"n", r->cost1.n}}},
                                  {"damage2", {{"d0", r->damage2.d0}, {"d1", r->damage2.d1}, {"d2", r->damage2.d2}}}});
    return doc;
}

/// A null or absent "pi" means North's period-2 endowment share.
inline EconomyDynamic dynamic_economy_from_json(const Json& doc) {
    if (scenario_kind(doc) != "dynamic") throw ParseError("expected a dynamic scenario");
    EconomyDynamic e;
    e.utility.eta = detail::num(doc, "eta");
    e.rho = detail::num(doc, "rho");
    e.years = detail::num_or(doc, "years", 50.0);
    const double ebar = detail::num(doc, "ebar");
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& j = detail::region_entry(doc, i);
        RegionDynamic r;
        r.name = j.value("name", i == 0 ? "north" : "south");
        r.population1 = detail::num(j, "L1");
        r.endowmentPerCapita1 = detail::num(j, "w1");
        r.populationGrowth = std::pow(1.0 + detail::num_or(j, "gL", 0.0), e.years);
        r.endowmentGrowth = std::pow(1.0 + detail::num_or(j, "gw", 0.0), e.years);
        r.cost1 = {detail::num(j.at("cost1"), "k"), detail::num_or(j.at("cost1"), "m", 0.0),
                   detail::num_or(j.at("cost1"), "n", 0.0)};
        r.damage2 = {detail::num_or(j.at("damage2"), "d0", 0.0), detail::num(j.at("damage2"), "d1"),
                     detail::num(j.at("damage2"), "d2"), ebar};
        (i == 0 ? e.north : e.south) = r;
    }
    e.pi = doc.contains("pi") && !doc["pi"].is_null() ? detail::num(doc, "pi") : e.endowment_share_north2();
    e.validate();
    return e;
}

// ---- IAM scenario ----------------------------------------------------------

inline Json to_json(const IamScenario& s) {
    Json doc{{"kind", "iam"},
             {"name", s.name},
             {"startYear", s.startYear},
             {"step", s.step},
             {"rho", s.rho},
             {"eta", s.utility.eta},
             {"T0", s.T0},
             {"climateSlope", s.climateSlope},
             {"exogenousEmissions", s.exogenousEmissions},
             {"regions", Json::array()}};
    for (const auto& r : s.regions)
        doc["regions"].push_back({{"name", r.name},
                                  {"theta", r.theta},
                                  {"a1", r.damage.a1},
                                  {"a2", r.damage.a2},
                                  {"population", r.population},
                                  {"grossOutput", r.grossOutput},
                                  {"sigma", r.sigma},
                                  {"backstop", r.backstop}});
    return doc;
}

inline IamScenario iam_scenario_from_json(const Json& doc) {
    if (scenario_kind(doc) != "iam") throw ParseError("expected an iam scenario");
    IamScenario s;
    s.name = doc.value("name", "scenario");
    s.startYear = static_cast<int>(detail::num_or(doc, "startYear", 2005));
    s.step = detail::num_or(doc, "step", 10.0);
    s.rho = detail::num(doc, "rho");
    s.utility.eta = detail::num(doc, "eta");
    s.T0 = detail::num(doc, "T0");
    s.climateSlope = detail::num(doc, "climateSlope");
    s.exogenousEmissions = detail::vec(doc, "exogenousEmissions");
    if (!doc.contains("regions") || !doc["regions"].is_array()) throw ParseError("scenario needs a 'regions' array");
    for (const auto& j : doc["regions"]) {
        RegionPath r;
        if (!j.contains("name") || !j["name"].is_string()) throw ParseError("every region needs a name");
        r.name = j["name"].get<std::string>();
        r.theta = detail::num_or(j, "theta", 2.8);
        r.damage = {detail::num(j, "a1"), detail::num(j, "a2")};
        r.population = detail::vec(j, "population");
        r.grossOutput = detail::vec(j, "grossOutput");
        r.sigma = detail::vec(j, "sigma");
        r.backstop = detail::vec(j, "backstop");
        s.regions.push_back(std::move(r));
    }
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
    return s;
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

// ---- overrides -------------------------------------------------------------

/// Applies "a.b.c=value". A leading "region.<name>" addresses the regions
/// array by (case-insensitive) name; numeric segments index arrays. The final
/// key must already exist. Values are parsed as JSON, falling back to a string.
inline void apply_override(Json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("override '" + assignment + "' is not key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string seg; std::getline(ss, seg, '.');) parts.push_back(seg);

    Json* node = &doc;
    std::size_t i = 0;
    if (parts.size() >= 3 && parts[0] == "region") {
        Json& regions = doc["regions"];
        Json* found = nullptr;
        for (auto& r : regions)
            if (r.contains("name") && detail::lower(r["name"].get<std::string>()) == detail::lower(parts[1]))
                found = &r;
        if (!found) throw ParseError("override '" + path + "': no region named '" + parts[1] + "'");
        node = found;
        i = 2;
    }
    for (; i < parts.size(); ++i) {
        const auto& seg = parts[i];
        const bool last = i + 1 == parts.size();
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(seg);
            } catch (const std::exception&) {
                throw ParseError("override '" + path + "': '" + seg + "' is not an index");
            }
            if (idx >= node->size()) throw ParseError("override '" + path + "': index out of range");
            node = &(*node)[idx];
        } else if (node->is_object() && node->contains(seg)) {
            node = &(*node)[seg];
        } else {
            throw ParseError("override '" + path + "': unknown key '" + seg + "'");
        }
        if (last) {
            Json value;
            try {
                value = Json::parse(text);
            } catch (const Json::parse_error&) {
                value = text;
            }
            *node = value;
        }
    }
}

/// Loads a scenario, normalises it through its typed form so every optional
/// key is present, then applies the overrides in order.
inline Json load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
    Json doc = load_json_file(path);
    const auto kind = scenario_kind(doc);
    if (kind == "static") doc = to_json(static_economy_from_json(doc));
    if (kind == "dynamic") {
        const bool derivedPi = !doc.contains("pi") || doc["pi"].is_null();
        doc = to_json(dynamic_economy_from_json(doc));
        if (derivedPi) doc["pi"] = nullptr;
    }
    if (kind == "iam") doc = to_json(iam_scenario_from_json(doc));
    for (const auto& o : overrides) apply_override(doc, o);
    return doc;
}

// ---- trajectory CSV ----------------------------------------------------------

inline const char* trajectory_csv_header() {
    return "region,period,year,mu[-],price[money/emissions],emissions[emissions/yr],"
           "abatement[emissions/yr],abatement_cost[money/yr],damage[money/yr],damage_fraction[-],"
           "consumption[money/yr],consumption_per_capita[money/person/yr],temperature[degC],"
           "cumulative_emissions[emissions]";
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const IamScenario& s) {
    os << trajectory_csv_header() << '\n';
    os.precision(12);
    for (std::size_t i = 0; i < tr.regions; ++i)
        for (std::size_t t = 0; t < tr.periods; ++t) {
            const std::size_t k = tr.at(i, t);
            os << s.regions[i].name << ',' << t << ',' << s.year(t) << ',' << tr.mu[k] << ',' << tr.price[k] << ','
               << tr.emissions[k] << ',' << tr.abatement[k] << ',' << tr.abatementCost[k] << ',' << tr.damage[k]
               << ',' << tr.damageFraction[k] << ',' << tr.consumption[k] << ',' << tr.perCapita[k] << ','
               << tr.temperature[t] << ',' << tr.cumulativeEmissions[t] << '\n';
        }
}

}  // namespace cw
