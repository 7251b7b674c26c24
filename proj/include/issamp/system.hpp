#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "issamp/errors.hpp"
#include "issamp/timeseries.hpp"
#include "issamp/util.hpp"

namespace issamp {

// Fixed 6-bus topology. Dispatchable slots sit at the generation buses 1, 3
// and 6; wind farms at buses 2, 5 and 6; demand at buses 2, 4 and 5.
enum class Tech { baseload, peaking, wind };

struct DispatchSlot {
    Tech tech;
    int bus;
};

inline constexpr int kDispatchSlotCount = 6;
inline constexpr std::array<DispatchSlot, kDispatchSlotCount> kDispatchSlots = {{
    {Tech::baseload, 1},
    {Tech::peaking, 1},
    {Tech::baseload, 3},
    {Tech::peaking, 3},
    {Tech::baseload, 6},
    {Tech::peaking, 6},
}};

struct Corridor {
    int from;
    int to;
};

inline constexpr int kCorridorCount = 7;
inline constexpr std::array<Corridor, kCorridorCount> kCorridors = {{
    {1, 2}, {1, 4}, {2, 3}, {2, 4}, {3, 6}, {4, 5}, {5, 6},
}};

inline std::string slot_name(int s) {
    const auto& slot = kDispatchSlots[static_cast<std::size_t>(s)];
    return std::string(slot.tech == Tech::baseload ? "baseload_bus" : "peaking_bus") +
           std::to_string(slot.bus);
}

inline std::string wind_name(int w) {
    return "wind_bus" + std::to_string(kWindBuses[static_cast<std::size_t>(w)]);
}

inline std::string corridor_name(int c) {
    const auto& cor = kCorridors[static_cast<std::size_t>(c)];
    return "line_" + std::to_string(cor.from) + "_" + std::to_string(cor.to);
}

// Cost and limit inputs. Build costs are currency per MW-year, generation
// costs currency per MWh; the block size and ramp limit only bind in the
// integer variant.
struct SystemConfig {
    double baseload_build = 300000.0;
    double baseload_gen = 5.0;
    double peaking_build = 100000.0;
    double peaking_gen = 80.0;
    double wind_build = 230000.0;
    double wind_gen = 0.0;
    double line_build = 50000.0;
    double voll = 6000.0;
    double block_size_mw = 3000.0;
    double ramp_fraction = 0.2;

    double build_cost(Tech t) const {
        return t == Tech::baseload ? baseload_build
                                   : (t == Tech::peaking ? peaking_build : wind_build);
    }
    double gen_cost(Tech t) const {
        return t == Tech::baseload ? baseload_gen
                                   : (t == Tech::peaking ? peaking_gen : wind_gen);
    }
};

inline void validate_config(const SystemConfig& c) {
    const std::array<std::pair<const char*, double>, 8> nonneg = {{
        {"baseload_build", c.baseload_build},
        {"baseload_gen", c.baseload_gen},
        {"peaking_build", c.peaking_build},
        {"peaking_gen", c.peaking_gen},
        {"wind_build", c.wind_build},
        {"wind_gen", c.wind_gen},
        {"line_build", c.line_build},
        {"voll", c.voll},
    }};
    for (const auto& [name, v] : nonneg) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw RangeError(std::string(name) + " must be finite and non-negative");
        }
    }
    if (!(c.block_size_mw > 0.0) || !std::isfinite(c.block_size_mw)) {
        throw RangeError("block_size_mw must be positive");
    }
    if (!(c.ramp_fraction > 0.0) || !(c.ramp_fraction <= 1.0)) {
        throw RangeError("ramp_fraction must lie in (0, 1]");
    }
    // The marginal-cost ordering drives the whole dispatch stack; a config
    // violating it silently inverts which hours look expensive.
    if (!(c.baseload_gen < c.peaking_gen && c.peaking_gen < c.voll)) {
        throw RangeError("generation costs must satisfy baseload < peaking < voll");
    }
}

inline nlohmann::ordered_json config_to_json(const SystemConfig& c) {
    nlohmann::ordered_json j;
    j["baseload_build_per_mw_year"] = c.baseload_build;
    j["baseload_gen_per_mwh"] = c.baseload_gen;
    j["peaking_build_per_mw_year"] = c.peaking_build;
    j["peaking_gen_per_mwh"] = c.peaking_gen;
    j["wind_build_per_mw_year"] = c.wind_build;
    j["wind_gen_per_mwh"] = c.wind_gen;
    j["line_build_per_mw_year"] = c.line_build;
    j["voll_per_mwh"] = c.voll;
    j["block_size_mw"] = c.block_size_mw;
    j["ramp_fraction"] = c.ramp_fraction;
    return j;
}

inline SystemConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("config document must be a JSON object");
    static const std::array<const char*, 10> keys = {
        "baseload_build_per_mw_year", "baseload_gen_per_mwh",
        "peaking_build_per_mw_year",  "peaking_gen_per_mwh",
        "wind_build_per_mw_year",     "wind_gen_per_mwh",
        "line_build_per_mw_year",     "voll_per_mwh",
        "block_size_mw",              "ramp_fraction",
    };
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : keys) {
            if (item.key() == k) known = true;
        }
        if (!known) throw SchemaError("unknown config key '" + item.key() + "'");
    }
    SystemConfig c;
    auto get = [&j](const char* key) {
        auto it = j.find(key);
        if (it == j.end()) throw SchemaError(std::string("missing config key '") + key + "'");
        if (!it->is_number()) {
            throw SchemaError(std::string("config key '") + key + "' must be a number");
        }
        return it->get<double>();
    };
    c.baseload_build = get("baseload_build_per_mw_year");
    c.baseload_gen = get("baseload_gen_per_mwh");
    c.peaking_build = get("peaking_build_per_mw_year");
    c.peaking_gen = get("peaking_gen_per_mwh");
    c.wind_build = get("wind_build_per_mw_year");
    c.wind_gen = get("wind_gen_per_mwh");
    c.line_build = get("line_build_per_mw_year");
    c.voll = get("voll_per_mwh");
    c.block_size_mw = get("block_size_mw");
    c.ramp_fraction = get("ramp_fraction");
    validate_config(c);
    return c;
}

inline SystemConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("config file '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

// Installed capacities in MW, all non-negative.
struct Design {
    std::array<double, kDispatchSlotCount> dispatch{};  // kDispatchSlots order
    std::array<double, 3> wind{};                       // kWindBuses order
    std::array<double, kCorridorCount> line{};          // kCorridors order
};

inline void validate_design(const Design& d) {
    for (double v : d.dispatch) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw IntegrityError("negative dispatch capacity");
    }
    for (double v : d.wind) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw IntegrityError("negative wind capacity");
    }
    for (double v : d.line) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw IntegrityError("negative line capacity");
    }
}

// Annual fixed cost of a design under the given prices.
inline double design_build_cost(const Design& d, const SystemConfig& c) {
    double total = 0.0;
    for (int s = 0; s < kDispatchSlotCount; ++s) {
        total += c.build_cost(kDispatchSlots[static_cast<std::size_t>(s)].tech) * d.dispatch[static_cast<std::size_t>(s)];
    }
    for (double v : d.wind) total += c.wind_build * v;
    for (double v : d.line) total += c.line_build * v;
    return total;
}

inline nlohmann::ordered_json design_to_json(const Design& d) {
    nlohmann::ordered_json j;
    for (int s = 0; s < kDispatchSlotCount; ++s) {
        j[slot_name(s)] = d.dispatch[static_cast<std::size_t>(s)];
    }
    for (int w = 0; w < 3; ++w) j[wind_name(w)] = d.wind[static_cast<std::size_t>(w)];
    for (int c = 0; c < kCorridorCount; ++c) {
        j[corridor_name(c)] = d.line[static_cast<std::size_t>(c)];
    }
    return j;
}

inline Design design_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("design document must be a JSON object");
    Design d;
    auto get = [&j](const std::string& key) {
        auto it = j.find(key);
        if (it == j.end()) throw SchemaError("missing design key '" + key + "'");
        if (!it->is_number()) throw SchemaError("design key '" + key + "' must be a number");
        return it->get<double>();
    };
    for (int s = 0; s < kDispatchSlotCount; ++s) {
        d.dispatch[static_cast<std::size_t>(s)] = get(slot_name(s));
    }
    for (int w = 0; w < 3; ++w) d.wind[static_cast<std::size_t>(w)] = get(wind_name(w));
    for (int c = 0; c < kCorridorCount; ++c) {
        d.line[static_cast<std::size_t>(c)] = get(corridor_name(c));
    }
    validate_design(d);
    return d;
}

// Hourly dispatch for a fixed design over some table. Flows are signed in
// corridor orientation; curtailed wind is the unused part of cap * cf.
struct Operation {
    std::vector<std::array<double, kDispatchSlotCount>> dispatch_gen;
    std::vector<std::array<double, 3>> wind_gen;
    std::vector<std::array<double, kCorridorCount>> flow;
    std::vector<std::array<double, 3>> unserved;   // kDemandBuses order
    std::vector<std::array<double, 3>> curtailed;  // kWindBuses order
    double cost = 0.0;  // generation plus unserved-energy cost, currency

    std::int64_t hours() const { return static_cast<std::int64_t>(dispatch_gen.size()); }
};

}  // namespace issamp
