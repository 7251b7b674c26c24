#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "issamp/errors.hpp"
#include "issamp/lp.hpp"
#include "issamp/sample.hpp"
#include "issamp/system.hpp"
#include "issamp/timeseries.hpp"

namespace issamp {

enum class Variant { lp, milp };

inline const char* to_string(Variant v) { return v == Variant::lp ? "lp" : "milp"; }

inline Variant variant_from_string(const std::string& s) {
    if (s == "lp") return Variant::lp;
    if (s == "milp") return Variant::milp;
    throw UsageError("unknown variant '" + s + "', expected lp or milp");
}

// Optimization instance plus the variable bookkeeping needed to read design
// and dispatch values back out of a solution vector.
struct ModelInstance {
    LinearProgram lp;
    Variant variant = Variant::lp;
    bool planning = true;
    double annualization = 1.0;  // planning objective scale, 365 / weight-days

    // Capacity variable indices; -1 in operational instances where the
    // capacities are fixed numbers instead.
    std::array<int, kDispatchSlotCount> cap_dispatch;
    std::array<int, 3> cap_wind;
    std::array<int, kCorridorCount> cap_line;
    std::array<int, kDispatchSlotCount> block_count;  // integer vars, baseload slots only

    struct StepVars {
        std::array<int, kDispatchSlotCount> gen;
        std::array<int, 3> wind;
        std::array<int, 3> curtail;
        std::array<int, kCorridorCount> flow;
        std::array<int, 3> unserved;
    };
    struct StepInfo {
        std::array<double, 3> demand;  // kDemandBuses order
        std::array<double, 3> cf;      // kWindBuses order
        double weight_scale = 1.0;     // objective multiplier on this step's costs
    };
    std::vector<StepVars> steps;
    std::vector<StepInfo> step_info;

    SystemConfig config;
    Design fixed_design;  // operational instances only

    ModelInstance() {
        cap_dispatch.fill(-1);
        cap_wind.fill(-1);
        cap_line.fill(-1);
        block_count.fill(-1);
    }
};

namespace model_detail {

// Buses carrying demand or wind, as positions into the fixed arrays; -1
// where a bus has neither.
inline int demand_pos(int bus) {
    for (int i = 0; i < 3; ++i) {
        if (kDemandBuses[static_cast<std::size_t>(i)] == bus) return i;
    }
    return -1;
}

inline int wind_pos(int bus) {
    for (int i = 0; i < 3; ++i) {
        if (kWindBuses[static_cast<std::size_t>(i)] == bus) return i;
    }
    return -1;
}

// Adds the per-step dispatch variables and network rows shared by the
// planning and operational builders. Capacity terms are supplied by the
// caller: either variable indices (planning) or fixed values baked into
// bounds and right-hand sides (operational).
struct StepData {
    std::array<double, 3> demand;
    std::array<double, 3> cf;
};

inline std::string tag(const std::string& base, std::int64_t t) {
    return base + "_t" + std::to_string(t);
}

}  // namespace model_detail

// Planning objective scale: sample weights cover weight_days of operation,
// and the dispatch-cost term is blown up to a full year so that build and
// operating costs are commensurate.
inline double planning_annualization(const WeightedSample& sample) {
    double weight_days = sample.total_weight();
    if (sample.kind == WeightedSample::Kind::step) weight_days /= kHoursPerDay;
    return static_cast<double>(kDaysPerYear) / weight_days;
}

// Planning instance: capacity and dispatch chosen together over the weighted
// sample.
inline ModelInstance build_planning_problem(const WeightedSample& sample,
                                            const SystemConfig& config, Variant variant) {
    validate_sample(sample);
    validate_config(config);

    ModelInstance mi;
    mi.variant = variant;
    mi.planning = true;
    mi.config = config;
    mi.annualization = planning_annualization(sample);

    auto& lp = mi.lp;
    for (int s = 0; s < kDispatchSlotCount; ++s) {
        const auto& slot = kDispatchSlots[static_cast<std::size_t>(s)];
        mi.cap_dispatch[static_cast<std::size_t>(s)] =
            lp.add_variable("cap_" + slot_name(s), 0.0, kInf, config.build_cost(slot.tech));
    }
    for (int w = 0; w < 3; ++w) {
        mi.cap_wind[static_cast<std::size_t>(w)] =
            lp.add_variable("cap_" + wind_name(w), 0.0, kInf, config.wind_build);
    }
    for (int c = 0; c < kCorridorCount; ++c) {
        mi.cap_line[static_cast<std::size_t>(c)] =
            lp.add_variable("cap_" + corridor_name(c), 0.0, kInf, config.line_build);
    }
    if (variant == Variant::milp) {
        for (int s = 0; s < kDispatchSlotCount; ++s) {
            const auto& slot = kDispatchSlots[static_cast<std::size_t>(s)];
            if (slot.tech != Tech::baseload) continue;
            const int nb = lp.add_variable("blocks_bus" + std::to_string(slot.bus), 0.0,
                                           kInf, 0.0, true);
            mi.block_count[static_cast<std::size_t>(s)] = nb;
            lp.add_constraint("blockdef_bus" + std::to_string(slot.bus), RowSense::eq, 0.0,
                              {{mi.cap_dispatch[static_cast<std::size_t>(s)], 1.0},
                               {nb, -config.block_size_mw}});
        }
    }

    std::int64_t t = 0;
    for (std::size_t e = 0; e < sample.entries.size(); ++e) {
        const auto& entry = sample.entries[e];
        // Step-kind weights count hours, and the annualization above was
        // computed from the same unit, so one formula covers both kinds.
        const double scale = mi.annualization * entry.weight;
        // Ramp limits couple hour t to t-1 only inside one entry, or across
        // the boundary when consecutive entries continue one chronology.
        const bool couple_to_previous =
            e > 0 && sample.chronological &&
            entry.data.start_epoch_hour ==
                sample.entries[e - 1].data.start_epoch_hour + sample.entries[e - 1].data.length();
        for (std::int64_t h = 0; h < entry.data.length(); ++h, ++t) {
            ModelInstance::StepVars sv;
            ModelInstance::StepInfo si;
            si.weight_scale = scale;
            for (int i = 0; i < 3; ++i) {
                si.demand[static_cast<std::size_t>(i)] =
                    entry.data.demand[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
                si.cf[static_cast<std::size_t>(i)] =
                    entry.data.wind_cf[static_cast<std::size_t>(i)][static_cast<std::size_t>(h)];
            }

            for (int s = 0; s < kDispatchSlotCount; ++s) {
                const auto& slot = kDispatchSlots[static_cast<std::size_t>(s)];
                sv.gen[static_cast<std::size_t>(s)] = lp.add_variable(
                    model_detail::tag("gen_" + slot_name(s), t), 0.0, kInf,
                    scale * config.gen_cost(slot.tech));
            }
            for (int w = 0; w < 3; ++w) {
                sv.wind[static_cast<std::size_t>(w)] = lp.add_variable(
                    model_detail::tag("gen_" + wind_name(w), t), 0.0, kInf,
                    scale * config.wind_gen);
                sv.curtail[static_cast<std::size_t>(w)] = lp.add_variable(
                    model_detail::tag("curtail_bus" +
                                          std::to_string(kWindBuses[static_cast<std::size_t>(w)]),
                                      t),
                    0.0, kInf, 0.0);
            }
            for (int c = 0; c < kCorridorCount; ++c) {
                sv.flow[static_cast<std::size_t>(c)] = lp.add_variable(
                    model_detail::tag("flow_" + std::to_string(kCorridors[static_cast<std::size_t>(c)].from) +
                                          "_" + std::to_string(kCorridors[static_cast<std::size_t>(c)].to),
                                      t),
                    -kInf, kInf, 0.0);
            }
            for (int d = 0; d < 3; ++d) {
                sv.unserved[static_cast<std::size_t>(d)] = lp.add_variable(
                    model_detail::tag("unserved_bus" +
                                          std::to_string(kDemandBuses[static_cast<std::size_t>(d)]),
                                      t),
                    0.0, kInf, scale * config.voll);
            }

            for (int bus = 1; bus <= 6; ++bus) {
                std::vector<std::pair<int, double>> coeffs;
                for (int s = 0; s < kDispatchSlotCount; ++s) {
                    if (kDispatchSlots[static_cast<std::size_t>(s)].bus == bus) {
                        coeffs.emplace_back(sv.gen[static_cast<std::size_t>(s)], 1.0);
                    }
                }
                const int wp = model_detail::wind_pos(bus);
                if (wp >= 0) coeffs.emplace_back(sv.wind[static_cast<std::size_t>(wp)], 1.0);
                for (int c = 0; c < kCorridorCount; ++c) {
                    const auto& cor = kCorridors[static_cast<std::size_t>(c)];
                    if (cor.to == bus) coeffs.emplace_back(sv.flow[static_cast<std::size_t>(c)], 1.0);
                    if (cor.from == bus) coeffs.emplace_back(sv.flow[static_cast<std::size_t>(c)], -1.0);
                }
                const int dp = model_detail::demand_pos(bus);
                double rhs = 0.0;
                if (dp >= 0) {
                    coeffs.emplace_back(sv.unserved[static_cast<std::size_t>(dp)], 1.0);
                    rhs = si.demand[static_cast<std::size_t>(dp)];
                }
                lp.add_constraint(model_detail::tag("balance_bus" + std::to_string(bus), t),
                                  RowSense::eq, rhs, std::move(coeffs));
            }
            for (int w = 0; w < 3; ++w) {
                lp.add_constraint(
                    model_detail::tag("windcap_bus" +
                                          std::to_string(kWindBuses[static_cast<std::size_t>(w)]),
                                      t),
                    RowSense::eq, 0.0,
                    {{sv.wind[static_cast<std::size_t>(w)], 1.0},
                     {sv.curtail[static_cast<std::size_t>(w)], 1.0},
                     {mi.cap_wind[static_cast<std::size_t>(w)], -si.cf[static_cast<std::size_t>(w)]}});
            }
            for (int s = 0; s < kDispatchSlotCount; ++s) {
                lp.add_constraint(model_detail::tag("gencap_" + slot_name(s), t), RowSense::le,
                                  0.0,
                                  {{sv.gen[static_cast<std::size_t>(s)], 1.0},
                                   {mi.cap_dispatch[static_cast<std::size_t>(s)], -1.0}});
            }
            for (int c = 0; c < kCorridorCount; ++c) {
                const std::string base = std::to_string(kCorridors[static_cast<std::size_t>(c)].from) +
                                         "_" + std::to_string(kCorridors[static_cast<std::size_t>(c)].to);
                lp.add_constraint(model_detail::tag("flowcap_pos_" + base, t), RowSense::le, 0.0,
                                  {{sv.flow[static_cast<std::size_t>(c)], 1.0},
                                   {mi.cap_line[static_cast<std::size_t>(c)], -1.0}});
                lp.add_constraint(model_detail::tag("flowcap_neg_" + base, t), RowSense::le, 0.0,
                                  {{sv.flow[static_cast<std::size_t>(c)], -1.0},
                                   {mi.cap_line[static_cast<std::size_t>(c)], -1.0}});
            }
            if (variant == Variant::milp && (h > 0 || couple_to_previous)) {
                const auto& prev = mi.steps.back();
                for (int s = 0; s < kDispatchSlotCount; ++s) {
                    if (kDispatchSlots[static_cast<std::size_t>(s)].tech != Tech::baseload) continue;
                    const int g_now = sv.gen[static_cast<std::size_t>(s)];
                    const int g_prev = prev.gen[static_cast<std::size_t>(s)];
                    const int cap = mi.cap_dispatch[static_cast<std::size_t>(s)];
                    const std::string bus = std::to_string(kDispatchSlots[static_cast<std::size_t>(s)].bus);
                    lp.add_constraint(model_detail::tag("rampup_bus" + bus, t), RowSense::le, 0.0,
                                      {{g_now, 1.0}, {g_prev, -1.0}, {cap, -config.ramp_fraction}});
                    lp.add_constraint(model_detail::tag("rampdn_bus" + bus, t), RowSense::le, 0.0,
                                      {{g_prev, 1.0}, {g_now, -1.0}, {cap, -config.ramp_fraction}});
                }
            }

            mi.steps.push_back(sv);
            mi.step_info.push_back(si);
        }
    }
    return mi;
}

// Operational instance: the design is fixed, so capacity limits become
// variable bounds and wind availability becomes a per-hour right-hand side.
// Feasible for any design because unserved demand is unbounded.
inline ModelInstance build_operational_problem(const TimeSeriesTable& table,
                                               const Design& design,
                                               const SystemConfig& config, Variant variant) {
    validate_table(table);
    validate_design(design);
    validate_config(config);

    ModelInstance mi;
    mi.variant = variant;
    mi.planning = false;
    mi.config = config;
    mi.fixed_design = design;

    auto& lp = mi.lp;
    const std::int64_t n = table.length();
    mi.steps.reserve(static_cast<std::size_t>(n));
    mi.step_info.reserve(static_cast<std::size_t>(n));

    for (std::int64_t t = 0; t < n; ++t) {
        ModelInstance::StepVars sv;
        ModelInstance::StepInfo si;
        for (int i = 0; i < 3; ++i) {
            si.demand[static_cast<std::size_t>(i)] =
                table.demand[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
            si.cf[static_cast<std::size_t>(i)] =
                table.wind_cf[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
        }

        for (int s = 0; s < kDispatchSlotCount; ++s) {
            const auto& slot = kDispatchSlots[static_cast<std::size_t>(s)];
            sv.gen[static_cast<std::size_t>(s)] = lp.add_variable(
                model_detail::tag("gen_" + slot_name(s), t), 0.0,
                design.dispatch[static_cast<std::size_t>(s)], config.gen_cost(slot.tech));
        }
        for (int w = 0; w < 3; ++w) {
            sv.wind[static_cast<std::size_t>(w)] = lp.add_variable(
                model_detail::tag("gen_" + wind_name(w), t), 0.0, kInf, config.wind_gen);
            sv.curtail[static_cast<std::size_t>(w)] = lp.add_variable(
                model_detail::tag(
                    "curtail_bus" + std::to_string(kWindBuses[static_cast<std::size_t>(w)]), t),
                0.0, kInf, 0.0);
        }
        for (int c = 0; c < kCorridorCount; ++c) {
            const double capL = design.line[static_cast<std::size_t>(c)];
            sv.flow[static_cast<std::size_t>(c)] = lp.add_variable(
                model_detail::tag("flow_" + std::to_string(kCorridors[static_cast<std::size_t>(c)].from) +
                                      "_" + std::to_string(kCorridors[static_cast<std::size_t>(c)].to),
                                  t),
                -capL, capL, 0.0);
        }
        for (int d = 0; d < 3; ++d) {
            sv.unserved[static_cast<std::size_t>(d)] = lp.add_variable(
                model_detail::tag("unserved_bus" +
                                      std::to_string(kDemandBuses[static_cast<std::size_t>(d)]),
                                  t),
                0.0, kInf, config.voll);
        }

        for (int bus = 1; bus <= 6; ++bus) {
            std::vector<std::pair<int, double>> coeffs;
            for (int s = 0; s < kDispatchSlotCount; ++s) {
                if (kDispatchSlots[static_cast<std::size_t>(s)].bus == bus) {
                    coeffs.emplace_back(sv.gen[static_cast<std::size_t>(s)], 1.0);
                }
            }
            const int wp = model_detail::wind_pos(bus);
            if (wp >= 0) coeffs.emplace_back(sv.wind[static_cast<std::size_t>(wp)], 1.0);
            for (int c = 0; c < kCorridorCount; ++c) {
                const auto& cor = kCorridors[static_cast<std::size_t>(c)];
                if (cor.to == bus) coeffs.emplace_back(sv.flow[static_cast<std::size_t>(c)], 1.0);
                if (cor.from == bus) coeffs.emplace_back(sv.flow[static_cast<std::size_t>(c)], -1.0);
            }
            const int dp = model_detail::demand_pos(bus);
            double rhs = 0.0;
            if (dp >= 0) {
                coeffs.emplace_back(sv.unserved[static_cast<std::size_t>(dp)], 1.0);
                rhs = si.demand[static_cast<std::size_t>(dp)];
            }
            lp.add_constraint(model_detail::tag("balance_bus" + std::to_string(bus), t),
                              RowSense::eq, rhs, std::move(coeffs));
        }
        for (int w = 0; w < 3; ++w) {
            lp.add_constraint(
                model_detail::tag(
                    "windcap_bus" + std::to_string(kWindBuses[static_cast<std::size_t>(w)]), t),
                RowSense::eq,
                design.wind[static_cast<std::size_t>(w)] * si.cf[static_cast<std::size_t>(w)],
                {{sv.wind[static_cast<std::size_t>(w)], 1.0},
                 {sv.curtail[static_cast<std::size_t>(w)], 1.0}});
        }
        if (variant == Variant::milp && t > 0) {
            const auto& prev = mi.steps.back();
            for (int s = 0; s < kDispatchSlotCount; ++s) {
                if (kDispatchSlots[static_cast<std::size_t>(s)].tech != Tech::baseload) continue;
                const double limit =
                    config.ramp_fraction * design.dispatch[static_cast<std::size_t>(s)];
                const int g_now = sv.gen[static_cast<std::size_t>(s)];
                const int g_prev = prev.gen[static_cast<std::size_t>(s)];
                const std::string bus = std::to_string(kDispatchSlots[static_cast<std::size_t>(s)].bus);
                lp.add_constraint(model_detail::tag("rampup_bus" + bus, t), RowSense::le, limit,
                                  {{g_now, 1.0}, {g_prev, -1.0}});
                lp.add_constraint(model_detail::tag("rampdn_bus" + bus, t), RowSense::le, limit,
                                  {{g_prev, 1.0}, {g_now, -1.0}});
            }
        }

        mi.steps.push_back(sv);
        mi.step_info.push_back(si);
    }
    return mi;
}

// Reads capacities out of a planning solution. Integer block counts are
// rounded to exact multiples when within 1e-6 relative of one; anything
// further off is a solver fault, not a rounding matter.
inline Design extract_design(const ModelInstance& mi, const SolveResult& result) {
    if (!mi.planning) throw IntegrityError("extract_design needs a planning instance");
    if (result.status != SolveStatus::optimal) {
        throw NotOptimal(std::string("cannot extract design from status ") +
                         to_string(result.status));
    }
    auto clean = [](double v, const std::string& what) {
        if (v < -1e-6) throw IntegrityError(what + " is negative: " + format_double(v));
        return v < 0.0 ? 0.0 : v;
    };
    Design d;
    for (int s = 0; s < kDispatchSlotCount; ++s) {
        d.dispatch[static_cast<std::size_t>(s)] =
            clean(result.values[static_cast<std::size_t>(mi.cap_dispatch[static_cast<std::size_t>(s)])],
                  "capacity " + slot_name(s));
    }
    for (int w = 0; w < 3; ++w) {
        d.wind[static_cast<std::size_t>(w)] =
            clean(result.values[static_cast<std::size_t>(mi.cap_wind[static_cast<std::size_t>(w)])],
                  "capacity " + wind_name(w));
    }
    for (int c = 0; c < kCorridorCount; ++c) {
        d.line[static_cast<std::size_t>(c)] =
            clean(result.values[static_cast<std::size_t>(mi.cap_line[static_cast<std::size_t>(c)])],
                  "capacity " + corridor_name(c));
    }
    if (mi.variant == Variant::milp) {
        for (int s = 0; s < kDispatchSlotCount; ++s) {
            const int nb = mi.block_count[static_cast<std::size_t>(s)];
            if (nb < 0) continue;
            const double raw = result.values[static_cast<std::size_t>(nb)];
            const double rounded = std::round(raw);
            if (std::abs(raw - rounded) > 1e-6 * std::max(1.0, std::abs(rounded))) {
                throw IntegrityError("block count " + slot_name(s) +
                                     " is not integral: " + format_double(raw));
            }
            const double cap = rounded * mi.config.block_size_mw;
            if (std::abs(d.dispatch[static_cast<std::size_t>(s)] - cap) >
                1e-6 * std::max(1.0, cap)) {
                throw IntegrityError("capacity " + slot_name(s) +
                                     " is off its block multiple");
            }
            d.dispatch[static_cast<std::size_t>(s)] = cap;
        }
    }
    validate_design(d);
    return d;
}

// Raw generation-plus-VoLL cost of a dispatch, unweighted and
// un-annualized; equals the LP objective on operational instances.
inline double operation_cost(const SystemConfig& config, const Operation& op) {
    double cost = 0.0;
    for (std::size_t t = 0; t < op.dispatch_gen.size(); ++t) {
        for (int s = 0; s < kDispatchSlotCount; ++s) {
            cost += config.gen_cost(kDispatchSlots[static_cast<std::size_t>(s)].tech) *
                    op.dispatch_gen[t][static_cast<std::size_t>(s)];
        }
        for (int w = 0; w < 3; ++w) cost += config.wind_gen * op.wind_gen[t][static_cast<std::size_t>(w)];
        for (int d = 0; d < 3; ++d) cost += config.voll * op.unserved[t][static_cast<std::size_t>(d)];
    }
    return cost;
}

// Reads hourly dispatch out of a solution. Curtailment comes back from its
// explicit variable; tiny negative noise is clamped, real violations throw.
inline Operation extract_operation(const ModelInstance& mi, const SolveResult& result) {
    if (result.status != SolveStatus::optimal) {
        throw NotOptimal(std::string("cannot extract operation from status ") +
                         to_string(result.status));
    }
    auto clean = [](double v, const char* what) {
        if (v < -1e-6) {
            throw IntegrityError(std::string(what) + " is negative: " + format_double(v));
        }
        return v < 0.0 ? 0.0 : v;
    };
    const std::size_t n = mi.steps.size();
    Operation op;
    op.dispatch_gen.resize(n);
    op.wind_gen.resize(n);
    op.flow.resize(n);
    op.unserved.resize(n);
    op.curtailed.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const auto& sv = mi.steps[t];
        for (int s = 0; s < kDispatchSlotCount; ++s) {
            op.dispatch_gen[t][static_cast<std::size_t>(s)] = clean(
                result.values[static_cast<std::size_t>(sv.gen[static_cast<std::size_t>(s)])],
                "dispatch generation");
        }
        for (int w = 0; w < 3; ++w) {
            op.wind_gen[t][static_cast<std::size_t>(w)] = clean(
                result.values[static_cast<std::size_t>(sv.wind[static_cast<std::size_t>(w)])],
                "wind generation");
            op.curtailed[t][static_cast<std::size_t>(w)] = clean(
                result.values[static_cast<std::size_t>(sv.curtail[static_cast<std::size_t>(w)])],
                "curtailment");
        }
        for (int c = 0; c < kCorridorCount; ++c) {
            op.flow[t][static_cast<std::size_t>(c)] =
                result.values[static_cast<std::size_t>(sv.flow[static_cast<std::size_t>(c)])];
        }
        for (int d = 0; d < 3; ++d) {
            op.unserved[t][static_cast<std::size_t>(d)] = clean(
                result.values[static_cast<std::size_t>(sv.unserved[static_cast<std::size_t>(d)])],
                "unserved demand");
        }
    }
    op.cost = operation_cost(mi.config, op);
    return op;
}

}  // namespace issamp
