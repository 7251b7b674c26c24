#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "branch_bound.hpp"
#include "errors.hpp"
#include "lp.hpp"
#include "model.hpp"
#include "operate.hpp"
#include "sample.hpp"
#include "simplex.hpp"
#include "system.hpp"

namespace issamp {

struct PlanningOptions {
    SimplexOptions simplex{};
    MipOptions mip{};
    // LP instances spanning more hours than this are solved by capacity
    // cuts instead of one monolithic simplex run. MILP instances always
    // solve monolithically: ramp rows couple their hours.
    std::int64_t decompose_hour_threshold = 360;
    int max_cut_rounds = 400;
    double gap_tol = 1e-9;  // relative bound gap at termination
};

struct PlanningSolution {
    Design design;
    double objective = 0.0;  // annual build plus annualized dispatch cost
    bool decomposed = false;
    int cut_rounds = 0;
};

namespace planning_detail {

constexpr int kCapCount = kDispatchSlotCount + 3 + kCorridorCount;

using CapVector = std::array<double, kCapCount>;

inline CapVector pack(const Design& d) {
    CapVector v{};
    int j = 0;
    for (double x : d.dispatch) v[static_cast<std::size_t>(j++)] = x;
    for (double x : d.wind) v[static_cast<std::size_t>(j++)] = x;
    for (double x : d.line) v[static_cast<std::size_t>(j++)] = x;
    return v;
}

inline Design unpack(const CapVector& v) {
    Design d;
    int j = 0;
    for (double& x : d.dispatch) x = v[static_cast<std::size_t>(j++)];
    for (double& x : d.wind) x = v[static_cast<std::size_t>(j++)];
    for (double& x : d.line) x = v[static_cast<std::size_t>(j++)];
    return d;
}

inline CapVector build_prices(const SystemConfig& config) {
    CapVector v{};
    int j = 0;
    for (int s = 0; s < kDispatchSlotCount; ++s) {
        v[static_cast<std::size_t>(j++)] =
            config.build_cost(kDispatchSlots[static_cast<std::size_t>(s)].tech);
    }
    for (int w = 0; w < 3; ++w) v[static_cast<std::size_t>(j++)] = config.wind_build;
    for (int c = 0; c < kCorridorCount; ++c) v[static_cast<std::size_t>(j++)] = config.line_build;
    return v;
}

inline double dot(const CapVector& a, const CapVector& b) {
    double s = 0.0;
    for (int j = 0; j < kCapCount; ++j) {
        s += a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(j)];
    }
    return s;
}

// One optimality cut: recourse_e >= rhs + g . cap for sample entry e.
struct Cut {
    int entry = 0;
    CapVector g{};
    double rhs = 0.0;
    int idle = 0;  // consecutive master solves where the cut was slack
};

struct EntryEval {
    double value = 0.0;
    CapVector grad{};
};

// Scaled recourse cost of one sample entry at the template's current
// capacities, with its capacity subgradient folded hour by hour.
inline EntryEval eval_entry(HourTemplate& tmpl, const TimeSeriesTable& data, double scale) {
    EntryEval ev;
    std::array<double, 3> demand{};
    std::array<double, 3> cf{};
    for (std::int64_t h = 0; h < data.length(); ++h) {
        operate_detail::column_at(data, h, demand, cf);
        const SolveResult r = tmpl.solve(demand, cf);
        const HourEconomics e = tmpl.economics(r, cf);
        ev.value += e.cost;
        int j = 0;
        for (double g : e.dcap_dispatch) ev.grad[static_cast<std::size_t>(j++)] += g;
        for (double g : e.dcap_wind) ev.grad[static_cast<std::size_t>(j++)] += g;
        for (double g : e.dcap_line) ev.grad[static_cast<std::size_t>(j++)] += g;
    }
    ev.value *= scale;
    for (double& g : ev.grad) g *= scale;
    return ev;
}

// The recourse variables are expressed in units of `unit` currency so that
// cut rows mix coefficients of comparable size with the capacity columns;
// in raw currency the matrix spans ten orders of magnitude and the basis
// conditioning goes with it. The objective stays in raw currency.
inline LinearProgram build_master(const SystemConfig& config, int entries,
                                  const std::vector<Cut>& cuts, double unit) {
    LinearProgram lp;
    for (int s = 0; s < kDispatchSlotCount; ++s) {
        lp.add_variable("cap_" + slot_name(s), 0.0, kInf,
                        config.build_cost(kDispatchSlots[static_cast<std::size_t>(s)].tech));
    }
    for (int w = 0; w < 3; ++w) {
        lp.add_variable("cap_" + wind_name(w), 0.0, kInf, config.wind_build);
    }
    for (int c = 0; c < kCorridorCount; ++c) {
        lp.add_variable("cap_" + corridor_name(c), 0.0, kInf, config.line_build);
    }
    for (int e = 0; e < entries; ++e) {
        lp.add_variable("recourse_e" + std::to_string(e), 0.0, kInf, unit);
    }
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        const Cut& cut = cuts[k];
        std::vector<std::pair<int, double>> coeffs;
        coeffs.emplace_back(kCapCount + cut.entry, 1.0);
        for (int j = 0; j < kCapCount; ++j) {
            const double g = cut.g[static_cast<std::size_t>(j)];
            if (g != 0.0) coeffs.emplace_back(j, -g / unit);
        }
        lp.add_constraint("cut" + std::to_string(k), RowSense::ge, cut.rhs / unit,
                          std::move(coeffs));
    }
    return lp;
}

}  // namespace planning_detail

// Capacity plan over a weighted sample. Small LP instances and every MILP
// instance solve as one model; large LP instances are split into a capacity
// master and per-entry recourse evaluated hour by hour, tightened with
// subgradient cuts until the bound gap closes. Both routes find the same
// optimum, and either counts as a single planning solve.
inline PlanningSolution solve_planning(const WeightedSample& sample, const SystemConfig& config,
                                       Variant variant, const PlanningOptions& opts = {}) {
    validate_sample(sample);
    validate_config(config);

    std::int64_t hours = 0;
    for (const auto& e : sample.entries) hours += e.data.length();

    const auto monolithic = [&]() {
        ModelInstance mi = build_planning_problem(sample, config, variant);
        const SolveResult r = variant == Variant::milp ? solve_mip(mi.lp, opts.mip)
                                                       : solve_lp(mi.lp, opts.simplex);
        if (r.status != SolveStatus::optimal) {
            throw IntegrityError(std::string("planning solve ended ") + to_string(r.status));
        }
        PlanningSolution out;
        out.design = extract_design(mi, r);
        out.objective = r.objective;
        return out;
    };

    if (variant == Variant::milp || hours <= opts.decompose_hour_threshold) {
        return monolithic();
    }

    using namespace planning_detail;
    const double annualization = planning_annualization(sample);
    const int entries = static_cast<int>(sample.entries.size());
    const CapVector prices = build_prices(config);

    HourTemplate tmpl(config, Design{}, opts.simplex);
    std::vector<Cut> cuts;
    cuts.reserve(static_cast<std::size_t>(entries) * 32);

    double best_ub = std::numeric_limits<double>::infinity();
    Design best_design;
    double unit = 1.0;
    double lb = -std::numeric_limits<double>::infinity();
    for (int round = 1; round <= opts.max_cut_rounds; ++round) {
        LinearProgram master = build_master(config, entries, cuts, unit);
        const SolveResult mr = solve_lp(master, opts.simplex);
        if (mr.status != SolveStatus::optimal) {
            throw IntegrityError(std::string("cut master ended ") + to_string(mr.status));
        }
        // Dropping cuts leaves the master a relaxation, so any round's
        // objective stays a valid lower bound; keep the best one seen.
        lb = std::max(lb, mr.objective);

        CapVector caps{};
        for (int j = 0; j < kCapCount; ++j) {
            // the master's feasibility tolerance can leave a capacity a hair
            // below its zero bound, which the hour template cannot accept
            caps[static_cast<std::size_t>(j)] =
                std::max(0.0, mr.values[static_cast<std::size_t>(j)]);
        }
        const Design trial = unpack(caps);
        tmpl.set_design(trial);

        // Retire cuts that have stayed slack for several rounds; the master
        // otherwise accumulates one row per entry per round and its own
        // solves come to dominate large-sample runs.
        for (Cut& cut : cuts) {
            double act = mr.values[static_cast<std::size_t>(kCapCount + cut.entry)];
            for (int j = 0; j < kCapCount; ++j) {
                act -= cut.g[static_cast<std::size_t>(j)] / unit * caps[static_cast<std::size_t>(j)];
            }
            const double scaled_rhs = cut.rhs / unit;
            const bool binding = act - scaled_rhs <= 1e-7 * std::max(1.0, std::fabs(scaled_rhs));
            cut.idle = binding ? 0 : cut.idle + 1;
        }
        cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                                  [](const Cut& c) { return c.idle >= 6; }),
                   cuts.end());

        double ub = dot(prices, caps);
        for (int e = 0; e < entries; ++e) {
            const double scale =
                annualization * sample.entries[static_cast<std::size_t>(e)].weight;
            const EntryEval ev =
                eval_entry(tmpl, sample.entries[static_cast<std::size_t>(e)].data, scale);
            ub += ev.value;
            cuts.push_back(Cut{e, ev.grad, ev.value - dot(ev.grad, caps)});
        }
        if (round == 1) {
            // Frozen after the first batch: those cuts see every capacity at
            // zero, where the recourse gradients are at their steepest.
            for (const Cut& cut : cuts) {
                for (double g : cut.g) unit = std::max(unit, std::fabs(g));
            }
        }
        if (ub < best_ub) {
            best_ub = ub;
            best_design = trial;
        }
        if (best_ub - lb <= opts.gap_tol * std::max(1.0, std::fabs(best_ub))) {
            PlanningSolution out;
            out.design = best_design;
            out.objective = best_ub;
            out.decomposed = true;
            out.cut_rounds = round;
            return out;
        }
    }
    // The cut loop converges finitely in exact arithmetic; running out of
    // rounds means numerics got in the way, and the monolithic route still
    // produces the answer.
    return monolithic();
}

}  // namespace issamp
