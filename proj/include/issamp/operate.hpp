#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "branch_bound.hpp"
#include "errors.hpp"
#include "lp.hpp"
#include "model.hpp"
#include "simplex.hpp"
#include "system.hpp"
#include "timeseries.hpp"

namespace issamp {

// One hour of dispatch under fixed capacities: the raw cost together with its
// sensitivity to each capacity. The hour cost is a convex function of the
// capacity vector, and these sensitivities are a subgradient, so
//   cost(c) >= cost(c0) + d . (c - c0)
// holds for every nonnegative capacity vector c. The decomposed planning
// solve builds its cuts from exactly this inequality.
struct HourEconomics {
    double cost = 0.0;
    std::array<double, kDispatchSlotCount> dcap_dispatch{};
    std::array<double, 3> dcap_wind{};
    std::array<double, kCorridorCount> dcap_line{};
};

// Reusable one-hour dispatch template. Without ramp rows every hour of the
// operational problem is the same 22-variable, 9-row structure; rebinding
// capacities rewrites variable bounds, and each hour supplies only a fresh
// right-hand side. Rows are laid out by the operational builder as
// balance_bus1..6 then the three windcap rows.
class HourTemplate {
public:
    explicit HourTemplate(const SystemConfig& config, const Design& design = Design{},
                          const SimplexOptions& opts = {})
        : opts_(opts) {
        TimeSeriesTable one;
        one.start_epoch_hour = 0;
        for (auto& s : one.demand) s.assign(1, 0.0);
        for (auto& s : one.wind_cf) s.assign(1, 0.0);
        mi_ = build_operational_problem(one, design, config, Variant::lp);
        if (mi_.lp.n_vars() != 22 || mi_.lp.n_rows() != 9) {
            throw IntegrityError("one-hour dispatch template has unexpected shape");
        }
        lb_.resize(22);
        ub_.resize(22);
        for (int j = 0; j < 22; ++j) {
            lb_[static_cast<std::size_t>(j)] = mi_.lp.var(j).lb;
            ub_[static_cast<std::size_t>(j)] = mi_.lp.var(j).ub;
        }
        rhs_.assign(9, 0.0);
        set_design(design);
    }

    void set_design(const Design& design) {
        design_ = design;
        const auto& v = mi_.steps.front();
        for (int s = 0; s < kDispatchSlotCount; ++s) {
            ub_[static_cast<std::size_t>(v.gen[static_cast<std::size_t>(s)])] =
                design.dispatch[static_cast<std::size_t>(s)];
        }
        for (int c = 0; c < kCorridorCount; ++c) {
            const double cap = design.line[static_cast<std::size_t>(c)];
            lb_[static_cast<std::size_t>(v.flow[static_cast<std::size_t>(c)])] = -cap;
            ub_[static_cast<std::size_t>(v.flow[static_cast<std::size_t>(c)])] = cap;
        }
    }

    const Design& design() const { return design_; }
    const SystemConfig& config() const { return mi_.config; }

    // Unserved demand is unbounded, so the hour problem is feasible for any
    // capacities and bounded below by zero cost; anything but optimal means
    // the solver itself broke.
    SolveResult solve(const std::array<double, 3>& demand, const std::array<double, 3>& cf) {
        for (int d = 0; d < 3; ++d) {
            rhs_[static_cast<std::size_t>(kDemandBuses[static_cast<std::size_t>(d)] - 1)] =
                demand[static_cast<std::size_t>(d)];
        }
        for (int w = 0; w < 3; ++w) {
            rhs_[static_cast<std::size_t>(6 + w)] =
                design_.wind[static_cast<std::size_t>(w)] * cf[static_cast<std::size_t>(w)];
        }
        SolveResult r = solve_with_overrides(mi_.lp, lb_, ub_, rhs_, opts_);
        if (r.status != SolveStatus::optimal) {
            throw IntegrityError(std::string("hour dispatch solve ended ") + to_string(r.status));
        }
        return r;
    }

    HourEconomics economics(const SolveResult& r, const std::array<double, 3>& cf) const {
        HourEconomics e;
        e.cost = r.objective;
        const auto& v = mi_.steps.front();
        for (int s = 0; s < kDispatchSlotCount; ++s) {
            const double d =
                r.reduced_costs[static_cast<std::size_t>(v.gen[static_cast<std::size_t>(s)])];
            e.dcap_dispatch[static_cast<std::size_t>(s)] = d < 0.0 ? d : 0.0;
        }
        for (int w = 0; w < 3; ++w) {
            e.dcap_wind[static_cast<std::size_t>(w)] =
                r.row_duals[static_cast<std::size_t>(6 + w)] * cf[static_cast<std::size_t>(w)];
        }
        for (int c = 0; c < kCorridorCount; ++c) {
            const double d =
                r.reduced_costs[static_cast<std::size_t>(v.flow[static_cast<std::size_t>(c)])];
            e.dcap_line[static_cast<std::size_t>(c)] = -std::fabs(d);
        }
        return e;
    }

    void read_hour(const SolveResult& r, Operation& op, std::int64_t t) const {
        const auto& v = mi_.steps.front();
        const auto at = [&](int j) { return r.values[static_cast<std::size_t>(j)]; };
        auto& gen = op.dispatch_gen[static_cast<std::size_t>(t)];
        auto& wind = op.wind_gen[static_cast<std::size_t>(t)];
        auto& flow = op.flow[static_cast<std::size_t>(t)];
        auto& uns = op.unserved[static_cast<std::size_t>(t)];
        auto& cur = op.curtailed[static_cast<std::size_t>(t)];
        for (int s = 0; s < kDispatchSlotCount; ++s) {
            gen[static_cast<std::size_t>(s)] = at(v.gen[static_cast<std::size_t>(s)]);
        }
        for (int w = 0; w < 3; ++w) {
            wind[static_cast<std::size_t>(w)] = at(v.wind[static_cast<std::size_t>(w)]);
            cur[static_cast<std::size_t>(w)] = at(v.curtail[static_cast<std::size_t>(w)]);
        }
        for (int c = 0; c < kCorridorCount; ++c) {
            flow[static_cast<std::size_t>(c)] = at(v.flow[static_cast<std::size_t>(c)]);
        }
        for (int d = 0; d < 3; ++d) {
            uns[static_cast<std::size_t>(d)] = at(v.unserved[static_cast<std::size_t>(d)]);
        }
    }

private:
    ModelInstance mi_;
    std::vector<double> lb_, ub_, rhs_;
    Design design_;
    SimplexOptions opts_;
};

namespace operate_detail {

inline void column_at(const TimeSeriesTable& table, std::int64_t t, std::array<double, 3>& demand,
                      std::array<double, 3>& cf) {
    for (int i = 0; i < 3; ++i) {
        demand[static_cast<std::size_t>(i)] =
            table.demand[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
        cf[static_cast<std::size_t>(i)] =
            table.wind_cf[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
    }
}

}  // namespace operate_detail

// Dispatch of a full table under a fixed design. The LP variant has no
// coupling between hours and is solved hour by hour against one template;
// the MILP variant keeps its ramp rows and is solved whole. Either way this
// counts as a single operational solve of the table.
inline Operation solve_operational(const TimeSeriesTable& table, const Design& design,
                                   const SystemConfig& config, Variant variant,
                                   const SimplexOptions& opts = {}) {
    validate_table(table);
    validate_design(design);
    if (variant == Variant::milp) {
        ModelInstance mi = build_operational_problem(table, design, config, variant);
        MipOptions mopts;
        mopts.lp = opts;
        const SolveResult r = solve_mip(mi.lp, mopts);
        if (r.status != SolveStatus::optimal) {
            throw IntegrityError(std::string("operational solve ended ") + to_string(r.status));
        }
        return extract_operation(mi, r);
    }

    const std::int64_t n = table.length();
    Operation op;
    op.dispatch_gen.resize(static_cast<std::size_t>(n));
    op.wind_gen.resize(static_cast<std::size_t>(n));
    op.flow.resize(static_cast<std::size_t>(n));
    op.unserved.resize(static_cast<std::size_t>(n));
    op.curtailed.resize(static_cast<std::size_t>(n));

    HourTemplate tmpl(config, design, opts);
    std::array<double, 3> demand{};
    std::array<double, 3> cf{};
    for (std::int64_t t = 0; t < n; ++t) {
        operate_detail::column_at(table, t, demand, cf);
        const SolveResult r = tmpl.solve(demand, cf);
        tmpl.read_hour(r, op, t);
    }
    op.cost = operation_cost(config, op);
    return op;
}

}  // namespace issamp
