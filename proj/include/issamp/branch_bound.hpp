#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "issamp/lp.hpp"
#include "issamp/simplex.hpp"

namespace issamp {

struct MipOptions {
    SimplexOptions lp{};
    double int_tol = 1e-6;  // fractionality below this counts as integral
    double rel_gap = 1e-4;  // relative optimality gap at termination
    std::int64_t max_nodes = 1000000;
};

namespace mip_detail {

// Branching decisions are stored as a chain of single-bound tightenings so a
// node costs O(1) memory; bounds are materialized by walking to the root.
struct Node {
    int parent = -1;
    int var = -1;
    double value = 0.0;
    bool up = false;  // true: lb <- value, false: ub <- value
    double bound = 0.0;
};

struct HeapEntry {
    double bound;
    std::int64_t id;
    int idx;
};

struct HeapCmp {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;  // older nodes first on equal bounds
    }
};

}  // namespace mip_detail

// Best-first branch and bound over LP relaxations. Branches on the most
// fractional integer variable, lowest index on ties. Outcomes are reported
// through the result status, never thrown.
inline SolveResult solve_mip(const LinearProgram& lp, const MipOptions& opts = {}) {
    std::vector<int> int_vars;
    for (int j = 0; j < lp.n_vars(); ++j) {
        if (lp.var(j).integral) int_vars.push_back(j);
    }
    if (int_vars.empty()) {
        SolveResult res = solve_lp(lp, opts.lp);
        res.nodes = 1;
        return res;
    }

    std::vector<double> root_lb(lp.n_vars()), root_ub(lp.n_vars());
    for (int j = 0; j < lp.n_vars(); ++j) {
        root_lb[j] = lp.var(j).lb;
        root_ub[j] = lp.var(j).ub;
    }

    std::vector<mip_detail::Node> nodes;
    std::priority_queue<mip_detail::HeapEntry, std::vector<mip_detail::HeapEntry>,
                        mip_detail::HeapCmp>
        heap;
    nodes.push_back({});  // root: no tightening
    heap.push({-kInf, 0, 0});
    std::int64_t next_id = 1;

    SolveResult best;
    bool have_incumbent = false;
    double cutoff = kInf;
    double best_bound = -kInf;
    std::int64_t explored = 0;
    std::int64_t total_iters = 0;

    std::vector<double> lb(root_lb), ub(root_ub);

    const auto gap_of = [&](double inc, double bnd) {
        if (bnd == -kInf) return kInf;
        return std::max(0.0, (inc - bnd) / std::max(1.0, std::fabs(inc)));
    };

    while (!heap.empty()) {
        const auto top = heap.top();
        heap.pop();
        best_bound = std::max(best_bound, top.bound);
        if (have_incumbent && top.bound >= cutoff) break;  // all open nodes prunable
        if (explored >= opts.max_nodes) {
            SolveResult res = have_incumbent ? best : SolveResult{};
            res.status = SolveStatus::iteration_limit;
            res.nodes = explored;
            res.iterations = total_iters;
            res.mip_gap = have_incumbent ? gap_of(best.objective, best_bound) : kInf;
            return res;
        }

        // materialize bounds for this node
        lb = root_lb;
        ub = root_ub;
        for (int at = top.idx; at >= 0; at = nodes[at].parent) {
            const auto& nd = nodes[at];
            if (nd.var < 0) continue;
            if (nd.up) {
                if (nd.value > lb[nd.var]) lb[nd.var] = nd.value;
            } else {
                if (nd.value < ub[nd.var]) ub[nd.var] = nd.value;
            }
        }

        const SolveResult rel = simplex_detail::solve_relaxation(lp, lb, ub, opts.lp);
        ++explored;
        total_iters += rel.iterations;

        if (rel.status == SolveStatus::iteration_limit) {
            SolveResult res = have_incumbent ? best : SolveResult{};
            res.status = SolveStatus::iteration_limit;
            res.nodes = explored;
            res.iterations = total_iters;
            res.mip_gap = have_incumbent ? gap_of(best.objective, best_bound) : kInf;
            return res;
        }
        if (rel.status == SolveStatus::unbounded) {
            // only reachable at the root; children are restrictions
            SolveResult res;
            res.status = SolveStatus::unbounded;
            res.nodes = explored;
            res.iterations = total_iters;
            return res;
        }
        if (rel.status == SolveStatus::infeasible) continue;
        if (have_incumbent && rel.objective >= cutoff) continue;

        // most fractional integer variable, lowest index on ties
        int branch_var = -1;
        double branch_frac = opts.int_tol;
        for (int j : int_vars) {
            const double x = rel.values[j];
            const double f = x - std::floor(x);
            const double dist = std::min(f, 1.0 - f);
            if (dist > branch_frac) {
                branch_frac = dist;
                branch_var = j;
            }
        }

        if (branch_var < 0) {
            // integral within tolerance: snap and evaluate exactly
            SolveResult cand = rel;
            for (int j : int_vars) cand.values[j] = std::round(cand.values[j]);
            cand.objective = lp.objective_value(cand.values);
            if (!have_incumbent || cand.objective < best.objective) {
                best = std::move(cand);
                have_incumbent = true;
                cutoff = best.objective -
                         std::max(opts.rel_gap * std::max(1.0, std::fabs(best.objective)), 1e-9);
            }
            continue;
        }

        const double x = rel.values[branch_var];
        const int down_idx = static_cast<int>(nodes.size());
        nodes.push_back({top.idx, branch_var, std::floor(x), false, rel.objective});
        heap.push({rel.objective, next_id++, down_idx});
        const int up_idx = static_cast<int>(nodes.size());
        nodes.push_back({top.idx, branch_var, std::ceil(x), true, rel.objective});
        heap.push({rel.objective, next_id++, up_idx});
    }

    if (!have_incumbent) {
        SolveResult res;
        res.status = SolveStatus::infeasible;
        res.nodes = explored;
        res.iterations = total_iters;
        return res;
    }
    best.status = SolveStatus::optimal;
    best.nodes = explored;
    best.iterations = total_iters;
    best.mip_gap = heap.empty() ? 0.0 : gap_of(best.objective, best_bound);
    return best;
}

}  // namespace issamp
