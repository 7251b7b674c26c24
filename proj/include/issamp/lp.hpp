#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "issamp/errors.hpp"
#include "issamp/util.hpp"

namespace issamp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : std::uint8_t { le, eq, ge };

enum class SolveStatus : std::uint8_t { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::iteration_limit: return "iteration-limit";
    }
    return "?";
}

struct LpVariable {
    std::string name;
    double lb = 0.0;
    double ub = kInf;
    double obj = 0.0;
    bool integral = false;
};

struct LpConstraint {
    std::string name;
    std::vector<std::pair<int, double>> coeffs;  // (variable index, coefficient)
    RowSense sense = RowSense::le;
    double rhs = 0.0;
};

// Minimization instance shared by planning and operational runs. Variables and
// constraints are immutable once the instance is handed to a solver.
class LinearProgram {
public:
    int add_variable(std::string name, double lb, double ub, double obj,
                     bool integral = false) {
        if (!(lb <= ub)) {
            throw RangeError("variable '" + name + "' has lb > ub");
        }
        auto [it, inserted] = index_.emplace(name, static_cast<int>(vars_.size()));
        if (!inserted) throw SchemaError("duplicate variable name '" + name + "'");
        vars_.push_back({std::move(name), lb, ub, obj, integral});
        return it->second;
    }

    int add_constraint(std::string name, RowSense sense, double rhs,
                       std::vector<std::pair<int, double>> coeffs) {
        for (const auto& [v, c] : coeffs) {
            if (v < 0 || v >= static_cast<int>(vars_.size())) {
                throw SchemaError("constraint '" + name + "' references unknown variable");
            }
            if (!std::isfinite(c)) {
                throw RangeError("constraint '" + name + "' has non-finite coefficient");
            }
        }
        rows_.push_back({std::move(name), std::move(coeffs), sense, rhs});
        return static_cast<int>(rows_.size()) - 1;
    }

    int n_vars() const { return static_cast<int>(vars_.size()); }
    int n_rows() const { return static_cast<int>(rows_.size()); }
    const std::vector<LpVariable>& vars() const { return vars_; }
    const std::vector<LpConstraint>& rows() const { return rows_; }
    const LpVariable& var(int j) const { return vars_[static_cast<std::size_t>(j)]; }
    const LpConstraint& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }

    int find_variable(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? -1 : it->second;
    }

    bool has_integers() const {
        for (const auto& v : vars_) {
            if (v.integral) return true;
        }
        return false;
    }

    double objective_value(const std::vector<double>& x) const {
        double obj = 0.0;
        for (std::size_t j = 0; j < vars_.size(); ++j) obj += vars_[j].obj * x[j];
        return obj;
    }

    // Worst violation of any row or bound under x.
    double max_violation(const std::vector<double>& x) const {
        double worst = 0.0;
        for (std::size_t j = 0; j < vars_.size(); ++j) {
            worst = std::max(worst, vars_[j].lb - x[j]);
            worst = std::max(worst, x[j] - vars_[j].ub);
        }
        for (const auto& r : rows_) {
            double act = 0.0;
            for (const auto& [v, c] : r.coeffs) act += c * x[static_cast<std::size_t>(v)];
            if (r.sense == RowSense::le || r.sense == RowSense::eq) {
                worst = std::max(worst, act - r.rhs);
            }
            if (r.sense == RowSense::ge || r.sense == RowSense::eq) {
                worst = std::max(worst, r.rhs - act);
            }
        }
        return worst;
    }

private:
    std::vector<LpVariable> vars_;
    std::vector<LpConstraint> rows_;
    std::unordered_map<std::string, int> index_;
};

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    double objective = 0.0;
    std::vector<double> values;  // by variable index; empty unless optimal
    double mip_gap = 0.0;        // relative; 0 for pure LPs
    std::int64_t iterations = 0;
    std::int64_t nodes = 0;  // branch-and-bound nodes; 0 for pure LPs

    // Pure-LP duals, filled only at optimal: row_duals[i] is the objective
    // sensitivity to that row's right-hand side; reduced_costs[j] splits into
    // the multipliers of variable j's active bound. Together they form a
    // feasible dual point, so the dual objective stays a lower bound when
    // bounds or right-hand sides move.
    std::vector<double> row_duals;
    std::vector<double> reduced_costs;

    double value(const LinearProgram& lp, const std::string& name) const {
        const int j = lp.find_variable(name);
        if (j < 0) throw SchemaError("no variable named '" + name + "'");
        return values[static_cast<std::size_t>(j)];
    }
};

// ---------------------------------------------------------------------------
// CPLEX-LP text export. Formatting rules (documented in docs/formats.md):
// one term per coefficient in declaration order, shortest round-trip numbers,
// explicit coefficient only when |c| != 1, sign folded into the separator.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_lp_terms(std::ostream& out,
                           const std::vector<std::pair<int, double>>& terms,
                           const LinearProgram& lp) {
    bool first = true;
    for (const auto& [v, c] : terms) {
        if (c == 0.0) continue;
        const double mag = std::fabs(c);
        if (first) {
            if (c < 0.0) out << "- ";
            first = false;
        } else {
            out << (c < 0.0 ? " - " : " + ");
        }
        if (mag != 1.0) out << format_double(mag) << ' ';
        out << lp.var(v).name;
    }
    if (first) out << "0 " << lp.var(0).name;  // all-zero row; keep the line parseable
}

}  // namespace detail

inline void write_lp_format(const LinearProgram& lp, std::ostream& out) {
    out << "Minimize\n obj: ";
    std::vector<std::pair<int, double>> obj_terms;
    for (int j = 0; j < lp.n_vars(); ++j) {
        if (lp.var(j).obj != 0.0) obj_terms.emplace_back(j, lp.var(j).obj);
    }
    if (obj_terms.empty()) {
        out << "0 " << (lp.n_vars() > 0 ? lp.var(0).name : "x0");
    } else {
        detail::write_lp_terms(out, obj_terms, lp);
    }
    out << "\nSubject To\n";
    for (int i = 0; i < lp.n_rows(); ++i) {
        const auto& r = lp.row(i);
        out << ' ' << r.name << ": ";
        detail::write_lp_terms(out, r.coeffs, lp);
        switch (r.sense) {
            case RowSense::le: out << " <= "; break;
            case RowSense::eq: out << " = "; break;
            case RowSense::ge: out << " >= "; break;
        }
        out << format_double(r.rhs) << "\n";
    }
    out << "Bounds\n";
    for (int j = 0; j < lp.n_vars(); ++j) {
        const auto& v = lp.var(j);
        if (v.lb == 0.0 && v.ub == kInf) continue;  // default bound
        out << ' ';
        if (v.lb == v.ub) {
            out << v.name << " = " << format_double(v.lb);
        } else if (v.lb == -kInf && v.ub == kInf) {
            out << v.name << " free";
        } else if (v.ub == kInf) {
            out << v.name << " >= " << format_double(v.lb);
        } else if (v.lb == -kInf) {
            out << v.name << " <= " << format_double(v.ub);
        } else {
            out << format_double(v.lb) << " <= " << v.name << " <= " << format_double(v.ub);
        }
        out << "\n";
    }
    if (lp.has_integers()) {
        out << "Generals\n";
        for (int j = 0; j < lp.n_vars(); ++j) {
            if (lp.var(j).integral) out << ' ' << lp.var(j).name << "\n";
        }
    }
    out << "End\n";
}

inline void write_lp_format(const LinearProgram& lp, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_lp_format(lp, out);
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace issamp
