#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "issamp/errors.hpp"
#include "issamp/lp.hpp"

namespace issamp {

struct SimplexOptions {
    double feas_tol = 1e-7;      // absolute tolerance on constraint residuals
    double opt_tol = 1e-9;       // tolerance on reduced costs
    int bland_threshold = 1000;  // consecutive degenerate pivots before Bland's rule
    std::int64_t max_iterations = 0;  // 0 = derived from instance size
    int refactor_interval = 100;      // eta updates between refactorizations
};

namespace simplex_detail {

inline constexpr double kDropTol = 1e-12;   // entries below this are not stored
inline constexpr double kRatioTol = 1e-11;  // alpha entries below this never block
inline constexpr double kDegenStep = 1e-10;

struct Csc {
    int m = 0;
    int n = 0;
    std::vector<std::int64_t> p;  // column pointers, size n+1
    std::vector<int> i;           // row indices
    std::vector<double> x;        // values
};

// Sparse LU of the basis via left-looking elimination with partial pivoting.
// Columns are processed sparsest-first, which peels singleton columns and
// keeps fill from the wide capacity columns of planning instances contained.
class LuFactors {
public:
    bool factorize(const Csc& A, const std::vector<int>& basis) {
        m_ = static_cast<int>(basis.size());
        order_.resize(m_);
        for (int r = 0; r < m_; ++r) order_[r] = r;
        std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
            const int ca = basis[a], cb = basis[b];
            return (A.p[ca + 1] - A.p[ca]) < (A.p[cb + 1] - A.p[cb]);
        });

        pinv_.assign(m_, -1);
        Lp_.assign(1, 0);
        Li_.clear();
        Lx_.clear();
        Up_.assign(1, 0);
        Ui_.clear();
        Ux_.clear();
        Ud_.assign(m_, 0.0);

        work_.assign(m_, 0.0);
        mark_.assign(m_, -1);
        topo_.resize(m_);
        stack_.resize(m_);
        cptr_.resize(m_);

        for (int k = 0; k < m_; ++k) {
            const int col = basis[order_[k]];
            const int top = reach(A, col, k);
            // eliminate along already-pivoted rows in topological order
            for (int t = top; t < m_; ++t) {
                const int i = topo_[t];
                const int j = pinv_[i];
                if (j < 0) continue;
                const double xi = work_[i];
                if (xi == 0.0) continue;
                for (std::int64_t e = Lp_[j]; e < Lp_[j + 1]; ++e) {
                    work_[Li_[e]] -= Lx_[e] * xi;
                }
            }
            // partial pivoting over rows not yet pivotal
            int ipiv = -1;
            double best = 0.0;
            for (int t = top; t < m_; ++t) {
                const int i = topo_[t];
                if (pinv_[i] >= 0) continue;
                const double a = std::fabs(work_[i]);
                if (a > best) {
                    best = a;
                    ipiv = i;
                }
            }
            if (ipiv < 0 || best < 1e-11) {
                for (int t = top; t < m_; ++t) work_[topo_[t]] = 0.0;
                return false;  // numerically singular basis
            }
            const double piv = work_[ipiv];
            pinv_[ipiv] = k;
            Ud_[k] = piv;
            for (int t = top; t < m_; ++t) {
                const int i = topo_[t];
                const double v = work_[i];
                work_[i] = 0.0;
                if (i == ipiv || std::fabs(v) < kDropTol) continue;
                if (pinv_[i] >= 0 && pinv_[i] < k) {
                    Ui_.push_back(pinv_[i]);
                    Ux_.push_back(v);
                } else {
                    Li_.push_back(i);  // original row id; remapped after the loop
                    Lx_.push_back(v / piv);
                }
            }
            Lp_.push_back(static_cast<std::int64_t>(Li_.size()));
            Up_.push_back(static_cast<std::int64_t>(Ui_.size()));
        }
        for (auto& i : Li_) i = pinv_[i];

        // Inverse permutations and row-wise copies of L and U. The row lists
        // drive the transpose solves; the sparse entry points below touch only
        // the reachable part of each triangle instead of sweeping all of it.
        posof_.resize(m_);
        rowof_.resize(m_);
        for (int k = 0; k < m_; ++k) posof_[order_[k]] = k;
        for (int i = 0; i < m_; ++i) rowof_[pinv_[i]] = i;
        transpose(Lp_, Li_, Lx_, Lrp_, Lri_, Lrx_);
        transpose(Up_, Ui_, Ux_, Urp_, Uri_, Urx_);
        stamp_ = m_;
        pat_.clear();
        inheap_.assign(m_, 0);
        return true;
    }

    // Solve B v = rhs in place. Input indexed by row, output by basis position.
    void ftran(std::vector<double>& v, std::vector<double>& tmp) const {
        tmp.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) tmp[pinv_[i]] = v[i];
        for (int k = 0; k < m_; ++k) {
            const double val = tmp[k];
            if (val == 0.0) continue;
            for (std::int64_t e = Lp_[k]; e < Lp_[k + 1]; ++e) tmp[Li_[e]] -= Lx_[e] * val;
        }
        for (int k = m_ - 1; k >= 0; --k) {
            double val = tmp[k];
            if (val == 0.0) continue;
            val /= Ud_[k];
            tmp[k] = val;
            for (std::int64_t e = Up_[k]; e < Up_[k + 1]; ++e) tmp[Ui_[e]] -= Ux_[e] * val;
        }
        for (int k = 0; k < m_; ++k) v[order_[k]] = tmp[k];
    }

    // Solve B^T y = c in place. Input indexed by basis position, output by row.
    void btran(std::vector<double>& c, std::vector<double>& tmp) const {
        tmp.assign(m_, 0.0);
        for (int k = 0; k < m_; ++k) tmp[k] = c[order_[k]];
        for (int k = 0; k < m_; ++k) {
            double s = tmp[k];
            for (std::int64_t e = Up_[k]; e < Up_[k + 1]; ++e) s -= Ux_[e] * tmp[Ui_[e]];
            tmp[k] = s / Ud_[k];
        }
        for (int k = m_ - 1; k >= 0; --k) {
            double s = tmp[k];
            for (std::int64_t e = Lp_[k]; e < Lp_[k + 1]; ++e) s -= Lx_[e] * tmp[Li_[e]];
            tmp[k] = s;
        }
        for (int i = 0; i < m_; ++i) c[i] = tmp[pinv_[i]];
    }

    // Sparse B^T y = c. Input indexed by basis position, output by row.
    void btran_sparse(std::vector<double>& v, std::vector<int>& nz) {
        seeds_.clear();
        for (int s : nz) {
            const int p = posof_[s];
            work_[p] = v[s];
            v[s] = 0.0;
            seeds_.push_back(p);
        }
        nz.clear();
        tri_pass(true, true, Urp_, Uri_, Urx_, seeds_, pat_);
        tri_pass(false, false, Lrp_, Lri_, Lrx_, pat_, seeds_);
        for (int k : seeds_) {
            v[rowof_[k]] = work_[k];
            work_[k] = 0.0;
            nz.push_back(rowof_[k]);
        }
    }

private:
    static void transpose(const std::vector<std::int64_t>& P, const std::vector<int>& I,
                          const std::vector<double>& X, std::vector<std::int64_t>& Tp,
                          std::vector<int>& Ti, std::vector<double>& Tx) {
        const int n = static_cast<int>(P.size()) - 1;
        Tp.assign(static_cast<std::size_t>(n) + 1, 0);
        for (int i : I) ++Tp[i + 1];
        for (int k = 0; k < n; ++k) Tp[k + 1] += Tp[k];
        Ti.resize(I.size());
        Tx.resize(I.size());
        std::vector<std::int64_t> next(Tp.begin(), Tp.end() - 1);
        for (int k = 0; k < n; ++k) {
            for (std::int64_t e = P[k]; e < P[k + 1]; ++e) {
                const std::int64_t t = next[I[e]]++;
                Ti[t] = k;
                Tx[t] = X[e];
            }
        }
    }

    // One scatter-form triangular pass over a factor graph, visiting exactly
    // the positions that hold numeric nonzeros. A heap orders the visits by
    // position (ascending for lower-triangular systems, descending for upper),
    // which is a valid topological order, so each value is final when popped.
    void tri_pass(bool ascending, bool divide, const std::vector<std::int64_t>& P,
                  const std::vector<int>& I, const std::vector<double>& X,
                  const std::vector<int>& in_pat, std::vector<int>& out_pat) {
        heap_.clear();
        for (int p : in_pat) {
            if (!inheap_[p]) {
                inheap_[p] = 1;
                heap_.push_back(p);
            }
        }
        auto sift_up = [&](int k) {
            heap_.push_back(k);
            if (ascending) {
                std::push_heap(heap_.begin(), heap_.end(), std::greater<int>());
            } else {
                std::push_heap(heap_.begin(), heap_.end());
            }
        };
        if (ascending) {
            std::make_heap(heap_.begin(), heap_.end(), std::greater<int>());
        } else {
            std::make_heap(heap_.begin(), heap_.end());
        }
        out_pat.clear();  // after heap seeding, so in_pat may alias out_pat
        while (!heap_.empty()) {
            if (ascending) {
                std::pop_heap(heap_.begin(), heap_.end(), std::greater<int>());
            } else {
                std::pop_heap(heap_.begin(), heap_.end());
            }
            const int k = heap_.back();
            heap_.pop_back();
            inheap_[k] = 0;
            double val = work_[k];
            if (val == 0.0) continue;
            if (divide) {
                val /= Ud_[k];
                work_[k] = val;
            }
            for (std::int64_t e = P[k]; e < P[k + 1]; ++e) {
                const int i = I[e];
                if (!inheap_[i]) {
                    inheap_[i] = 1;
                    sift_up(i);
                }
                work_[i] -= X[e] * val;
            }
            out_pat.push_back(k);
        }
    }

    // DFS from the pattern of column `col`, producing a topological order of
    // reachable rows in topo_[top..m) and scattering values into work_.
    int reach(const Csc& A, int col, int stamp) {
        int top = m_;
        for (std::int64_t e = A.p[col]; e < A.p[col + 1]; ++e) {
            int i = A.i[e];
            if (mark_[i] == stamp) continue;
            int head = 0;
            stack_[0] = i;
            cptr_[0] = pinv_[i] >= 0 ? Lp_[pinv_[i]] : -1;
            mark_[i] = stamp;
            while (head >= 0) {
                const int node = stack_[head];
                const int j = pinv_[node];
                bool descended = false;
                if (j >= 0) {
                    std::int64_t& ptr = cptr_[head];
                    while (ptr < Lp_[j + 1]) {
                        const int child = Li_[ptr++];
                        if (mark_[child] != stamp) {
                            mark_[child] = stamp;
                            ++head;
                            stack_[head] = child;
                            cptr_[head] = pinv_[child] >= 0 ? Lp_[pinv_[child]] : -1;
                            descended = true;
                            break;
                        }
                    }
                }
                if (!descended) {
                    topo_[--top] = node;
                    --head;
                }
            }
        }
        for (std::int64_t e = A.p[col]; e < A.p[col + 1]; ++e) work_[A.i[e]] += A.x[e];
        return top;
    }

    int m_ = 0;
    std::vector<std::int64_t> Lp_, Up_, Lrp_, Urp_;
    std::vector<int> Li_, Ui_, Lri_, Uri_;
    std::vector<double> Lx_, Ux_, Lrx_, Urx_, Ud_;
    std::vector<int> pinv_;
    std::vector<int> order_, posof_, rowof_;
    // workspaces
    std::vector<double> work_;
    std::vector<int> mark_, topo_, stack_;
    std::vector<int> seeds_, pat_, heap_;
    std::vector<std::uint8_t> inheap_;
    std::vector<std::int64_t> cptr_;
    int stamp_ = 0;
};

// One product-form update (pivot position excluded from ent). The entry list
// drives forward application; the open-addressed row -> coefficient table
// lets the reverse pass probe a sparse vector's rows against the eta instead
// of sweeping every entry. Buffers are pooled by the solver.
struct Eta {
    int r = 0;
    double piv = 1.0;
    std::vector<std::pair<int, double>> ent;
    std::vector<int> hkey;
    std::vector<double> hval;
    std::uint32_t hmask = 0;

    void reset(std::size_t nnz) {
        ent.clear();
        std::size_t cap = 16;
        while (cap < nnz * 2) cap <<= 1;
        hmask = static_cast<std::uint32_t>(cap - 1);
        hkey.assign(cap, -1);
        hval.resize(cap);  // stale values sit behind empty keys, never read
    }

    void add(int i, double a) {
        ent.emplace_back(i, a);
        std::uint32_t h = (static_cast<std::uint32_t>(i) * 2654435761u) & hmask;
        while (hkey[h] != -1) h = (h + 1) & hmask;
        hkey[h] = i;
        hval[h] = a;
    }

    double coef(int i) const {
        std::uint32_t h = (static_cast<std::uint32_t>(i) * 2654435761u) & hmask;
        while (true) {
            if (hkey[h] == i) return hval[h];
            if (hkey[h] == -1) return 0.0;
            h = (h + 1) & hmask;
        }
    }
};

enum class VState : std::uint8_t { basic, at_lower, at_upper, free_zero };

// Bounded-variable primal revised simplex over the equality form
// A x + s = b with one logical column appended per row.
class Solver {
public:
    Solver(const LinearProgram& lp, const std::vector<double>* lb_over,
           const std::vector<double>* ub_over, const SimplexOptions& opts,
           const std::vector<double>* rhs_over = nullptr)
        : lp_(lp), opts_(opts) {
        build(lb_over, ub_over, rhs_over);
    }

    SolveResult run() {
        SolveResult res;
        if (empty_domain_) {
            res.status = SolveStatus::infeasible;
            return res;
        }
        if (m_ == 0) return solve_unconstrained();

        crash_basis();
        build_csr();
        refactorize();

        phase_ = 1;
        if (total_artificial() > opts_.feas_tol) {
            reprice();
            const SolveStatus s1 = iterate();
            if (s1 == SolveStatus::iteration_limit) {
                res.status = s1;
                res.iterations = iters_;
                return res;
            }
            refactorize();
            recompute_primal();
            if (total_artificial() > opts_.feas_tol) {
                res.status = SolveStatus::infeasible;
                res.iterations = iters_;
                return res;
            }
        }
        freeze_artificials();

        phase_ = 2;
        std::fill(w_.begin(), w_.end(), 1.0);
        reprice();
        SolveStatus s2 = iterate();
        // Confirm optimality against fresh factors; resume if fresh reduced
        // costs still show violations (bounded number of resumptions). Every
        // optimal exit leaves through a fresh reprice.
        int cleanups = 0;
        while (s2 == SolveStatus::optimal) {
            refactorize();
            recompute_primal();
            reprice();
            if (!has_candidate() || cleanups >= 5) break;
            ++cleanups;
            s2 = iterate();
        }

        res.status = s2;
        res.iterations = iters_;
        if (s2 != SolveStatus::optimal) return res;
        res.values.assign(static_cast<std::size_t>(lp_.n_vars()), 0.0);
        for (int j = 0; j < lp_.n_vars(); ++j) res.values[j] = value_of(j);
        res.objective = lp_.objective_value(res.values);
        // the cleanup loop above always exits on freshly repriced factors, so
        // pi_ and d_ describe the final basis exactly
        res.row_duals.assign(pi_.begin(), pi_.end());
        res.reduced_costs.assign(d_.begin(), d_.begin() + lp_.n_vars());
        return res;
    }

private:
    // ---- setup -----------------------------------------------------------

    void build(const std::vector<double>* lb_over, const std::vector<double>* ub_over,
               const std::vector<double>* rhs_over) {
        m_ = lp_.n_rows();
        const int ns = lp_.n_vars();
        n_total_ = ns + m_;  // structural + one logical per row

        lb_.resize(n_total_);
        ub_.resize(n_total_);
        cost_.assign(n_total_, 0.0);
        artificial_.assign(n_total_, 0);
        for (int j = 0; j < ns; ++j) {
            const auto& v = lp_.var(j);
            lb_[j] = lb_over ? (*lb_over)[j] : v.lb;
            ub_[j] = ub_over ? (*ub_over)[j] : v.ub;
            if (lb_[j] > ub_[j]) empty_domain_ = true;
            cost_[j] = v.obj;
        }
        b_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            const auto& r = lp_.row(i);
            b_[i] = rhs_over ? (*rhs_over)[i] : r.rhs;
            const int s = ns + i;
            switch (r.sense) {
                case RowSense::le:
                    lb_[s] = 0.0;
                    ub_[s] = kInf;
                    break;
                case RowSense::ge:
                    lb_[s] = -kInf;
                    ub_[s] = 0.0;
                    break;
                case RowSense::eq:
                    lb_[s] = 0.0;
                    ub_[s] = 0.0;
                    break;
            }
        }

        // CSC over structural + logical columns.
        std::vector<std::int64_t> count(static_cast<std::size_t>(n_total_) + 1, 0);
        for (int i = 0; i < m_; ++i) {
            for (const auto& [v, c] : lp_.row(i).coeffs) {
                if (c != 0.0) ++count[v + 1];
            }
        }
        for (int i = 0; i < m_; ++i) ++count[ns + i + 1];
        A_.m = m_;
        A_.n = n_total_;
        A_.p.resize(static_cast<std::size_t>(n_total_) + 1);
        A_.p[0] = 0;
        for (int j = 0; j < n_total_; ++j) A_.p[j + 1] = A_.p[j] + count[j + 1];
        A_.i.resize(A_.p[n_total_]);
        A_.x.resize(A_.p[n_total_]);
        std::vector<std::int64_t> next(A_.p.begin(), A_.p.end() - 1);
        for (int i = 0; i < m_; ++i) {
            for (const auto& [v, c] : lp_.row(i).coeffs) {
                if (c == 0.0) continue;
                const std::int64_t e = next[v]++;
                A_.i[e] = i;
                A_.x[e] = c;
            }
        }
        for (int i = 0; i < m_; ++i) {
            const std::int64_t e = next[ns + i]++;
            A_.i[e] = i;
            A_.x[e] = 1.0;
        }

        state_.assign(n_total_, VState::at_lower);
        for (int j = 0; j < n_total_; ++j) state_[j] = default_state(j);
        d_.assign(n_total_, 0.0);
        w_.assign(n_total_, 1.0);
        beta_.assign(n_total_, 0.0);

        if (opts_.max_iterations > 0) {
            max_iters_ = opts_.max_iterations;
        } else {
            max_iters_ = std::max<std::int64_t>(
                100000, 12 * (static_cast<std::int64_t>(m_) + n_total_));
        }
    }

    // Row-major mirror of A_ used for pricing updates along a dual row.
    void build_csr() {
        Rp_.assign(static_cast<std::size_t>(m_) + 1, 0);
        const std::int64_t nnz = A_.p[n_total_];
        for (std::int64_t e = 0; e < nnz; ++e) ++Rp_[A_.i[e] + 1];
        for (int i = 0; i < m_; ++i) Rp_[i + 1] += Rp_[i];
        Rj_.resize(nnz);
        Rx_.resize(nnz);
        std::vector<std::int64_t> next(Rp_.begin(), Rp_.end() - 1);
        for (int j = 0; j < n_total_; ++j) {
            for (std::int64_t e = A_.p[j]; e < A_.p[j + 1]; ++e) {
                const std::int64_t t = next[A_.i[e]]++;
                Rj_[t] = j;
                Rx_[t] = A_.x[e];
            }
        }
    }

    VState default_state(int j) const {
        if (lb_[j] == -kInf && ub_[j] == kInf) return VState::free_zero;
        if (lb_[j] == -kInf) return VState::at_upper;
        if (ub_[j] == kInf) return VState::at_lower;
        return std::fabs(lb_[j]) <= std::fabs(ub_[j]) ? VState::at_lower : VState::at_upper;
    }

    double nonbasic_value(int j) const {
        switch (state_[j]) {
            case VState::at_lower: return lb_[j];
            case VState::at_upper: return ub_[j];
            case VState::free_zero: return 0.0;
            case VState::basic: break;
        }
        return 0.0;
    }

    double value_of(int j) const {
        return state_[j] == VState::basic ? xB_[pos_[j]] : nonbasic_value(j);
    }

    // Pick one basic column per row: the row's logical if it can absorb the
    // residual, else a structural singleton, else a fresh artificial.
    void crash_basis() {
        basis_.assign(m_, -1);
        pos_.assign(n_total_, -1);
        xB_.assign(m_, 0.0);

        std::vector<double> act(m_, 0.0);
        for (int j = 0; j < n_total_; ++j) {
            const double v = nonbasic_value(j);
            if (v == 0.0) continue;
            for (std::int64_t e = A_.p[j]; e < A_.p[j + 1]; ++e) act[A_.i[e]] += A_.x[e] * v;
        }
        std::vector<std::vector<int>> singletons(m_);
        for (int j = 0; j < lp_.n_vars(); ++j) {
            if (A_.p[j + 1] - A_.p[j] == 1 && lb_[j] < ub_[j]) {
                singletons[A_.i[A_.p[j]]].push_back(j);
            }
        }

        for (int i = 0; i < m_; ++i) {
            const double res = b_[i] - act[i];
            const int s = lp_.n_vars() + i;
            int chosen = -1;
            double val = 0.0;
            if (lb_[s] < ub_[s]) {
                const double cand = nonbasic_value(s) + res;  // logical coeff is +1
                if (cand >= lb_[s] - 1e-9 && cand <= ub_[s] + 1e-9) {
                    chosen = s;
                    val = cand;
                }
            }
            if (chosen < 0) {
                for (int j : singletons[i]) {
                    const double a = A_.x[A_.p[j]];
                    if (std::fabs(a) < 1e-9) continue;
                    const double cand = nonbasic_value(j) + res / a;
                    if (cand >= lb_[j] - 1e-9 && cand <= ub_[j] + 1e-9) {
                        chosen = j;
                        val = cand;
                        break;
                    }
                }
            }
            if (chosen < 0) {
                chosen = add_artificial(i, res >= 0.0 ? 1.0 : -1.0);
                val = std::fabs(res);
            }
            basis_[i] = chosen;
            pos_[chosen] = i;
            state_[chosen] = VState::basic;
            xB_[i] = clamp_small(val);
        }
    }

    int add_artificial(int row, double coeff) {
        const int j = n_total_++;
        lb_.push_back(0.0);
        ub_.push_back(kInf);
        cost_.push_back(0.0);
        artificial_.push_back(1);
        state_.push_back(VState::at_lower);
        pos_.push_back(-1);
        d_.push_back(0.0);
        w_.push_back(1.0);
        beta_.push_back(0.0);
        A_.p.push_back(A_.p.back() + 1);
        A_.i.push_back(row);
        A_.x.push_back(coeff);
        A_.n = n_total_;
        return j;
    }

    static double clamp_small(double v) { return std::fabs(v) < 1e-14 ? 0.0 : v; }

    double phase_cost(int j) const {
        return phase_ == 1 ? (artificial_[j] ? 1.0 : 0.0) : cost_[j];
    }

    double total_artificial() const {
        double s = 0.0;
        for (int j = 0; j < n_total_; ++j) {
            if (artificial_[j]) s += std::fabs(value_of(j));
        }
        return s;
    }

    void freeze_artificials() {
        for (int j = 0; j < n_total_; ++j) {
            if (!artificial_[j]) continue;
            lb_[j] = 0.0;
            ub_[j] = 0.0;
            if (state_[j] != VState::basic) state_[j] = VState::at_lower;
        }
    }

    // ---- factorization and refresh ---------------------------------------

    void refactorize() {
        // Every basis reached by pivoting from the crash basis is nonsingular,
        // so a factorization failure indicates corrupted state, not a solver
        // outcome.
        if (!lu_.factorize(A_, basis_)) {
            throw IntegrityError("basis refactorization failed");
        }
        neta_ = 0;  // retire the updates but keep their buffers for reuse
    }

    Eta& push_eta() {
        if (neta_ == etas_.size()) etas_.emplace_back();
        return etas_[neta_++];
    }

    void recompute_primal() {
        rhs_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) rhs_[i] = b_[i];
        for (int j = 0; j < n_total_; ++j) {
            if (state_[j] == VState::basic) continue;
            const double v = nonbasic_value(j);
            if (v == 0.0) continue;
            for (std::int64_t e = A_.p[j]; e < A_.p[j + 1]; ++e) {
                rhs_[A_.i[e]] -= A_.x[e] * v;
            }
        }
        apply_ftran(rhs_);
        xB_ = rhs_;
        for (auto& v : xB_) v = clamp_small(v);
    }

    void apply_ftran(std::vector<double>& v) {
        lu_.ftran(v, scratch_);
        for (std::size_t k = 0; k < neta_; ++k) {
            const Eta& eta = etas_[k];
            const double xr = v[static_cast<std::size_t>(eta.r)] / eta.piv;
            v[static_cast<std::size_t>(eta.r)] = xr;
            if (xr == 0.0) continue;
            for (const auto& [i, a] : eta.ent) v[static_cast<std::size_t>(i)] -= a * xr;
        }
    }

    void apply_btran(std::vector<double>& c) {
        for (std::size_t k = neta_; k-- > 0;) {
            const Eta& eta = etas_[k];
            double s = c[static_cast<std::size_t>(eta.r)];
            for (const auto& [i, a] : eta.ent) s -= a * c[static_cast<std::size_t>(i)];
            c[static_cast<std::size_t>(eta.r)] = s / eta.piv;
        }
        lu_.btran(c, scratch_);
    }

    // Recompute duals and reduced costs from scratch.
    void reprice() {
        pi_.assign(m_, 0.0);
        for (int i = 0; i < m_; ++i) pi_[i] = phase_cost(basis_[i]);
        apply_btran(pi_);
        for (int j = 0; j < n_total_; ++j) {
            if (state_[j] == VState::basic) {
                d_[j] = 0.0;
                continue;
            }
            double dj = phase_cost(j);
            for (std::int64_t e = A_.p[j]; e < A_.p[j + 1]; ++e) {
                dj -= pi_[A_.i[e]] * A_.x[e];
            }
            d_[j] = dj;
        }
    }

    bool priceable(int j) const {
        return state_[j] != VState::basic && lb_[j] < ub_[j] && !artificial_[j];
    }

    bool violates(int j, double dj) const {
        switch (state_[j]) {
            case VState::at_lower: return dj < -opts_.opt_tol;
            case VState::at_upper: return dj > opts_.opt_tol;
            case VState::free_zero: return std::fabs(dj) > opts_.opt_tol;
            case VState::basic: break;
        }
        return false;
    }

    bool has_candidate() const {
        for (int j = 0; j < n_total_; ++j) {
            if (priceable(j) && violates(j, d_[j])) return true;
        }
        return false;
    }

    int choose_entering(bool bland) const {
        if (bland) {
            for (int j = 0; j < n_total_; ++j) {
                if (priceable(j) && violates(j, d_[j])) return j;
            }
            return -1;
        }
        int best = -1;
        double best_score = 0.0;
        for (int j = 0; j < n_total_; ++j) {
            if (!priceable(j) || !violates(j, d_[j])) continue;
            const double score = d_[j] * d_[j] / w_[j];
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        return best;
    }

    // ---- the iteration loop ----------------------------------------------

    // Sparse vector bookkeeping: each value array carries a pattern list and
    // membership flags so clearing costs only the touched entries.
    static void sv_clear(std::vector<double>& v, std::vector<int>& pat,
                         std::vector<std::uint8_t>& in) {
        for (int r : pat) {
            v[static_cast<std::size_t>(r)] = 0.0;
            in[static_cast<std::size_t>(r)] = 0;
        }
        pat.clear();
    }

    static void sv_touch(int r, std::vector<int>& pat, std::vector<std::uint8_t>& in) {
        if (!in[static_cast<std::size_t>(r)]) {
            in[static_cast<std::size_t>(r)] = 1;
            pat.push_back(r);
        }
    }

    // alpha = B^{-1} A_q; harvests alpha_nz_ in ascending row order.
    // The entering column's image is dense for coupled problems while the LU
    // factors stay small, so plain factor sweeps beat pattern chasing here.
    void compute_alpha(int q) {
        std::fill(alpha_.begin(), alpha_.end(), 0.0);
        for (std::int64_t e = A_.p[q]; e < A_.p[q + 1]; ++e) {
            alpha_[static_cast<std::size_t>(A_.i[e])] = A_.x[e];
        }
        apply_ftran(alpha_);
        alpha_nz_.clear();
        for (int r = 0; r < m_; ++r) {
            if (std::fabs(alpha_[static_cast<std::size_t>(r)]) > kDropTol) {
                alpha_nz_.push_back(r);
            }
        }
    }

    // rho = row `row` of B^{-1} with pattern tracking.
    void compute_rho(int row) {
        sv_clear(rho_, rho_pat_, in_rho_);
        rho_[static_cast<std::size_t>(row)] = 1.0;
        rho_pat_.push_back(row);
        in_rho_[static_cast<std::size_t>(row)] = 1;
        for (std::size_t k = neta_; k-- > 0;) {
            const Eta& eta = etas_[k];
            // rho gains at most one nonzero per eta, so the dot product walks
            // rho's short pattern and probes the eta's table rather than
            // sweeping the eta's entries
            double s = rho_[static_cast<std::size_t>(eta.r)];
            for (int i : rho_pat_) {
                const double ri = rho_[static_cast<std::size_t>(i)];
                if (ri == 0.0) continue;
                const double a = eta.coef(i);
                if (a != 0.0) s -= a * ri;
            }
            if (s == 0.0 && !in_rho_[static_cast<std::size_t>(eta.r)]) continue;
            sv_touch(eta.r, rho_pat_, in_rho_);
            rho_[static_cast<std::size_t>(eta.r)] = s / eta.piv;
        }
        // the factor solve rebuilds the pattern, so drop the flags first
        for (int r : rho_pat_) in_rho_[static_cast<std::size_t>(r)] = 0;
        lu_.btran_sparse(rho_, rho_pat_);
    }

    SolveStatus iterate() {
        int consec_degen = 0;
        bool bland = false;

        alpha_.assign(m_, 0.0);
        rho_.assign(m_, 0.0);
        in_rho_.assign(m_, 0);
        rho_pat_.clear();

        while (true) {
            if (iters_ >= max_iters_) return SolveStatus::iteration_limit;
            if (static_cast<int>(neta_) >= opts_.refactor_interval) {
                refactorize();
                recompute_primal();
                reprice();
            }

            const int q = choose_entering(bland);
            if (q < 0) return SolveStatus::optimal;

            const double dq = d_[q];
            const int dir = (state_[q] == VState::at_upper ||
                             (state_[q] == VState::free_zero && dq > 0.0))
                                ? -1
                                : 1;

            compute_alpha(q);

            double own_limit = kInf;
            if (lb_[q] > -kInf && ub_[q] < kInf) own_limit = ub_[q] - lb_[q];

            int row = -1;
            double step = kInf;
            bool leaving_to_upper = false;
            if (!bland) {
                harris_ratio(dir, own_limit, row, step, leaving_to_upper);
            } else {
                textbook_ratio(dir, own_limit, row, step, leaving_to_upper);
            }

            if (row < 0 && step == kInf) {
                if (phase_ == 1) {
                    // a phase-1 ray is numerical noise: the objective is
                    // bounded below by zero, so park this direction
                    d_[q] = 0.0;
                    ++iters_;
                    continue;
                }
                // Believe a ray only when fresh factors and the strict
                // ratio rules reproduce it; ill-conditioned bases can hide
                // the blocking entry below the pivot tolerance.
                if (neta_ > 0) {
                    refactorize();
                    recompute_primal();
                    reprice();
                    continue;
                }
                if (!bland) {
                    bland = true;
                    continue;
                }
                return SolveStatus::unbounded;
            }

            if (row < 0) {
                // bound flip: entering jumps to its opposite bound
                for (int r : alpha_nz_) xB_[r] -= dir * step * alpha_[r];
                state_[q] = state_[q] == VState::at_lower ? VState::at_upper : VState::at_lower;
                ++iters_;
                consec_degen = 0;
                bland = false;
                continue;
            }

            const double apiv = alpha_[row];
            if (std::fabs(apiv) < 1e-9 && neta_ > 0) {
                refactorize();
                recompute_primal();
                reprice();
                continue;  // retry the iteration with fresh numerics
            }
            if (std::fabs(apiv) < kRatioTol) {
                // hopeless pivot even when fresh: park the entering column
                // until the next reprice restores its reduced cost
                d_[q] = 0.0;
                ++iters_;
                continue;
            }

            // rho = row `row` of B^{-1}; beta_j = rho . A_j drives the
            // incremental update of reduced costs and Devex weights
            compute_rho(row);

            const int leaving = basis_[row];
            const double theta_d = dq / apiv;
            const double wq = w_[q];

            touched_.clear();
            for (int i : rho_pat_) {
                const double ri = rho_[i];
                if (ri == 0.0) continue;
                for (std::int64_t e = Rp_[i]; e < Rp_[i + 1]; ++e) {
                    const int j = Rj_[e];
                    if (beta_[j] == 0.0) touched_.push_back(j);
                    beta_[j] += ri * Rx_[e];
                }
            }
            for (int j : touched_) {
                const double bj = beta_[j];
                beta_[j] = 0.0;
                if (bj == 0.0 || j == q || state_[j] == VState::basic) continue;
                d_[j] -= theta_d * bj;
                const double ratio = bj / apiv;
                const double cand = ratio * ratio * wq;
                if (cand > w_[j]) w_[j] = cand;
            }
            d_[leaving] = -theta_d;
            d_[q] = 0.0;
            w_[leaving] = std::max(wq / (apiv * apiv), 1.0);
            if (w_[leaving] > 1e10) std::fill(w_.begin(), w_.end(), 1.0);

            // primal update
            const double enter_val = nonbasic_value(q) + dir * step;
            for (int r : alpha_nz_) xB_[r] -= dir * step * alpha_[r];
            xB_[row] = enter_val;
            state_[leaving] = leaving_to_upper ? VState::at_upper : VState::at_lower;
            pos_[leaving] = -1;
            state_[q] = VState::basic;
            pos_[q] = row;
            basis_[row] = q;

            Eta& eta = push_eta();
            eta.r = row;
            eta.piv = apiv;
            eta.reset(alpha_nz_.size());
            {
                // the table writes are scattered, so prefetch the slots a few
                // entries ahead of the insert stream
                const std::size_t nnz = alpha_nz_.size();
                constexpr std::size_t kAhead = 16;
                for (std::size_t idx = 0; idx < nnz; ++idx) {
                    if (idx + kAhead < nnz) {
                        const auto rp = static_cast<std::uint32_t>(alpha_nz_[idx + kAhead]);
                        __builtin_prefetch(&eta.hkey[(rp * 2654435761u) & eta.hmask], 1);
                    }
                    const int r = alpha_nz_[idx];
                    if (r != row) eta.add(r, alpha_[static_cast<std::size_t>(r)]);
                }
            }
            ++iters_;

            if (step <= kDegenStep) {
                if (++consec_degen >= opts_.bland_threshold) bland = true;
            } else {
                consec_degen = 0;
                bland = false;
            }
        }
    }

    // Two-pass ratio test: a slightly relaxed limit first, then the largest
    // pivot magnitude among candidates inside the relaxed limit.
    void harris_ratio(int dir, double own_limit, int& row, double& step,
                      bool& to_upper) const {
        const double relax = 1e-9;
        double t_relaxed = own_limit;
        for (int r : alpha_nz_) {
            const double a = alpha_[r];
            if (std::fabs(a) < kRatioTol) continue;
            const double rate = -dir * a;
            const int i = basis_[r];
            if (rate < 0.0 && lb_[i] > -kInf) {
                t_relaxed = std::min(t_relaxed, (xB_[r] - lb_[i] + relax) / (-rate));
            } else if (rate > 0.0 && ub_[i] < kInf) {
                t_relaxed = std::min(t_relaxed, (ub_[i] - xB_[r] + relax) / rate);
            }
        }
        if (t_relaxed == kInf) {
            row = -1;
            step = kInf;
            return;
        }
        int best = -1;
        double best_a = 0.0;
        double best_exact = 0.0;
        bool best_upper = false;
        for (int r : alpha_nz_) {
            const double a = alpha_[r];
            if (std::fabs(a) < kRatioTol) continue;
            const double rate = -dir * a;
            const int i = basis_[r];
            double exact;
            bool upper;
            if (rate < 0.0 && lb_[i] > -kInf) {
                exact = (xB_[r] - lb_[i]) / (-rate);
                upper = false;
            } else if (rate > 0.0 && ub_[i] < kInf) {
                exact = (ub_[i] - xB_[r]) / rate;
                upper = true;
            } else {
                continue;
            }
            if (exact <= t_relaxed && std::fabs(a) > best_a) {
                best = r;
                best_a = std::fabs(a);
                best_exact = exact;
                best_upper = upper;
            }
        }
        if (best < 0 || own_limit < best_exact) {
            row = -1;
            step = own_limit;  // bound flip, or unbounded when infinite
            return;
        }
        row = best;
        step = std::max(0.0, best_exact);
        to_upper = best_upper;
    }

    // Exact minimum-ratio rule, ties to the lowest leaving variable index.
    void textbook_ratio(int dir, double own_limit, int& row, double& step,
                        bool& to_upper) const {
        double best_t = own_limit;
        int best = -1;
        bool best_upper = false;
        for (int r : alpha_nz_) {
            const double a = alpha_[r];
            if (std::fabs(a) < kRatioTol) continue;
            const double rate = -dir * a;
            const int i = basis_[r];
            double exact;
            bool upper;
            if (rate < 0.0 && lb_[i] > -kInf) {
                exact = std::max(0.0, (xB_[r] - lb_[i]) / (-rate));
                upper = false;
            } else if (rate > 0.0 && ub_[i] < kInf) {
                exact = std::max(0.0, (ub_[i] - xB_[r]) / rate);
                upper = true;
            } else {
                continue;
            }
            if (exact < best_t - 1e-15 ||
                (best >= 0 && exact <= best_t + 1e-15 && basis_[r] < basis_[best])) {
                best_t = exact;
                best = r;
                best_upper = upper;
            }
        }
        row = best;
        step = best_t;
        to_upper = best_upper;
    }

    SolveResult solve_unconstrained() {
        SolveResult res;
        std::vector<double> x(static_cast<std::size_t>(lp_.n_vars()), 0.0);
        for (int j = 0; j < lp_.n_vars(); ++j) {
            const double c = cost_[j];
            if (c > 0.0) {
                if (lb_[j] == -kInf) {
                    res.status = SolveStatus::unbounded;
                    return res;
                }
                x[j] = lb_[j];
            } else if (c < 0.0) {
                if (ub_[j] == kInf) {
                    res.status = SolveStatus::unbounded;
                    return res;
                }
                x[j] = ub_[j];
            } else {
                x[j] = nonbasic_value(j);
            }
        }
        res.status = SolveStatus::optimal;
        res.values = std::move(x);
        res.objective = lp_.objective_value(res.values);
        res.reduced_costs.assign(cost_.begin(), cost_.begin() + lp_.n_vars());
        return res;
    }

    const LinearProgram& lp_;
    SimplexOptions opts_;

    int m_ = 0;
    int n_total_ = 0;
    int phase_ = 1;
    bool empty_domain_ = false;
    std::int64_t iters_ = 0;
    std::int64_t max_iters_ = 0;

    Csc A_;
    std::vector<std::int64_t> Rp_;
    std::vector<int> Rj_;
    std::vector<double> Rx_;
    std::vector<double> lb_, ub_, cost_, b_;
    std::vector<std::uint8_t> artificial_;
    std::vector<VState> state_;
    std::vector<int> basis_, pos_;
    std::vector<double> xB_, d_, w_, pi_, beta_;

    LuFactors lu_;
    std::vector<Eta> etas_;  // pooled; only the first neta_ are live
    std::size_t neta_ = 0;
    std::vector<double> alpha_, rho_, rhs_, scratch_;
    std::vector<int> alpha_nz_, rho_pat_, touched_;
    std::vector<std::uint8_t> in_rho_;
};

}  // namespace simplex_detail

// Solves a pure LP with the bounded-variable revised simplex. Integrality
// flags are rejected; use solve_mip for those instances. Solver outcomes are
// reported through the result status, never thrown.
inline SolveResult solve_lp(const LinearProgram& lp, const SimplexOptions& opts = {}) {
    if (lp.has_integers()) {
        throw SchemaError("solve_lp called on an instance with integer variables");
    }
    simplex_detail::Solver s(lp, nullptr, nullptr, opts);
    return s.run();
}

namespace simplex_detail {

// Entry point for branch-and-bound: solve the LP relaxation with overridden
// variable bounds. Integrality flags are ignored here.
inline SolveResult solve_relaxation(const LinearProgram& lp, const std::vector<double>& lb,
                                    const std::vector<double>& ub,
                                    const SimplexOptions& opts) {
    Solver s(lp, &lb, &ub, opts);
    return s.run();
}

}  // namespace simplex_detail

// Entry point for template reuse: one structural instance solved repeatedly
// with per-call bounds and right-hand sides. Integrality flags are ignored.
inline SolveResult solve_with_overrides(const LinearProgram& lp, const std::vector<double>& lb,
                                        const std::vector<double>& ub,
                                        const std::vector<double>& rhs,
                                        const SimplexOptions& opts = {}) {
    simplex_detail::Solver s(lp, &lb, &ub, opts, &rhs);
    return s.run();
}

}  // namespace issamp
