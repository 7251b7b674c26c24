#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "issamp/branch_bound.hpp"
#include "support/oracles.hpp"

using namespace issamp;

namespace {

// Pure-integer instance over the 0..4 grid with at least one feasible point
// by construction.
LinearProgram random_mip(oracle::Rng& rng, int n, int m) {
    LinearProgram lp;
    std::vector<int> x0(n);
    for (int j = 0; j < n; ++j) {
        lp.add_variable("n" + std::to_string(j), 0.0, 4.0,
                        0.01 * rng.uniform_int(-500, 500), true);
        x0[j] = rng.uniform_int(0, 4);
    }
    for (int i = 0; i < m; ++i) {
        const int terms = rng.uniform_int(1, n);
        std::vector<std::pair<int, double>> coeffs;
        std::vector<char> used(n, 0);
        double act = 0.0;
        for (int t = 0; t < terms; ++t) {
            int v = rng.uniform_int(0, n - 1);
            while (used[v]) v = (v + 1) % n;
            used[v] = 1;
            int c = rng.uniform_int(-3, 3);
            if (c == 0) c = 1;
            coeffs.emplace_back(v, static_cast<double>(c));
            act += c * x0[v];
        }
        const int s = rng.uniform_int(0, 2);
        if (s == 0) {
            lp.add_constraint("r" + std::to_string(i), RowSense::le,
                              act + rng.uniform_int(0, 3), coeffs);
        } else if (s == 1) {
            lp.add_constraint("r" + std::to_string(i), RowSense::ge,
                              act - rng.uniform_int(0, 3), coeffs);
        } else {
            lp.add_constraint("r" + std::to_string(i), RowSense::eq, act, coeffs);
        }
    }
    return lp;
}

MipOptions exact_options() {
    MipOptions o;
    o.rel_gap = 0.0;
    return o;
}

}  // namespace

TEST_CASE("knapsack toy") {
    // min -(3a + 4b) s.t. 2a + 3b <= 7, a,b in 0..4
    LinearProgram lp;
    lp.add_variable("a", 0.0, 4.0, -3.0, true);
    lp.add_variable("b", 0.0, 4.0, -4.0, true);
    lp.add_constraint("w", RowSense::le, 7.0, {{0, 2.0}, {1, 3.0}});
    const auto r = solve_mip(lp, exact_options());
    REQUIRE(r.status == SolveStatus::optimal);
    REQUIRE(r.objective == Catch::Approx(-10.0).margin(1e-9));  // a=2, b=1
    REQUIRE(r.values[0] == 2.0);
    REQUIRE(r.values[1] == 1.0);
}

TEST_CASE("fractional relaxation forces branching") {
    // LP relaxation optimum at x = 2.5; integer optimum at 2 or 3
    LinearProgram lp;
    lp.add_variable("x", 0.0, 4.0, -1.0, true);
    lp.add_constraint("c", RowSense::le, 5.0, {{0, 2.0}});
    const auto r = solve_mip(lp, exact_options());
    REQUIRE(r.status == SolveStatus::optimal);
    REQUIRE(r.objective == Catch::Approx(-2.0).margin(1e-9));
    REQUIRE(r.values[0] == 2.0);
    REQUIRE(r.nodes >= 2);
}

TEST_CASE("infeasible integer system") {
    // 2x = 3 has no integer solution in 0..4
    LinearProgram lp;
    lp.add_variable("x", 0.0, 4.0, 1.0, true);
    lp.add_constraint("c", RowSense::eq, 3.0, {{0, 2.0}});
    const auto r = solve_mip(lp, exact_options());
    REQUIRE(r.status == SolveStatus::infeasible);
}

TEST_CASE("unbounded root is reported") {
    LinearProgram lp;
    lp.add_variable("x", 0.0, kInf, -1.0, true);
    const auto r = solve_mip(lp, exact_options());
    REQUIRE(r.status == SolveStatus::unbounded);
}

TEST_CASE("mixed continuous and integer variables") {
    // min -y - n  s.t. y <= 1.5 + 0 (continuous), n + y <= 3.2, n integral
    LinearProgram lp;
    lp.add_variable("y", 0.0, 1.5, -1.0);
    lp.add_variable("n", 0.0, 4.0, -1.0, true);
    lp.add_constraint("c", RowSense::le, 3.2, {{0, 1.0}, {1, 1.0}});
    const auto r = solve_mip(lp, exact_options());
    REQUIRE(r.status == SolveStatus::optimal);
    // n = 2 allows y = 1.2; n = 1 allows y = 1.5: best is n=2, y=1.2 -> -3.2
    REQUIRE(r.objective == Catch::Approx(-3.2).margin(1e-8));
    REQUIRE(r.values[1] == 2.0);
}

TEST_CASE("random MIPs match grid enumeration") {
    oracle::Rng rng(4242ULL);
    for (int t = 0; t < 60; ++t) {
        const int n = rng.uniform_int(1, 6);
        const int m = rng.uniform_int(1, 4);
        LinearProgram lp = random_mip(rng, n, m);
        const auto expect = oracle::enumerate_mip_minimum(lp);
        REQUIRE(expect.has_value());
        const auto r = solve_mip(lp, exact_options());
        INFO("instance " << t << " n=" << n << " m=" << m);
        REQUIRE(r.status == SolveStatus::optimal);
        REQUIRE(std::fabs(r.objective - *expect) <= 1e-9);
        for (int j = 0; j < n; ++j) {
            REQUIRE(r.values[j] == std::round(r.values[j]));
        }
    }
}

TEST_CASE("identical MIP solves are bit-identical") {
    oracle::Rng rng(5151ULL);
    LinearProgram lp = random_mip(rng, 6, 4);
    const auto a = solve_mip(lp, exact_options());
    const auto b = solve_mip(lp, exact_options());
    REQUIRE(a.status == b.status);
    REQUIRE(a.objective == b.objective);
    REQUIRE(a.values == b.values);
    REQUIRE(a.nodes == b.nodes);
}

TEST_CASE("gap accounting on exhausted tree") {
    LinearProgram lp;
    lp.add_variable("x", 0.0, 4.0, -1.0, true);
    lp.add_constraint("c", RowSense::le, 5.0, {{0, 2.0}});
    const auto r = solve_mip(lp, exact_options());
    REQUIRE(r.mip_gap == 0.0);
}
