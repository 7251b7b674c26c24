#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "issamp/lp.hpp"

using namespace issamp;

TEST_CASE("full export with every bound form") {
    LinearProgram lp;
    lp.add_variable("a", 0.0, kInf, 2.5);       // default bounds
    lp.add_variable("b", -kInf, kInf, -1.0);    // free
    lp.add_variable("c", 3.0, 3.0, 0.0);        // fixed
    lp.add_variable("d", 1.0, 2.0, 1.0);        // range
    lp.add_variable("e", -kInf, 5.0, 0.0);      // upper only
    lp.add_variable("n", 0.0, 4.0, 1.0, true);  // integral
    lp.add_constraint("cap", RowSense::le, 10.0, {{0, 1.0}, {1, -2.0}});
    lp.add_constraint("bal", RowSense::eq, 0.5, {{2, 1.0}, {3, 1.0}, {5, -1.0}});
    lp.add_constraint("min", RowSense::ge, -1.5, {{4, 0.25}});

    std::ostringstream out;
    write_lp_format(lp, out);
    const std::string expect =
        "Minimize\n"
        " obj: 2.5 a - b + d + n\n"
        "Subject To\n"
        " cap: a - 2 b <= 10\n"
        " bal: c + d - n = 0.5\n"
        " min: 0.25 e >= -1.5\n"
        "Bounds\n"
        " b free\n"
        " c = 3\n"
        " 1 <= d <= 2\n"
        " e <= 5\n"
        " 0 <= n <= 4\n"
        "Generals\n"
        " n\n"
        "End\n";
    REQUIRE(out.str() == expect);
}

TEST_CASE("empty objective and zero rows stay parseable") {
    LinearProgram lp;
    lp.add_variable("x", 0.0, 1.0, 0.0);
    lp.add_constraint("z", RowSense::le, 4.0, {{0, 0.0}});
    std::ostringstream out;
    write_lp_format(lp, out);
    const std::string expect =
        "Minimize\n"
        " obj: 0 x\n"
        "Subject To\n"
        " z: 0 x <= 4\n"
        "Bounds\n"
        " 0 <= x <= 1\n"
        "End\n";
    REQUIRE(out.str() == expect);
}

TEST_CASE("duplicate variable names are rejected") {
    LinearProgram lp;
    lp.add_variable("x", 0.0, 1.0, 0.0);
    REQUIRE_THROWS_AS(lp.add_variable("x", 0.0, 1.0, 0.0), SchemaError);
}

TEST_CASE("constraints validate their references") {
    LinearProgram lp;
    lp.add_variable("x", 0.0, 1.0, 0.0);
    REQUIRE_THROWS_AS(lp.add_constraint("r", RowSense::le, 1.0, {{3, 1.0}}), SchemaError);
}

TEST_CASE("bad bounds are rejected") {
    LinearProgram lp;
    REQUIRE_THROWS_AS(lp.add_variable("x", 2.0, 1.0, 0.0), RangeError);
}

TEST_CASE("max violation measures bounds and rows") {
    LinearProgram lp;
    lp.add_variable("x", 0.0, 1.0, 0.0);
    lp.add_variable("y", 0.0, 1.0, 0.0);
    lp.add_constraint("r", RowSense::le, 1.0, {{0, 1.0}, {1, 1.0}});
    REQUIRE(lp.max_violation({0.5, 0.4}) == 0.0);
    REQUIRE(lp.max_violation({0.9, 0.9}) == Catch::Approx(0.8));
    REQUIRE(lp.max_violation({1.5, 0.0}) == Catch::Approx(0.5));
}
