#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "issamp/errors.hpp"
#include "issamp/timeseries.hpp"

using namespace issamp;

TEST_CASE("generator shape and determinism") {
    const auto a = synth_generate(7, 1);
    REQUIRE(a.length() == kHoursPerYear);
    REQUIRE(a.day_count() == kDaysPerYear);
    REQUIRE(a.start_epoch_hour == parse_timestamp("2015-01-01T00:00Z"));
    validate_table(a);

    const auto b = synth_generate(7, 1);
    REQUIRE(tables_equal(a, b));
    const auto c = synth_generate(8, 1);
    REQUIRE_FALSE(tables_equal(a, c));
}

TEST_CASE("generator produces pronounced demand extremes") {
    const auto t = synth_generate(11, 2);
    for (int s = 0; s < 3; ++s) {
        const auto& d = t.demand[s];
        double mean = 0.0;
        for (double v : d) mean += v;
        mean /= static_cast<double>(d.size());
        const double peak = *std::max_element(d.begin(), d.end());
        REQUIRE(peak > 1.25 * mean);  // winter peaks must stand out
    }
}

TEST_CASE("csv round trip is byte-stable") {
    const auto t = synth_generate(3, 1);
    std::ostringstream first;
    write_csv(t, first);
    std::istringstream in(first.str());
    const auto back = parse_csv(in, "roundtrip");
    REQUIRE(tables_equal(t, back));
    std::ostringstream second;
    write_csv(back, second);
    REQUIRE(first.str() == second.str());
}

TEST_CASE("csv header and gaps are rejected") {
    const std::string good_header = kCsvHeader;
    {
        std::istringstream in("wrong,header\n");
        REQUIRE_THROWS_AS(parse_csv(in, "t"), SchemaError);
    }
    {
        std::istringstream in(good_header +
                              "\n2015-01-01T00:00Z,1,1,1,0.5,0.5,0.5\n"
                              "2015-01-01T02:00Z,1,1,1,0.5,0.5,0.5\n");
        REQUIRE_THROWS_AS(parse_csv(in, "t"), GapError);
    }
    {
        std::istringstream in(good_header + "\n2015-01-01T00:00Z,-1,1,1,0.5,0.5,0.5\n");
        REQUIRE_THROWS_AS(parse_csv(in, "t"), RangeError);
    }
    {
        std::istringstream in(good_header + "\n2015-01-01T00:00Z,1,1,1,1.5,0.5,0.5\n");
        REQUIRE_THROWS_AS(parse_csv(in, "t"), RangeError);
    }
    {
        std::istringstream in(good_header + "\n2015-01-01T00:00Z,1,1,1,0.5,0.5\n");
        REQUIRE_THROWS_AS(parse_csv(in, "t"), SchemaError);
    }
}

TEST_CASE("day blocks partition the horizon") {
    auto t = synth_generate(5, 1);
    const auto blocks = day_blocks(t);
    REQUIRE(blocks.size() == kDaysPerYear);
    REQUIRE(blocks.front().first_hour() == 0);
    REQUIRE(blocks.front().last_hour() == 23);
    REQUIRE(blocks.back().first_hour() == (kDaysPerYear - 1) * kHoursPerDay);

    t.demand[0].push_back(1.0);  // break the 24h alignment
    t.demand[1].push_back(1.0);
    t.demand[2].push_back(1.0);
    t.wind_cf[0].push_back(0.5);
    t.wind_cf[1].push_back(0.5);
    t.wind_cf[2].push_back(0.5);
    REQUIRE_THROWS_AS(day_blocks(t), ShapeError);
}

TEST_CASE("slicing days keeps timestamps aligned") {
    const auto t = synth_generate(5, 1);
    const auto s = slice_days(t, 10, 3);
    REQUIRE(s.length() == 3 * kHoursPerDay);
    REQUIRE(s.start_epoch_hour == t.start_epoch_hour + 10 * kHoursPerDay);
    REQUIRE(s.demand[0][0] == t.demand[0][10 * kHoursPerDay]);
    REQUIRE(s.wind_cf[2].back() == t.wind_cf[2][13 * kHoursPerDay - 1]);
}

TEST_CASE("normalization maps into the unit interval and inverts") {
    const auto t = synth_generate(9, 1);
    const auto [norm, spec] = normalize(t);
    for (int s = 0; s < kSeriesCount; ++s) {
        const auto& v = norm.series(s);
        for (double x : v) {
            REQUIRE(x >= 0.0);
            REQUIRE(x <= 1.0);
        }
    }
    // inversion recovers the raw values
    const auto& raw = t.series(1);
    const auto& scaled = norm.series(1);
    for (std::size_t i = 0; i < raw.size(); i += 997) {
        REQUIRE(spec.invert(1, scaled[i]) == Catch::Approx(raw[i]).margin(1e-9));
    }
}

TEST_CASE("constant series normalizes to zero") {
    TimeSeriesTable t;
    t.start_epoch_hour = 0;
    for (int s = 0; s < 3; ++s) {
        t.demand[s].assign(24, 100.0);
        t.wind_cf[s].assign(24, 0.25);
    }
    const auto [norm, spec] = normalize(t);
    for (double x : norm.demand[0]) REQUIRE(x == 0.0);
    (void)spec;
}
