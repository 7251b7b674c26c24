#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>

#include "issamp/errors.hpp"

namespace issamp {

inline constexpr const char* kToolkitVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Seed derivation. All randomness in a run flows from one master seed through
// named sub-streams so that reruns are reproducible and the streams are
// independent of each other.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64_bytes(const void* data, std::size_t n,
                                   std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
    return splitmix64(master ^ fnv1a64(stream));
}

// ---------------------------------------------------------------------------
// Number formatting. to_chars produces the shortest representation that
// round-trips exactly, which keeps CSV/JSON outputs byte-stable across runs.
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw SchemaError("bad numeric field: '" + std::string(s) + "'");
    }
    return v;
}

inline long long parse_int(std::string_view s) {
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw SchemaError("bad integer field: '" + std::string(s) + "'");
    }
    return v;
}

// ---------------------------------------------------------------------------
// Calendar arithmetic for ISO-8601 UTC hour timestamps (YYYY-MM-DDTHH:00Z).
// Times are carried internally as hours since 1970-01-01T00:00Z.
// ---------------------------------------------------------------------------

// Days from civil date, counting from 1970-01-01 (Hinnant's algorithm).
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
    int year;
    unsigned month;
    unsigned day;
};

inline CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), m, d};
}

// Parses "YYYY-MM-DDTHH:00Z" into hours since the 1970 epoch.
inline std::int64_t parse_timestamp(std::string_view s) {
    auto fail = [&] { throw SchemaError("bad timestamp: '" + std::string(s) + "'"); };
    if (s.size() != 17) fail();
    if (s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != 'Z') fail();
    if (s.substr(14, 2) != "00") fail();
    auto digits = [&](std::string_view t) -> long long {
        for (char c : t) {
            if (c < '0' || c > '9') fail();
        }
        return parse_int(t);
    };
    const long long year = digits(s.substr(0, 4));
    const long long month = digits(s.substr(5, 2));
    const long long day = digits(s.substr(8, 2));
    const long long hour = digits(s.substr(11, 2));
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23) fail();
    const std::int64_t days = days_from_civil(static_cast<int>(year),
                                              static_cast<unsigned>(month),
                                              static_cast<unsigned>(day));
    // Reject dates that do not round-trip (e.g. April 31).
    const CivilDate back = civil_from_days(days);
    if (back.year != year || back.month != month || back.day != day) fail();
    return days * 24 + hour;
}

inline std::string format_timestamp(std::int64_t epoch_hour) {
    std::int64_t days = epoch_hour / 24;
    int hour = static_cast<int>(epoch_hour % 24);
    if (hour < 0) {
        hour += 24;
        days -= 1;
    }
    const CivilDate d = civil_from_days(days);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:00Z", d.year, d.month, d.day, hour);
    return buf;
}

}  // namespace issamp
