#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "issamp/errors.hpp"
#include "issamp/util.hpp"

namespace issamp {

inline constexpr int kHoursPerDay = 24;
inline constexpr int kDaysPerYear = 365;  // synthetic years carry no leap days
inline constexpr int kHoursPerYear = kDaysPerYear * kHoursPerDay;

inline constexpr std::array<int, 3> kDemandBuses = {2, 4, 5};
inline constexpr std::array<int, 3> kWindBuses = {2, 5, 6};
inline constexpr int kSeriesCount = 6;

inline const std::array<std::string, kSeriesCount> kSeriesNames = {
    "demand_bus2", "demand_bus4", "demand_bus5",
    "wind_bus2",   "wind_bus5",   "wind_bus6"};

// Contiguous hourly demand (MW) and wind capacity-factor series for the
// six-bus system. Demand lives at buses 2, 4, 5; wind at buses 2, 5, 6.
// Immutable after construction/validation; safe to share across threads.
struct TimeSeriesTable {
    std::int64_t start_epoch_hour = 0;
    std::array<std::vector<double>, 3> demand;   // by kDemandBuses order
    std::array<std::vector<double>, 3> wind_cf;  // by kWindBuses order

    std::int64_t length() const { return static_cast<std::int64_t>(demand[0].size()); }
    std::int64_t day_count() const { return length() / kHoursPerDay; }

    // Series accessor in the fixed order demand_bus2, demand_bus4,
    // demand_bus5, wind_bus2, wind_bus5, wind_bus6.
    const std::vector<double>& series(int s) const {
        return s < 3 ? demand[s] : wind_cf[s - 3];
    }
    std::vector<double>& series(int s) { return s < 3 ? demand[s] : wind_cf[s - 3]; }
};

struct DayBlock {
    std::int64_t day_index = 0;
    std::int64_t first_hour() const { return day_index * kHoursPerDay; }
    std::int64_t last_hour() const { return first_hour() + kHoursPerDay - 1; }
};

// Per-series min/max over the full table; fixed once so that cluster
// distances stay comparable between runs on different day subsets.
struct NormalizationSpec {
    std::array<double, kSeriesCount> min{};
    std::array<double, kSeriesCount> max{};

    double apply(int s, double x) const {
        const double range = max[s] - min[s];
        if (range <= 0.0) return 0.0;  // constant series maps to 0
        return (x - min[s]) / range;
    }
    double invert(int s, double y) const {
        const double range = max[s] - min[s];
        if (range <= 0.0) return min[s];
        return min[s] + y * range;
    }
};

inline void validate_table(const TimeSeriesTable& t) {
    const std::int64_t n = t.length();
    if (n <= 0) throw ShapeError("time series table is empty");
    for (int i = 0; i < 3; ++i) {
        if (static_cast<std::int64_t>(t.demand[i].size()) != n ||
            static_cast<std::int64_t>(t.wind_cf[i].size()) != n) {
            throw ShapeError("series lengths disagree");
        }
    }
    for (int i = 0; i < 3; ++i) {
        for (std::int64_t h = 0; h < n; ++h) {
            const double d = t.demand[i][h];
            if (!std::isfinite(d) || d < 0.0) {
                throw RangeError("demand_bus" + std::to_string(kDemandBuses[i]) +
                                 " out of range at hour " + std::to_string(h) + ": " +
                                 format_double(d));
            }
            const double w = t.wind_cf[i][h];
            if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
                throw RangeError("wind_bus" + std::to_string(kWindBuses[i]) +
                                 " capacity factor outside [0,1] at hour " +
                                 std::to_string(h) + ": " + format_double(w));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// CSV ingestion. Single format: header
//   timestamp,demand_bus2,demand_bus4,demand_bus5,wind_bus2,wind_bus5,wind_bus6
// ISO-8601 UTC hour timestamps, decimal point, LF line endings.
// ---------------------------------------------------------------------------

inline const std::string kCsvHeader =
    "timestamp,demand_bus2,demand_bus4,demand_bus5,wind_bus2,wind_bus5,wind_bus6";

inline TimeSeriesTable parse_csv(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(origin + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) {
        throw SchemaError(origin + ": bad header, expected '" + kCsvHeader + "', got '" +
                          line + "'");
    }
    TimeSeriesTable t;
    std::int64_t prev_hour = 0;
    bool first = true;
    std::int64_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        std::array<std::string_view, 7> fields;
        std::string_view rest = line;
        for (int f = 0; f < 7; ++f) {
            const std::size_t comma = rest.find(',');
            if (f < 6) {
                if (comma == std::string_view::npos) {
                    throw SchemaError(origin + ": row " + std::to_string(row) +
                                      " has too few columns");
                }
                fields[f] = rest.substr(0, comma);
                rest = rest.substr(comma + 1);
            } else {
                if (comma != std::string_view::npos) {
                    throw SchemaError(origin + ": row " + std::to_string(row) +
                                      " has too many columns");
                }
                fields[f] = rest;
            }
        }
        const std::int64_t hour = parse_timestamp(fields[0]);
        if (first) {
            t.start_epoch_hour = hour;
            first = false;
        } else if (hour != prev_hour + 1) {
            throw GapError(origin + ": non-contiguous timestamp at row " +
                           std::to_string(row) + " (" + std::string(fields[0]) + ")");
        }
        prev_hour = hour;
        for (int s = 0; s < kSeriesCount; ++s) {
            double v;
            try {
                v = parse_double(fields[s + 1]);
            } catch (const SchemaError&) {
                throw SchemaError(origin + ": row " + std::to_string(row) + ", column " +
                                  kSeriesNames[s] + ": bad number '" +
                                  std::string(fields[s + 1]) + "'");
            }
            t.series(s).push_back(v);
        }
    }
    validate_table(t);
    return t;
}

inline TimeSeriesTable load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_csv(in, path);
}

inline void write_csv(const TimeSeriesTable& t, std::ostream& out) {
    out << kCsvHeader << "\n";
    const std::int64_t n = t.length();
    for (std::int64_t h = 0; h < n; ++h) {
        out << format_timestamp(t.start_epoch_hour + h);
        for (int s = 0; s < kSeriesCount; ++s) out << ',' << format_double(t.series(s)[h]);
        out << "\n";
    }
}

inline void write_csv(const TimeSeriesTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_csv(t, out);
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Synthetic multi-year generator. Stand-in for reanalysis demand/wind data:
// demand is baseline + seasonal + diurnal sinusoids + AR(1) noise (clipped at
// zero), wind capacity factors are a logistic transform of an AR(1) process
// driven by a shared weather state so buses correlate without being equal.
// Years are exactly 365 days. Deterministic in the seed.
// ---------------------------------------------------------------------------

namespace detail {

// mt19937_64 output is pinned by the standard; the normal deviates are drawn
// with Box-Muller rather than std::normal_distribution so streams are
// bit-identical across standard libraries.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double uniform01() {
        // 53-bit mantissa uniform in [0,1)
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace detail

inline TimeSeriesTable synth_generate(std::uint64_t seed, int n_years) {
    if (n_years < 1) throw RangeError("n_years must be >= 1");
    const std::int64_t n = static_cast<std::int64_t>(n_years) * kHoursPerYear;

    TimeSeriesTable t;
    t.start_epoch_hour = days_from_civil(2015, 1, 1) * 24;
    for (int i = 0; i < 3; ++i) {
        t.demand[i].resize(n);
        t.wind_cf[i].resize(n);
    }

    // Demand parameters per bus (DE, FR, UK): baseline MW, seasonal and
    // diurnal amplitudes, phase offsets in days/hours.
    const std::array<double, 3> base = {55000.0, 48000.0, 35000.0};
    const std::array<double, 3> seas_amp = {0.18, 0.22, 0.20};
    const std::array<double, 3> diur_amp = {0.14, 0.12, 0.16};
    const std::array<double, 3> seas_phase = {14.0, 10.0, 18.0};   // peak day of year
    const std::array<double, 3> diur_phase = {18.0, 19.0, 17.5};   // peak hour of day
    const double ar_rho_d = 0.95;
    const double ar_sigma_d = 0.035;  // relative to baseline, stationary scale

    // Shared weather driver plus idiosyncratic term for wind; logistic
    // transform keeps capacity factors strictly inside (0,1).
    const std::array<double, 3> wind_mu = {-0.9, -0.7, -0.8};
    const std::array<double, 3> wind_seas = {0.55, 0.45, 0.35};
    const std::array<double, 3> wind_phase = {20.0, 30.0, 5.0};
    const double w_rho = 0.985;   // shared driver persistence (multi-day spells)
    const double w_sigma = 0.28;
    const double v_rho = 0.96;    // per-bus deviation persistence
    const double v_sigma = 0.35;
    const double shared_wt = 0.75;

    detail::GaussianStream gd(derive_seed(seed, "synth-demand"));
    detail::GaussianStream gw(derive_seed(seed, "synth-wind"));
    // Occasional multi-day cold snaps: demand surges while the shared wind
    // driver sags, the joint events system stress comes from.
    detail::GaussianStream ge(derive_seed(seed, "synth-events"));

    std::array<double, 3> ar_d{};
    double w_state = 0.0;
    std::array<double, 3> v_state{};
    double snap = 0.0;  // cold-snap intensity, decays hourly

    const double two_pi = 2.0 * 3.14159265358979323846;
    for (std::int64_t h = 0; h < n; ++h) {
        const double day_of_year = static_cast<double>((h / 24) % kDaysPerYear);
        const double hour_of_day = static_cast<double>(h % 24);

        // Cold snaps start preferentially in winter and persist for days.
        const double winter = 0.5 * (1.0 + std::cos(two_pi * (day_of_year - 15.0) / 365.0));
        if (ge.uniform01() < 3.5e-4 * winter * winter) {
            snap = std::max(snap, 0.8 + 0.5 * std::abs(ge.normal()));
        }
        snap *= 0.988;  // ~60 h e-folding time
        if (snap < 1e-3) snap = 0.0;

        w_state = w_rho * w_state + w_sigma * gw.normal() - 0.004 * snap;
        for (int i = 0; i < 3; ++i) {
            ar_d[i] = ar_rho_d * ar_d[i] + ar_sigma_d * gd.normal();
            const double seasonal =
                seas_amp[i] * std::cos(two_pi * (day_of_year - seas_phase[i]) / 365.0);
            const double diurnal =
                diur_amp[i] * std::cos(two_pi * (hour_of_day - diur_phase[i]) / 24.0);
            const double rel = 1.0 + seasonal + diurnal + ar_d[i] + 0.10 * snap;
            t.demand[i][h] = std::max(0.0, base[i] * rel);

            v_state[i] = v_rho * v_state[i] + v_sigma * gw.normal();
            const double wind_seasonal =
                wind_seas[i] * std::cos(two_pi * (day_of_year - wind_phase[i]) / 365.0);
            const double x = wind_mu[i] + wind_seasonal + shared_wt * w_state +
                             (1.0 - shared_wt) * v_state[i] - 0.45 * snap;
            t.wind_cf[i][h] = 1.0 / (1.0 + std::exp(-x));
        }
    }
    validate_table(t);
    return t;
}

// ---------------------------------------------------------------------------

inline std::pair<TimeSeriesTable, NormalizationSpec> normalize(const TimeSeriesTable& t) {
    validate_table(t);
    NormalizationSpec spec;
    for (int s = 0; s < kSeriesCount; ++s) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (double v : t.series(s)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        spec.min[s] = lo;
        spec.max[s] = hi;
    }
    TimeSeriesTable out = t;
    for (int s = 0; s < kSeriesCount; ++s) {
        for (double& v : out.series(s)) v = spec.apply(s, v);
    }
    return {std::move(out), spec};
}

inline NormalizationSpec normalization_spec(const TimeSeriesTable& t) {
    NormalizationSpec spec;
    for (int s = 0; s < kSeriesCount; ++s) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (double v : t.series(s)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        spec.min[s] = lo;
        spec.max[s] = hi;
    }
    return spec;
}

inline std::vector<DayBlock> day_blocks(const TimeSeriesTable& t) {
    const std::int64_t n = t.length();
    if (n % kHoursPerDay != 0) {
        throw ShapeError("table length " + std::to_string(n) +
                         " is not a multiple of 24 hours");
    }
    std::vector<DayBlock> blocks(static_cast<std::size_t>(n / kHoursPerDay));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        blocks[i].day_index = static_cast<std::int64_t>(i);
    }
    return blocks;
}

// Contiguous day-range view copied out as a standalone table.
inline TimeSeriesTable slice_days(const TimeSeriesTable& t, std::int64_t first_day,
                                  std::int64_t n_days) {
    if (first_day < 0 || n_days <= 0 || (first_day + n_days) * kHoursPerDay > t.length()) {
        throw ShapeError("day slice out of range");
    }
    TimeSeriesTable out;
    out.start_epoch_hour = t.start_epoch_hour + first_day * kHoursPerDay;
    const std::int64_t h0 = first_day * kHoursPerDay;
    const std::int64_t h1 = h0 + n_days * kHoursPerDay;
    for (int i = 0; i < 3; ++i) {
        out.demand[i].assign(t.demand[i].begin() + h0, t.demand[i].begin() + h1);
        out.wind_cf[i].assign(t.wind_cf[i].begin() + h0, t.wind_cf[i].begin() + h1);
    }
    return out;
}

inline bool tables_equal(const TimeSeriesTable& a, const TimeSeriesTable& b) {
    if (a.start_epoch_hour != b.start_epoch_hour || a.length() != b.length()) return false;
    for (int s = 0; s < kSeriesCount; ++s) {
        if (a.series(s) != b.series(s)) return false;
    }
    return true;
}

}  // namespace issamp
