#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "issamp/errors.hpp"
#include "issamp/timeseries.hpp"

namespace issamp {

// A weighted collection of time slices standing in for a longer series.
// Day entries carry 24 hours and a weight counting represented days; step
// entries carry a single hour and a weight counting represented hours.
struct WeightedSample {
    enum class Kind { day, step };

    struct Entry {
        TimeSeriesTable data;  // un-normalized slice, 24 hours (day) or 1 hour (step)
        double weight = 0.0;
        // Day index (day entries) or hour index (step entries) in the source
        // table. Entries synthesized without a source use -1.
        std::int64_t source_index = -1;
    };

    Kind kind = Kind::day;
    std::vector<Entry> entries;
    std::int64_t source_days = 0;
    // Set only by from_full_table: entries are consecutive days of one
    // contiguous series, so ramp limits may couple across entry boundaries.
    bool chronological = false;

    double total_weight() const {
        double s = 0.0;
        for (const auto& e : entries) s += e.weight;
        return s;
    }
};

inline void validate_sample(const WeightedSample& sample) {
    if (sample.entries.empty()) throw EmptySample("weighted sample has no entries");
    const std::int64_t want =
        sample.kind == WeightedSample::Kind::day ? kHoursPerDay : 1;
    for (std::size_t i = 0; i < sample.entries.size(); ++i) {
        const auto& e = sample.entries[i];
        if (e.data.length() != want) {
            throw ShapeError("sample entry " + std::to_string(i) + " has " +
                             std::to_string(e.data.length()) + " hours, expected " +
                             std::to_string(want));
        }
        if (!(e.weight > 0.0)) {
            throw RangeError("sample entry " + std::to_string(i) +
                             " has non-positive weight");
        }
    }
}

// Wraps a full table as one weight-1 entry per day, preserving chronology.
inline WeightedSample from_full_table(const TimeSeriesTable& table) {
    validate_table(table);
    WeightedSample sample;
    sample.kind = WeightedSample::Kind::day;
    sample.source_days = table.day_count();
    sample.chronological = true;
    sample.entries.reserve(static_cast<std::size_t>(sample.source_days));
    for (std::int64_t d = 0; d < sample.source_days; ++d) {
        WeightedSample::Entry e;
        e.data = slice_days(table, d, 1);
        e.weight = 1.0;
        e.source_index = d;
        sample.entries.push_back(std::move(e));
    }
    return sample;
}

}  // namespace issamp
