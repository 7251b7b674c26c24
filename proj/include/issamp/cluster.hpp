#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "sample.hpp"
#include "timeseries.hpp"
#include "util.hpp"

namespace issamp {

inline constexpr int kFeatureDim = kSeriesCount * kHoursPerDay;

// One row per selected day: the six normalized series concatenated in the
// fixed table order, 24 hours each. Feature geometry is what clustering
// sees, so the layout is part of the contract.
struct DayFeatureMatrix {
    std::vector<std::int64_t> days;  // source day index per row
    std::vector<std::array<double, kFeatureDim>> rows;

    std::int64_t row_count() const { return static_cast<std::int64_t>(rows.size()); }
};

struct Clustering {
    int k = 0;
    std::vector<std::int64_t> medoid_days;  // actual day index per cluster, ascending
    std::vector<std::int64_t> days;         // actual day index per row (from the features)
    std::vector<int> assignment;            // row -> cluster
    std::vector<std::int64_t> sizes;        // rows per cluster
    double total_cost = 0.0;                // summed distance of rows to their medoid
};

inline DayFeatureMatrix day_features(const TimeSeriesTable& table, const NormalizationSpec& spec,
                                     const std::vector<DayBlock>& days) {
    if (days.empty()) throw EmptySelection("no days selected for clustering");
    DayFeatureMatrix f;
    f.days.reserve(days.size());
    f.rows.reserve(days.size());
    for (const DayBlock& day : days) {
        if (day.day_index < 0 || day.last_hour() >= table.length()) {
            throw ShapeError("day " + std::to_string(day.day_index) + " outside the table");
        }
        std::array<double, kFeatureDim> row;
        for (int s = 0; s < kSeriesCount; ++s) {
            const auto& series = table.series(s);
            for (int h = 0; h < kHoursPerDay; ++h) {
                row[static_cast<std::size_t>(s * kHoursPerDay + h)] = spec.apply(
                    s, series[static_cast<std::size_t>(day.first_hour() + h)]);
            }
        }
        f.days.push_back(day.day_index);
        f.rows.push_back(row);
    }
    return f;
}

namespace cluster_detail {

inline double distance(const std::array<double, kFeatureDim>& a,
                       const std::array<double, kFeatureDim>& b) {
    double s = 0.0;
    for (int i = 0; i < kFeatureDim; ++i) {
        const double d = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
        s += d * d;
    }
    return std::sqrt(s);
}

// Closest and second-closest medoid per row, the state the swap evaluation
// runs on. Medoid rows count as their own closest at distance zero.
struct NearestState {
    std::vector<int> near;     // cluster id of the closest medoid
    std::vector<double> dn;    // distance to it
    std::vector<double> ds;    // distance to the second-closest medoid
};

inline NearestState recompute_nearest(const std::vector<double>& dist, std::int64_t n,
                                      const std::vector<int>& medoids) {
    NearestState st;
    st.near.assign(static_cast<std::size_t>(n), -1);
    st.dn.assign(static_cast<std::size_t>(n), 0.0);
    st.ds.assign(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t j = 0; j < n; ++j) {
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = std::numeric_limits<double>::infinity();
        int c1 = -1;
        for (std::size_t c = 0; c < medoids.size(); ++c) {
            const double d = dist[static_cast<std::size_t>(medoids[c]) *
                                      static_cast<std::size_t>(n) +
                                  static_cast<std::size_t>(j)];
            if (d < d1) {
                d2 = d1;
                d1 = d;
                c1 = static_cast<int>(c);
            } else if (d < d2) {
                d2 = d;
            }
        }
        st.near[static_cast<std::size_t>(j)] = c1;
        st.dn[static_cast<std::size_t>(j)] = d1;
        st.ds[static_cast<std::size_t>(j)] = d2;
    }
    return st;
}

}  // namespace cluster_detail

// PAM-style swap descent on the full distance matrix: greedy farthest-point
// seeding from a seed-chosen first medoid, then repeated application of the
// best improving (medoid out, point in) swap until none exists. Each sweep
// evaluates every candidate against every medoid in one pass over the rows
// using the closest/second-closest decomposition, so a sweep costs O(n^2)
// rather than O(k n^2).
inline Clustering k_medoids(const DayFeatureMatrix& features, int k, std::uint64_t seed) {
    const std::int64_t n = features.row_count();
    if (k < 1 || k > n) {
        throw BadK("k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }

    std::vector<double> dist(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (std::int64_t a = 0; a < n; ++a) {
        dist[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(a)] = 0.0;
        for (std::int64_t b = a + 1; b < n; ++b) {
            const double d = cluster_detail::distance(features.rows[static_cast<std::size_t>(a)],
                                                      features.rows[static_cast<std::size_t>(b)]);
            dist[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(b)] = d;
            dist[static_cast<std::size_t>(b) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(a)] = d;
        }
    }
    const auto d_at = [&](std::int64_t a, std::int64_t b) {
        return dist[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(b)];
    };

    // farthest-point seeding; ties to the lowest row index
    std::vector<int> medoids;
    medoids.reserve(static_cast<std::size_t>(k));
    medoids.push_back(static_cast<int>(derive_seed(seed, "kmedoids-init") %
                                       static_cast<std::uint64_t>(n)));
    std::vector<double> near_d(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) near_d[static_cast<std::size_t>(j)] = d_at(medoids[0], j);
    while (static_cast<int>(medoids.size()) < k) {
        int far = 0;
        for (std::int64_t j = 1; j < n; ++j) {
            if (near_d[static_cast<std::size_t>(j)] > near_d[static_cast<std::size_t>(far)]) {
                far = static_cast<int>(j);
            }
        }
        medoids.push_back(far);
        for (std::int64_t j = 0; j < n; ++j) {
            near_d[static_cast<std::size_t>(j)] =
                std::min(near_d[static_cast<std::size_t>(j)], d_at(far, j));
        }
    }

    auto st = cluster_detail::recompute_nearest(dist, n, medoids);
    std::vector<char> is_medoid(static_cast<std::size_t>(n), 0);
    for (int m : medoids) is_medoid[static_cast<std::size_t>(m)] = 1;

    std::vector<double> removal(static_cast<std::size_t>(k));
    for (int swaps = 0; swaps < 200; ++swaps) {
        double best_delta = -1e-12;
        int best_c = -1;
        int best_i = -1;
        for (std::int64_t c = 0; c < n; ++c) {
            if (is_medoid[static_cast<std::size_t>(c)]) continue;
            std::fill(removal.begin(), removal.end(), 0.0);
            double shared = 0.0;
            for (std::int64_t j = 0; j < n; ++j) {
                const double dcj = d_at(c, j);
                const double dn = st.dn[static_cast<std::size_t>(j)];
                const double gain = dcj < dn ? dcj - dn : 0.0;
                shared += gain;
                // if j's own medoid leaves, j pays the better of c and its
                // second choice instead of dn (and instead of `gain`)
                removal[static_cast<std::size_t>(st.near[static_cast<std::size_t>(j)])] +=
                    std::min(dcj, st.ds[static_cast<std::size_t>(j)]) - dn - gain;
            }
            for (int i = 0; i < k; ++i) {
                const double delta = shared + removal[static_cast<std::size_t>(i)];
                if (delta < best_delta) {
                    best_delta = delta;
                    best_c = static_cast<int>(c);
                    best_i = i;
                }
            }
        }
        if (best_c < 0) break;
        is_medoid[static_cast<std::size_t>(medoids[static_cast<std::size_t>(best_i)])] = 0;
        is_medoid[static_cast<std::size_t>(best_c)] = 1;
        medoids[static_cast<std::size_t>(best_i)] = best_c;
        st = cluster_detail::recompute_nearest(dist, n, medoids);
    }

    // canonical labels: clusters ordered by ascending medoid day index
    std::vector<int> order(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return features.days[static_cast<std::size_t>(medoids[static_cast<std::size_t>(a)])] <
               features.days[static_cast<std::size_t>(medoids[static_cast<std::size_t>(b)])];
    });

    Clustering out;
    out.k = k;
    out.days = features.days;
    out.medoid_days.resize(static_cast<std::size_t>(k));
    std::vector<int> medoid_row(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        const int row = medoids[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])];
        medoid_row[static_cast<std::size_t>(c)] = row;
        out.medoid_days[static_cast<std::size_t>(c)] =
            features.days[static_cast<std::size_t>(row)];
    }
    out.assignment.assign(static_cast<std::size_t>(n), -1);
    out.sizes.assign(static_cast<std::size_t>(k), 0);
    for (std::int64_t j = 0; j < n; ++j) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (medoid_row[static_cast<std::size_t>(c)] == static_cast<int>(j)) {
                best = c;  // a medoid belongs to its own cluster, duplicates included
                break;
            }
            const double d = d_at(medoid_row[static_cast<std::size_t>(c)], j);
            // strict comparison with ascending medoid-day order means ties
            // resolve to the lowest medoid day index
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        out.assignment[static_cast<std::size_t>(j)] = best;
        ++out.sizes[static_cast<std::size_t>(best)];
        if (medoid_row[static_cast<std::size_t>(best)] != static_cast<int>(j)) {
            out.total_cost += best_d;
        }
    }
    return out;
}

// Representative-day sample: each medoid contributes its actual day's
// un-normalized data weighted by how many days it stands for.
inline WeightedSample to_weighted_sample(const TimeSeriesTable& table,
                                         const Clustering& clustering) {
    WeightedSample sample;
    sample.kind = WeightedSample::Kind::day;
    sample.source_days = table.day_count();
    sample.entries.reserve(clustering.medoid_days.size());
    for (std::size_t c = 0; c < clustering.medoid_days.size(); ++c) {
        WeightedSample::Entry e;
        e.data = slice_days(table, clustering.medoid_days[c], 1);
        e.weight = static_cast<double>(clustering.sizes[c]);
        e.source_index = clustering.medoid_days[c];
        sample.entries.push_back(std::move(e));
    }
    validate_sample(sample);
    return sample;
}

}  // namespace issamp
