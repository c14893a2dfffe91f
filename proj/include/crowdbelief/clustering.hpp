#pragma once

#include <array>
#include <span>
#include <vector>

#include "crowdbelief/error.hpp"

namespace crowdbelief {

struct ClusterResult {
    std::vector<int> assignments;     // 0 or 1 per value
    std::array<double, 2> centroids;  // centroid 0 starts at min, centroid 1 at max
    int expert_cluster = 0;           // cluster with the higher centroid
    int iterations = 0;               // Lloyd passes performed
};

// Deterministic one-dimensional 2-means: centroids seeded at min and max,
// points assigned to the nearest centroid with ties going to the lower one,
// stops when assignments no longer change. When every value is identical the
// centroids coincide and all points land in cluster 0.
ClusterResult kmeans_two(std::span<const double> values);

// True for workers in the higher-centroid cluster. When every value is
// identical the higher-average rule is undefined; then all workers are flagged
// expert iff the common value is >= 0.5.
std::vector<bool> label_experts(std::span<const double> values);

} // namespace crowdbelief
