#include "crowdbelief/clustering.hpp"

#include <algorithm>
#include <cmath>

namespace crowdbelief {

namespace {
constexpr int kMaxIterations = 1000;
}

ClusterResult kmeans_two(std::span<const double> values) {
    if (values.size() < 2)
        fail(Errc::too_few_values, "2-means needs at least two values");

    const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    ClusterResult result;
    result.centroids = {*min_it, *max_it};
    result.assignments.assign(values.size(), 0);

    if (*min_it == *max_it) {
        // Zero variance: one effective cluster holding everything.
        result.expert_cluster = 0;
        result.iterations = 0;
        return result;
    }

    std::vector<int> next(values.size(), 0);
    for (int pass = 1; pass <= kMaxIterations; ++pass) {
        result.iterations = pass;
        const double c0 = result.centroids[0];
        const double c1 = result.centroids[1];
        const int lower = c0 <= c1 ? 0 : 1;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double d0 = std::abs(values[i] - c0);
            const double d1 = std::abs(values[i] - c1);
            next[i] = d0 < d1 ? 0 : (d1 < d0 ? 1 : lower);
        }

        double sum[2] = {0.0, 0.0};
        std::size_t count[2] = {0, 0};
        for (std::size_t i = 0; i < values.size(); ++i) {
            sum[next[i]] += values[i];
            ++count[next[i]];
        }
        for (int c : {0, 1})
            if (count[c] > 0)
                result.centroids[c] = sum[c] / static_cast<double>(count[c]);

        if (next == result.assignments) {
            result.expert_cluster = result.centroids[1] >= result.centroids[0] ? 1 : 0;
            return result;
        }
        result.assignments = next;
    }
    fail(Errc::stalled_convergence, "2-means did not converge within 1000 passes");
}

std::vector<bool> label_experts(std::span<const double> values) {
    const ClusterResult clusters = kmeans_two(values);
    if (clusters.centroids[0] == clusters.centroids[1]) {
        const bool expert = values.front() >= 0.5;
        return std::vector<bool>(values.size(), expert);
    }
    std::vector<bool> flags(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        flags[i] = clusters.assignments[i] == clusters.expert_cluster;
    return flags;
}

} // namespace crowdbelief
