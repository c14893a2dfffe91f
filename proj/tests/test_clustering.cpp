#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "crowdbelief/clustering.hpp"
#include "oracle_helpers.hpp"

using namespace crowdbelief;

TEST_CASE("well-separated pairs split cleanly") {
    const std::vector<double> values{0.1, 0.15, 0.9, 0.95};
    const ClusterResult result = kmeans_two(values);
    CHECK(result.centroids[0] == doctest::Approx(0.125));
    CHECK(result.centroids[1] == doctest::Approx(0.925));
    CHECK(result.expert_cluster == 1);
    CHECK(result.assignments == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("zero variance collapses to one cluster") {
    const std::vector<double> values{0.5, 0.5, 0.5};
    const ClusterResult result = kmeans_two(values);
    CHECK(result.centroids[0] == result.centroids[1]);
    CHECK(std::all_of(result.assignments.begin(), result.assignments.end(),
                      [](int a) { return a == 0; }));
}

TEST_CASE("two points form singleton clusters") {
    const ClusterResult result = kmeans_two(std::vector<double>{0.0, 1.0});
    CHECK(result.assignments == std::vector<int>{0, 1});
    CHECK(result.centroids[0] == doctest::Approx(0.0));
    CHECK(result.centroids[1] == doctest::Approx(1.0));
}

TEST_CASE("centroids equal their cluster means at convergence") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> values(3 + rng() % 10);
        for (double& v : values) v = static_cast<double>(rng() % 1000000) / 1e6;
        const ClusterResult result = kmeans_two(values);
        double sum[2] = {0, 0};
        int count[2] = {0, 0};
        for (std::size_t i = 0; i < values.size(); ++i) {
            sum[result.assignments[i]] += values[i];
            ++count[result.assignments[i]];
        }
        for (int c : {0, 1})
            if (count[c] > 0)
                REQUIRE(result.centroids[c] ==
                        doctest::Approx(sum[c] / count[c]).epsilon(1e-9));
    }
}

TEST_CASE("label_experts basics") {
    CHECK(label_experts(std::vector<double>{0.1, 0.9, 0.95}) ==
          std::vector<bool>{false, true, true});
    CHECK(label_experts(std::vector<double>{0.2, 0.2, 0.2}) ==
          std::vector<bool>{false, false, false});
    CHECK(label_experts(std::vector<double>{0.7, 0.7}) == std::vector<bool>{true, true});
    CHECK_THROWS_AS(label_experts(std::vector<double>{0.4}), Error);
    CHECK_THROWS_AS(kmeans_two(std::vector<double>{}), Error);
}

TEST_CASE("flags are invariant under increasing affine maps") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> values(2 + rng() % 12);
        for (double& v : values) v = static_cast<double>(rng() % 1000000) / 1e6;
        if (*std::max_element(values.begin(), values.end()) ==
            *std::min_element(values.begin(), values.end()))
            continue;  // degenerate rule is threshold-based, not affine-invariant

        const double scale = 0.1 + static_cast<double>(rng() % 1000) / 100.0;
        const double shift = -5.0 + static_cast<double>(rng() % 1000) / 100.0;
        std::vector<double> mapped(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            mapped[i] = scale * values[i] + shift;

        REQUIRE(label_experts(values) == label_experts(mapped));
    }
}

TEST_CASE("flags are permutation equivariant") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> values(3 + rng() % 9);
        for (double& v : values) v = static_cast<double>(rng() % 1000000) / 1e6;
        const std::vector<bool> flags = label_experts(values);

        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<double> permuted(values.size());
        for (std::size_t i = 0; i < order.size(); ++i) permuted[i] = values[order[i]];

        const std::vector<bool> permuted_flags = label_experts(permuted);
        for (std::size_t i = 0; i < order.size(); ++i)
            REQUIRE(permuted_flags[i] == flags[order[i]]);
    }
}

TEST_CASE("converged flags match a threshold split") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<double> values(2 + rng() % 11);  // n <= 12
        for (double& v : values) v = static_cast<double>(rng() % 1000) / 1e3;
        if (*std::max_element(values.begin(), values.end()) ==
            *std::min_element(values.begin(), values.end()))
            continue;

        const std::vector<bool> flags = label_experts(values);
        const auto partitions = oracle::threshold_partitions(values);
        REQUIRE(std::find(partitions.begin(), partitions.end(), flags) != partitions.end());
    }
}

TEST_CASE("identical inputs always give identical outputs") {
    std::mt19937_64 rng(37);
    std::vector<double> values(50);
    for (double& v : values) v = static_cast<double>(rng() % 1000000) / 1e6;
    const ClusterResult a = kmeans_two(values);
    const ClusterResult b = kmeans_two(values);
    CHECK(a.assignments == b.assignments);
    CHECK(a.centroids == b.centroids);
    CHECK(a.expert_cluster == b.expert_cluster);
    CHECK(a.iterations == b.iterations);
}
