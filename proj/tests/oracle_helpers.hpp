#pragma once

// Brute-force reference implementations used to verify the library. These
// deliberately avoid the library's own code paths: subsets are walked by
// explicit loops over the full power set and matrix algebra is spelled out.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using SubsetMass = std::map<std::uint64_t, double>;

inline int count_bits(std::uint64_t bits) {
    int n = 0;
    while (bits != 0) {
        n += static_cast<int>(bits & 1);
        bits >>= 1;
    }
    return n;
}

// Average of mass functions computed over every non-empty subset of an
// n-element frame.
inline SubsetMass brute_mean(std::size_t n, const std::vector<SubsetMass>& masses) {
    SubsetMass out;
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    for (std::uint64_t subset = 1; subset <= full; ++subset) {
        double total = 0.0;
        for (const auto& m : masses) {
            const auto it = m.find(subset);
            if (it != m.end()) total += it->second;
        }
        if (total != 0.0) out[subset] = total / static_cast<double>(masses.size());
    }
    return out;
}

inline double jaccard_by_enumeration(std::uint64_t a, std::uint64_t b, std::size_t n) {
    int inter = 0;
    int uni = 0;
    for (std::size_t e = 0; e < n; ++e) {
        const bool in_a = (a >> e) & 1;
        const bool in_b = (b >> e) & 1;
        inter += in_a && in_b;
        uni += in_a || in_b;
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// Jousselme distance over the dense 2^n - 1 subset basis.
inline double brute_jousselme(std::size_t n, const SubsetMass& m1, const SubsetMass& m2) {
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    std::vector<double> diff;
    std::vector<std::uint64_t> basis;
    for (std::uint64_t subset = 1; subset <= full; ++subset) {
        basis.push_back(subset);
        const auto it1 = m1.find(subset);
        const auto it2 = m2.find(subset);
        diff.push_back((it1 != m1.end() ? it1->second : 0.0) -
                       (it2 != m2.end() ? it2->second : 0.0));
    }
    double quad = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j)
            quad += diff[i] * diff[j] * jaccard_by_enumeration(basis[i], basis[j], n);
    return std::sqrt(0.5 * std::max(quad, 0.0));
}

// Pignistic probabilities via element-membership sums.
inline std::vector<double> brute_pignistic(std::size_t n, const SubsetMass& m) {
    std::vector<double> probs(n, 0.0);
    for (std::size_t e = 0; e < n; ++e)
        for (const auto& [subset, mass] : m)
            if ((subset >> e) & 1)
                probs[e] += mass / static_cast<double>(count_bits(subset));
    return probs;
}

inline double specificity_formula(std::size_t n, const SubsetMass& m) {
    double weighted = 0.0;
    for (const auto& [subset, mass] : m)
        weighted += mass * std::log2(static_cast<double>(count_bits(subset))) /
                    std::log2(static_cast<double>(n));
    return 1.0 - weighted;
}

inline double euclidean_normalized(const std::vector<double>& p1,
                                   const std::vector<double>& p2) {
    double sq = 0.0;
    for (std::size_t i = 0; i < p1.size(); ++i)
        sq += (p1[i] - p2[i]) * (p1[i] - p2[i]);
    return std::sqrt(sq) / std::sqrt(2.0);
}

inline double population_stddev(const std::vector<double>& values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(values.size()));
}

// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double min_eigenvalue(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-18) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i][p];
                    const double aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a[p][i];
                    const double aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    double min = a[0][0];
    for (std::size_t i = 1; i < n; ++i) min = std::min(min, a[i][i]);
    return min;
}

// Every 2-partition of values that some threshold induces: flag = value > t.
inline std::vector<std::vector<bool>> threshold_partitions(const std::vector<double>& values) {
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<std::vector<bool>> partitions;
    // Thresholds below everything, between consecutive distinct values, and
    // above everything.
    std::vector<double> thresholds{sorted.front() - 1.0};
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
        thresholds.push_back((sorted[i] + sorted[i + 1]) / 2.0);
    thresholds.push_back(sorted.back() + 1.0);
    for (double t : thresholds) {
        std::vector<bool> flags(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) flags[i] = values[i] > t;
        partitions.push_back(std::move(flags));
    }
    return partitions;
}

// Random valid mass function over an n-element frame, as raw subset masses.
inline SubsetMass random_mass(std::mt19937_64& rng, std::size_t n, int max_focals = 4) {
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    const int focals =
        1 + static_cast<int>(rng() % std::min<std::uint64_t>(max_focals, full));
    SubsetMass m;
    while (m.size() < static_cast<std::size_t>(focals)) {
        const std::uint64_t subset = 1 + rng() % full;
        m.emplace(subset, 0.0);
    }
    double total = 0.0;
    for (auto& [subset, mass] : m) {
        mass = 1e-3 + static_cast<double>(rng() % 1000000) / 1e6;
        total += mass;
    }
    for (auto& [subset, mass] : m) mass /= total;
    return m;
}

} // namespace oracle
