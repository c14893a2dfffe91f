#include <doctest.h>

#include <random>

#include "crowdbelief/belief.hpp"
#include "derived_examples.hpp"
#include "oracle_helpers.hpp"

using namespace crowdbelief;

namespace {

FramePtr frame_ab() { return make_frame("q", {"a", "b"}); }
FramePtr frame_abcd() { return make_frame("q", {"a", "b", "c", "d"}); }

} // namespace

TEST_CASE("frame invariants") {
    CHECK_THROWS_WITH_AS(Frame("q", {"a"}), doctest::Contains("at least 2"), Error);
    CHECK_THROWS_AS(Frame("q", {"a", "a"}), Error);
    CHECK(frame_abcd()->size() == 4);
    CHECK(frame_abcd()->index_of("c") == 2);
    CHECK_FALSE(frame_abcd()->index_of("z").has_value());
}

TEST_CASE("validate_mass accepts categorical certainty") {
    const auto result = validate_mass(*frame_ab(), std::vector<MassEntry>{{0b01, 1.0}});
    CHECK(result.ok);
}

TEST_CASE("validate_mass rejects a non-normalized sum") {
    const std::vector<MassEntry> entries{{0b01, 0.6}, {0b11, 0.5}};
    const auto result = validate_mass(*frame_ab(), entries);
    REQUIRE_FALSE(result.ok);
    CHECK(result.code == Errc::non_normalized);
}

TEST_CASE("validate_mass rejects the empty focal set") {
    const std::vector<MassEntry> entries{{0, 1.0}};
    const auto result = validate_mass(*frame_ab(), entries);
    REQUIRE_FALSE(result.ok);
    CHECK(result.code == Errc::empty_focal_set);
}

TEST_CASE("validate_mass rejects non-positive masses and foreign elements") {
    auto bad_mass = validate_mass(*frame_ab(), std::vector<MassEntry>{{0b01, 0.0}, {0b10, 1.0}});
    CHECK(bad_mass.code == Errc::non_positive_mass);

    auto foreign = validate_mass(*frame_ab(), std::vector<MassEntry>{{0b100, 1.0}});
    CHECK(foreign.code == Errc::foreign_element);

    auto duplicate =
        validate_mass(*frame_ab(), std::vector<MassEntry>{{0b01, 0.5}, {0b01, 0.5}});
    CHECK(duplicate.code == Errc::duplicate_focal_set);
}

TEST_CASE("mass construction enforces the invariants") {
    CHECK_THROWS_AS(MassFunction(frame_ab(), {{0b01, 0.6}, {0b11, 0.5}}), Error);
    const MassFunction m(frame_ab(), {{0b11, 0.4}, {0b01, 0.6}});
    // canonical order: singleton before the pair
    CHECK(m.entries()[0].first == 0b01);
    CHECK(m.entries()[1].first == 0b11);
}

TEST_CASE("canonical subset order is cardinality then member sequence") {
    CHECK(canonical_subset_less(0b001, 0b011));   // {a} < {a,b}
    CHECK(canonical_subset_less(0b011, 0b101));   // {a,b} < {a,c}
    CHECK(canonical_subset_less(0b1001, 0b0110)); // {a,d} < {b,c}
    CHECK_FALSE(canonical_subset_less(0b0110, 0b1001));
    CHECK_FALSE(canonical_subset_less(0b011, 0b011));
}

TEST_CASE("mean_mass identity and symmetry") {
    const FramePtr f = frame_ab();
    const MassFunction certain(f, {{0b01, 1.0}});
    const std::vector<MassFunction> same{certain, certain};
    CHECK(mean_mass(same).mass(0b01) == doctest::Approx(1.0));

    const std::vector<MassFunction> split{MassFunction(f, {{0b01, 1.0}}),
                                          MassFunction(f, {{0b10, 1.0}})};
    const MassFunction mean = mean_mass(split);
    CHECK(mean.mass(0b01) == doctest::Approx(0.5));
    CHECK(mean.mass(0b10) == doctest::Approx(0.5));
}

TEST_CASE("mean_mass rejects empty input and mixed frames") {
    CHECK_THROWS_AS(mean_mass({}), Error);
    const std::vector<MassFunction> mixed{MassFunction(frame_ab(), {{0b01, 1.0}}),
                                          MassFunction(make_frame("other", {"a", "b"}),
                                                       {{0b01, 1.0}})};
    CHECK_THROWS_AS(mean_mass(mixed), Error);
}

TEST_CASE("jaccard similarity basics") {
    const FramePtr f = frame_ab();
    CHECK(jaccard_similarity(FocalSet(f, 0b01), FocalSet(f, 0b01)) == doctest::Approx(1.0));
    CHECK(jaccard_similarity(FocalSet(f, 0b01), FocalSet(f, 0b10)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(
        jaccard_similarity(FocalSet(f, 0b01), FocalSet(make_frame("r", {"a", "b"}), 0b01)),
        Error);
}

TEST_CASE("jousselme distance of a mass to itself is zero") {
    const MassFunction m(frame_abcd(), {{0b0011, 0.6}, {0b1111, 0.4}});
    CHECK(jousselme_distance(m, m) == doctest::Approx(0.0));
}

TEST_CASE("specificity endpoints") {
    CHECK(specificity(MassFunction(frame_abcd(), {{0b1111, 1.0}})) == doctest::Approx(0.0));
    CHECK(specificity(MassFunction(frame_abcd(), {{0b0001, 1.0}})) == doctest::Approx(1.0));
    CHECK(specificity(MassFunction(frame_abcd(), {{0b0011, 1.0}})) == doctest::Approx(0.5));
}

TEST_CASE("pignistic endpoints") {
    const ProbabilityDistribution point = pignistic(MassFunction(frame_abcd(), {{0b0001, 1.0}}));
    CHECK(point.prob(0) == doctest::Approx(1.0));
    CHECK(point.prob(3) == doctest::Approx(0.0));

    const ProbabilityDistribution uniform =
        pignistic(MassFunction(frame_abcd(), {{0b1111, 1.0}}));
    for (std::size_t e = 0; e < 4; ++e) CHECK(uniform.prob(e) == doctest::Approx(0.25));
}

TEST_CASE("euclidean probability distance endpoints") {
    const FramePtr f = frame_ab();
    const ProbabilityDistribution p(f, {0.3, 0.7});
    CHECK(euclidean_probability_distance(p, p) == doctest::Approx(0.0));
    CHECK_THROWS_AS(euclidean_probability_distance(
                        p, ProbabilityDistribution(make_frame("r", {"a", "b"}), {0.3, 0.7})),
                    Error);
}

TEST_CASE("derived examples match their oracles") {
    for (const examples::Check& check : examples::run_all()) {
        INFO(check.name, ": actual ", check.actual, " expected ", check.expected);
        CHECK(check.passed());
    }
}

TEST_CASE("jousselme matches the dense power-set oracle on random masses") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 3;  // up to 4 elements
        const FramePtr f = make_frame("q", [&] {
            std::vector<std::string> labels;
            for (std::size_t i = 0; i < n; ++i) labels.emplace_back(1, char('a' + i));
            return labels;
        }());
        const oracle::SubsetMass a = oracle::random_mass(rng, n);
        const oracle::SubsetMass b = oracle::random_mass(rng, n);
        const double fast = jousselme_distance(examples::from_subset_mass(f, a),
                                               examples::from_subset_mass(f, b));
        const double brute = oracle::brute_jousselme(n, a, b);
        REQUIRE(std::abs(fast - brute) <= 1e-9);
    }
}

TEST_CASE("jousselme is a metric on random masses") {
    std::mt19937_64 rng(11);
    const FramePtr f = make_frame("q", {"a", "b", "c", "d", "e"});
    for (int trial = 0; trial < 1000; ++trial) {
        const MassFunction m1 = examples::from_subset_mass(f, oracle::random_mass(rng, 5));
        const MassFunction m2 = examples::from_subset_mass(f, oracle::random_mass(rng, 5));
        const MassFunction m3 = examples::from_subset_mass(f, oracle::random_mass(rng, 5));
        const double d12 = jousselme_distance(m1, m2);
        const double d21 = jousselme_distance(m2, m1);
        const double d13 = jousselme_distance(m1, m3);
        const double d23 = jousselme_distance(m2, m3);
        REQUIRE(d12 >= 0.0);
        REQUIRE(d12 <= 1.0);
        REQUIRE(d12 == doctest::Approx(d21).epsilon(1e-12));
        REQUIRE(jousselme_distance(m1, m1) == doctest::Approx(0.0));
        REQUIRE(d13 <= d12 + d23 + 1e-9);
    }
}

TEST_CASE("specificity and pignistic stay valid on random masses") {
    std::mt19937_64 rng(13);
    const FramePtr f = frame_abcd();
    for (int trial = 0; trial < 500; ++trial) {
        const MassFunction m = examples::from_subset_mass(f, oracle::random_mass(rng, 4));
        const double s = specificity(m);
        REQUIRE(s >= 0.0);
        REQUIRE(s <= 1.0);

        bool all_singletons = true;
        for (const auto& [bits, mass] : m.entries())
            all_singletons = all_singletons && FocalSet(f, bits).cardinality() == 1;
        // specificity is 1 exactly for all-singleton masses, 0 exactly for
        // the vacuous mass, and strictly inside (0, 1) otherwise
        if (all_singletons)
            REQUIRE(s == doctest::Approx(1.0));
        else
            REQUIRE(s < 1.0 - 1e-9);
        if (m.focal_count() == 1 && m.entries()[0].first == f->full_mask())
            REQUIRE(s == doctest::Approx(0.0));
        else if (m.mass(f->full_mask()) < 1.0 - 1e-9)
            REQUIRE(s > 1e-9);

        const ProbabilityDistribution p = pignistic(m);  // construction validates
        double total = 0.0;
        for (double v : p.probs()) total += v;
        REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("mean_mass stays valid and is permutation invariant") {
    std::mt19937_64 rng(17);
    const FramePtr f = frame_abcd();
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<MassFunction> masses;
        const std::size_t count = 2 + rng() % 5;
        for (std::size_t i = 0; i < count; ++i)
            masses.push_back(examples::from_subset_mass(f, oracle::random_mass(rng, 4)));

        const MassFunction mean = mean_mass(masses);
        REQUIRE(mean.validate().ok);

        std::vector<MassFunction> shuffled = masses;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const MassFunction mean2 = mean_mass(shuffled);
        REQUIRE(mean.focal_count() == mean2.focal_count());
        for (const auto& [bits, mass] : mean.entries())
            REQUIRE(mean2.mass(bits) == doctest::Approx(mass).epsilon(1e-12));
    }
}

TEST_CASE("jaccard similarity matrix is positive semi-definite up to n = 4") {
    for (std::size_t n = 2; n <= 4; ++n) {
        const std::uint64_t full = (std::uint64_t{1} << n) - 1;
        std::vector<std::vector<double>> matrix(full, std::vector<double>(full));
        for (std::uint64_t a = 1; a <= full; ++a)
            for (std::uint64_t b = 1; b <= full; ++b)
                matrix[a - 1][b - 1] = oracle::jaccard_by_enumeration(a, b, n);
        CHECK(oracle::min_eigenvalue(matrix) >= -1e-9);
    }
}
