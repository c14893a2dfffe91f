#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crowdbelief/error.hpp"

namespace crowdbelief {

// The set of admissible answers for one question. Immutable after construction.
class Frame {
public:
    // Labels must be unique, at least 2 and at most 64 of them (focal sets are
    // stored as 64-bit element masks).
    Frame(std::string question_id, std::vector<std::string> elements);

    const std::string& question_id() const noexcept { return question_id_; }
    const std::vector<std::string>& elements() const noexcept { return elements_; }
    std::size_t size() const noexcept { return elements_.size(); }
    const std::string& label(std::size_t index) const { return elements_.at(index); }
    std::optional<std::size_t> index_of(std::string_view label) const noexcept;

    // Mask covering every element of the frame.
    std::uint64_t full_mask() const noexcept;

private:
    std::string question_id_;
    std::vector<std::string> elements_;
};

using FramePtr = std::shared_ptr<const Frame>;

FramePtr make_frame(std::string question_id, std::vector<std::string> elements);

// Frames compare by content; distinct objects loaded from the same declaration
// are interchangeable.
bool same_frame(const Frame& a, const Frame& b) noexcept;

// Non-empty subset of a frame's elements, kept as a bitmask over element indices.
class FocalSet {
public:
    FocalSet(FramePtr frame, std::uint64_t bits);
    FocalSet(FramePtr frame, std::span<const std::size_t> member_indices);

    const FramePtr& frame() const noexcept { return frame_; }
    std::uint64_t bits() const noexcept { return bits_; }
    int cardinality() const noexcept;
    bool contains(std::size_t element_index) const noexcept;
    std::vector<std::size_t> members() const;        // ascending element indices
    std::vector<std::string> member_labels() const;  // same order

private:
    FramePtr frame_;
    std::uint64_t bits_;
};

// Canonical ordering of subsets: by cardinality, then lexicographically on the
// ascending member-index sequence. Fixes iteration and serialization order.
bool canonical_subset_less(std::uint64_t a, std::uint64_t b) noexcept;

// One focal element and its mass, keyed by the subset bitmask.
using MassEntry = std::pair<std::uint64_t, double>;

struct ValidationResult {
    bool ok = true;
    Errc code = Errc::validation_error;
    std::string message;
};

// Checks the mass-function invariants over raw entries: no empty focal set, no
// element outside the frame, strictly positive masses, pairwise-distinct focal
// sets, and a total of 1 within 1e-9. Reports the first violation found.
ValidationResult validate_mass(const Frame& frame, std::span<const MassEntry> entries);

// A worker's (possibly partial) answer: unit belief spread over focal subsets
// of one frame. Valid by construction; immutable afterwards.
class MassFunction {
public:
    static constexpr double kSumTolerance = 1e-9;

    // Throws the first violated invariant reported by validate_mass.
    MassFunction(FramePtr frame, std::vector<MassEntry> entries);

    const FramePtr& frame() const noexcept { return frame_; }
    // Entries in canonical subset order.
    std::span<const MassEntry> entries() const noexcept { return entries_; }
    std::size_t focal_count() const noexcept { return entries_.size(); }
    // Mass of an arbitrary subset (0 for non-focal sets).
    double mass(std::uint64_t subset_bits) const noexcept;

    ValidationResult validate() const { return validate_mass(*frame_, entries_); }

private:
    FramePtr frame_;
    std::vector<MassEntry> entries_;
};

// Convenience constructor from labelled focal sets, e.g.
// {{{"a"}, 0.8}, {{"a","b","c"}, 0.2}}. Label lookup failures report
// foreign_element.
MassFunction mass_from_labels(
    FramePtr frame,
    const std::vector<std::pair<std::vector<std::string>, double>>& focal_sets);

// One probability per frame element.
class ProbabilityDistribution {
public:
    static constexpr double kSumTolerance = 1e-9;

    ProbabilityDistribution(FramePtr frame, std::vector<double> probs);

    const FramePtr& frame() const noexcept { return frame_; }
    std::span<const double> probs() const noexcept { return probs_; }
    double prob(std::size_t element_index) const { return probs_.at(element_index); }

private:
    FramePtr frame_;
    std::vector<double> probs_;
};

// Pointwise average of mass functions over one shared frame. Focal sets whose
// averaged mass falls below 1e-12 are pruned.
MassFunction mean_mass(std::span<const MassFunction> masses);

// |A ∩ B| / |A ∪ B| for non-empty subsets of one frame.
double jaccard_similarity(const FocalSet& a, const FocalSet& b);

// sqrt(0.5 * (m1-m2)^T D (m1-m2)) with D the Jaccard similarity matrix over
// the union of the two focal sets. A metric with range [0, 1].
double jousselme_distance(const MassFunction& m1, const MassFunction& m2);

// 1 - sum_X m(X) * log2|X| / log2|frame|. 1 when all focal sets are
// singletons, 0 when all mass sits on the whole frame.
double specificity(const MassFunction& m);

// Splits each focal set's mass equally among its elements. The empty-set
// normalizer is kept in the formula even though stored masses never assign to
// the empty set, so it always equals 1 here.
ProbabilityDistribution pignistic(const MassFunction& m);

// ||p1 - p2||_2 / sqrt(2), so the maximum over a probability simplex is 1.
double euclidean_probability_distance(const ProbabilityDistribution& p1,
                                      const ProbabilityDistribution& p2);

} // namespace crowdbelief
