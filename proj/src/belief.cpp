#include "crowdbelief/belief.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <unordered_set>

namespace crowdbelief {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::non_normalized: return "NonNormalized";
        case Errc::empty_focal_set: return "EmptyFocalSet";
        case Errc::non_positive_mass: return "NonPositiveMass";
        case Errc::foreign_element: return "ForeignElement";
        case Errc::duplicate_focal_set: return "DuplicateFocalSet";
        case Errc::mixed_frames: return "MixedFrames";
        case Errc::empty_input: return "EmptyInput";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::no_peer_responses: return "NoPeerResponses";
        case Errc::empty_worker_row: return "EmptyWorkerRow";
        case Errc::too_few_values: return "TooFewValues";
        case Errc::stalled_convergence: return "StalledConvergence";
        case Errc::frame_too_small: return "FrameTooSmall";
        case Errc::too_few_iterations: return "TooFewIterations";
        case Errc::unknown_question: return "UnknownQuestion";
        case Errc::unknown_answer_label: return "UnknownAnswerLabel";
        case Errc::duplicate_response: return "DuplicateResponse";
        case Errc::non_normalized_record: return "NonNormalizedRecord";
        case Errc::parse_error: return "ParseError";
        case Errc::validation_error: return "ValidationError";
        case Errc::io_error: return "IoError";
    }
    return "UnknownError";
}

Frame::Frame(std::string question_id, std::vector<std::string> elements)
    : question_id_(std::move(question_id)), elements_(std::move(elements)) {
    if (elements_.size() < 2)
        fail(Errc::validation_error,
             "frame '" + question_id_ + "' needs at least 2 answer labels");
    if (elements_.size() > 64)
        fail(Errc::validation_error,
             "frame '" + question_id_ + "' exceeds the 64-element limit");
    std::unordered_set<std::string_view> seen;
    for (const auto& label : elements_)
        if (!seen.insert(label).second)
            fail(Errc::validation_error,
                 "frame '" + question_id_ + "' repeats label '" + label + "'");
}

std::optional<std::size_t> Frame::index_of(std::string_view label) const noexcept {
    for (std::size_t i = 0; i < elements_.size(); ++i)
        if (elements_[i] == label) return i;
    return std::nullopt;
}

std::uint64_t Frame::full_mask() const noexcept {
    return elements_.size() == 64 ? ~std::uint64_t{0}
                                  : (std::uint64_t{1} << elements_.size()) - 1;
}

FramePtr make_frame(std::string question_id, std::vector<std::string> elements) {
    return std::make_shared<const Frame>(std::move(question_id), std::move(elements));
}

bool same_frame(const Frame& a, const Frame& b) noexcept {
    if (&a == &b) return true;
    return a.question_id() == b.question_id() && a.elements() == b.elements();
}

FocalSet::FocalSet(FramePtr frame, std::uint64_t bits)
    : frame_(std::move(frame)), bits_(bits) {
    if (bits_ == 0) fail(Errc::empty_focal_set, "focal set must be non-empty");
    if ((bits_ & ~frame_->full_mask()) != 0)
        fail(Errc::foreign_element, "focal set references elements outside frame '" +
                                        frame_->question_id() + "'");
}

FocalSet::FocalSet(FramePtr frame, std::span<const std::size_t> member_indices)
    : FocalSet(std::move(frame), [&] {
          std::uint64_t bits = 0;
          for (std::size_t i : member_indices) {
              if (i >= 64) fail(Errc::foreign_element, "element index out of range");
              bits |= std::uint64_t{1} << i;
          }
          return bits;
      }()) {}

int FocalSet::cardinality() const noexcept { return std::popcount(bits_); }

bool FocalSet::contains(std::size_t element_index) const noexcept {
    return element_index < 64 && (bits_ >> element_index) & 1;
}

std::vector<std::size_t> FocalSet::members() const {
    std::vector<std::size_t> out;
    for (std::uint64_t rest = bits_; rest != 0; rest &= rest - 1)
        out.push_back(static_cast<std::size_t>(std::countr_zero(rest)));
    return out;
}

std::vector<std::string> FocalSet::member_labels() const {
    std::vector<std::string> out;
    for (std::size_t i : members()) out.push_back(frame_->label(i));
    return out;
}

bool canonical_subset_less(std::uint64_t a, std::uint64_t b) noexcept {
    const int ca = std::popcount(a);
    const int cb = std::popcount(b);
    if (ca != cb) return ca < cb;
    // Same cardinality: compare ascending member-index sequences.
    std::uint64_t ra = a;
    std::uint64_t rb = b;
    while (ra != 0 && rb != 0) {
        const int ia = std::countr_zero(ra);
        const int ib = std::countr_zero(rb);
        if (ia != ib) return ia < ib;
        ra &= ra - 1;
        rb &= rb - 1;
    }
    return false;
}

ValidationResult validate_mass(const Frame& frame, std::span<const MassEntry> entries) {
    if (entries.empty())
        return {false, Errc::empty_input, "mass function has no focal sets"};
    const std::uint64_t full = frame.full_mask();
    double sum = 0.0;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& [bits, mass] : entries) {
        if (bits == 0)
            return {false, Errc::empty_focal_set,
                    "the empty set cannot carry mass"};
        if ((bits & ~full) != 0)
            return {false, Errc::foreign_element,
                    "focal set references elements outside frame '" +
                        frame.question_id() + "'"};
        if (!(mass > 0.0))
            return {false, Errc::non_positive_mass,
                    "every focal mass must be strictly positive"};
        if (!seen.insert(bits).second)
            return {false, Errc::duplicate_focal_set,
                    "focal sets must be pairwise distinct"};
        sum += mass;
    }
    if (std::abs(sum - 1.0) > MassFunction::kSumTolerance)
        return {false, Errc::non_normalized,
                "masses sum to " + std::to_string(sum) + ", expected 1"};
    return {};
}

MassFunction::MassFunction(FramePtr frame, std::vector<MassEntry> entries)
    : frame_(std::move(frame)), entries_(std::move(entries)) {
    if (!frame_) fail(Errc::validation_error, "mass function requires a frame");
    const ValidationResult check = validate_mass(*frame_, entries_);
    if (!check.ok) fail(check.code, check.message);
    std::sort(entries_.begin(), entries_.end(),
              [](const MassEntry& a, const MassEntry& b) {
                  return canonical_subset_less(a.first, b.first);
              });
}

double MassFunction::mass(std::uint64_t subset_bits) const noexcept {
    for (const auto& [bits, m] : entries_)
        if (bits == subset_bits) return m;
    return 0.0;
}

MassFunction mass_from_labels(
    FramePtr frame,
    const std::vector<std::pair<std::vector<std::string>, double>>& focal_sets) {
    std::vector<MassEntry> entries;
    entries.reserve(focal_sets.size());
    for (const auto& [labels, mass] : focal_sets) {
        std::uint64_t bits = 0;
        for (const auto& label : labels) {
            const auto idx = frame->index_of(label);
            if (!idx)
                fail(Errc::foreign_element, "label '" + label + "' not in frame '" +
                                                frame->question_id() + "'");
            bits |= std::uint64_t{1} << *idx;
        }
        entries.emplace_back(bits, mass);
    }
    return MassFunction(std::move(frame), std::move(entries));
}

ProbabilityDistribution::ProbabilityDistribution(FramePtr frame, std::vector<double> probs)
    : frame_(std::move(frame)), probs_(std::move(probs)) {
    if (!frame_) fail(Errc::validation_error, "distribution requires a frame");
    if (probs_.size() != frame_->size())
        fail(Errc::length_mismatch, "expected one probability per frame element");
    double sum = 0.0;
    for (double p : probs_) {
        if (p < 0.0) fail(Errc::validation_error, "probabilities must be >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        fail(Errc::non_normalized,
             "probabilities sum to " + std::to_string(sum) + ", expected 1");
}

namespace {

constexpr double kPruneThreshold = 1e-12;

void require_same_frame(const Frame& a, const Frame& b) {
    if (!same_frame(a, b))
        fail(Errc::mixed_frames, "operands belong to frames '" + a.question_id() +
                                     "' and '" + b.question_id() + "'");
}

double jaccard_bits(std::uint64_t a, std::uint64_t b) noexcept {
    return static_cast<double>(std::popcount(a & b)) /
           static_cast<double>(std::popcount(a | b));
}

} // namespace

MassFunction mean_mass(std::span<const MassFunction> masses) {
    if (masses.empty()) fail(Errc::empty_input, "cannot average zero mass functions");
    const FramePtr& frame = masses.front().frame();
    std::map<std::uint64_t, double> acc;
    for (const MassFunction& m : masses) {
        require_same_frame(*frame, *m.frame());
        for (const auto& [bits, mass] : m.entries()) acc[bits] += mass;
    }
    const double inv = 1.0 / static_cast<double>(masses.size());
    std::vector<MassEntry> entries;
    entries.reserve(acc.size());
    for (const auto& [bits, total] : acc) {
        const double avg = total * inv;
        if (avg >= kPruneThreshold) entries.emplace_back(bits, avg);
    }
    return MassFunction(frame, std::move(entries));
}

double jaccard_similarity(const FocalSet& a, const FocalSet& b) {
    require_same_frame(*a.frame(), *b.frame());
    return jaccard_bits(a.bits(), b.bits());
}

double jousselme_distance(const MassFunction& m1, const MassFunction& m2) {
    require_same_frame(*m1.frame(), *m2.frame());

    // Difference vector over the union of both focal sets.
    std::vector<std::uint64_t> basis;
    std::vector<double> diff;
    basis.reserve(m1.focal_count() + m2.focal_count());
    for (const auto& [bits, mass] : m1.entries()) {
        basis.push_back(bits);
        diff.push_back(mass);
    }
    for (const auto& [bits, mass] : m2.entries()) {
        const auto it = std::find(basis.begin(), basis.end(), bits);
        if (it == basis.end()) {
            basis.push_back(bits);
            diff.push_back(-mass);
        } else {
            diff[static_cast<std::size_t>(it - basis.begin())] -= mass;
        }
    }

    double quad = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        quad += diff[i] * diff[i];  // D(X, X) = 1
        for (std::size_t j = i + 1; j < basis.size(); ++j)
            quad += 2.0 * diff[i] * diff[j] * jaccard_bits(basis[i], basis[j]);
    }
    const double d = std::sqrt(0.5 * std::max(quad, 0.0));
    return std::min(d, 1.0);
}

double specificity(const MassFunction& m) {
    const double log_frame = std::log2(static_cast<double>(m.frame()->size()));
    double imprecision = 0.0;
    for (const auto& [bits, mass] : m.entries())
        imprecision += mass * std::log2(static_cast<double>(std::popcount(bits))) / log_frame;
    return std::clamp(1.0 - imprecision, 0.0, 1.0);
}

ProbabilityDistribution pignistic(const MassFunction& m) {
    const std::size_t n = m.frame()->size();
    // Stored masses never assign to the empty set, so this normalizer is 1;
    // kept so the computation mirrors the transform's full definition.
    const double empty_mass = 0.0;
    std::vector<double> probs(n, 0.0);
    for (const auto& [bits, mass] : m.entries()) {
        const double share = mass / ((1.0 - empty_mass) * std::popcount(bits));
        for (std::uint64_t rest = bits; rest != 0; rest &= rest - 1)
            probs[static_cast<std::size_t>(std::countr_zero(rest))] += share;
    }
    return ProbabilityDistribution(m.frame(), std::move(probs));
}

double euclidean_probability_distance(const ProbabilityDistribution& p1,
                                      const ProbabilityDistribution& p2) {
    require_same_frame(*p1.frame(), *p2.frame());
    double sq = 0.0;
    for (std::size_t i = 0; i < p1.probs().size(); ++i) {
        const double d = p1.probs()[i] - p2.probs()[i];
        sq += d * d;
    }
    return std::min(std::sqrt(sq / 2.0), 1.0);
}

} // namespace crowdbelief
