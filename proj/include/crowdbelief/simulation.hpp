#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "crowdbelief/expertise.hpp"

namespace crowdbelief {

enum class WorkerProfile { expert, imprecise_expert, ignorant };

std::string_view profile_name(WorkerProfile profile) noexcept;

// Which degree a classification rate is judging. Ground-truth positives are
// the precise experts, except for exactitude where imprecise experts also
// count: their answers contain the correct element, so exactitude alone
// neither can nor should separate them.
enum class DegreeKind { exactitude, precision, global_degree, pignistic_exactitude };

std::string_view degree_kind_label(DegreeKind kind) noexcept;  // IE / IP / GD / EP

struct GroundTruth {
    std::vector<std::size_t> correct_answers;  // per question: element index
    std::vector<WorkerProfile> profiles;       // per worker
};

struct CrowdFractions {
    double expert = 0.35;
    double imprecise = 0.35;
    double ignorant = 0.30;
};

struct GeneratorParams {
    double a_min = 0.5;           // lower bound of the certainty draw
    int max_ignorant_focals = 3;  // focal-set count cap for random answers
};

struct ScenarioConfig {
    std::size_t workers = 100;
    std::size_t questions = 100;
    std::size_t frame_size = 4;
    CrowdFractions fractions;
    double beta = 0.5;
    std::size_t iterations = 10;
    std::uint64_t seed = 1;
    double skip_probability = 0.0;
    GeneratorParams generator;

    // Throws validation_error naming the violated invariant.
    void validate() const;
};

using Rng = std::mt19937_64;

// Bit-stable uniform draws, independent of the standard library's
// distribution implementations.
double uniform_unit(Rng& rng);                               // [0, 1)
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);  // {0, ..., bound-1}

// Child seed for one (stream, substream) of an experiment, e.g. one sweep
// cell and iteration. Independent of execution order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t substream);

// Deterministic construction of the answer mass given a drawn certainty a:
// m({truth}) = a with the remainder on the whole frame (dropped when a = 1).
MassFunction expert_mass_from_draw(std::size_t truth_index, const FramePtr& frame,
                                   double certainty);
// Same with a drawn disjunction containing the truth instead of the singleton.
MassFunction imprecise_mass_from_draw(std::uint64_t disjunction_bits,
                                      const FramePtr& frame, double certainty);

// One answer per archetype. The expert commits to the correct singleton, the
// imprecise expert to a strict disjunction containing it (frame size >= 3
// required), the ignorant to 1..max_ignorant_focals random subsets with
// normalized random masses, uncorrelated with the truth.
MassFunction gen_expert_response(std::size_t truth_index, const FramePtr& frame,
                                 const GeneratorParams& params, Rng& rng);
MassFunction gen_imprecise_response(std::size_t truth_index, const FramePtr& frame,
                                    const GeneratorParams& params, Rng& rng);
MassFunction gen_ignorant_response(const FramePtr& frame, const GeneratorParams& params,
                                   Rng& rng);

struct CrowdSample {
    ResponseMatrix matrix;
    GroundTruth truth;
};

// Frame used for every simulated question: labels A, B, C, ... for sizes
// up to 26, zero-padded a01, a02, ... beyond.
FramePtr make_simulated_frame(const std::string& question_id, std::size_t size);

// Archetype counts are round(fraction * s) with the remainder assigned to the
// ignorants. Cells are drawn worker-major, then each row is independently
// blanked with skip_probability; a fully-blanked row has its blanking
// redrawn so every worker keeps at least one answer.
CrowdSample generate_crowd(const ScenarioConfig& config, Rng& rng);

std::vector<bool> ground_truth_flags(const GroundTruth& truth, DegreeKind kind);

// Fraction of workers whose expert flag matches the ground-truth label for
// the given degree kind.
double good_classification_rate(const std::vector<bool>& flags, const GroundTruth& truth,
                                DegreeKind kind);

// Population standard deviation of per-iteration rates; needs >= 2 of them.
double perturbation_rate(std::span<const double> rates);

struct SweepCell {
    double sweep_param = 0.0;  // expert fraction, question count, or joint share
    double beta = 0.5;
    DegreeKind degree = DegreeKind::global_degree;
    std::vector<double> iteration_rates;
    double mean_rate = 0.0;
    double perturbation = 0.0;
};

struct ExperimentResult {
    std::string experiment;
    std::vector<SweepCell> cells;
};

// Experts versus ignorants only: expert fraction and beta each sweep 0.1 to
// 0.9, and every cell reports the global-degree classification rate over
// config.iterations freshly generated crowds.
ExperimentResult experiment_beta_sweep(const ScenarioConfig& config);

// Fixed 35/35/30 crowd; sweeps the question count and reports rate stability
// (perturbation) for the exactitude, precision and global degrees.
ExperimentResult experiment_question_sweep(const ScenarioConfig& config,
                                           std::span<const std::size_t> question_counts = {});

// Expert and imprecise-expert shares grow together (equal shares, remainder
// ignorant); reports the belief-side rates (IE, GD) against the pignistic
// baseline (EP) at every sweep point.
ExperimentResult experiment_probability_comparison(const ScenarioConfig& config,
                                                   std::span<const double> joint_shares = {});

} // namespace crowdbelief
