#include "crowdbelief/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crowdbelief/clustering.hpp"

namespace crowdbelief {

std::string_view profile_name(WorkerProfile profile) noexcept {
    switch (profile) {
        case WorkerProfile::expert: return "expert";
        case WorkerProfile::imprecise_expert: return "imprecise_expert";
        case WorkerProfile::ignorant: return "ignorant";
    }
    return "unknown";
}

std::string_view degree_kind_label(DegreeKind kind) noexcept {
    switch (kind) {
        case DegreeKind::exactitude: return "IE";
        case DegreeKind::precision: return "IP";
        case DegreeKind::global_degree: return "GD";
        case DegreeKind::pignistic_exactitude: return "EP";
    }
    return "??";
}

void ScenarioConfig::validate() const {
    if (workers < 2) fail(Errc::validation_error, "scenario.s must be at least 2");
    if (questions < 1) fail(Errc::validation_error, "scenario.k must be at least 1");
    if (frame_size < 2 || frame_size > 64)
        fail(Errc::validation_error, "scenario.frame_size must lie in [2, 64]");
    if (fractions.expert < 0 || fractions.imprecise < 0 || fractions.ignorant < 0)
        fail(Errc::validation_error, "scenario.fractions must be non-negative");
    const double total = fractions.expert + fractions.imprecise + fractions.ignorant;
    if (std::abs(total - 1.0) > 1e-9)
        fail(Errc::validation_error, "scenario.fractions must sum to 1");
    if (!(beta >= 0.0 && beta <= 1.0))
        fail(Errc::validation_error, "scenario.beta must lie in [0, 1]");
    if (iterations < 1) fail(Errc::validation_error, "scenario.iterations must be at least 1");
    if (!(skip_probability >= 0.0 && skip_probability < 1.0))
        fail(Errc::validation_error, "scenario.skip_probability must lie in [0, 1)");
    if (!(generator.a_min >= 0.0 && generator.a_min <= 1.0))
        fail(Errc::validation_error, "generator.a_min must lie in [0, 1]");
    if (generator.max_ignorant_focals < 1)
        fail(Errc::validation_error, "generator.max_ignorant_focals must be at least 1");
    if (frame_size < 31 &&
        static_cast<std::uint64_t>(generator.max_ignorant_focals) >
            (std::uint64_t{1} << frame_size) - 1)
        fail(Errc::validation_error,
             "generator.max_ignorant_focals exceeds the number of non-empty subsets");
}

double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound <= 1) return 0;
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % bound;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t substream) {
    return splitmix64(splitmix64(master ^ splitmix64(stream + 1)) + substream);
}

MassFunction expert_mass_from_draw(std::size_t truth_index, const FramePtr& frame,
                                   double certainty) {
    const std::uint64_t singleton = std::uint64_t{1} << truth_index;
    std::vector<MassEntry> entries{{singleton, certainty}};
    if (certainty < 1.0) entries.emplace_back(frame->full_mask(), 1.0 - certainty);
    return MassFunction(frame, std::move(entries));
}

MassFunction imprecise_mass_from_draw(std::uint64_t disjunction_bits,
                                      const FramePtr& frame, double certainty) {
    std::vector<MassEntry> entries{{disjunction_bits, certainty}};
    if (certainty < 1.0) entries.emplace_back(frame->full_mask(), 1.0 - certainty);
    return MassFunction(frame, std::move(entries));
}

MassFunction gen_expert_response(std::size_t truth_index, const FramePtr& frame,
                                 const GeneratorParams& params, Rng& rng) {
    const double a = params.a_min + (1.0 - params.a_min) * uniform_unit(rng);
    return expert_mass_from_draw(truth_index, frame, a);
}

MassFunction gen_imprecise_response(std::size_t truth_index, const FramePtr& frame,
                                    const GeneratorParams& params, Rng& rng) {
    const std::size_t n = frame->size();
    if (n < 3)
        fail(Errc::frame_too_small,
             "imprecise answers need a strict disjunction, so frame size >= 3");

    // |A| uniform in {2, ..., n-1}, then the members besides the truth drawn
    // uniformly without replacement.
    const std::size_t size =
        2 + static_cast<std::size_t>(uniform_below(rng, static_cast<std::uint64_t>(n - 2)));
    std::vector<std::size_t> others;
    others.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        if (i != truth_index) others.push_back(i);
    std::uint64_t bits = std::uint64_t{1} << truth_index;
    for (std::size_t picked = 0; picked + 1 < size; ++picked) {
        const std::size_t remaining = others.size() - picked;
        const std::size_t at =
            picked + static_cast<std::size_t>(uniform_below(rng, remaining));
        std::swap(others[picked], others[at]);
        bits |= std::uint64_t{1} << others[picked];
    }

    const double a = params.a_min + (1.0 - params.a_min) * uniform_unit(rng);
    return imprecise_mass_from_draw(bits, frame, a);
}

MassFunction gen_ignorant_response(const FramePtr& frame, const GeneratorParams& params,
                                   Rng& rng) {
    const std::uint64_t subset_count = frame->full_mask();  // 2^n - 1 non-empty subsets
    std::uint64_t focal_count =
        1 + uniform_below(rng, static_cast<std::uint64_t>(params.max_ignorant_focals));
    focal_count = std::min(focal_count, subset_count);

    std::vector<std::uint64_t> subsets;
    subsets.reserve(focal_count);
    while (subsets.size() < focal_count) {
        const std::uint64_t bits = 1 + uniform_below(rng, subset_count);
        if (std::find(subsets.begin(), subsets.end(), bits) == subsets.end())
            subsets.push_back(bits);
    }

    std::vector<double> weights(subsets.size());
    double total = 0.0;
    for (double& w : weights) {
        w = 1.0 - uniform_unit(rng);  // (0, 1]
        total += w;
    }
    std::vector<MassEntry> entries;
    entries.reserve(subsets.size());
    for (std::size_t i = 0; i < subsets.size(); ++i)
        entries.emplace_back(subsets[i], weights[i] / total);
    return MassFunction(frame, std::move(entries));
}

FramePtr make_simulated_frame(const std::string& question_id, std::size_t size) {
    std::vector<std::string> labels;
    labels.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        if (size <= 26) {
            labels.emplace_back(1, static_cast<char>('A' + i));
        } else {
            std::string label = "a" + std::to_string(i + 1);
            if (i + 1 < 10) label.insert(1, "0");
            labels.push_back(std::move(label));
        }
    }
    return make_frame(question_id, std::move(labels));
}

namespace {

std::string padded_id(char prefix, std::size_t index, std::size_t total) {
    std::string digits = std::to_string(index + 1);
    std::size_t width = std::to_string(total).size();
    std::string out(1, prefix);
    out.append(width > digits.size() ? width - digits.size() : 0, '0');
    out += digits;
    return out;
}

std::vector<WorkerProfile> profile_assignment(const ScenarioConfig& config) {
    const auto s = static_cast<long>(config.workers);
    long experts = std::lround(config.fractions.expert * static_cast<double>(s));
    long imprecise = std::lround(config.fractions.imprecise * static_cast<double>(s));
    experts = std::clamp(experts, 0L, s);
    imprecise = std::clamp(imprecise, 0L, s - experts);
    const long ignorants = s - experts - imprecise;

    std::vector<WorkerProfile> profiles;
    profiles.reserve(config.workers);
    profiles.insert(profiles.end(), experts, WorkerProfile::expert);
    profiles.insert(profiles.end(), imprecise, WorkerProfile::imprecise_expert);
    profiles.insert(profiles.end(), ignorants, WorkerProfile::ignorant);
    return profiles;
}

} // namespace

CrowdSample generate_crowd(const ScenarioConfig& config, Rng& rng) {
    config.validate();
    const std::size_t s = config.workers;
    const std::size_t K = config.questions;

    GroundTruth truth;
    truth.profiles = profile_assignment(config);

    std::vector<FramePtr> frames;
    frames.reserve(K);
    for (std::size_t k = 0; k < K; ++k)
        frames.push_back(make_simulated_frame(padded_id('q', k, K), config.frame_size));

    truth.correct_answers.reserve(K);
    for (std::size_t k = 0; k < K; ++k)
        truth.correct_answers.push_back(
            static_cast<std::size_t>(uniform_below(rng, config.frame_size)));

    std::vector<std::string> workers;
    workers.reserve(s);
    for (std::size_t j = 0; j < s; ++j) workers.push_back(padded_id('w', j, s));

    std::vector<ResponseMatrix::Cell> cells;
    cells.reserve(s * K);
    for (std::size_t j = 0; j < s; ++j) {
        const std::size_t row_begin = cells.size();
        for (std::size_t k = 0; k < K; ++k) {
            switch (truth.profiles[j]) {
                case WorkerProfile::expert:
                    cells.emplace_back(gen_expert_response(truth.correct_answers[k],
                                                           frames[k], config.generator, rng));
                    break;
                case WorkerProfile::imprecise_expert:
                    cells.emplace_back(gen_imprecise_response(
                        truth.correct_answers[k], frames[k], config.generator, rng));
                    break;
                case WorkerProfile::ignorant:
                    cells.emplace_back(
                        gen_ignorant_response(frames[k], config.generator, rng));
                    break;
            }
        }
        if (config.skip_probability > 0.0) {
            // Blank the row's cells independently; redraw if nothing survives.
            std::vector<bool> blank(K);
            bool all_blank = true;
            do {
                all_blank = true;
                for (std::size_t k = 0; k < K; ++k) {
                    blank[k] = uniform_unit(rng) < config.skip_probability;
                    all_blank = all_blank && blank[k];
                }
            } while (all_blank);
            for (std::size_t k = 0; k < K; ++k)
                if (blank[k]) cells[row_begin + k].reset();
        }
    }

    return CrowdSample{ResponseMatrix(std::move(workers), std::move(frames), std::move(cells)),
                       std::move(truth)};
}

std::vector<bool> ground_truth_flags(const GroundTruth& truth, DegreeKind kind) {
    std::vector<bool> flags(truth.profiles.size());
    for (std::size_t j = 0; j < truth.profiles.size(); ++j) {
        const WorkerProfile p = truth.profiles[j];
        flags[j] = p == WorkerProfile::expert ||
                   (kind == DegreeKind::exactitude && p == WorkerProfile::imprecise_expert);
    }
    return flags;
}

double good_classification_rate(const std::vector<bool>& flags, const GroundTruth& truth,
                                DegreeKind kind) {
    if (flags.size() != truth.profiles.size())
        fail(Errc::length_mismatch, "flags and ground truth cover different workers");
    const std::vector<bool> expected = ground_truth_flags(truth, kind);
    std::size_t matches = 0;
    for (std::size_t j = 0; j < flags.size(); ++j)
        if (flags[j] == expected[j]) ++matches;
    return static_cast<double>(matches) / static_cast<double>(flags.size());
}

double perturbation_rate(std::span<const double> rates) {
    if (rates.size() < 2)
        fail(Errc::too_few_iterations, "perturbation rate needs at least 2 iterations");
    const double mean =
        std::accumulate(rates.begin(), rates.end(), 0.0) / static_cast<double>(rates.size());
    double var = 0.0;
    for (double r : rates) var += (r - mean) * (r - mean);
    return std::sqrt(var / static_cast<double>(rates.size()));
}

namespace {

SweepCell make_cell(double sweep_param, double beta, DegreeKind degree,
                    std::vector<double> rates) {
    SweepCell cell;
    cell.sweep_param = sweep_param;
    cell.beta = beta;
    cell.degree = degree;
    cell.mean_rate = std::accumulate(rates.begin(), rates.end(), 0.0) /
                     static_cast<double>(rates.size());
    cell.perturbation = rates.size() >= 2 ? perturbation_rate(rates) : 0.0;
    cell.iteration_rates = std::move(rates);
    return cell;
}

std::vector<double> grid_tenths() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
}

// Seed streams per experiment, so sweeps never share child generators.
constexpr std::uint64_t kBetaSweepStream = 1000;
constexpr std::uint64_t kQuestionSweepStream = 2000;
constexpr std::uint64_t kComparisonStream = 3000;

} // namespace

ExperimentResult experiment_beta_sweep(const ScenarioConfig& config) {
    config.validate();
    ExperimentResult result;
    result.experiment = "beta_sweep";

    const std::vector<double> fractions = grid_tenths();
    const std::vector<double> betas = grid_tenths();

    std::uint64_t cell_index = 0;
    for (double fraction : fractions) {
        for (double beta : betas) {
            ScenarioConfig cell_config = config;
            cell_config.fractions = {fraction, 0.0, 1.0 - fraction};
            cell_config.beta = beta;

            std::vector<double> rates;
            rates.reserve(config.iterations);
            for (std::size_t iter = 0; iter < config.iterations; ++iter) {
                Rng rng(derive_seed(config.seed, kBetaSweepStream + cell_index, iter));
                const CrowdSample sample = generate_crowd(cell_config, rng);
                const std::vector<double> ie = exactitude_degrees(sample.matrix);
                const std::vector<double> ip = precision_degrees(sample.matrix);
                const std::vector<double> gd = global_degrees(ie, ip, GlobalWeight(beta));
                rates.push_back(good_classification_rate(label_experts(gd), sample.truth,
                                                         DegreeKind::global_degree));
            }
            result.cells.push_back(
                make_cell(fraction, beta, DegreeKind::global_degree, std::move(rates)));
            ++cell_index;
        }
    }
    return result;
}

ExperimentResult experiment_question_sweep(const ScenarioConfig& config,
                                           std::span<const std::size_t> question_counts) {
    config.validate();
    ExperimentResult result;
    result.experiment = "question_sweep";

    std::vector<std::size_t> counts(question_counts.begin(), question_counts.end());
    if (counts.empty())
        counts = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};

    const DegreeKind kinds[] = {DegreeKind::exactitude, DegreeKind::precision,
                                DegreeKind::global_degree};

    for (std::size_t c = 0; c < counts.size(); ++c) {
        ScenarioConfig cell_config = config;
        cell_config.questions = counts[c];
        cell_config.fractions = {0.35, 0.35, 0.30};

        std::vector<std::vector<double>> rates(std::size(kinds));
        for (std::size_t iter = 0; iter < config.iterations; ++iter) {
            Rng rng(derive_seed(config.seed, kQuestionSweepStream + c, iter));
            const CrowdSample sample = generate_crowd(cell_config, rng);
            const std::vector<double> ie = exactitude_degrees(sample.matrix);
            const std::vector<double> ip = precision_degrees(sample.matrix);
            const std::vector<double> gd =
                global_degrees(ie, ip, GlobalWeight(config.beta));
            const std::vector<double>* degrees[] = {&ie, &ip, &gd};
            for (std::size_t d = 0; d < std::size(kinds); ++d)
                rates[d].push_back(good_classification_rate(label_experts(*degrees[d]),
                                                            sample.truth, kinds[d]));
        }
        for (std::size_t d = 0; d < std::size(kinds); ++d)
            result.cells.push_back(make_cell(static_cast<double>(counts[c]), config.beta,
                                             kinds[d], std::move(rates[d])));
    }
    return result;
}

ExperimentResult experiment_probability_comparison(const ScenarioConfig& config,
                                                   std::span<const double> joint_shares) {
    config.validate();
    ExperimentResult result;
    result.experiment = "probability_comparison";

    std::vector<double> shares(joint_shares.begin(), joint_shares.end());
    if (shares.empty())
        shares = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45};

    const DegreeKind kinds[] = {DegreeKind::exactitude, DegreeKind::global_degree,
                                DegreeKind::pignistic_exactitude};

    for (std::size_t c = 0; c < shares.size(); ++c) {
        ScenarioConfig cell_config = config;
        cell_config.fractions = {shares[c], shares[c], 1.0 - 2.0 * shares[c]};

        std::vector<std::vector<double>> rates(std::size(kinds));
        for (std::size_t iter = 0; iter < config.iterations; ++iter) {
            Rng rng(derive_seed(config.seed, kComparisonStream + c, iter));
            const CrowdSample sample = generate_crowd(cell_config, rng);
            const std::vector<double> ie = exactitude_degrees(sample.matrix);
            const std::vector<double> ip = precision_degrees(sample.matrix);
            const std::vector<double> gd =
                global_degrees(ie, ip, GlobalWeight(config.beta));
            const std::vector<double> ep = pignistic_exactitude_degrees(sample.matrix);
            const std::vector<double>* degrees[] = {&ie, &gd, &ep};
            for (std::size_t d = 0; d < std::size(kinds); ++d)
                rates[d].push_back(good_classification_rate(label_experts(*degrees[d]),
                                                            sample.truth, kinds[d]));
        }
        for (std::size_t d = 0; d < std::size(kinds); ++d)
            result.cells.push_back(
                make_cell(shares[c], config.beta, kinds[d], std::move(rates[d])));
    }
    return result;
}

} // namespace crowdbelief
