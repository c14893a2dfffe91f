#include "crowdbelief/expertise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_set>

namespace crowdbelief {

ResponseMatrix::ResponseMatrix(std::vector<std::string> workers,
                               std::vector<FramePtr> frames, std::vector<Cell> cells)
    : workers_(std::move(workers)), frames_(std::move(frames)), cells_(std::move(cells)) {
    if (cells_.size() != workers_.size() * frames_.size())
        fail(Errc::length_mismatch, "cell grid does not match workers x questions");

    std::unordered_set<std::string_view> seen;
    for (const auto& id : workers_)
        if (!seen.insert(id).second)
            fail(Errc::validation_error, "duplicate worker id '" + id + "'");
    seen.clear();
    for (const auto& f : frames_)
        if (!seen.insert(f->question_id()).second)
            fail(Errc::validation_error, "duplicate question id '" + f->question_id() + "'");

    for (std::size_t j = 0; j < workers_.size(); ++j) {
        std::size_t answered = 0;
        for (std::size_t k = 0; k < frames_.size(); ++k) {
            const Cell& c = cells_[j * frames_.size() + k];
            if (!c) continue;
            if (!same_frame(*c->frame(), *frames_[k]))
                fail(Errc::mixed_frames, "answer by '" + workers_[j] +
                                             "' does not match the frame of question '" +
                                             frames_[k]->question_id() + "'");
            ++answered;
        }
        if (answered == 0)
            fail(Errc::empty_worker_row,
                 "worker '" + workers_[j] + "' has no answers");
    }
}

std::size_t ResponseMatrix::response_count(std::size_t worker) const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < frames_.size(); ++k)
        if (cell(worker, k)) ++n;
    return n;
}

std::size_t ResponseMatrix::respondent_count(std::size_t question) const {
    std::size_t n = 0;
    for (std::size_t j = 0; j < workers_.size(); ++j)
        if (cell(j, question)) ++n;
    return n;
}

GlobalWeight::GlobalWeight(double beta) : beta_(beta) {
    if (!(beta >= 0.0 && beta <= 1.0))
        fail(Errc::validation_error, "beta must lie in [0, 1]");
}

MassFunction leave_one_out_mean(const ResponseMatrix& matrix, std::size_t question,
                                std::size_t worker) {
    std::vector<MassFunction> peers;
    for (std::size_t j = 0; j < matrix.worker_count(); ++j) {
        if (j == worker) continue;
        if (const auto& c = matrix.cell(j, question)) peers.push_back(*c);
    }
    if (peers.empty())
        fail(Errc::no_peer_responses,
             "question '" + matrix.frames()[question]->question_id() +
                 "' has no responses besides worker '" + matrix.workers()[worker] + "'");
    return mean_mass(peers);
}

namespace {

constexpr double kPruneThreshold = 1e-12;

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<std::size_t> respondents_of(const ResponseMatrix& matrix, std::size_t question) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < matrix.worker_count(); ++j)
        if (matrix.cell(j, question)) out.push_back(j);
    return out;
}

void require_peers(const ResponseMatrix& matrix, std::size_t question,
                   const std::vector<std::size_t>& respondents) {
    if (respondents.size() == 1)
        fail(Errc::no_peer_responses,
             "question '" + matrix.frames()[question]->question_id() +
                 "' was answered by a single worker");
}

// Mean distance to the leave-one-out consensus per worker, with the distance
// supplied per question by `accumulate(question, respondents)` which adds each
// respondent's distance into dist_sum. Shared skeleton of both exactitude
// variants; questions nobody answered contribute to nobody.
template <typename PerQuestion>
std::vector<double> consensus_degrees(const ResponseMatrix& matrix, PerQuestion per_question) {
    const std::size_t s = matrix.worker_count();
    std::vector<double> dist_sum(s, 0.0);
    std::vector<std::size_t> answered(s, 0);

    for (std::size_t k = 0; k < matrix.question_count(); ++k) {
        const std::vector<std::size_t> respondents = respondents_of(matrix, k);
        if (respondents.empty()) continue;
        require_peers(matrix, k, respondents);
        per_question(k, respondents, dist_sum);
        for (std::size_t j : respondents) ++answered[j];
    }

    std::vector<double> degrees(s, 0.0);
    for (std::size_t j = 0; j < s; ++j)
        if (answered[j] > 0)
            degrees[j] = clamp_unit(1.0 - dist_sum[j] / static_cast<double>(answered[j]));
    return degrees;
}

} // namespace

std::vector<double> exactitude_degrees(const ResponseMatrix& matrix) {
    return consensus_degrees(matrix, [&](std::size_t k,
                                         const std::vector<std::size_t>& respondents,
                                         std::vector<double>& dist_sum) {
        // Basis: union of every respondent's focal sets, canonically ordered.
        std::vector<std::uint64_t> basis;
        for (std::size_t j : respondents)
            for (const auto& [bits, mass] : matrix.cell(j, k)->entries())
                if (std::find(basis.begin(), basis.end(), bits) == basis.end())
                    basis.push_back(bits);
        std::sort(basis.begin(), basis.end(), canonical_subset_less);
        const std::size_t b = basis.size();

        auto index_of = [&](std::uint64_t bits) {
            return static_cast<std::size_t>(
                std::find(basis.begin(), basis.end(), bits) - basis.begin());
        };

        std::vector<double> total(b, 0.0);
        for (std::size_t j : respondents)
            for (const auto& [bits, mass] : matrix.cell(j, k)->entries())
                total[index_of(bits)] += mass;

        // Jaccard similarity over the basis, computed once per question.
        std::vector<double> sim(b * b, 1.0);
        for (std::size_t p = 0; p < b; ++p)
            for (std::size_t q = p + 1; q < b; ++q) {
                const double v =
                    static_cast<double>(std::popcount(basis[p] & basis[q])) /
                    static_cast<double>(std::popcount(basis[p] | basis[q]));
                sim[p * b + q] = sim[q * b + p] = v;
            }

        const double inv_peers = 1.0 / static_cast<double>(respondents.size() - 1);
        std::vector<double> own(b);
        std::vector<double> diff(b);
        for (std::size_t j : respondents) {
            std::fill(own.begin(), own.end(), 0.0);
            for (const auto& [bits, mass] : matrix.cell(j, k)->entries())
                own[index_of(bits)] = mass;
            for (std::size_t p = 0; p < b; ++p) {
                double loo = (total[p] - own[p]) * inv_peers;
                if (loo < kPruneThreshold) loo = 0.0;  // matches mean_mass pruning
                diff[p] = own[p] - loo;
            }
            double quad = 0.0;
            for (std::size_t p = 0; p < b; ++p) {
                quad += diff[p] * diff[p];
                for (std::size_t q = p + 1; q < b; ++q)
                    quad += 2.0 * diff[p] * diff[q] * sim[p * b + q];
            }
            dist_sum[j] += std::min(std::sqrt(0.5 * std::max(quad, 0.0)), 1.0);
        }
    });
}

std::vector<double> precision_degrees(const ResponseMatrix& matrix) {
    const std::size_t s = matrix.worker_count();
    std::vector<double> degrees(s, 0.0);
    for (std::size_t j = 0; j < s; ++j) {
        double sum = 0.0;
        std::size_t answered = 0;
        for (std::size_t k = 0; k < matrix.question_count(); ++k) {
            if (const auto& c = matrix.cell(j, k)) {
                sum += specificity(*c);
                ++answered;
            }
        }
        if (answered > 0) degrees[j] = clamp_unit(sum / static_cast<double>(answered));
    }
    return degrees;
}

std::vector<double> global_degrees(std::span<const double> exactitude,
                                   std::span<const double> precision, GlobalWeight weight) {
    if (exactitude.size() != precision.size())
        fail(Errc::length_mismatch, "degree vectors must cover the same workers");
    const double beta = weight.beta();
    std::vector<double> out(exactitude.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = beta * exactitude[j] + (1.0 - beta) * precision[j];
    return out;
}

std::vector<double> pignistic_exactitude_degrees(const ResponseMatrix& matrix) {
    // Pignistic projections per question, reused across the leave-one-out means.
    return consensus_degrees(matrix, [&](std::size_t k,
                                         const std::vector<std::size_t>& respondents,
                                         std::vector<double>& dist_sum) {
        const std::size_t n = matrix.frames()[k]->size();
        std::vector<std::vector<double>> betp;
        betp.reserve(respondents.size());
        std::vector<double> total(n, 0.0);
        for (std::size_t j : respondents) {
            const ProbabilityDistribution p = pignistic(*matrix.cell(j, k));
            betp.emplace_back(p.probs().begin(), p.probs().end());
            for (std::size_t e = 0; e < n; ++e) total[e] += betp.back()[e];
        }

        const double inv_peers = 1.0 / static_cast<double>(respondents.size() - 1);
        for (std::size_t r = 0; r < respondents.size(); ++r) {
            double sq = 0.0;
            for (std::size_t e = 0; e < n; ++e) {
                const double peer_mean = (total[e] - betp[r][e]) * inv_peers;
                const double d = betp[r][e] - peer_mean;
                sq += d * d;
            }
            dist_sum[respondents[r]] += std::min(std::sqrt(sq / 2.0), 1.0);
        }
    });
}

DegreeReport compute_degree_report(const ResponseMatrix& matrix, GlobalWeight weight) {
    const std::vector<double> ie = exactitude_degrees(matrix);
    const std::vector<double> ip = precision_degrees(matrix);
    const std::vector<double> gd = global_degrees(ie, ip, weight);
    const std::vector<double> ep = pignistic_exactitude_degrees(matrix);

    DegreeReport report;
    report.workers = matrix.workers();
    report.beta = weight.beta();
    report.rows.resize(matrix.worker_count());
    for (std::size_t j = 0; j < matrix.worker_count(); ++j) {
        report.rows[j] = {ie[j], ip[j], gd[j], ep[j], matrix.response_count(j)};
    }
    return report;
}

FilteredMatrix drop_underanswered_questions(const ResponseMatrix& matrix,
                                            std::size_t min_respondents) {
    FilteredMatrix result{ResponseMatrix({}, {}, {}), {}, {}};

    std::vector<std::size_t> kept_questions;
    for (std::size_t k = 0; k < matrix.question_count(); ++k) {
        if (matrix.respondent_count(k) >= min_respondents)
            kept_questions.push_back(k);
        else
            result.dropped_questions.push_back(matrix.frames()[k]->question_id());
    }

    std::vector<std::size_t> kept_workers;
    for (std::size_t j = 0; j < matrix.worker_count(); ++j) {
        const bool has_answer = std::any_of(kept_questions.begin(), kept_questions.end(),
                                            [&](std::size_t k) {
                                                return matrix.cell(j, k).has_value();
                                            });
        if (has_answer)
            kept_workers.push_back(j);
        else
            result.dropped_workers.push_back(matrix.workers()[j]);
    }

    std::vector<std::string> workers;
    std::vector<FramePtr> frames;
    std::vector<ResponseMatrix::Cell> cells;
    workers.reserve(kept_workers.size());
    frames.reserve(kept_questions.size());
    for (std::size_t k : kept_questions) frames.push_back(matrix.frames()[k]);
    for (std::size_t j : kept_workers) {
        workers.push_back(matrix.workers()[j]);
        for (std::size_t k : kept_questions) cells.push_back(matrix.cell(j, k));
    }
    result.matrix = ResponseMatrix(std::move(workers), std::move(frames), std::move(cells));
    return result;
}

} // namespace crowdbelief
