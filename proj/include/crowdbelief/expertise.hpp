#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowdbelief/belief.hpp"

namespace crowdbelief {

// s workers by K questions of optional answers. A missing cell means the
// worker skipped that question. Immutable after construction.
class ResponseMatrix {
public:
    using Cell = std::optional<MassFunction>;

    // cells is row-major: cell(j, k) = cells[j * frames.size() + k]. Every
    // present cell must be a mass function over its column frame, ids must be
    // unique, and every worker must have answered at least one question.
    ResponseMatrix(std::vector<std::string> workers, std::vector<FramePtr> frames,
                   std::vector<Cell> cells);

    std::size_t worker_count() const noexcept { return workers_.size(); }
    std::size_t question_count() const noexcept { return frames_.size(); }
    const std::vector<std::string>& workers() const noexcept { return workers_; }
    const std::vector<FramePtr>& frames() const noexcept { return frames_; }
    const Cell& cell(std::size_t worker, std::size_t question) const {
        return cells_.at(worker * frames_.size() + question);
    }

    // Number of questions the worker answered (r in the degree formulas).
    std::size_t response_count(std::size_t worker) const;
    // Number of workers who answered the question.
    std::size_t respondent_count(std::size_t question) const;

private:
    std::vector<std::string> workers_;
    std::vector<FramePtr> frames_;
    std::vector<Cell> cells_;
};

// Crowd-wide weight blending exactitude and precision into the global degree.
class GlobalWeight {
public:
    explicit GlobalWeight(double beta);
    double beta() const noexcept { return beta_; }

private:
    double beta_;
};

// Average of the peers' answers to one question, excluding the given worker.
// Workers who skipped the question are left out of the average entirely.
MassFunction leave_one_out_mean(const ResponseMatrix& matrix, std::size_t question,
                                std::size_t worker);

// Exactitude: 1 minus the worker's mean Jousselme distance to the
// leave-one-out consensus, averaged over the questions they answered.
std::vector<double> exactitude_degrees(const ResponseMatrix& matrix);

// Precision: the worker's mean specificity over answered questions. Depends
// only on the worker's own row.
std::vector<double> precision_degrees(const ResponseMatrix& matrix);

// Global degree: beta * exactitude + (1 - beta) * precision, elementwise.
std::vector<double> global_degrees(std::span<const double> exactitude,
                                   std::span<const double> precision, GlobalWeight weight);

// Probability-baseline exactitude: every answer is projected to its pignistic
// distribution first; the consensus is the mean of peer distributions and the
// distance is normalized Euclidean.
std::vector<double> pignistic_exactitude_degrees(const ResponseMatrix& matrix);

struct WorkerDegrees {
    double exactitude = 0.0;
    double precision = 0.0;
    double global_degree = 0.0;
    double pignistic_exactitude = 0.0;
    std::size_t responses = 0;
};

struct DegreeReport {
    std::vector<std::string> workers;
    std::vector<WorkerDegrees> rows;
    double beta = 0.5;
};

// All four degree vectors for one matrix.
DegreeReport compute_degree_report(const ResponseMatrix& matrix, GlobalWeight weight);

struct FilteredMatrix {
    ResponseMatrix matrix;
    std::vector<std::string> dropped_questions;  // fewer respondents than required
    std::vector<std::string> dropped_workers;    // left with zero answers
};

// Removes questions answered by fewer than min_respondents workers (the
// leave-one-out consensus needs at least one peer), then workers left without
// any answers. Callers decide whether dropped workers are an error.
FilteredMatrix drop_underanswered_questions(const ResponseMatrix& matrix,
                                            std::size_t min_respondents = 2);

} // namespace crowdbelief
