#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crowdbelief {

// Every failure the library reports, one code per error class.
enum class Errc {
    // mass function construction
    non_normalized,
    empty_focal_set,
    non_positive_mass,
    foreign_element,
    duplicate_focal_set,
    // cross-value preconditions
    mixed_frames,
    empty_input,
    length_mismatch,
    // degree computation
    no_peer_responses,
    empty_worker_row,
    // clustering
    too_few_values,
    stalled_convergence,
    // simulation
    frame_too_small,
    too_few_iterations,
    // ingestion
    unknown_question,
    unknown_answer_label,
    duplicate_response,
    non_normalized_record,
    parse_error,
    validation_error,
    io_error,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace crowdbelief
