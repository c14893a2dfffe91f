#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "crowdbelief/expertise.hpp"
#include "crowdbelief/simulation.hpp"

namespace crowdbelief {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Reads the key-value scenario file (key = value lines, '#' comments).
// Recognized keys: scenario.s, scenario.k, scenario.frame_size,
// scenario.fractions.{expert,imprecise,ignorant}, scenario.beta,
// scenario.iterations, scenario.seed, scenario.skip_probability,
// generator.a_min, generator.max_ignorant_focals. Omitted keys keep their
// defaults; an empty file yields the default scenario.
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(std::string_view text, std::string_view origin);

// Frames file: one JSON object per line, {"question_id": ..., "labels": [...]}.
std::vector<FramePtr> load_frames(const std::filesystem::path& path);
void save_frames(const std::filesystem::path& path, const std::vector<FramePtr>& frames);

// Responses file: one JSON object per line,
// {"participant_id": ..., "question_id": ..., "focal_sets":
//   [{"members": [label, ...], "mass": ...}, ...]}.
// Record masses must sum to 1 within 1e-6 and are renormalized on load.
// Workers keep their first-appearance order; unanswered (worker, question)
// pairs stay absent; duplicate pairs are an error.
ResponseMatrix load_responses(const std::filesystem::path& frames_path,
                              const std::filesystem::path& responses_path);
void save_responses(const std::filesystem::path& path, const ResponseMatrix& matrix);

// Writes content to a temporary file in the target directory, then renames it
// over the destination, so readers never observe partial files.
void atomic_write(const std::filesystem::path& path, std::string_view content);

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(std::string_view name);

// Rendered result payloads; all floating values carry 6 decimal digits in CSV
// while JSON keeps full precision.
std::string render_degree_csv(const DegreeReport& report, const std::vector<bool>& flags);
std::string render_degree_json(const DegreeReport& report, const std::vector<bool>& flags);
std::string render_experiment_csv(const ExperimentResult& result);
std::string render_experiment_json(const ExperimentResult& result);

// Writes the report (or experiment) into dir under a fixed name and returns
// the paths written.
std::vector<std::filesystem::path> emit_results(const DegreeReport& report,
                                                const std::vector<bool>& flags,
                                                OutputFormat format,
                                                const std::filesystem::path& dir);
std::vector<std::filesystem::path> emit_results(const ExperimentResult& result,
                                                OutputFormat format,
                                                const std::filesystem::path& dir);

struct RunManifest {
    ScenarioConfig config;
    std::string tool_version{kToolVersion};
    std::uint64_t seed = 0;
    std::string started_at;   // UTC, ISO 8601
    std::string finished_at;  // UTC, ISO 8601
    std::vector<std::string> output_paths;  // file names relative to the run dir
};

std::string current_utc_timestamp();

// Serializes the manifest as manifest.json in dir (atomically, like every
// other emitted file).
std::filesystem::path write_manifest(const RunManifest& manifest,
                                     const std::filesystem::path& dir);

} // namespace crowdbelief
