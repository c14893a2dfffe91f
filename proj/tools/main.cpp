#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "crowdbelief/clustering.hpp"
#include "crowdbelief/io.hpp"

namespace fs = std::filesystem;
using namespace crowdbelief;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::string out_dir = "out";
    std::string format = "csv";
};

void add_common_options(CLI::App& cmd, CommonOptions& options) {
    cmd.add_option("--config", options.config_path, "Scenario config file (key = value lines)");
    cmd.add_option("--seed", options.seed_override, "Seed override for this run");
    cmd.add_option("--out", options.out_dir, "Output directory")->capture_default_str();
    cmd.add_option("--format", options.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

ScenarioConfig resolve_config(const CommonOptions& options) {
    ScenarioConfig config;
    if (!options.config_path.empty()) config = parse_config(options.config_path);
    if (options.seed_override) config.seed = *options.seed_override;
    config.validate();
    return config;
}

void report_written(const std::vector<fs::path>& paths) {
    for (const auto& p : paths) std::cout << "wrote " << p.string() << "\n";
}

// Runs compute(), emits its results plus a manifest, prints the paths.
template <typename Compute>
int run_with_manifest(const CommonOptions& options, const ScenarioConfig& config,
                      Compute compute) {
    RunManifest manifest;
    manifest.config = config;
    manifest.seed = config.seed;
    manifest.started_at = current_utc_timestamp();

    std::vector<fs::path> written = compute(parse_output_format(options.format),
                                            fs::path(options.out_dir));

    manifest.finished_at = current_utc_timestamp();
    for (const auto& p : written) manifest.output_paths.push_back(p.filename().string());
    written.push_back(write_manifest(manifest, options.out_dir));
    report_written(written);
    return 0;
}

// Degrees plus global-degree expert flags for a matrix that may still contain
// questions the leave-one-out consensus cannot handle; such questions (and
// workers left without answers) are dropped first.
struct PreparedDegrees {
    DegreeReport report;
    std::vector<bool> flags;
    std::vector<std::string> dropped_workers;
};

PreparedDegrees prepare_degrees(const ResponseMatrix& matrix, double beta) {
    FilteredMatrix filtered = drop_underanswered_questions(matrix);
    for (const auto& q : filtered.dropped_questions)
        std::cerr << "warning: dropping question '" << q
                  << "': answered by fewer than 2 participants\n";

    PreparedDegrees out;
    out.dropped_workers = filtered.dropped_workers;
    out.report = compute_degree_report(filtered.matrix, GlobalWeight(beta));
    std::vector<double> gd;
    gd.reserve(out.report.rows.size());
    for (const auto& row : out.report.rows) gd.push_back(row.global_degree);
    out.flags = gd.size() >= 2 ? label_experts(gd) : std::vector<bool>(gd.size(), false);
    return out;
}

int cmd_simulate(const CommonOptions& options) {
    const ScenarioConfig config = resolve_config(options);
    return run_with_manifest(options, config, [&](OutputFormat format, const fs::path& dir) {
        Rng rng(config.seed);
        const CrowdSample sample = generate_crowd(config, rng);

        PreparedDegrees degrees = prepare_degrees(sample.matrix, config.beta);
        for (const auto& w : degrees.dropped_workers)
            std::cerr << "warning: dropping worker '" << w
                      << "': no answers left after question filtering\n";

        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) fail(Errc::io_error, "cannot create output directory '" + dir.string() + "'");
        save_frames(dir / "frames.jsonl", sample.matrix.frames());
        save_responses(dir / "responses.jsonl", sample.matrix);

        std::vector<fs::path> written{dir / "frames.jsonl", dir / "responses.jsonl"};
        for (const auto& p : emit_results(degrees.report, degrees.flags, format, dir))
            written.push_back(p);
        return written;
    });
}

int cmd_evaluate(const CommonOptions& options, const std::string& frames_path,
                 const std::string& responses_path) {
    const ScenarioConfig config = resolve_config(options);
    return run_with_manifest(options, config, [&](OutputFormat format, const fs::path& dir) {
        const ResponseMatrix matrix = load_responses(frames_path, responses_path);
        PreparedDegrees degrees = prepare_degrees(matrix, config.beta);
        if (!degrees.dropped_workers.empty())
            fail(Errc::empty_worker_row,
                 "worker '" + degrees.dropped_workers.front() +
                     "' has no usable answers after question filtering");
        return emit_results(degrees.report, degrees.flags, format, dir);
    });
}

template <typename Experiment>
int cmd_experiment(const CommonOptions& options, Experiment experiment) {
    const ScenarioConfig config = resolve_config(options);
    return run_with_manifest(options, config, [&](OutputFormat format, const fs::path& dir) {
        return emit_results(experiment(config), format, dir);
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Belief-function characterization of crowdsourcing workers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    CommonOptions options;
    std::string frames_path;
    std::string responses_path;

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Generate one crowd, emit its dataset, degrees and expert flags");
    add_common_options(*simulate, options);

    CLI::App* sweep_beta = app.add_subcommand(
        "sweep-beta", "Sweep expert fraction and beta over experts-vs-ignorants crowds");
    add_common_options(*sweep_beta, options);

    CLI::App* sweep_questions = app.add_subcommand(
        "sweep-questions", "Sweep the question count and report rate stability per degree");
    add_common_options(*sweep_questions, options);

    CLI::App* compare = app.add_subcommand(
        "compare-probability",
        "Compare belief degrees against the pignistic-probability baseline");
    add_common_options(*compare, options);

    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "Compute degrees and expert flags for an ingested dataset");
    add_common_options(*evaluate, options);
    evaluate->add_option("--frames", frames_path, "Frames file (JSON lines)")->required();
    evaluate->add_option("--responses", responses_path, "Responses file (JSON lines)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(options);
        if (sweep_beta->parsed())
            return cmd_experiment(options,
                                  [](const ScenarioConfig& c) { return experiment_beta_sweep(c); });
        if (sweep_questions->parsed())
            return cmd_experiment(options, [](const ScenarioConfig& c) {
                return experiment_question_sweep(c);
            });
        if (compare->parsed())
            return cmd_experiment(options, [](const ScenarioConfig& c) {
                return experiment_probability_comparison(c);
            });
        if (evaluate->parsed()) return cmd_evaluate(options, frames_path, responses_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == Errc::io_error ? 2 : 1;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: IoError: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
