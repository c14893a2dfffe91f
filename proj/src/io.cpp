#include "crowdbelief/io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

namespace crowdbelief {

namespace {

using nlohmann::json;

std::string fmt6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

[[noreturn]] void parse_fail(std::string_view origin, std::size_t line,
                             const std::string& message) {
    fail(Errc::parse_error,
         std::string(origin) + ":" + std::to_string(line) + ": " + message);
}

double parse_double(std::string_view text, std::string_view origin, std::size_t line,
                    std::string_view key) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        parse_fail(origin, line,
                   "key '" + std::string(key) + "' expects a number, got '" +
                       std::string(text) + "'");
    return value;
}

std::uint64_t parse_uint(std::string_view text, std::string_view origin, std::size_t line,
                         std::string_view key) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        parse_fail(origin, line,
                   "key '" + std::string(key) + "' expects a non-negative integer, got '" +
                       std::string(text) + "'");
    return value;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) fail(Errc::io_error, "failed reading '" + path.string() + "'");
    return std::move(buffer).str();
}

} // namespace

ScenarioConfig parse_config_text(std::string_view text, std::string_view origin) {
    ScenarioConfig config;
    std::map<std::string, bool> seen;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        line = trim(line);
        if (line.empty() || line.front() == '#') continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            parse_fail(origin, line_no, "expected 'key = value', got '" + std::string(line) + "'");
        const std::string key{trim(line.substr(0, eq))};
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) parse_fail(origin, line_no, "missing key before '='");
        if (value.empty()) parse_fail(origin, line_no, "missing value for key '" + key + "'");
        if (seen[key]) parse_fail(origin, line_no, "duplicate key '" + key + "'");
        seen[key] = true;

        if (key == "scenario.s") {
            config.workers = parse_uint(value, origin, line_no, key);
        } else if (key == "scenario.k") {
            config.questions = parse_uint(value, origin, line_no, key);
        } else if (key == "scenario.frame_size") {
            config.frame_size = parse_uint(value, origin, line_no, key);
        } else if (key == "scenario.fractions.expert") {
            config.fractions.expert = parse_double(value, origin, line_no, key);
        } else if (key == "scenario.fractions.imprecise") {
            config.fractions.imprecise = parse_double(value, origin, line_no, key);
        } else if (key == "scenario.fractions.ignorant") {
            config.fractions.ignorant = parse_double(value, origin, line_no, key);
        } else if (key == "scenario.beta") {
            config.beta = parse_double(value, origin, line_no, key);
        } else if (key == "scenario.iterations") {
            config.iterations = parse_uint(value, origin, line_no, key);
        } else if (key == "scenario.seed") {
            config.seed = parse_uint(value, origin, line_no, key);
        } else if (key == "scenario.skip_probability") {
            config.skip_probability = parse_double(value, origin, line_no, key);
        } else if (key == "generator.a_min") {
            config.generator.a_min = parse_double(value, origin, line_no, key);
        } else if (key == "generator.max_ignorant_focals") {
            config.generator.max_ignorant_focals =
                static_cast<int>(parse_uint(value, origin, line_no, key));
        } else {
            parse_fail(origin, line_no, "unknown key '" + key + "'");
        }
    }

    config.validate();
    return config;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
    return parse_config_text(read_file(path), path.string());
}

namespace {

json parse_json_line(std::string_view line, const std::filesystem::path& path,
                     std::size_t line_no) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
        parse_fail(path.string(), line_no, "invalid JSON record");
    if (!j.is_object())
        parse_fail(path.string(), line_no, "expected a JSON object per line");
    return j;
}

// Invokes fn(line_number, json) for every non-empty line of a JSONL file.
template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn fn) {
    const std::string content = read_file(path);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        const std::size_t eol = content.find('\n', pos);
        std::string_view line = std::string_view(content).substr(
            pos, eol == std::string_view::npos ? content.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? content.size() + 1 : eol + 1;
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        fn(line_no, parse_json_line(line, path, line_no));
    }
}

std::string require_string(const json& j, const char* field,
                           const std::filesystem::path& path, std::size_t line_no) {
    if (!j.contains(field) || !j[field].is_string())
        parse_fail(path.string(), line_no,
                   "missing or non-string field '" + std::string(field) + "'");
    return j[field].get<std::string>();
}

} // namespace

std::vector<FramePtr> load_frames(const std::filesystem::path& path) {
    std::vector<FramePtr> frames;
    for_each_record(path, [&](std::size_t line_no, const json& j) {
        const std::string id = require_string(j, "question_id", path, line_no);
        if (!j.contains("labels") || !j["labels"].is_array())
            parse_fail(path.string(), line_no, "missing or non-array field 'labels'");
        std::vector<std::string> labels;
        for (const auto& item : j["labels"]) {
            if (!item.is_string())
                parse_fail(path.string(), line_no, "labels must be strings");
            labels.push_back(item.get<std::string>());
        }
        for (const auto& f : frames)
            if (f->question_id() == id)
                fail(Errc::validation_error,
                     path.string() + ":" + std::to_string(line_no) +
                         ": duplicate question id '" + id + "'");
        frames.push_back(make_frame(id, std::move(labels)));
    });
    if (frames.empty())
        fail(Errc::validation_error, path.string() + ": no frames declared");
    return frames;
}

void save_frames(const std::filesystem::path& path, const std::vector<FramePtr>& frames) {
    std::string out;
    for (const auto& frame : frames) {
        json j;
        j["question_id"] = frame->question_id();
        j["labels"] = frame->elements();
        out += j.dump();
        out += '\n';
    }
    atomic_write(path, out);
}

ResponseMatrix load_responses(const std::filesystem::path& frames_path,
                              const std::filesystem::path& responses_path) {
    const std::vector<FramePtr> frames = load_frames(frames_path);
    std::map<std::string, std::size_t, std::less<>> question_index;
    for (std::size_t k = 0; k < frames.size(); ++k)
        question_index.emplace(frames[k]->question_id(), k);

    std::vector<std::string> workers;
    std::map<std::string, std::size_t, std::less<>> worker_index;
    // Sparse cells keyed by (worker, question) until the matrix shape is known.
    std::map<std::pair<std::size_t, std::size_t>, MassFunction> sparse;

    for_each_record(responses_path, [&](std::size_t line_no, const json& j) {
        const std::string where =
            responses_path.string() + ":" + std::to_string(line_no);
        const std::string participant = require_string(j, "participant_id", responses_path, line_no);
        const std::string question = require_string(j, "question_id", responses_path, line_no);

        const auto q_it = question_index.find(question);
        if (q_it == question_index.end())
            fail(Errc::unknown_question, where + ": question '" + question + "' is not declared");
        const std::size_t k = q_it->second;
        const FramePtr& frame = frames[k];

        if (!j.contains("focal_sets") || !j["focal_sets"].is_array())
            parse_fail(responses_path.string(), line_no,
                       "missing or non-array field 'focal_sets'");

        double sum = 0.0;
        std::vector<MassEntry> entries;
        for (const auto& focal : j["focal_sets"]) {
            if (!focal.is_object() || !focal.contains("members") ||
                !focal["members"].is_array() || !focal.contains("mass") ||
                !focal["mass"].is_number())
                parse_fail(responses_path.string(), line_no,
                           "each focal set needs 'members' (array) and 'mass' (number)");
            std::uint64_t bits = 0;
            for (const auto& member : focal["members"]) {
                if (!member.is_string())
                    parse_fail(responses_path.string(), line_no, "members must be strings");
                const auto idx = frame->index_of(member.get<std::string>());
                if (!idx)
                    fail(Errc::unknown_answer_label,
                         where + ": label '" + member.get<std::string>() +
                             "' is not an answer of question '" + question + "'");
                bits |= std::uint64_t{1} << *idx;
            }
            const double mass = focal["mass"].get<double>();
            entries.emplace_back(bits, mass);
            sum += mass;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            fail(Errc::non_normalized_record,
                 where + ": masses sum to " + std::to_string(sum) + ", expected 1");
        for (auto& [bits, mass] : entries) mass /= sum;

        auto [w_it, inserted] = worker_index.emplace(participant, workers.size());
        if (inserted) workers.push_back(participant);
        const std::size_t worker = w_it->second;

        if (sparse.contains({worker, k}))
            fail(Errc::duplicate_response,
                 where + ": participant '" + participant + "' already answered '" +
                     question + "'");
        try {
            sparse.emplace(std::pair{worker, k}, MassFunction(frame, std::move(entries)));
        } catch (const Error& e) {
            fail(e.code(), where + ": " + e.what());
        }
    });

    if (workers.empty())
        fail(Errc::empty_worker_row, responses_path.string() + ": no responses found");

    std::vector<ResponseMatrix::Cell> cells(workers.size() * frames.size());
    for (auto& [key, mass] : sparse)
        cells[key.first * frames.size() + key.second] = std::move(mass);
    return ResponseMatrix(std::move(workers), frames, std::move(cells));
}

void save_responses(const std::filesystem::path& path, const ResponseMatrix& matrix) {
    std::string out;
    for (std::size_t j = 0; j < matrix.worker_count(); ++j) {
        for (std::size_t k = 0; k < matrix.question_count(); ++k) {
            const auto& cell = matrix.cell(j, k);
            if (!cell) continue;
            json record;
            record["participant_id"] = matrix.workers()[j];
            record["question_id"] = matrix.frames()[k]->question_id();
            json focal_sets = json::array();
            for (const auto& [bits, mass] : cell->entries()) {
                json focal;
                focal["members"] = FocalSet(cell->frame(), bits).member_labels();
                focal["mass"] = mass;
                focal_sets.push_back(std::move(focal));
            }
            record["focal_sets"] = std::move(focal_sets);
            out += record.dump();
            out += '\n';
        }
    }
    atomic_write(path, out);
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
    static std::mt19937_64 name_rng{std::random_device{}()};
    const std::filesystem::path tmp =
        path.parent_path() /
        (path.filename().string() + ".tmp-" + std::to_string(name_rng()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(Errc::io_error, "cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) fail(Errc::io_error, "failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(Errc::io_error, "cannot move results into place at '" + path.string() + "'");
    }
}

OutputFormat parse_output_format(std::string_view name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    fail(Errc::validation_error, "unknown output format '" + std::string(name) +
                                     "' (expected csv or json)");
}

std::string render_degree_csv(const DegreeReport& report, const std::vector<bool>& flags) {
    if (flags.size() != report.rows.size())
        fail(Errc::length_mismatch, "expert flags do not cover every worker");
    std::string out = "participant_id,r,IE,IP,GD,EP,expert_flag\n";
    for (std::size_t j = 0; j < report.rows.size(); ++j) {
        const WorkerDegrees& row = report.rows[j];
        out += report.workers[j];
        out += ',' + std::to_string(row.responses);
        out += ',' + fmt6(row.exactitude);
        out += ',' + fmt6(row.precision);
        out += ',' + fmt6(row.global_degree);
        out += ',' + fmt6(row.pignistic_exactitude);
        out += ',';
        out += flags[j] ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string render_degree_json(const DegreeReport& report, const std::vector<bool>& flags) {
    if (flags.size() != report.rows.size())
        fail(Errc::length_mismatch, "expert flags do not cover every worker");
    json j;
    j["beta"] = report.beta;
    json rows = json::array();
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const WorkerDegrees& row = report.rows[i];
        rows.push_back({{"participant_id", report.workers[i]},
                        {"r", row.responses},
                        {"IE", row.exactitude},
                        {"IP", row.precision},
                        {"GD", row.global_degree},
                        {"EP", row.pignistic_exactitude},
                        {"expert_flag", static_cast<bool>(flags[i])}});
    }
    j["workers"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string render_experiment_csv(const ExperimentResult& result) {
    const std::size_t iter_count =
        result.cells.empty() ? 0 : result.cells.front().iteration_rates.size();
    std::string out = "sweep_param,beta,degree_kind,mean_rate,perturbation_rate";
    for (std::size_t i = 0; i < iter_count; ++i)
        out += ",iter_rate_" + std::to_string(i);
    out += '\n';
    for (const SweepCell& cell : result.cells) {
        out += fmt6(cell.sweep_param);
        out += ',' + fmt6(cell.beta);
        out += ',';
        out += degree_kind_label(cell.degree);
        out += ',' + fmt6(cell.mean_rate);
        out += ',' + fmt6(cell.perturbation);
        for (double rate : cell.iteration_rates) out += ',' + fmt6(rate);
        out += '\n';
    }
    return out;
}

std::string render_experiment_json(const ExperimentResult& result) {
    json j;
    j["experiment"] = result.experiment;
    json cells = json::array();
    for (const SweepCell& cell : result.cells) {
        cells.push_back({{"sweep_param", cell.sweep_param},
                         {"beta", cell.beta},
                         {"degree_kind", std::string(degree_kind_label(cell.degree))},
                         {"mean_rate", cell.mean_rate},
                         {"perturbation_rate", cell.perturbation},
                         {"iter_rates", cell.iteration_rates}});
    }
    j["cells"] = std::move(cells);
    return j.dump(2) + "\n";
}

namespace {

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        fail(Errc::io_error, "cannot create output directory '" + dir.string() + "'");
}

} // namespace

std::vector<std::filesystem::path> emit_results(const DegreeReport& report,
                                                const std::vector<bool>& flags,
                                                OutputFormat format,
                                                const std::filesystem::path& dir) {
    ensure_directory(dir);
    const bool csv = format == OutputFormat::csv;
    const std::filesystem::path path = dir / (csv ? "degrees.csv" : "degrees.json");
    atomic_write(path, csv ? render_degree_csv(report, flags)
                           : render_degree_json(report, flags));
    return {path};
}

std::vector<std::filesystem::path> emit_results(const ExperimentResult& result,
                                                OutputFormat format,
                                                const std::filesystem::path& dir) {
    ensure_directory(dir);
    const bool csv = format == OutputFormat::csv;
    const std::filesystem::path path = dir / (csv ? "results.csv" : "results.json");
    atomic_write(path, csv ? render_experiment_csv(result)
                           : render_experiment_json(result));
    return {path};
}

std::string current_utc_timestamp() {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::filesystem::path write_manifest(const RunManifest& manifest,
                                     const std::filesystem::path& dir) {
    ensure_directory(dir);
    json j;
    j["tool_version"] = manifest.tool_version;
    j["seed"] = manifest.seed;
    j["started_at"] = manifest.started_at;
    j["finished_at"] = manifest.finished_at;
    j["output_paths"] = manifest.output_paths;
    j["config"] = {
        {"scenario",
         {{"s", manifest.config.workers},
          {"k", manifest.config.questions},
          {"frame_size", manifest.config.frame_size},
          {"fractions",
           {{"expert", manifest.config.fractions.expert},
            {"imprecise", manifest.config.fractions.imprecise},
            {"ignorant", manifest.config.fractions.ignorant}}},
          {"beta", manifest.config.beta},
          {"iterations", manifest.config.iterations},
          {"seed", manifest.config.seed},
          {"skip_probability", manifest.config.skip_probability}}},
        {"generator",
         {{"a_min", manifest.config.generator.a_min},
          {"max_ignorant_focals", manifest.config.generator.max_ignorant_focals}}}};
    const std::filesystem::path path = dir / "manifest.json";
    atomic_write(path, j.dump(2) + "\n");
    return path;
}

} // namespace crowdbelief
