#include "faultbench/trace_io.hpp"

#include "faultbench/report.hpp"

#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace faultbench {
namespace {

Json parse_line_or_throw(const std::string& line, const char* what, size_t line_no) {
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
        throw std::runtime_error(std::string(what) + ": malformed JSON at line " +
                                 std::to_string(line_no));
    }
    return j;
}

RunHeader read_header_line(std::istream& in, const char* expected_format,
                           const char* what) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(std::string(what) + ": missing header line");
    }
    Json j = parse_line_or_throw(line, what, 1);
    if (!j.is_object() || j.value("format", "") != expected_format) {
        throw std::runtime_error(std::string(what) + ": first line is not a " +
                                 expected_format + " header");
    }
    return run_header_from_json(j);
}

} // namespace

RunHeader make_run_header(const RunSummary& summary,
                          std::optional<FaultProfile> fault_profile) {
    RunHeader header;
    header.run_id = summary.run_id;
    header.backend = summary.backend;
    header.dataset_seed = summary.dataset_seed;
    header.task_count = summary.task_count;
    header.step_limit = summary.step_limit;
    header.started_at = now_rfc3339_utc();
    header.fault_profile = std::move(fault_profile);
    return header;
}

Json run_header_to_json(const RunHeader& header, bool canonical,
                        const char* format_name) {
    Json j;
    j["format"] = format_name;
    j["format_version"] = kTraceFormatVersion;
    j["run_id"] = header.run_id;
    j["backend"] = Json{{"kind", header.backend.kind}, {"label", header.backend.label}};
    j["dataset_seed"] = header.dataset_seed;
    j["task_count"] = header.task_count;
    j["step_limit"] = header.step_limit;
    if (!canonical) {
        j["started_at"] = header.started_at;
    }
    if (header.fault_profile) {
        j["fault_profile"] = fault_profile_to_json(*header.fault_profile);
    }
    return j;
}

RunHeader run_header_from_json(const Json& j) {
    if (j.value("format_version", 0) != kTraceFormatVersion) {
        throw std::runtime_error("run header: unsupported format_version");
    }
    RunHeader header;
    header.run_id = j.at("run_id").get<std::string>();
    header.backend.kind = j.at("backend").at("kind").get<std::string>();
    header.backend.label = j.at("backend").at("label").get<std::string>();
    header.dataset_seed = j.at("dataset_seed").get<uint64_t>();
    header.task_count = j.at("task_count").get<uint64_t>();
    header.step_limit = j.at("step_limit").get<int>();
    if (j.contains("started_at")) {
        header.started_at = j.at("started_at").get<std::string>();
    }
    if (j.contains("fault_profile")) {
        header.fault_profile = fault_profile_from_json(j.at("fault_profile"));
    }
    return header;
}

std::string now_rfc3339_utc() {
    std::time_t now = std::time(nullptr);
    std::tm parts{};
    gmtime_r(&now, &parts);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &parts);
    return buf;
}

TraceWriter::TraceWriter(std::ostream& out, const RunHeader& header) : out_(out) {
    out_ << run_header_to_json(header).dump() << "\n";
}

void TraceWriter::write_task(const std::vector<StepRecord>& records) {
    for (const StepRecord& record : records) {
        int& next = next_step_.try_emplace(record.task_id, 0).first->second;
        if (record.step_index != next) {
            throw std::logic_error("trace writer: step_index " +
                                   std::to_string(record.step_index) +
                                   " out of order for task " + record.task_id +
                                   " (expected " + std::to_string(next) + ")");
        }
        ++next;
        out_ << step_record_to_json(record).dump() << "\n";
    }
}

TraceFile read_trace(std::istream& in) {
    TraceFile file;
    file.header = read_header_line(in, kTraceFormatName, "trace file");
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        StepRecord record =
            step_record_from_json(parse_line_or_throw(line, "trace file", line_no));
        file.by_task[record.task_id].push_back(record);
        file.records.push_back(std::move(record));
    }
    return file;
}

TraceFile load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    return read_trace(in);
}

void write_results(std::ostream& out, const RunHeader& header,
                   const std::vector<TaskResult>& results) {
    out << run_header_to_json(header, false, kResultsFormatName).dump() << "\n";
    for (const TaskResult& result : results) {
        out << task_result_to_json(result).dump() << "\n";
    }
}

ResultsFile read_results(std::istream& in) {
    ResultsFile file;
    file.header = read_header_line(in, kResultsFormatName, "results file");
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        file.results.push_back(
            task_result_from_json(parse_line_or_throw(line, "results file", line_no)));
    }
    return file;
}

ResultsFile load_results_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open results file: " + path);
    return read_results(in);
}

std::string canonical_trace_bytes(const RunHeader& header,
                                  const std::vector<std::vector<StepRecord>>& traces) {
    std::ostringstream out;
    out << run_header_to_json(header, true).dump() << "\n";
    for (const auto& task_records : traces) {
        for (const StepRecord& record : task_records) {
            out << step_record_to_json(record, true).dump() << "\n";
        }
    }
    return out.str();
}

std::string canonical_results_bytes(const RunHeader& header,
                                    const std::vector<TaskResult>& results) {
    std::ostringstream out;
    out << run_header_to_json(header, true, kResultsFormatName).dump() << "\n";
    for (const TaskResult& result : results) {
        out << task_result_to_json(result, true).dump() << "\n";
    }
    return out.str();
}

void write_run_archive(const std::string& directory, const RunHeader& header,
                       const EvaluationRun& run) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    auto open = [&](const char* name) {
        std::ofstream out(fs::path(directory) / name, std::ios::binary);
        if (!out) {
            throw std::runtime_error(std::string("cannot write archive file: ") + name);
        }
        return out;
    };
    {
        std::ofstream out = open(kTraceFileName);
        TraceWriter writer(out, header);
        for (const auto& task_records : run.traces) writer.write_task(task_records);
    }
    {
        std::ofstream out = open(kResultsFileName);
        write_results(out, header, run.results);
    }
    {
        std::ofstream out = open(kSummaryFileName);
        out << summary_to_json(run.summary).dump(2) << "\n";
    }
    {
        std::ofstream out = open(kMatrixVisionFileName);
        out << render_matrix_csv(run.summary, Modality::Vision);
    }
    {
        std::ofstream out = open(kMatrixTextFileName);
        out << render_matrix_csv(run.summary, Modality::Text);
    }
    {
        std::ofstream out = open(kReportFileName);
        out << render_report_markdown(run.summary);
    }
}

} // namespace faultbench
