#pragma once

#include "faultbench/evalmetrics.hpp"
#include "faultbench/fault_profile.hpp"
#include "faultbench/trace.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace faultbench {

/// First line of every trace/results file.
struct RunHeader {
    std::string run_id;
    BackendDescriptor backend;
    uint64_t dataset_seed = 0;
    uint64_t task_count = 0;
    int step_limit = 25;
    std::string started_at;  // UTC wall time; absent from canonical form
    /// Recorded for fault runs so a replay can re-arm the same
    /// environment hooks.
    std::optional<FaultProfile> fault_profile;
};

inline constexpr const char* kTraceFormatName = "faultbench-trace";
inline constexpr const char* kResultsFormatName = "faultbench-results";
inline constexpr int kTraceFormatVersion = 1;

RunHeader make_run_header(const RunSummary& summary,
                          std::optional<FaultProfile> fault_profile);

Json run_header_to_json(const RunHeader& header, bool canonical = false,
                        const char* format_name = kTraceFormatName);
RunHeader run_header_from_json(const Json& j);

std::string now_rfc3339_utc();

/// Streams a trace file: the header line first, then records grouped by
/// task. Each task's step_index sequence must start at 0 and increase by
/// exactly 1 (std::logic_error otherwise).
class TraceWriter {
public:
    TraceWriter(std::ostream& out, const RunHeader& header);
    void write_task(const std::vector<StepRecord>& records);

private:
    std::ostream& out_;
    std::map<std::string, int> next_step_;
};

struct TraceFile {
    RunHeader header;
    std::vector<StepRecord> records;  // file order
    std::map<std::string, std::vector<StepRecord>> by_task;
};

/// Throws std::runtime_error on a missing header or malformed lines.
TraceFile read_trace(std::istream& in);
TraceFile load_trace_file(const std::string& path);

struct ResultsFile {
    RunHeader header;
    std::vector<TaskResult> results;  // file order
};

void write_results(std::ostream& out, const RunHeader& header,
                   const std::vector<TaskResult>& results);
ResultsFile read_results(std::istream& in);
ResultsFile load_results_file(const std::string& path);

/// Timing-free byte forms: equal behavior gives equal bytes, whatever
/// the machine speed or worker count.
std::string canonical_trace_bytes(const RunHeader& header,
                                  const std::vector<std::vector<StepRecord>>& traces);
std::string canonical_results_bytes(const RunHeader& header,
                                    const std::vector<TaskResult>& results);

/// File names inside a run archive directory.
inline constexpr const char* kTraceFileName = "trace.jsonl";
inline constexpr const char* kResultsFileName = "results.jsonl";
inline constexpr const char* kSummaryFileName = "summary.json";
inline constexpr const char* kMatrixVisionFileName = "matrix_vision.csv";
inline constexpr const char* kMatrixTextFileName = "matrix_text.csv";
inline constexpr const char* kReportFileName = "report.md";

/// Writes the six run artifacts into `directory` (created if needed):
/// trace.jsonl, results.jsonl, summary.json, both matrix CSVs, report.md.
void write_run_archive(const std::string& directory, const RunHeader& header,
                       const EvaluationRun& run);

} // namespace faultbench
