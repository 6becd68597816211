#pragma once

#include "faultbench/classifier.hpp"
#include "faultbench/scenario.hpp"
#include "faultbench/trace.hpp"
#include "faultbench/trace_io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace faultbench {

/// Judgment for one task recomputed from its recorded steps alone.
struct OfflineTaskClassification {
    std::string task_id;
    bool success = false;
    bool forced_termination = false;
    Decision decision = Decision::None;
    std::optional<std::string> error_code;
    std::optional<std::string> error_mechanism;
};

/// Rebuilds a task's outcome with no live policy: applies the recorded
/// update acknowledgements to the stored snapshot, reads the final
/// decision token, honors the forced-termination marker, then attributes
/// the failure exactly as the live harness would.
OfflineTaskClassification classify_offline(const DatasetTask& task,
                                           const std::vector<StepRecord>& records);

struct OfflineComparison {
    size_t tasks = 0;
    size_t matches = 0;
    std::vector<std::string> mismatched_task_ids;
};

struct OfflineReport {
    std::vector<OfflineTaskClassification> classifications;  // dataset order
    std::optional<OfflineComparison> comparison;             // when stored results given
};

/// Classifies every task of the dataset from the trace. The trace must
/// come from this dataset (seeds must agree; std::runtime_error
/// otherwise). When stored results are supplied they are compared label
/// for label; INFRASTRUCTURE verdicts are taken from the stored results,
/// since a trace cannot show a backend that never answered.
OfflineReport classify_trace_file(const Dataset& dataset, const TraceFile& trace,
                                  const std::optional<ResultsFile>& stored);

} // namespace faultbench
