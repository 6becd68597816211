#include "faultbench/offline_classify.hpp"

#include "faultbench/workflow.hpp"

#include <map>
#include <stdexcept>

namespace faultbench {

OfflineTaskClassification classify_offline(const DatasetTask& task,
                                           const std::vector<StepRecord>& records) {
    std::vector<StepRecord> labeled = records;
    classify_trace(labeled, task.truth.expected_plan);

    InvoiceStore store = InvoiceStore::from_snapshot(task.instance.store_snapshot);
    Decision decision = Decision::None;
    bool forced = false;
    for (const StepRecord& record : labeled) {
        if (record.action == ActionKind::ForcedTermination) {
            forced = true;
            continue;
        }
        if (record.action == ActionKind::FinalDecision) {
            decision = decision_from_code(record.raw_arguments).value_or(Decision::None);
            continue;
        }
        // Acks describe exactly what the tool wrote, so replaying them
        // reconstructs the final store.
        if (record.action == ActionKind::ToolCall &&
            record.tool_name == registered_tool_name(ToolKind::DbUpdate) &&
            record.dispatch == DispatchKind::Ok && record.tool_output) {
            const Json& ack = *record.tool_output;
            auto status = invoice_status_from_code(ack.value("new_status", ""));
            if (status) {
                store.apply_update(ack.value("invoice_id", ""), *status, std::nullopt);
            }
        }
    }

    Outcome outcome;
    outcome.forced_termination = forced;
    outcome.decision = decision;
    outcome.store_matches_oracle =
        store.same_records(oracle_final_state(task.instance, task.truth));
    outcome.success = !forced && outcome.store_matches_oracle &&
                      decision == decision_for_status(task.truth.expected_status);

    OfflineTaskClassification classification;
    classification.task_id = task.instance.task_id;
    classification.success = outcome.success;
    classification.forced_termination = forced;
    classification.decision = decision;
    if (!outcome.success) {
        Attribution attribution =
            attribute_task_failure(labeled, task.truth.expected_plan, outcome);
        classification.error_code = attribution.code;
        if (attribution.mechanism) {
            classification.error_mechanism =
                std::string(mechanism_code(*attribution.mechanism));
        }
    }
    return classification;
}

OfflineReport classify_trace_file(const Dataset& dataset, const TraceFile& trace,
                                  const std::optional<ResultsFile>& stored) {
    if (trace.header.dataset_seed != dataset.seed) {
        throw std::runtime_error(
            "offline classify: trace was recorded against a different dataset seed");
    }
    std::map<std::string, const TaskResult*> stored_by_task;
    if (stored) {
        for (const TaskResult& result : stored->results) {
            stored_by_task[result.task_id] = &result;
        }
    }

    OfflineReport report;
    if (stored) report.comparison = OfflineComparison{};
    static const std::vector<StepRecord> kNoRecords;
    for (const DatasetTask& task : dataset.tasks) {
        auto it = trace.by_task.find(task.instance.task_id);
        const auto& records = (it == trace.by_task.end()) ? kNoRecords : it->second;

        const TaskResult* previous = nullptr;
        if (stored) {
            auto hit = stored_by_task.find(task.instance.task_id);
            if (hit != stored_by_task.end()) previous = hit->second;
        }

        OfflineTaskClassification classification;
        if (previous && previous->error_code == kInfrastructureLabel) {
            // The backend never answered; the trace alone cannot show that.
            classification.task_id = task.instance.task_id;
            classification.success = false;
            classification.forced_termination = previous->forced_termination;
            classification.decision = previous->decision;
            classification.error_code = kInfrastructureLabel;
        } else {
            classification = classify_offline(task, records);
        }

        if (report.comparison && previous) {
            ++report.comparison->tasks;
            const bool match = classification.success == previous->success &&
                               classification.error_code == previous->error_code &&
                               classification.error_mechanism == previous->error_mechanism;
            if (match) {
                ++report.comparison->matches;
            } else {
                report.comparison->mismatched_task_ids.push_back(task.instance.task_id);
            }
        }
        report.classifications.push_back(std::move(classification));
    }
    return report;
}

} // namespace faultbench
