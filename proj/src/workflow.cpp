#include "faultbench/workflow.hpp"

#include "faultbench/classifier.hpp"
#include "faultbench/evalmetrics.hpp"

#include <chrono>
#include <stdexcept>

namespace faultbench {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

AgentRole next_agent(AgentRole role) {
    switch (role) {
        case AgentRole::Email: return AgentRole::DataEng;
        case AgentRole::DataEng: return AgentRole::Recon;
        case AgentRole::Recon: return AgentRole::Recon;
    }
    return AgentRole::Recon;
}

TaskInstance effective_instance(const DatasetTask& task, const TaskHooks& hooks) {
    TaskInstance instance = task.instance;
    if (instance.document) {
        if (hooks.corrupt_document) {
            *instance.document =
                corrupt_document_amount(*instance.document, hooks.corruption_seed);
        }
        if (hooks.break_document_checksum) {
            *instance.document = break_checksum(*instance.document);
        }
    }
    return instance;
}

/// Rewrites the target invoice's amount in a query payload; the same
/// seed always produces the same wrong amount, so repeated lookups stay
/// consistent with each other.
void corrupt_query_payload(Json& payload, const std::string& target_invoice_id,
                           uint64_t seed) {
    if (!payload.is_array()) return;
    for (auto& record : payload) {
        if (!record.is_object() || record.value("invoice_id", "") != target_invoice_id) {
            continue;
        }
        if (!record.contains("amount_minor")) continue;
        record["amount_minor"] =
            alter_one_digit(record.at("amount_minor").get<int64_t>(), seed);
    }
}

TranscriptEvent event_from_record(const StepRecord& record) {
    TranscriptEvent event;
    event.agent = record.agent;
    event.action = record.action;
    event.tool_name = record.tool_name;
    event.raw_arguments = record.raw_arguments;
    event.dispatch = record.dispatch;
    event.dispatch_detail = record.dispatch_detail;
    event.tool_output = record.tool_output;
    return event;
}

} // namespace

Decision decision_for_status(InvoiceStatus status) {
    switch (status) {
        case InvoiceStatus::Reconciled: return Decision::Reconciled;
        case InvoiceStatus::Disputed: return Decision::Disputed;
        case InvoiceStatus::Pending: return Decision::None;
    }
    return Decision::None;
}

TaskExecution run_task(const DatasetTask& task, PolicyBackend& policy, int step_limit,
                       const TaskHooks& hooks) {
    if (step_limit < 1) {
        throw std::invalid_argument("run_task: step limit must be at least 1");
    }
    static const ToolRegistry registry = ToolRegistry::standard();
    const auto task_start = Clock::now();

    TaskExecution execution;
    TaskInstance instance = effective_instance(task, hooks);
    InvoiceStore store = InvoiceStore::from_snapshot(task.instance.store_snapshot);
    if (hooks.raise_on_query) {
        inject_tool_fault(store, task.truth.target_invoice_id, FaultFlag::RaiseOnQuery);
    }
    if (hooks.raise_on_update) {
        inject_tool_fault(store, task.truth.target_invoice_id, FaultFlag::RaiseOnUpdate);
    }

    std::vector<TranscriptEvent> transcript;
    AgentRole active = AgentRole::Email;
    Decision decision = Decision::None;
    bool decided = false;
    bool ended_by_handoff = false;
    Outcome& outcome = execution.outcome;

    int step_index = 0;
    while (step_index < step_limit) {
        const auto step_start = Clock::now();
        ConversationState state{instance, active, transcript};
        AgentAction action;
        try {
            action = policy.next_action(state);
        } catch (const InfrastructureError& error) {
            outcome.infrastructure = true;
            outcome.infrastructure_detail = error.what();
            break;
        }

        StepRecord record;
        record.task_id = task.instance.task_id;
        record.step_index = step_index;
        record.agent = active;
        record.action = action.kind;
        record.raw_arguments = action.raw_arguments;

        switch (action.kind) {
            case ActionKind::ToolCall: {
                record.tool_name = action.tool_name;
                ValidationResult validation = validate_call(
                    registry, RawToolCall{action.tool_name, action.raw_arguments});
                if (auto* failure = std::get_if<ValidationFailure>(&validation)) {
                    if (failure->kind == ValidationFailure::Kind::UnknownName) {
                        record.dispatch = DispatchKind::RejectedName;
                        record.dispatch_detail = failure->detail;
                    } else {
                        record.dispatch = DispatchKind::RejectedStructure;
                        record.dispatch_detail =
                            std::string(structure_issue_code(failure->issue)) + ": " +
                            failure->detail;
                    }
                } else {
                    auto& call = std::get<ValidatedCall>(validation);
                    if (owner_of(call.schema->kind) != active) {
                        record.dispatch = DispatchKind::RejectedName;
                        record.dispatch_detail =
                            "tool not available to this agent: " + action.tool_name;
                    } else {
                        DispatchResult dispatched = dispatch_call(call, store);
                        if (auto* output = std::get_if<ToolOutput>(&dispatched)) {
                            if (hooks.corrupt_query_output &&
                                output->tool == ToolKind::DbQuery) {
                                corrupt_query_payload(output->payload,
                                                      task.truth.target_invoice_id,
                                                      hooks.corruption_seed);
                            }
                            record.dispatch = DispatchKind::Ok;
                            record.tool_output = output->payload;
                        } else if (auto* rejection =
                                       std::get_if<ValueRejection>(&dispatched)) {
                            record.dispatch = DispatchKind::RejectedValue;
                            record.dispatch_detail = rejection->message;
                        } else {
                            record.dispatch = DispatchKind::RuntimeError;
                            record.dispatch_detail =
                                std::get<RuntimeFault>(dispatched).message;
                        }
                    }
                }
                break;
            }
            case ActionKind::Text:
                break;
            case ActionKind::Handoff:
                break;
            case ActionKind::FinalDecision:
                if (active != AgentRole::Recon) {
                    record.action = ActionKind::Text;  // only RECON may decide
                } else {
                    auto parsed = decision_from_code(action.raw_arguments);
                    decision = parsed.value_or(Decision::None);
                    decided = true;
                }
                break;
            case ActionKind::ForcedTermination:
                record.action = ActionKind::Text;  // reserved for the harness
                record.raw_arguments = "(invalid action)";
                break;
        }

        record.wall_ms = ms_since(step_start);
        transcript.push_back(event_from_record(record));
        execution.records.push_back(std::move(record));
        ++step_index;

        if (decided) break;
        if (execution.records.back().action == ActionKind::Handoff) {
            if (active == AgentRole::Recon) {
                ended_by_handoff = true;
                break;
            }
            active = next_agent(active);
        }
    }

    if (!decided && !ended_by_handoff && !outcome.infrastructure &&
        step_index >= step_limit) {
        StepRecord marker;
        marker.task_id = task.instance.task_id;
        marker.step_index = step_limit;
        marker.agent = active;
        marker.action = ActionKind::ForcedTermination;
        execution.records.push_back(std::move(marker));
        outcome.forced_termination = true;
    }

    classify_trace(execution.records, task.truth.expected_plan);

    outcome.decision = decision;
    outcome.steps = static_cast<int>(execution.records.size()) -
                    (outcome.forced_termination ? 1 : 0);
    if (outcome.infrastructure) {
        outcome.steps += 1;  // the attempt that failed to produce an action
    }
    outcome.store_matches_oracle =
        store.same_records(oracle_final_state(task.instance, task.truth));
    const Decision expected = decision_for_status(task.truth.expected_status);
    outcome.success = !outcome.forced_termination && !outcome.infrastructure &&
                      outcome.store_matches_oracle && decision == expected;
    if (task.instance.modality == Modality::Vision) {
        double f1 = 0.0;
        for (auto it = execution.records.rbegin(); it != execution.records.rend(); ++it) {
            if (it->action == ActionKind::ToolCall &&
                it->tool_name == registered_tool_name(ToolKind::Ocr) &&
                it->dispatch == DispatchKind::Ok && it->tool_output) {
                f1 = ocr_field_f1(ocr_fields_from_payload(*it->tool_output),
                                  task.truth.expected_fields);
                break;
            }
        }
        outcome.ocr_f1 = f1;
    }
    outcome.wall_ms = ms_since(task_start);

    TaskResult& result = execution.result;
    result.task_id = task.instance.task_id;
    result.modality = task.instance.modality;
    result.variant = task.truth.variant;
    result.success = outcome.success;
    result.steps = outcome.steps;
    result.wall_ms = outcome.wall_ms;
    result.ocr_f1 = outcome.ocr_f1;
    result.decision = outcome.decision;
    result.forced_termination = outcome.forced_termination;
    if (!outcome.success) {
        Attribution attribution = attribute_task_failure(
            execution.records, task.truth.expected_plan, outcome);
        result.error_code = attribution.code;
        if (attribution.mechanism) {
            result.error_mechanism = std::string(mechanism_code(*attribution.mechanism));
        }
    }
    return execution;
}

} // namespace faultbench
