#pragma once

#include "faultbench/jsonio.hpp"
#include "faultbench/scenario.hpp"
#include "faultbench/taxonomy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace faultbench {

/// What an agent did at one step of a workflow run.
enum class ActionKind {
    ToolCall,
    Text,
    Handoff,
    FinalDecision,
    ForcedTermination,
};

/// How the harness disposed of a tool call.
enum class DispatchKind {
    Ok,
    RejectedName,       // tool name not available to the acting agent
    RejectedStructure,  // arguments failed schema validation
    RejectedValue,      // well-formed arguments the tool refused
    RuntimeError,       // tool raised while executing
};

enum class Decision { Reconciled, Disputed, None };

std::string_view action_kind_code(ActionKind kind);
std::string_view dispatch_kind_code(DispatchKind kind);
std::string_view decision_code(Decision decision);
std::optional<ActionKind> action_kind_from_code(std::string_view code);
std::optional<DispatchKind> dispatch_kind_from_code(std::string_view code);
std::optional<Decision> decision_from_code(std::string_view code);

/// Failure labels that sit outside the 12-category grid.
inline constexpr const char* kOtherLabel = "OTHER";
inline constexpr const char* kInfrastructureLabel = "INFRASTRUCTURE";

/// Per-step deviation annotation: which category the step exhibits and
/// through which mechanism.
struct StepDeviation {
    ErrorCategory category;
    Mechanism mechanism = Mechanism::Omission;
    bool operator==(const StepDeviation&) const = default;
};

/// One line of a run trace. raw_arguments holds the verbatim argument
/// string for tool calls, the prose for TEXT steps, and the decision
/// token for FINAL_DECISION steps.
struct StepRecord {
    std::string task_id;
    int step_index = 0;  // 0-based, monotonic within a task
    AgentRole agent = AgentRole::Email;
    ActionKind action = ActionKind::Text;
    std::string tool_name;
    std::string raw_arguments;
    std::optional<DispatchKind> dispatch;
    std::string dispatch_detail;
    std::optional<Json> tool_output;
    std::optional<StepDeviation> deviation;
    double wall_ms = 0.0;
};

/// canonical=true drops wall-clock fields so equal runs serialize to
/// equal bytes.
Json step_record_to_json(const StepRecord& record, bool canonical = false);
StepRecord step_record_from_json(const Json& j);

/// What the harness concluded after driving one task to completion.
struct Outcome {
    bool success = false;
    bool forced_termination = false;
    bool store_matches_oracle = false;
    Decision decision = Decision::None;
    int steps = 0;  // counted actions; the forced-termination marker is excluded
    double wall_ms = 0.0;
    std::optional<double> ocr_f1;  // vision tasks only
    bool infrastructure = false;
    std::string infrastructure_detail;
};

/// One line of results.jsonl: outcome plus the attributed failure label.
struct TaskResult {
    std::string task_id;
    Modality modality = Modality::Text;
    Variant variant = Variant::Match;
    bool success = false;
    int steps = 0;
    double wall_ms = 0.0;
    std::optional<double> ocr_f1;
    Decision decision = Decision::None;
    bool forced_termination = false;
    std::optional<std::string> error_code;       // category code, OTHER, or INFRASTRUCTURE
    std::optional<std::string> error_mechanism;  // mechanism code when attributable
};

Json task_result_to_json(const TaskResult& result, bool canonical = false);
TaskResult task_result_from_json(const Json& j);

} // namespace faultbench
