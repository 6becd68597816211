#include "faultbench/classifier.hpp"

#include <stdexcept>

namespace faultbench {
namespace {

bool stage_already_completed(const GoldenPlan& plan, size_t stages_completed,
                             ToolKind kind) {
    for (size_t i = 0; i < stages_completed && i < plan.stages.size(); ++i) {
        if (plan.stages[i].tool == kind) return true;
    }
    return false;
}

std::optional<StepDeviation> pending_stage_omission(const GoldenPlan& plan,
                                                    size_t stages_completed,
                                                    AgentRole agent,
                                                    Mechanism mechanism) {
    if (stages_completed >= plan.stages.size()) return std::nullopt;
    ToolKind pending = plan.stages[stages_completed].tool;
    if (owner_of(pending) != agent) return std::nullopt;
    return StepDeviation{ErrorCategory{pending, ErrorType::NotInitialized}, mechanism};
}

} // namespace

StepClassification classify_step(const StepRecord& record, const GoldenPlan& plan,
                                 size_t stages_completed) {
    StepClassification out;
    const bool plan_pending = stages_completed < plan.stages.size();

    switch (record.action) {
        case ActionKind::Text:
        case ActionKind::FinalDecision:
            return out;

        case ActionKind::Handoff:
            out.deviation = pending_stage_omission(plan, stages_completed, record.agent,
                                                   Mechanism::Omission);
            return out;

        case ActionKind::ForcedTermination:
            if (plan_pending) {
                out.deviation = StepDeviation{
                    ErrorCategory{plan.stages[stages_completed].tool,
                                  ErrorType::NotInitialized},
                    Mechanism::LoopTermination};
            }
            return out;

        case ActionKind::ToolCall:
            break;
    }

    if (!record.dispatch) {
        throw std::logic_error("classify_step: tool call record without dispatch");
    }
    auto called_kind = tool_kind_from_registered_name(record.tool_name);
    switch (*record.dispatch) {
        case DispatchKind::RejectedName:
            out.deviation = pending_stage_omission(plan, stages_completed, record.agent,
                                                   Mechanism::BadName);
            return out;
        case DispatchKind::RejectedStructure:
            if (called_kind) {
                out.deviation = StepDeviation{
                    ErrorCategory{*called_kind, ErrorType::NotInitialized},
                    Mechanism::BadStructure};
            }
            return out;
        case DispatchKind::RejectedValue:
            if (called_kind) {
                out.deviation = StepDeviation{
                    ErrorCategory{*called_kind, ErrorType::ArgsMismatch},
                    Mechanism::BadValue};
            }
            return out;
        case DispatchKind::RuntimeError:
            if (called_kind) {
                out.deviation = StepDeviation{
                    ErrorCategory{*called_kind, ErrorType::Error}, Mechanism::Runtime};
            }
            return out;
        case DispatchKind::Ok:
            break;
    }

    if (!called_kind) {
        throw std::logic_error("classify_step: OK dispatch for unregistered tool name");
    }
    if (plan_pending && plan.stages[stages_completed].tool == *called_kind) {
        out.advanced = true;
        const Json& expected = plan.stages[stages_completed].expected_output.payload;
        if (!record.tool_output || *record.tool_output != expected) {
            out.deviation = StepDeviation{
                ErrorCategory{*called_kind, ErrorType::ResultMismatch},
                Mechanism::OutputDivergence};
        }
        return out;
    }
    if (stage_already_completed(plan, stages_completed, *called_kind)) {
        return out;  // benign repeat of finished work
    }
    out.deviation = pending_stage_omission(plan, stages_completed, record.agent,
                                           Mechanism::Omission);
    return out;
}

size_t classify_trace(std::vector<StepRecord>& records, const GoldenPlan& plan) {
    size_t stages_completed = 0;
    for (auto& record : records) {
        StepClassification step = classify_step(record, plan, stages_completed);
        record.deviation = step.deviation;
        if (step.advanced) ++stages_completed;
    }
    return stages_completed;
}

Attribution attribute_task_failure(const std::vector<StepRecord>& records,
                                   const GoldenPlan& plan, const Outcome& outcome) {
    if (outcome.success) {
        throw std::logic_error("attribute_task_failure: outcome is a success");
    }
    if (outcome.infrastructure) {
        return Attribution{kInfrastructureLabel, std::nullopt};
    }
    for (const auto& record : records) {
        if (record.deviation) {
            return Attribution{category_code(record.deviation->category),
                               record.deviation->mechanism};
        }
    }
    if (outcome.forced_termination) {
        size_t stages_completed = 0;
        for (const auto& record : records) {
            if (classify_step(record, plan, stages_completed).advanced) {
                ++stages_completed;
            }
        }
        if (stages_completed < plan.stages.size()) {
            return Attribution{
                category_code(ErrorCategory{plan.stages[stages_completed].tool,
                                            ErrorType::NotInitialized}),
                Mechanism::LoopTermination};
        }
    }
    return Attribution{kOtherLabel, std::nullopt};
}

} // namespace faultbench
