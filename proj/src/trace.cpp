#include "faultbench/trace.hpp"

#include <stdexcept>

namespace faultbench {

std::string_view action_kind_code(ActionKind kind) {
    switch (kind) {
        case ActionKind::ToolCall: return "TOOL_CALL";
        case ActionKind::Text: return "TEXT";
        case ActionKind::Handoff: return "HANDOFF";
        case ActionKind::FinalDecision: return "FINAL_DECISION";
        case ActionKind::ForcedTermination: return "FORCED_TERMINATION";
    }
    return "TEXT";
}

std::string_view dispatch_kind_code(DispatchKind kind) {
    switch (kind) {
        case DispatchKind::Ok: return "OK";
        case DispatchKind::RejectedName: return "REJECTED_NAME";
        case DispatchKind::RejectedStructure: return "REJECTED_STRUCTURE";
        case DispatchKind::RejectedValue: return "REJECTED_VALUE";
        case DispatchKind::RuntimeError: return "RUNTIME_ERROR";
    }
    return "OK";
}

std::string_view decision_code(Decision decision) {
    switch (decision) {
        case Decision::Reconciled: return "RECONCILED";
        case Decision::Disputed: return "DISPUTED";
        case Decision::None: return "NONE";
    }
    return "NONE";
}

std::optional<ActionKind> action_kind_from_code(std::string_view code) {
    if (code == "TOOL_CALL") return ActionKind::ToolCall;
    if (code == "TEXT") return ActionKind::Text;
    if (code == "HANDOFF") return ActionKind::Handoff;
    if (code == "FINAL_DECISION") return ActionKind::FinalDecision;
    if (code == "FORCED_TERMINATION") return ActionKind::ForcedTermination;
    return std::nullopt;
}

std::optional<DispatchKind> dispatch_kind_from_code(std::string_view code) {
    if (code == "OK") return DispatchKind::Ok;
    if (code == "REJECTED_NAME") return DispatchKind::RejectedName;
    if (code == "REJECTED_STRUCTURE") return DispatchKind::RejectedStructure;
    if (code == "REJECTED_VALUE") return DispatchKind::RejectedValue;
    if (code == "RUNTIME_ERROR") return DispatchKind::RuntimeError;
    return std::nullopt;
}

std::optional<Decision> decision_from_code(std::string_view code) {
    if (code == "RECONCILED") return Decision::Reconciled;
    if (code == "DISPUTED") return Decision::Disputed;
    if (code == "NONE") return Decision::None;
    return std::nullopt;
}

Json step_record_to_json(const StepRecord& record, bool canonical) {
    Json j;
    j["task_id"] = record.task_id;
    j["step_index"] = record.step_index;
    j["agent"] = std::string(agent_role_code(record.agent));
    j["action"] = std::string(action_kind_code(record.action));
    if (record.action == ActionKind::ToolCall) {
        j["tool_name"] = record.tool_name;
    }
    if (!record.raw_arguments.empty() || record.action == ActionKind::ToolCall) {
        j["raw_arguments"] = record.raw_arguments;
    }
    if (record.dispatch) {
        j["dispatch"] = std::string(dispatch_kind_code(*record.dispatch));
    }
    if (!record.dispatch_detail.empty()) {
        j["dispatch_detail"] = record.dispatch_detail;
    }
    if (record.tool_output) {
        j["tool_output"] = *record.tool_output;
    }
    if (record.deviation) {
        j["deviation"] = Json{
            {"category", category_code(record.deviation->category)},
            {"mechanism", std::string(mechanism_code(record.deviation->mechanism))},
        };
    }
    if (!canonical) {
        j["wall_ms"] = record.wall_ms;
    }
    return j;
}

StepRecord step_record_from_json(const Json& j) {
    StepRecord record;
    record.task_id = j.at("task_id").get<std::string>();
    record.step_index = j.at("step_index").get<int>();
    auto agent = agent_role_from_code(j.at("agent").get<std::string>());
    if (!agent) throw std::runtime_error("step record: bad agent code");
    record.agent = *agent;
    auto action = action_kind_from_code(j.at("action").get<std::string>());
    if (!action) throw std::runtime_error("step record: bad action code");
    record.action = *action;
    if (j.contains("tool_name")) record.tool_name = j.at("tool_name").get<std::string>();
    if (j.contains("raw_arguments")) {
        record.raw_arguments = j.at("raw_arguments").get<std::string>();
    }
    if (j.contains("dispatch")) {
        auto dispatch = dispatch_kind_from_code(j.at("dispatch").get<std::string>());
        if (!dispatch) throw std::runtime_error("step record: bad dispatch code");
        record.dispatch = *dispatch;
    }
    if (j.contains("dispatch_detail")) {
        record.dispatch_detail = j.at("dispatch_detail").get<std::string>();
    }
    if (j.contains("tool_output")) record.tool_output = j.at("tool_output");
    if (j.contains("deviation")) {
        const Json& d = j.at("deviation");
        auto category = parse_category_code(d.at("category").get<std::string>());
        auto mechanism = mechanism_from_code(d.at("mechanism").get<std::string>());
        if (!category || !mechanism) {
            throw std::runtime_error("step record: bad deviation label");
        }
        record.deviation = StepDeviation{*category, *mechanism};
    }
    if (j.contains("wall_ms")) record.wall_ms = j.at("wall_ms").get<double>();
    return record;
}

Json task_result_to_json(const TaskResult& result, bool canonical) {
    Json j;
    j["task_id"] = result.task_id;
    j["modality"] = std::string(modality_code(result.modality));
    j["variant"] = std::string(variant_code(result.variant));
    j["success"] = result.success;
    j["steps"] = result.steps;
    if (!canonical) {
        j["wall_ms"] = result.wall_ms;
    }
    if (result.ocr_f1) {
        j["ocr_f1"] = *result.ocr_f1;
    }
    j["decision"] = std::string(decision_code(result.decision));
    j["forced_termination"] = result.forced_termination;
    if (result.error_code) {
        j["error_code"] = *result.error_code;
    }
    if (result.error_mechanism) {
        j["error_mechanism"] = *result.error_mechanism;
    }
    return j;
}

TaskResult task_result_from_json(const Json& j) {
    TaskResult result;
    result.task_id = j.at("task_id").get<std::string>();
    auto modality = modality_from_code(j.at("modality").get<std::string>());
    auto variant = variant_from_code(j.at("variant").get<std::string>());
    if (!modality || !variant) throw std::runtime_error("task result: bad modality/variant");
    result.modality = *modality;
    result.variant = *variant;
    result.success = j.at("success").get<bool>();
    result.steps = j.at("steps").get<int>();
    if (j.contains("wall_ms")) result.wall_ms = j.at("wall_ms").get<double>();
    if (j.contains("ocr_f1")) result.ocr_f1 = j.at("ocr_f1").get<double>();
    auto decision = decision_from_code(j.at("decision").get<std::string>());
    if (!decision) throw std::runtime_error("task result: bad decision code");
    result.decision = *decision;
    result.forced_termination = j.at("forced_termination").get<bool>();
    if (j.contains("error_code")) {
        result.error_code = j.at("error_code").get<std::string>();
    }
    if (j.contains("error_mechanism")) {
        result.error_mechanism = j.at("error_mechanism").get<std::string>();
    }
    return result;
}

} // namespace faultbench
