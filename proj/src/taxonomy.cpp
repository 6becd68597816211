#include "faultbench/taxonomy.hpp"

namespace faultbench {

std::string_view tool_kind_code(ToolKind tool) {
    switch (tool) {
    case ToolKind::Ocr:      return "OCR";
    case ToolKind::DbQuery:  return "DB_QUERY";
    case ToolKind::DbUpdate: return "DB_UPDATE";
    }
    return "";
}

std::string_view registered_tool_name(ToolKind tool) {
    switch (tool) {
    case ToolKind::Ocr:      return "ocr_tool";
    case ToolKind::DbQuery:  return "db_query_tool";
    case ToolKind::DbUpdate: return "db_update_tool";
    }
    return "";
}

std::optional<ToolKind> tool_kind_from_registered_name(std::string_view name) {
    for (ToolKind tool : kAllToolKinds) {
        if (registered_tool_name(tool) == name) return tool;
    }
    return std::nullopt;
}

std::string_view error_type_code(ErrorType type) {
    switch (type) {
    case ErrorType::NotInitialized: return "NOT_INITIALIZED";
    case ErrorType::ArgsMismatch:   return "ARGS_MISMATCH";
    case ErrorType::Error:          return "ERROR";
    case ErrorType::ResultMismatch: return "RESULT_MISMATCH";
    }
    return "";
}

std::string_view agent_role_code(AgentRole role) {
    switch (role) {
    case AgentRole::Email:   return "EMAIL";
    case AgentRole::DataEng: return "DATA_ENG";
    case AgentRole::Recon:   return "RECON";
    }
    return "";
}

std::optional<AgentRole> agent_role_from_code(std::string_view code) {
    if (code == "EMAIL") return AgentRole::Email;
    if (code == "DATA_ENG") return AgentRole::DataEng;
    if (code == "RECON") return AgentRole::Recon;
    return std::nullopt;
}

AgentRole owner_of(ToolKind tool) {
    return tool == ToolKind::Ocr ? AgentRole::Email : AgentRole::DataEng;
}

std::string category_code(ErrorCategory category) {
    std::string code(tool_kind_code(category.tool));
    code += "_TOOL_";
    code += error_type_code(category.error_type);
    return code;
}

std::optional<ErrorCategory> parse_category_code(std::string_view code) {
    for (ToolKind tool : kAllToolKinds) {
        for (ErrorType type : kAllErrorTypes) {
            ErrorCategory candidate{tool, type};
            if (category_code(candidate) == code) return candidate;
        }
    }
    return std::nullopt;
}

std::array<ErrorCategory, 12> all_categories() {
    std::array<ErrorCategory, 12> cells{};
    size_t i = 0;
    for (ToolKind tool : kAllToolKinds) {
        for (ErrorType type : kAllErrorTypes) {
            cells[i++] = ErrorCategory{tool, type};
        }
    }
    return cells;
}

ErrorType error_type_for(Mechanism mechanism) {
    switch (mechanism) {
    case Mechanism::Omission:
    case Mechanism::BadName:
    case Mechanism::BadStructure:
    case Mechanism::LoopTermination:
        return ErrorType::NotInitialized;
    case Mechanism::BadValue:
        return ErrorType::ArgsMismatch;
    case Mechanism::Runtime:
        return ErrorType::Error;
    case Mechanism::OutputDivergence:
        return ErrorType::ResultMismatch;
    }
    return ErrorType::NotInitialized;
}

std::string_view mechanism_code(Mechanism mechanism) {
    switch (mechanism) {
    case Mechanism::Omission:         return "OMISSION";
    case Mechanism::BadName:          return "BAD_NAME";
    case Mechanism::BadStructure:     return "BAD_STRUCTURE";
    case Mechanism::BadValue:         return "BAD_VALUE";
    case Mechanism::Runtime:          return "RUNTIME";
    case Mechanism::OutputDivergence: return "OUTPUT_DIVERGENCE";
    case Mechanism::LoopTermination:  return "LOOP_TERMINATION";
    }
    return "";
}

std::optional<Mechanism> mechanism_from_code(std::string_view code) {
    for (Mechanism m : kAllMechanisms) {
        if (mechanism_code(m) == code) return m;
    }
    return std::nullopt;
}

Deviation make_deviation(ToolKind tool, Mechanism mechanism, int step_index) {
    return Deviation{ErrorCategory{tool, error_type_for(mechanism)}, mechanism,
                     step_index};
}

} // namespace faultbench
