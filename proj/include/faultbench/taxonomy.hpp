#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace faultbench {

/// The three instrumented tool categories.
enum class ToolKind { Ocr, DbQuery, DbUpdate };

inline constexpr std::array<ToolKind, 3> kAllToolKinds = {
    ToolKind::Ocr, ToolKind::DbQuery, ToolKind::DbUpdate};

/// The four error types crossed with ToolKind to form the 12 categories.
enum class ErrorType { NotInitialized, ArgsMismatch, Error, ResultMismatch };

inline constexpr std::array<ErrorType, 4> kAllErrorTypes = {
    ErrorType::NotInitialized, ErrorType::ArgsMismatch, ErrorType::Error,
    ErrorType::ResultMismatch};

/// Pipeline roles. EMAIL owns the OCR tool, DATA_ENG owns both database
/// tools, RECON owns none.
enum class AgentRole { Email, DataEng, Recon };

std::string_view tool_kind_code(ToolKind tool);           // "OCR", "DB_QUERY", "DB_UPDATE"
std::string_view registered_tool_name(ToolKind tool);     // "ocr_tool", ...
std::optional<ToolKind> tool_kind_from_registered_name(std::string_view name);
std::string_view error_type_code(ErrorType type);         // "NOT_INITIALIZED", ...
std::string_view agent_role_code(AgentRole role);         // "EMAIL", "DATA_ENG", "RECON"
std::optional<AgentRole> agent_role_from_code(std::string_view code);
AgentRole owner_of(ToolKind tool);

/// One cell of the 12-category error taxonomy.
struct ErrorCategory {
    ToolKind tool;
    ErrorType error_type;

    auto operator<=>(const ErrorCategory&) const = default;
};

/// Canonical code string, e.g. DB_UPDATE_TOOL_NOT_INITIALIZED.
std::string category_code(ErrorCategory category);

/// Inverse of category_code; empty optional for anything that is not one
/// of the 12 canonical codes.
std::optional<ErrorCategory> parse_category_code(std::string_view code);

/// All 12 cells in a fixed order (tool-major, matching the code listing).
std::array<ErrorCategory, 12> all_categories();

/// How a deviation was produced. Each mechanism maps to exactly one
/// ErrorType (see error_type_for).
enum class Mechanism {
    Omission,
    BadName,
    BadStructure,
    BadValue,
    Runtime,
    OutputDivergence,
    LoopTermination,
};

inline constexpr std::array<Mechanism, 7> kAllMechanisms = {
    Mechanism::Omission,      Mechanism::BadName,
    Mechanism::BadStructure,  Mechanism::BadValue,
    Mechanism::Runtime,       Mechanism::OutputDivergence,
    Mechanism::LoopTermination,
};

ErrorType error_type_for(Mechanism mechanism);
std::string_view mechanism_code(Mechanism mechanism);
std::optional<Mechanism> mechanism_from_code(std::string_view code);

/// One observed departure from the golden plan.
struct Deviation {
    ErrorCategory category;
    Mechanism mechanism;
    int step_index = 0;
};

/// Builds a Deviation whose error type is forced by the mechanism, so the
/// mechanism/type coherence invariant holds by construction.
Deviation make_deviation(ToolKind tool, Mechanism mechanism, int step_index);

} // namespace faultbench
