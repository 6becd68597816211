#pragma once

#include "faultbench/invoice.hpp"
#include "faultbench/jsonio.hpp"
#include "faultbench/ocr_codec.hpp"
#include "faultbench/taxonomy.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace faultbench {

enum class ParamKind { String, Integer, Enum };

struct ParamSpec {
    std::string name;
    ParamKind kind = ParamKind::String;
    bool required = true;
    std::vector<std::string> enum_values; // Enum kind only
};

struct ToolSchema {
    std::string name;
    ToolKind kind = ToolKind::Ocr;
    std::string description;
    std::vector<ParamSpec> parameters;
};

/// The fixed set of callable tools. Immutable after construction and safe
/// to share across workers.
class ToolRegistry {
public:
    /// ocr_tool, db_query_tool, db_update_tool with their schemas.
    static ToolRegistry standard();

    const ToolSchema* find(std::string_view name) const;
    const ToolSchema& schema_for(ToolKind kind) const;
    std::vector<const ToolSchema*> owned_by(AgentRole role) const;

    /// Machine-readable schema descriptor: consumed by the remote wire
    /// mapping and printed by the CLI.
    Json descriptor() const;

private:
    std::vector<ToolSchema> schemas_;
};

/// A tool call exactly as the policy emitted it.
struct RawToolCall {
    std::string name;
    std::string raw_arguments; // argument text, normally JSON
};

enum class StructureIssue { Unparseable, MissingRequired, UnknownField, WrongType };
std::string_view structure_issue_code(StructureIssue issue);

struct ValidatedCall {
    const ToolSchema* schema = nullptr;
    Json arguments; // JSON object with schema-conformant types

    std::string arg_string(const std::string& name) const;
    std::optional<std::string> arg_optional_string(const std::string& name) const;
};

struct ValidationFailure {
    enum class Kind { UnknownName, Structure };
    Kind kind = Kind::UnknownName;
    StructureIssue issue = StructureIssue::Unparseable; // Structure kind only
    std::string detail;
};

using ValidationResult = std::variant<ValidatedCall, ValidationFailure>;

/// Total over all raw calls: every input maps to exactly one of
/// ValidatedCall, UnknownName or Structure.
ValidationResult validate_call(const ToolRegistry& registry, const RawToolCall& call);

/// Output of a successful tool execution. payload shape per tool:
///   OCR     -> object of the five extracted fields (amount_minor integer)
///   QUERY   -> array of invoice record objects
///   UPDATE  -> {invoice_id, new_status}
struct ToolOutput {
    ToolKind tool = ToolKind::Ocr;
    Json payload;

    bool operator==(const ToolOutput&) const = default;
};

ToolOutput make_ocr_output(const FieldMap& fields);
ToolOutput make_query_output(const std::vector<InvoiceRecord>& records);
ToolOutput make_update_ack(const std::string& invoice_id, InvoiceStatus new_status);

Json invoice_record_to_json(const InvoiceRecord& record);
InvoiceRecord invoice_record_from_json(const Json& j);

/// Structurally valid call whose argument values the tool refuses
/// (unknown invoice id, unrecognizable document payload).
struct ValueRejection {
    std::string message;
};

/// Tool raised while executing (fault flag, checksum failure).
struct RuntimeFault {
    std::string message;
};

using DispatchResult = std::variant<ToolOutput, ValueRejection, RuntimeFault>;

/// Executes a validated call against the task's store. Rejections and
/// faults leave the store untouched.
DispatchResult dispatch_call(const ValidatedCall& call, InvoiceStore& store);

/// Pre-task hook arming a runtime fault on one invoice. Throws
/// std::invalid_argument for an unknown invoice_id.
void inject_tool_fault(InvoiceStore& store, const std::string& invoice_id,
                       FaultFlag flag);

} // namespace faultbench
