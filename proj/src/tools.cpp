#include "faultbench/tools.hpp"

#include <algorithm>
#include <stdexcept>

namespace faultbench {
namespace {

const std::vector<std::string> kStatusValues = {"PENDING", "RECONCILED", "DISPUTED"};

bool value_matches_kind(const Json& value, const ParamSpec& spec) {
    switch (spec.kind) {
    case ParamKind::String:
        return value.is_string();
    case ParamKind::Integer:
        return value.is_number_integer();
    case ParamKind::Enum:
        if (!value.is_string()) return false;
        return std::find(spec.enum_values.begin(), spec.enum_values.end(),
                         value.get<std::string>()) != spec.enum_values.end();
    }
    return false;
}

DispatchResult dispatch_ocr(const ValidatedCall& call) {
    OcrDecodeResult decoded = decode_document(call.arg_string("document"));
    switch (decoded.status) {
    case OcrDecodeResult::Status::Ok:
        return make_ocr_output(decoded.fields);
    case OcrDecodeResult::Status::NotADocument:
        return ValueRejection{"document is not a recognizable payload"};
    case OcrDecodeResult::Status::ChecksumMismatch:
        return RuntimeFault{"document checksum verification failed"};
    }
    return RuntimeFault{"unreachable"};
}

DispatchResult dispatch_query(const ValidatedCall& call, InvoiceStore& store) {
    const std::string id = call.arg_string("invoice_id");
    if (store.has_fault_flag(id, FaultFlag::RaiseOnQuery)) {
        return RuntimeFault{"query backend raised for invoice " + id};
    }
    const InvoiceRecord* record = store.find(id);
    if (record == nullptr) {
        return ValueRejection{"no invoice with id " + id};
    }
    return make_query_output({*record});
}

DispatchResult dispatch_update(const ValidatedCall& call, InvoiceStore& store) {
    const std::string id = call.arg_string("invoice_id");
    if (store.has_fault_flag(id, FaultFlag::RaiseOnUpdate)) {
        return RuntimeFault{"update backend raised for invoice " + id};
    }
    if (store.find(id) == nullptr) {
        return ValueRejection{"no invoice with id " + id};
    }
    auto status = invoice_status_from_code(call.arg_string("status"));
    // enum membership was already enforced by validation
    if (!status) return RuntimeFault{"status enum decode failed"};
    store.apply_update(id, *status, call.arg_optional_string("payment_id"));
    return make_update_ack(id, *status);
}

} // namespace

std::string_view structure_issue_code(StructureIssue issue) {
    switch (issue) {
    case StructureIssue::Unparseable:     return "UNPARSEABLE";
    case StructureIssue::MissingRequired: return "MISSING_REQUIRED";
    case StructureIssue::UnknownField:    return "UNKNOWN_FIELD";
    case StructureIssue::WrongType:       return "WRONG_TYPE";
    }
    return "";
}

ToolRegistry ToolRegistry::standard() {
    ToolRegistry registry;
    registry.schemas_ = {
        ToolSchema{
            "ocr_tool",
            ToolKind::Ocr,
            "Extract structured invoice fields from an encoded document payload.",
            {ParamSpec{"document", ParamKind::String, true, {}}},
        },
        ToolSchema{
            "db_query_tool",
            ToolKind::DbQuery,
            "Look up an invoice record by exact invoice_id.",
            {ParamSpec{"invoice_id", ParamKind::String, true, {}}},
        },
        ToolSchema{
            "db_update_tool",
            ToolKind::DbUpdate,
            "Set the reconciliation status of an invoice.",
            {
                ParamSpec{"invoice_id", ParamKind::String, true, {}},
                ParamSpec{"status", ParamKind::Enum, true, kStatusValues},
                ParamSpec{"payment_id", ParamKind::String, false, {}},
            },
        },
    };
    return registry;
}

const ToolSchema* ToolRegistry::find(std::string_view name) const {
    for (const auto& schema : schemas_) {
        if (schema.name == name) return &schema;
    }
    return nullptr;
}

const ToolSchema& ToolRegistry::schema_for(ToolKind kind) const {
    for (const auto& schema : schemas_) {
        if (schema.kind == kind) return schema;
    }
    throw std::logic_error("registry missing tool kind");
}

std::vector<const ToolSchema*> ToolRegistry::owned_by(AgentRole role) const {
    std::vector<const ToolSchema*> out;
    for (const auto& schema : schemas_) {
        if (owner_of(schema.kind) == role) out.push_back(&schema);
    }
    return out;
}

Json ToolRegistry::descriptor() const {
    Json tools = Json::array();
    for (const auto& schema : schemas_) {
        Json params = Json::array();
        for (const auto& p : schema.parameters) {
            Json entry;
            entry["name"] = p.name;
            entry["type"] = p.kind == ParamKind::String    ? "string"
                            : p.kind == ParamKind::Integer ? "integer"
                                                           : "enum";
            entry["required"] = p.required;
            if (p.kind == ParamKind::Enum) entry["values"] = p.enum_values;
            params.push_back(entry);
        }
        Json tool;
        tool["name"] = schema.name;
        tool["owner"] = std::string(agent_role_code(owner_of(schema.kind)));
        tool["description"] = schema.description;
        tool["parameters"] = params;
        tools.push_back(tool);
    }
    Json doc;
    doc["tools"] = tools;
    return doc;
}

std::string ValidatedCall::arg_string(const std::string& name) const {
    return arguments.at(name).get<std::string>();
}

std::optional<std::string> ValidatedCall::arg_optional_string(const std::string& name) const {
    auto it = arguments.find(name);
    if (it == arguments.end()) return std::nullopt;
    return it->get<std::string>();
}

ValidationResult validate_call(const ToolRegistry& registry, const RawToolCall& call) {
    const ToolSchema* schema = registry.find(call.name);
    if (schema == nullptr) {
        return ValidationFailure{ValidationFailure::Kind::UnknownName,
                                 StructureIssue::Unparseable,
                                 "unknown tool name: " + call.name};
    }
    Json args = Json::parse(call.raw_arguments, nullptr, false);
    if (args.is_discarded() || !args.is_object()) {
        return ValidationFailure{ValidationFailure::Kind::Structure,
                                 StructureIssue::Unparseable,
                                 "arguments are not a JSON object"};
    }
    for (const auto& spec : schema->parameters) {
        if (spec.required && !args.contains(spec.name)) {
            return ValidationFailure{ValidationFailure::Kind::Structure,
                                     StructureIssue::MissingRequired,
                                     "missing required field: " + spec.name};
        }
    }
    for (const auto& [key, value] : args.items()) {
        const ParamSpec* spec = nullptr;
        for (const auto& candidate : schema->parameters) {
            if (candidate.name == key) { spec = &candidate; break; }
        }
        if (spec == nullptr) {
            return ValidationFailure{ValidationFailure::Kind::Structure,
                                     StructureIssue::UnknownField,
                                     "unknown field: " + key};
        }
        if (!value_matches_kind(value, *spec)) {
            return ValidationFailure{ValidationFailure::Kind::Structure,
                                     StructureIssue::WrongType,
                                     "field has wrong type or value domain: " + key};
        }
    }
    return ValidatedCall{schema, std::move(args)};
}

ToolOutput make_ocr_output(const FieldMap& fields) {
    Json payload = Json::object();
    // fixed field order, amount as integer
    for (const char* name : kOcrFieldNames) {
        auto it = fields.find(name);
        if (it == fields.end()) continue;
        if (std::string(name) == "amount_minor") {
            payload[name] = std::stoll(it->second);
        } else {
            payload[name] = it->second;
        }
    }
    return ToolOutput{ToolKind::Ocr, std::move(payload)};
}

Json invoice_record_to_json(const InvoiceRecord& record) {
    Json j;
    j["invoice_id"] = record.invoice_id;
    j["vendor"] = record.vendor;
    j["amount_minor"] = record.amount_minor;
    j["currency"] = record.currency;
    j["invoice_date"] = record.invoice_date;
    j["status"] = std::string(invoice_status_code(record.status));
    if (record.payment_id) j["payment_id"] = *record.payment_id;
    return j;
}

InvoiceRecord invoice_record_from_json(const Json& j) {
    InvoiceRecord record;
    record.invoice_id = j.at("invoice_id").get<std::string>();
    record.vendor = j.at("vendor").get<std::string>();
    record.amount_minor = j.at("amount_minor").get<int64_t>();
    record.currency = j.at("currency").get<std::string>();
    record.invoice_date = j.at("invoice_date").get<std::string>();
    auto status = invoice_status_from_code(j.at("status").get<std::string>());
    if (!status) throw std::invalid_argument("bad invoice status in record");
    record.status = *status;
    if (j.contains("payment_id")) {
        record.payment_id = j.at("payment_id").get<std::string>();
    }
    return record;
}

ToolOutput make_query_output(const std::vector<InvoiceRecord>& records) {
    Json payload = Json::array();
    for (const auto& record : records) payload.push_back(invoice_record_to_json(record));
    return ToolOutput{ToolKind::DbQuery, std::move(payload)};
}

ToolOutput make_update_ack(const std::string& invoice_id, InvoiceStatus new_status) {
    Json payload;
    payload["invoice_id"] = invoice_id;
    payload["new_status"] = std::string(invoice_status_code(new_status));
    return ToolOutput{ToolKind::DbUpdate, std::move(payload)};
}

DispatchResult dispatch_call(const ValidatedCall& call, InvoiceStore& store) {
    switch (call.schema->kind) {
    case ToolKind::Ocr:      return dispatch_ocr(call);
    case ToolKind::DbQuery:  return dispatch_query(call, store);
    case ToolKind::DbUpdate: return dispatch_update(call, store);
    }
    return RuntimeFault{"unreachable"};
}

void inject_tool_fault(InvoiceStore& store, const std::string& invoice_id,
                       FaultFlag flag) {
    store.set_fault_flag(invoice_id, flag);
}

} // namespace faultbench
