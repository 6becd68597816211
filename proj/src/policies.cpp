#include "faultbench/policy.hpp"

#include <algorithm>
#include <utility>

namespace faultbench {
namespace {

constexpr const char* kLoopMarker =
    "Still working through the reconciliation backlog; repeating the last check.";

std::string omission_marker(ToolKind kind) {
    switch (kind) {
        case ToolKind::Ocr:
            return "The attachment has been reviewed; the claim details are noted "
                   "in the thread.";
        case ToolKind::DbQuery:
            return "The invoice has been verified against the database and the "
                   "figures are consistent.";
        case ToolKind::DbUpdate:
            return "The invoice record has been updated to reflect the "
                   "reconciliation outcome.";
    }
    return "Done.";
}

std::string wrong_tool_name(ToolKind kind) {
    switch (kind) {
        case ToolKind::Ocr: return "read_document";
        case ToolKind::DbQuery: return "database_query";
        case ToolKind::DbUpdate: return "update_db";
    }
    return "unknown_tool";
}

struct Claim {
    std::string invoice_id;
    int64_t amount_minor = 0;
    std::string vendor;
    std::string currency;
    std::string invoice_date;
};

std::vector<const TranscriptEvent*> events_of(const ConversationState& state,
                                              AgentRole agent) {
    std::vector<const TranscriptEvent*> out;
    for (const auto& event : state.transcript) {
        if (event.agent == agent) out.push_back(&event);
    }
    return out;
}

bool is_ok_call(const TranscriptEvent& event, std::string_view tool_name) {
    return event.action == ActionKind::ToolCall && event.tool_name == tool_name &&
           event.dispatch == DispatchKind::Ok && event.tool_output.has_value();
}

std::optional<Claim> claim_from_fields(const Json& fields) {
    Claim claim;
    if (!fields.is_object()) return std::nullopt;
    if (!fields.contains("invoice_id") || !fields.contains("amount_minor")) {
        return std::nullopt;
    }
    claim.invoice_id = fields.at("invoice_id").get<std::string>();
    if (fields.at("amount_minor").is_number_integer()) {
        claim.amount_minor = fields.at("amount_minor").get<int64_t>();
    } else {
        return std::nullopt;
    }
    if (fields.contains("vendor")) claim.vendor = fields.at("vendor").get<std::string>();
    if (fields.contains("currency")) {
        claim.currency = fields.at("currency").get<std::string>();
    }
    if (fields.contains("invoice_date")) {
        claim.invoice_date = fields.at("invoice_date").get<std::string>();
    }
    return claim;
}

/// The claim as visible to downstream agents: parsed from the email for
/// text tasks, read off the latest successful OCR output for vision.
std::optional<Claim> derive_claim(const ConversationState& state) {
    if (state.instance.modality == Modality::Text) {
        if (!state.instance.email_text) return std::nullopt;
        auto fields = parse_email(*state.instance.email_text);
        if (!fields) return std::nullopt;
        Claim claim;
        claim.invoice_id = (*fields)["invoice_id"];
        claim.amount_minor = std::stoll((*fields)["amount_minor"]);
        claim.vendor = (*fields)["vendor"];
        claim.currency = (*fields)["currency"];
        claim.invoice_date = (*fields)["invoice_date"];
        return claim;
    }
    for (auto it = state.transcript.rbegin(); it != state.transcript.rend(); ++it) {
        if (is_ok_call(*it, registered_tool_name(ToolKind::Ocr))) {
            return claim_from_fields(*it->tool_output);
        }
    }
    return std::nullopt;
}

/// The stored amount for `invoice_id` per the latest successful lookup.
std::optional<int64_t> observed_stored_amount(const ConversationState& state,
                                              const std::string& invoice_id) {
    for (auto it = state.transcript.rbegin(); it != state.transcript.rend(); ++it) {
        if (!is_ok_call(*it, registered_tool_name(ToolKind::DbQuery))) continue;
        if (!it->tool_output->is_array()) return std::nullopt;
        for (const auto& record : *it->tool_output) {
            if (record.is_object() && record.value("invoice_id", "") == invoice_id &&
                record.contains("amount_minor")) {
                return record.at("amount_minor").get<int64_t>();
            }
        }
        return std::nullopt;
    }
    return std::nullopt;
}

std::string claim_sentence(const Claim& claim) {
    return "invoice " + claim.invoice_id + ", amount " +
           format_amount_minor(claim.amount_minor) + " " + claim.currency +
           ", vendor " + claim.vendor + ", dated " + claim.invoice_date + ".";
}

AgentAction email_agent_action(const ConversationState& state) {
    auto mine = events_of(state, AgentRole::Email);
    if (state.instance.modality == Modality::Text) {
        if (mine.empty()) {
            auto claim = derive_claim(state);
            if (!claim) {
                return make_text(
                    "The remittance email could not be parsed into claim fields.");
            }
            return make_text("Remittance email received. Claim: " +
                             claim_sentence(*claim));
        }
        return make_handoff();
    }

    if (!state.instance.document) {
        if (mine.empty()) {
            return make_text("No document is attached to this task.");
        }
        return make_handoff();
    }
    if (mine.empty()) {
        Json args;
        args["document"] = state.instance.document->encoded_payload;
        return make_tool_call(std::string(registered_tool_name(ToolKind::Ocr)),
                              args.dump());
    }
    const TranscriptEvent& last = *mine.back();
    if (last.action == ActionKind::ToolCall) {
        if (last.dispatch == DispatchKind::Ok && last.tool_output) {
            auto claim = claim_from_fields(*last.tool_output);
            if (claim) {
                return make_text("Extracted claim from document: " +
                                 claim_sentence(*claim));
            }
            return make_text("The document was read but its fields are incomplete.");
        }
        return make_text("The attached document could not be read: " +
                         last.dispatch_detail);
    }
    if (last.action == ActionKind::Text) {
        bool ocr_ok = std::any_of(mine.begin(), mine.end(), [](const TranscriptEvent* e) {
            return is_ok_call(*e, registered_tool_name(ToolKind::Ocr));
        });
        if (!ocr_ok) return make_handoff();
        auto texts = std::count_if(mine.begin(), mine.end(), [](const TranscriptEvent* e) {
            return e->action == ActionKind::Text;
        });
        if (texts == 1) {
            return make_text(
                "Forwarding the claim to data engineering for verification.");
        }
    }
    return make_handoff();
}

AgentAction data_eng_action(const ConversationState& state) {
    auto mine = events_of(state, AgentRole::DataEng);
    auto claim = derive_claim(state);
    if (!claim) {
        if (mine.empty()) {
            return make_text(
                "No usable claim fields were provided; skipping database "
                "verification.");
        }
        return make_handoff();
    }
    if (mine.empty()) {
        Json args;
        args["invoice_id"] = claim->invoice_id;
        return make_tool_call(std::string(registered_tool_name(ToolKind::DbQuery)),
                              args.dump());
    }
    const TranscriptEvent& last = *mine.back();
    if (last.action == ActionKind::Text) return make_handoff();
    if (last.action != ActionKind::ToolCall) return make_handoff();

    if (last.dispatch != DispatchKind::Ok) {
        const bool was_update =
            last.tool_name == registered_tool_name(ToolKind::DbUpdate);
        return make_text(std::string("Database ") +
                         (was_update ? "update" : "lookup") + " for invoice " +
                         claim->invoice_id + " failed: " + last.dispatch_detail);
    }
    if (last.tool_name == registered_tool_name(ToolKind::DbQuery)) {
        auto stored = observed_stored_amount(state, claim->invoice_id);
        if (!stored) {
            return make_text("Invoice " + claim->invoice_id +
                             " was not found in the lookup result.");
        }
        InvoiceStatus status = (claim->amount_minor == *stored)
                                   ? InvoiceStatus::Reconciled
                                   : InvoiceStatus::Disputed;
        Json args;
        args["invoice_id"] = claim->invoice_id;
        args["status"] = std::string(invoice_status_code(status));
        return make_tool_call(std::string(registered_tool_name(ToolKind::DbUpdate)),
                              args.dump());
    }
    return make_handoff();
}

AgentAction recon_action(const ConversationState& state) {
    auto claim = derive_claim(state);
    if (claim) {
        auto stored = observed_stored_amount(state, claim->invoice_id);
        if (stored && *stored == claim->amount_minor) {
            return make_final_decision(Decision::Reconciled);
        }
    }
    return make_final_decision(Decision::Disputed);
}

std::string mangle_structure(const ToolSchema& schema, const std::string& raw_arguments,
                             int variant) {
    switch (variant) {
        case 0: {  // no longer parses as JSON
            std::string broken = raw_arguments;
            if (!broken.empty()) broken.pop_back();
            return broken;
        }
        case 1: {  // first required parameter dropped
            Json args = Json::parse(raw_arguments);
            for (const auto& spec : schema.parameters) {
                if (spec.required) {
                    args.erase(spec.name);
                    break;
                }
            }
            return args.dump();
        }
        case 2: {  // a field no schema declares
            Json args = Json::parse(raw_arguments);
            args["vendor_tax_code"] = "EU-0042";
            return args.dump();
        }
        default: {  // first required parameter retyped to the wrong primitive
            Json args = Json::parse(raw_arguments);
            for (const auto& spec : schema.parameters) {
                if (spec.required) {
                    args[spec.name] = 12345;
                    break;
                }
            }
            return args.dump();
        }
    }
}

std::string replace_with_bad_value(ToolKind kind, const std::string& raw_arguments) {
    Json args = Json::parse(raw_arguments);
    if (kind == ToolKind::Ocr) {
        args["document"] =
            "Attached is the scan of the invoice as plain text, not encoded.";
    } else {
        args["invoice_id"] = "INV-NOPE";
    }
    return args.dump();
}

std::string flip_update_status(const std::string& raw_arguments) {
    Json args = Json::parse(raw_arguments);
    std::string status = args.value("status", "");
    args["status"] = (status == invoice_status_code(InvoiceStatus::Reconciled))
                         ? std::string(invoice_status_code(InvoiceStatus::Disputed))
                         : std::string(invoice_status_code(InvoiceStatus::Reconciled));
    return args.dump();
}

} // namespace

AgentAction make_tool_call(std::string tool_name, std::string raw_arguments) {
    AgentAction action;
    action.kind = ActionKind::ToolCall;
    action.tool_name = std::move(tool_name);
    action.raw_arguments = std::move(raw_arguments);
    return action;
}

AgentAction make_text(std::string prose) {
    AgentAction action;
    action.kind = ActionKind::Text;
    action.raw_arguments = std::move(prose);
    return action;
}

AgentAction make_handoff() {
    AgentAction action;
    action.kind = ActionKind::Handoff;
    return action;
}

AgentAction make_final_decision(Decision decision) {
    AgentAction action;
    action.kind = ActionKind::FinalDecision;
    action.raw_arguments = std::string(decision_code(decision));
    return action;
}

TaskHooks PolicyFactory::pre_task_hooks(const DatasetTask&) const { return {}; }

AgentAction GoldenPolicy::next_action(const ConversationState& state) {
    switch (state.agent) {
        case AgentRole::Email: return email_agent_action(state);
        case AgentRole::DataEng: return data_eng_action(state);
        case AgentRole::Recon: return recon_action(state);
    }
    return make_handoff();
}

FaultPolicy::FaultPolicy(CompiledFaultPlan plan) : plan_(std::move(plan)) {}

AgentAction FaultPolicy::next_action(const ConversationState& state) {
    // A triggered loop keeps repeating regardless of what the inner
    // policy would do next.
    for (ToolKind kind : kAllToolKinds) {
        const auto& fault = plan_.for_tool(kind);
        if (!fault || fault->mechanism != Mechanism::LoopTermination) continue;
        if (owner_of(kind) != state.agent) continue;
        for (const auto& event : state.transcript) {
            if (event.agent == state.agent && event.action == ActionKind::Text &&
                event.raw_arguments == kLoopMarker) {
                return make_text(kLoopMarker);
            }
        }
    }

    AgentAction proposed = inner_.next_action(state);
    if (proposed.kind != ActionKind::ToolCall) return proposed;
    auto kind = tool_kind_from_registered_name(proposed.tool_name);
    if (!kind) return proposed;
    const auto& fault = plan_.for_tool(*kind);
    if (!fault) return proposed;

    switch (fault->mechanism) {
        case Mechanism::Omission:
            return make_text(omission_marker(*kind));
        case Mechanism::BadName:
            return make_tool_call(wrong_tool_name(*kind), proposed.raw_arguments);
        case Mechanism::BadStructure: {
            static const ToolRegistry registry = ToolRegistry::standard();
            return make_tool_call(
                proposed.tool_name,
                mangle_structure(registry.schema_for(*kind), proposed.raw_arguments,
                                 fault->structure_variant));
        }
        case Mechanism::BadValue:
            return make_tool_call(proposed.tool_name,
                                  replace_with_bad_value(*kind, proposed.raw_arguments));
        case Mechanism::OutputDivergence:
            if (*kind == ToolKind::DbUpdate) {
                return make_tool_call(proposed.tool_name,
                                      flip_update_status(proposed.raw_arguments));
            }
            return proposed;  // OCR/query corruption acts on the environment side
        case Mechanism::LoopTermination:
            return make_text(kLoopMarker);
        case Mechanism::Runtime:
            return proposed;  // the armed tool fault does the damage
    }
    return proposed;
}

ReplayPolicy::ReplayPolicy(std::vector<StepRecord> records) {
    for (auto& record : records) {
        if (record.action == ActionKind::ForcedTermination) continue;
        actions_.push_back(std::move(record));
    }
}

AgentAction ReplayPolicy::next_action(const ConversationState&) {
    if (cursor_ >= actions_.size()) {
        return make_text("(replay exhausted)");
    }
    const StepRecord& record = actions_[cursor_++];
    AgentAction action;
    action.kind = record.action;
    action.tool_name = record.tool_name;
    action.raw_arguments = record.raw_arguments;
    return action;
}

BackendDescriptor GoldenPolicyFactory::descriptor() const {
    return BackendDescriptor{"golden", "golden"};
}

std::unique_ptr<PolicyBackend> GoldenPolicyFactory::make_policy(const DatasetTask&) const {
    return std::make_unique<GoldenPolicy>();
}

FaultPolicyFactory::FaultPolicyFactory(FaultProfile profile)
    : profile_(std::move(profile)) {}

BackendDescriptor FaultPolicyFactory::descriptor() const {
    return BackendDescriptor{"fault", "fault"};
}

TaskHooks FaultPolicyFactory::pre_task_hooks(const DatasetTask& task) const {
    return compile_fault_plan(profile_, task.instance.task_id).hooks;
}

std::unique_ptr<PolicyBackend> FaultPolicyFactory::make_policy(
    const DatasetTask& task) const {
    return std::make_unique<FaultPolicy>(
        compile_fault_plan(profile_, task.instance.task_id));
}

ReplayPolicyFactory::ReplayPolicyFactory(
    std::map<std::string, std::vector<StepRecord>> records_by_task,
    std::optional<FaultProfile> hooks_profile, std::string source_label)
    : records_by_task_(std::move(records_by_task)),
      hooks_profile_(std::move(hooks_profile)),
      source_label_(std::move(source_label)) {}

BackendDescriptor ReplayPolicyFactory::descriptor() const {
    return BackendDescriptor{"replay", source_label_};
}

TaskHooks ReplayPolicyFactory::pre_task_hooks(const DatasetTask& task) const {
    if (!hooks_profile_) return {};
    return compile_fault_plan(*hooks_profile_, task.instance.task_id).hooks;
}

std::unique_ptr<PolicyBackend> ReplayPolicyFactory::make_policy(
    const DatasetTask& task) const {
    auto it = records_by_task_.find(task.instance.task_id);
    if (it == records_by_task_.end()) {
        throw ConfigError("replay trace has no records for task " +
                          task.instance.task_id);
    }
    return std::make_unique<ReplayPolicy>(it->second);
}

} // namespace faultbench
