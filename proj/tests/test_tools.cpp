// Tool layer: document codec properties, total call validation, and
// dispatch semantics against the invoice store.
#include <doctest.h>

#include "faultbench/ocr_codec.hpp"
#include "faultbench/tools.hpp"

#include <set>
#include <string>

using namespace faultbench;

namespace {

FieldMap sample_fields() {
    return {
        {"invoice_id", "INV-2024-55123"},
        {"vendor", "Aurora Logistics"},
        {"amount_minor", "1234567"},
        {"currency", "USD"},
        {"invoice_date", "2024-03-17"},
    };
}

InvoiceStore sample_store() {
    InvoiceRecord target;
    target.invoice_id = "INV-2024-55123";
    target.vendor = "Aurora Logistics";
    target.amount_minor = 1234567;
    target.currency = "USD";
    target.invoice_date = "2024-03-17";
    target.status = InvoiceStatus::Pending;

    InvoiceRecord other = target;
    other.invoice_id = "INV-2023-11111";
    other.vendor = "Borealis Paper";
    other.amount_minor = 900;
    other.status = InvoiceStatus::Reconciled;
    other.payment_id = "PAY-0000ABCD";

    return InvoiceStore::from_snapshot({target, other});
}

ValidatedCall validate_ok(const ToolRegistry& registry, const RawToolCall& call) {
    auto result = validate_call(registry, call);
    REQUIRE(std::holds_alternative<ValidatedCall>(result));
    return std::get<ValidatedCall>(result);
}

ValidationFailure validate_fail(const ToolRegistry& registry, const RawToolCall& call) {
    auto result = validate_call(registry, call);
    REQUIRE(std::holds_alternative<ValidationFailure>(result));
    return std::get<ValidationFailure>(result);
}

} // namespace

TEST_CASE("document codec round-trips across many seeds") {
    for (uint64_t seed = 1; seed <= 50; ++seed) {
        FieldMap fields = sample_fields();
        fields["amount_minor"] = std::to_string(100 + seed * 997);
        fields["invoice_id"] = "INV-2024-" + std::to_string(10000 + seed);
        DocumentBlob blob = encode_document(fields);
        auto decoded = decode_document(blob.encoded_payload);
        REQUIRE(decoded.status == OcrDecodeResult::Status::Ok);
        CHECK(decoded.fields == fields);
    }
}

TEST_CASE("encoded payload hides the plain field text") {
    DocumentBlob blob = encode_document(sample_fields());
    CHECK(blob.encoded_payload.find("Aurora") == std::string::npos);
    CHECK(blob.encoded_payload.find("INV-2024-55123") == std::string::npos);
}

TEST_CASE("alter_one_digit changes exactly one digit and keeps length") {
    for (uint64_t seed = 0; seed < 200; ++seed) {
        int64_t value = 100 + static_cast<int64_t>(seed) * 4993;
        int64_t altered = alter_one_digit(value, seed);
        CHECK(altered != value);
        auto a = std::to_string(value);
        auto b = std::to_string(altered);
        REQUIRE(a.size() == b.size());
        int differing = 0;
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i] != b[i]) ++differing;
        }
        CHECK(differing == 1);
        CHECK(b[0] != '0');
    }
    // Single-digit values stay single-digit (zero allowed there).
    for (uint64_t seed = 0; seed < 20; ++seed) {
        int64_t altered = alter_one_digit(7, seed);
        CHECK(altered != 7);
        CHECK(altered >= 0);
        CHECK(altered <= 9);
    }
}

TEST_CASE("corrupt_document_amount yields a decodable wrong amount") {
    FieldMap fields = sample_fields();
    DocumentBlob blob = encode_document(fields);
    DocumentBlob corrupted = corrupt_document_amount(blob, 42);
    CHECK(corrupted.corrupted);
    auto decoded = decode_document(corrupted.encoded_payload);
    REQUIRE(decoded.status == OcrDecodeResult::Status::Ok);
    CHECK(decoded.fields["amount_minor"] != fields["amount_minor"]);
    CHECK(decoded.fields["amount_minor"].size() == fields["amount_minor"].size());
    // All other fields intact.
    for (const char* name : {"invoice_id", "vendor", "currency", "invoice_date"}) {
        CHECK(decoded.fields[name] == fields[name]);
    }
}

TEST_CASE("break_checksum makes extraction fail verification") {
    DocumentBlob blob = encode_document(sample_fields());
    DocumentBlob broken = break_checksum(blob);
    auto decoded = decode_document(broken.encoded_payload);
    CHECK(decoded.status == OcrDecodeResult::Status::ChecksumMismatch);
}

TEST_CASE("non-enveloped text is not a document") {
    auto decoded = decode_document("please reconcile invoice INV-1 at your convenience");
    CHECK(decoded.status == OcrDecodeResult::Status::NotADocument);
}

TEST_CASE("registry holds the three standard tools with owners") {
    auto registry = ToolRegistry::standard();
    for (ToolKind kind : kAllToolKinds) {
        const ToolSchema* schema = registry.find(registered_tool_name(kind));
        REQUIRE(schema != nullptr);
        CHECK(schema->kind == kind);
        CHECK(&registry.schema_for(kind) == schema);
    }
    CHECK(registry.find("no_such_tool") == nullptr);

    CHECK(registry.owned_by(AgentRole::Email).size() == 1);
    CHECK(registry.owned_by(AgentRole::DataEng).size() == 2);
    CHECK(registry.owned_by(AgentRole::Recon).empty());

    Json descriptor = registry.descriptor();
    REQUIRE(descriptor.is_object());
    REQUIRE(descriptor.at("tools").is_array());
    CHECK(descriptor.at("tools").size() == 3);
    CHECK(descriptor.at("tools").at(0).at("owner") == "EMAIL");
}

TEST_CASE("validation is total: unknown name") {
    auto registry = ToolRegistry::standard();
    auto failure = validate_fail(registry, {"database_query", "{}"});
    CHECK(failure.kind == ValidationFailure::Kind::UnknownName);
}

TEST_CASE("validation is total: structure issues in order") {
    auto registry = ToolRegistry::standard();

    SUBCASE("unparseable arguments") {
        auto failure = validate_fail(registry, {"db_query_tool", "{\"invoice_id\": "});
        CHECK(failure.kind == ValidationFailure::Kind::Structure);
        CHECK(failure.issue == StructureIssue::Unparseable);
    }
    SUBCASE("non-object arguments") {
        auto failure = validate_fail(registry, {"db_query_tool", "[1,2]"});
        CHECK(failure.kind == ValidationFailure::Kind::Structure);
        CHECK(failure.issue == StructureIssue::Unparseable);
    }
    SUBCASE("missing required field") {
        auto failure = validate_fail(registry, {"db_query_tool", "{}"});
        CHECK(failure.kind == ValidationFailure::Kind::Structure);
        CHECK(failure.issue == StructureIssue::MissingRequired);
    }
    SUBCASE("unknown extra field") {
        auto failure = validate_fail(
            registry, {"db_query_tool",
                       R"({"invoice_id":"INV-1","vendor_tax_code":"EU-0042"})"});
        CHECK(failure.kind == ValidationFailure::Kind::Structure);
        CHECK(failure.issue == StructureIssue::UnknownField);
    }
    SUBCASE("wrong value type") {
        auto failure = validate_fail(registry, {"db_query_tool", R"({"invoice_id":12345})"});
        CHECK(failure.kind == ValidationFailure::Kind::Structure);
        CHECK(failure.issue == StructureIssue::WrongType);
    }
    SUBCASE("enum outside its domain") {
        auto failure = validate_fail(
            registry,
            {"db_update_tool", R"({"invoice_id":"INV-1","status":"SHIPPED"})"});
        CHECK(failure.kind == ValidationFailure::Kind::Structure);
        CHECK(failure.issue == StructureIssue::WrongType);
    }
}

TEST_CASE("dispatch: ocr extracts the document fields") {
    auto registry = ToolRegistry::standard();
    auto store = sample_store();
    DocumentBlob blob = encode_document(sample_fields());
    Json args;
    args["document"] = blob.encoded_payload;
    auto call = validate_ok(registry, {"ocr_tool", args.dump()});
    auto result = dispatch_call(call, store);
    REQUIRE(std::holds_alternative<ToolOutput>(result));
    const auto& output = std::get<ToolOutput>(result);
    CHECK(output.tool == ToolKind::Ocr);
    REQUIRE(output.payload.is_object());
    CHECK(output.payload.size() == 5);
    CHECK(output.payload.at("amount_minor").is_number_integer());
    CHECK(output.payload.at("amount_minor").get<int64_t>() == 1234567);
    CHECK(output.payload.at("invoice_id") == "INV-2024-55123");
    CHECK(output == make_ocr_output(sample_fields()));
}

TEST_CASE("dispatch: ocr on plain text is a value rejection") {
    auto registry = ToolRegistry::standard();
    auto store = sample_store();
    auto call = validate_ok(registry,
                            {"ocr_tool", R"({"document":"just some prose"})"});
    auto result = dispatch_call(call, store);
    CHECK(std::holds_alternative<ValueRejection>(result));
}

TEST_CASE("dispatch: ocr on a broken checksum is a runtime fault") {
    auto registry = ToolRegistry::standard();
    auto store = sample_store();
    DocumentBlob broken = break_checksum(encode_document(sample_fields()));
    Json args;
    args["document"] = broken.encoded_payload;
    auto call = validate_ok(registry, {"ocr_tool", args.dump()});
    auto result = dispatch_call(call, store);
    CHECK(std::holds_alternative<RuntimeFault>(result));
}

TEST_CASE("dispatch: query returns the record array payload") {
    auto registry = ToolRegistry::standard();
    auto store = sample_store();
    auto call = validate_ok(registry, {"db_query_tool", R"({"invoice_id":"INV-2024-55123"})"});
    auto result = dispatch_call(call, store);
    REQUIRE(std::holds_alternative<ToolOutput>(result));
    const auto& output = std::get<ToolOutput>(result);
    CHECK(output.tool == ToolKind::DbQuery);
    REQUIRE(output.payload.is_array());
    REQUIRE(output.payload.size() == 1);
    const auto& record = output.payload.at(0);
    CHECK(record.at("invoice_id") == "INV-2024-55123");
    CHECK(record.at("amount_minor").get<int64_t>() == 1234567);
    CHECK(record.at("status") == "PENDING");

    const InvoiceRecord* stored = store.find("INV-2024-55123");
    REQUIRE(stored != nullptr);
    CHECK(output == make_query_output({*stored}));
    CHECK(invoice_record_from_json(record) == *stored);
}

TEST_CASE("dispatch: query for an unknown id is a value rejection") {
    auto registry = ToolRegistry::standard();
    auto store = sample_store();
    auto call = validate_ok(registry, {"db_query_tool", R"({"invoice_id":"INV-NOPE"})"});
    auto result = dispatch_call(call, store);
    CHECK(std::holds_alternative<ValueRejection>(result));
}

TEST_CASE("dispatch: update mutates the store and acks") {
    auto registry = ToolRegistry::standard();
    auto store = sample_store();
    auto call = validate_ok(
        registry,
        {"db_update_tool", R"({"invoice_id":"INV-2024-55123","status":"RECONCILED"})"});
    auto result = dispatch_call(call, store);
    REQUIRE(std::holds_alternative<ToolOutput>(result));
    const auto& output = std::get<ToolOutput>(result);
    CHECK(output.tool == ToolKind::DbUpdate);
    CHECK(output == make_update_ack("INV-2024-55123", InvoiceStatus::Reconciled));

    const InvoiceRecord* record = store.find("INV-2024-55123");
    REQUIRE(record != nullptr);
    CHECK(record->status == InvoiceStatus::Reconciled);
}

TEST_CASE("dispatch: update of an unknown id rejects and leaves state") {
    auto registry = ToolRegistry::standard();
    auto store = sample_store();
    auto before = store.snapshot();
    auto call = validate_ok(
        registry, {"db_update_tool", R"({"invoice_id":"INV-NOPE","status":"DISPUTED"})"});
    auto result = dispatch_call(call, store);
    CHECK(std::holds_alternative<ValueRejection>(result));
    CHECK(store.snapshot() == before);
}

TEST_CASE("fault flags raise runtime errors without touching state") {
    auto registry = ToolRegistry::standard();
    auto store = sample_store();
    inject_tool_fault(store, "INV-2024-55123", FaultFlag::RaiseOnQuery);
    inject_tool_fault(store, "INV-2024-55123", FaultFlag::RaiseOnUpdate);

    auto query = validate_ok(registry, {"db_query_tool", R"({"invoice_id":"INV-2024-55123"})"});
    CHECK(std::holds_alternative<RuntimeFault>(dispatch_call(query, store)));

    auto before = store.snapshot();
    auto update = validate_ok(
        registry,
        {"db_update_tool", R"({"invoice_id":"INV-2024-55123","status":"RECONCILED"})"});
    CHECK(std::holds_alternative<RuntimeFault>(dispatch_call(update, store)));
    CHECK(store.snapshot() == before);

    // Fault flags are per-invoice: the other record is untouched.
    auto other = validate_ok(registry, {"db_query_tool", R"({"invoice_id":"INV-2023-11111"})"});
    CHECK(std::holds_alternative<ToolOutput>(dispatch_call(other, store)));

    CHECK_THROWS_AS(inject_tool_fault(store, "INV-MISSING", FaultFlag::RaiseOnQuery),
                    std::invalid_argument);
}

TEST_CASE("store snapshot round-trip and fault flags excluded") {
    auto store = sample_store();
    store.set_fault_flag("INV-2024-55123", FaultFlag::RaiseOnQuery);
    auto snapshot = store.snapshot();
    auto rebuilt = InvoiceStore::from_snapshot(snapshot);
    CHECK(rebuilt.same_records(store));
    CHECK_FALSE(rebuilt.has_fault_flag("INV-2024-55123", FaultFlag::RaiseOnQuery));

    InvoiceRecord dupe = snapshot.front();
    snapshot.push_back(dupe);
    CHECK_THROWS_AS(InvoiceStore::from_snapshot(snapshot), std::invalid_argument);
}

TEST_CASE("invoice record json round-trip keeps payment ids") {
    InvoiceRecord record;
    record.invoice_id = "INV-2025-90001";
    record.vendor = "Cobalt Freight";
    record.amount_minor = 55;
    record.currency = "EUR";
    record.invoice_date = "2025-01-31";
    record.status = InvoiceStatus::Reconciled;
    record.payment_id = "PAY-12AB34CD";
    CHECK(invoice_record_from_json(invoice_record_to_json(record)) == record);

    record.payment_id.reset();
    record.status = InvoiceStatus::Pending;
    Json j = invoice_record_to_json(record);
    CHECK_FALSE(j.contains("payment_id"));
    CHECK(invoice_record_from_json(j) == record);
}
