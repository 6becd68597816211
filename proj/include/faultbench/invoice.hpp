#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace faultbench {

enum class InvoiceStatus { Pending, Reconciled, Disputed };

std::string_view invoice_status_code(InvoiceStatus status); // "PENDING", ...
std::optional<InvoiceStatus> invoice_status_from_code(std::string_view code);

struct InvoiceRecord {
    std::string invoice_id;
    std::string vendor;
    int64_t amount_minor = 0;     // minor currency units, never floating point
    std::string currency;         // ISO-4217
    std::string invoice_date;     // ISO-8601
    InvoiceStatus status = InvoiceStatus::Pending;
    std::optional<std::string> payment_id;

    bool operator==(const InvoiceRecord&) const = default;
};

/// Harness-controlled per-invoice fault switches. Policies can never set
/// these; the evaluation runner injects them before a task starts.
enum class FaultFlag { RaiseOnQuery, RaiseOnUpdate };

/// In-memory invoice table keyed by invoice_id. One instance per task;
/// status transitions happen only through apply_update (the db_update_tool
/// path).
class InvoiceStore {
public:
    InvoiceStore() = default;

    /// Builds a store from a snapshot. Throws std::invalid_argument on a
    /// duplicate invoice_id.
    static InvoiceStore from_snapshot(const std::vector<InvoiceRecord>& snapshot);

    const InvoiceRecord* find(const std::string& invoice_id) const;
    size_t size() const { return records_.size(); }

    /// Sets status (and payment_id when provided) on an existing record.
    /// Returns false when the id is unknown; the store is left untouched.
    bool apply_update(const std::string& invoice_id, InvoiceStatus status,
                      const std::optional<std::string>& payment_id);

    /// Throws std::invalid_argument when the invoice_id does not exist.
    void set_fault_flag(const std::string& invoice_id, FaultFlag flag);
    bool has_fault_flag(const std::string& invoice_id, FaultFlag flag) const;

    /// Records in invoice_id order. Fault flags are excluded: they are
    /// harness metadata, not invoice state.
    std::vector<InvoiceRecord> snapshot() const;

    /// Record-by-record equality, ignoring fault flags.
    bool same_records(const InvoiceStore& other) const;

private:
    std::map<std::string, InvoiceRecord> records_;
    std::map<std::string, std::set<FaultFlag>> fault_flags_;
};

} // namespace faultbench
