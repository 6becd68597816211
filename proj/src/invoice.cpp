#include "faultbench/invoice.hpp"

#include <stdexcept>

namespace faultbench {

std::string_view invoice_status_code(InvoiceStatus status) {
    switch (status) {
    case InvoiceStatus::Pending:    return "PENDING";
    case InvoiceStatus::Reconciled: return "RECONCILED";
    case InvoiceStatus::Disputed:   return "DISPUTED";
    }
    return "";
}

std::optional<InvoiceStatus> invoice_status_from_code(std::string_view code) {
    if (code == "PENDING") return InvoiceStatus::Pending;
    if (code == "RECONCILED") return InvoiceStatus::Reconciled;
    if (code == "DISPUTED") return InvoiceStatus::Disputed;
    return std::nullopt;
}

InvoiceStore InvoiceStore::from_snapshot(const std::vector<InvoiceRecord>& snapshot) {
    InvoiceStore store;
    for (const auto& record : snapshot) {
        auto [it, inserted] = store.records_.emplace(record.invoice_id, record);
        if (!inserted) {
            throw std::invalid_argument("duplicate invoice_id in snapshot: " +
                                        record.invoice_id);
        }
    }
    return store;
}

const InvoiceRecord* InvoiceStore::find(const std::string& invoice_id) const {
    auto it = records_.find(invoice_id);
    return it == records_.end() ? nullptr : &it->second;
}

bool InvoiceStore::apply_update(const std::string& invoice_id, InvoiceStatus status,
                                const std::optional<std::string>& payment_id) {
    auto it = records_.find(invoice_id);
    if (it == records_.end()) return false;
    it->second.status = status;
    if (payment_id) it->second.payment_id = payment_id;
    return true;
}

void InvoiceStore::set_fault_flag(const std::string& invoice_id, FaultFlag flag) {
    if (records_.find(invoice_id) == records_.end()) {
        throw std::invalid_argument("cannot set fault flag on unknown invoice_id: " +
                                    invoice_id);
    }
    fault_flags_[invoice_id].insert(flag);
}

bool InvoiceStore::has_fault_flag(const std::string& invoice_id, FaultFlag flag) const {
    auto it = fault_flags_.find(invoice_id);
    return it != fault_flags_.end() && it->second.count(flag) > 0;
}

std::vector<InvoiceRecord> InvoiceStore::snapshot() const {
    std::vector<InvoiceRecord> out;
    out.reserve(records_.size());
    for (const auto& [id, record] : records_) out.push_back(record);
    return out;
}

bool InvoiceStore::same_records(const InvoiceStore& other) const {
    return records_ == other.records_;
}

} // namespace faultbench
