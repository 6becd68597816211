#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace faultbench {

/// Canonical string-valued field map used for OCR payloads and F1 scoring.
/// amount_minor is carried as its decimal digits.
using FieldMap = std::map<std::string, std::string>;

inline constexpr const char* kOcrFieldNames[5] = {
    "invoice_id", "vendor", "amount_minor", "currency", "invoice_date"};

/// Obfuscated document payload handed to vision-modality tasks. The field
/// lines are character-rotated and checksummed so a policy cannot shortcut
/// the OCR tool by reading the raw text.
struct DocumentBlob {
    std::string encoded_payload;
    bool corrupted = false;

    bool operator==(const DocumentBlob&) const = default;
};

DocumentBlob encode_document(const FieldMap& fields);

struct OcrDecodeResult {
    enum class Status { Ok, NotADocument, ChecksumMismatch };
    Status status = Status::NotADocument;
    FieldMap fields;
};

/// Decodes a payload string. NotADocument means the envelope marker is
/// missing entirely; ChecksumMismatch means the envelope is present but
/// the body fails verification.
OcrDecodeResult decode_document(const std::string& payload);

/// Re-encodes the blob with exactly one digit of amount_minor altered
/// (seed-deterministic). The checksum stays valid, so extraction succeeds
/// and yields the wrong amount. Leading digits stay nonzero, so the digit
/// count is preserved. Throws std::logic_error if the blob does not decode.
DocumentBlob corrupt_document_amount(const DocumentBlob& blob, uint64_t seed);

/// Invalidates the checksum line so extraction raises a runtime fault.
DocumentBlob break_checksum(const DocumentBlob& blob);

/// Alters one decimal digit of value, preserving digit count (the leading
/// digit of a multi-digit number stays in 1..9). Never returns value.
int64_t alter_one_digit(int64_t value, uint64_t seed);

} // namespace faultbench
