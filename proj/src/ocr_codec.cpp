#include "faultbench/ocr_codec.hpp"

#include "faultbench/rng.hpp"

#include <cstdio>
#include <stdexcept>
#include <vector>

namespace faultbench {
namespace {

constexpr char kMagic[] = "FBDOC1";

// ROT47 over the printable range [33, 126]; self-inverse, leaves
// whitespace (and therefore line structure) untouched.
std::string rot47(const std::string& text) {
    std::string out = text;
    for (char& c : out) {
        if (c >= 33 && c <= 126) {
            c = static_cast<char>(33 + ((c - 33 + 47) % 94));
        }
    }
    return out;
}

std::string hex16(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

DocumentBlob encode_document(const FieldMap& fields) {
    std::string body;
    for (const auto& [key, value] : fields) {
        body += key;
        body += '=';
        body += value;
        body += '\n';
    }
    std::string encoded = rot47(body);
    DocumentBlob blob;
    blob.encoded_payload = std::string(kMagic) + "\n" + encoded + "CRC=" +
                           hex16(fnv1a64(encoded)) + "\n";
    return blob;
}

OcrDecodeResult decode_document(const std::string& payload) {
    OcrDecodeResult result;
    const std::string magic_line = std::string(kMagic) + "\n";
    if (payload.rfind(magic_line, 0) != 0) {
        result.status = OcrDecodeResult::Status::NotADocument;
        return result;
    }
    size_t crc_pos = payload.rfind("CRC=");
    if (crc_pos == std::string::npos || crc_pos < magic_line.size()) {
        result.status = OcrDecodeResult::Status::ChecksumMismatch;
        return result;
    }
    std::string encoded = payload.substr(magic_line.size(), crc_pos - magic_line.size());
    std::string crc_line = payload.substr(crc_pos);
    while (!crc_line.empty() && (crc_line.back() == '\n' || crc_line.back() == '\r')) {
        crc_line.pop_back();
    }
    if (crc_line != "CRC=" + hex16(fnv1a64(encoded))) {
        result.status = OcrDecodeResult::Status::ChecksumMismatch;
        return result;
    }
    std::string body = rot47(encoded);
    FieldMap fields;
    size_t start = 0;
    while (start < body.size()) {
        size_t end = body.find('\n', start);
        if (end == std::string::npos) end = body.size();
        std::string line = body.substr(start, end - start);
        start = end + 1;
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            result.status = OcrDecodeResult::Status::ChecksumMismatch;
            return result;
        }
        fields[line.substr(0, eq)] = line.substr(eq + 1);
    }
    result.status = OcrDecodeResult::Status::Ok;
    result.fields = std::move(fields);
    return result;
}

int64_t alter_one_digit(int64_t value, uint64_t seed) {
    if (value < 0) throw std::logic_error("alter_one_digit: negative amount");
    std::string digits = std::to_string(value);
    SplitMix64 rng(seed);
    size_t pos = rng.next_below(digits.size());
    char old = digits[pos];
    if (pos == 0 && digits.size() > 1) {
        // keep the leading digit in 1..9 so the digit count is stable
        int delta = static_cast<int>(rng.next_below(8)) + 1;
        digits[pos] = static_cast<char>('1' + ((old - '1') + delta) % 9);
    } else {
        int delta = static_cast<int>(rng.next_below(9)) + 1;
        digits[pos] = static_cast<char>('0' + ((old - '0') + delta) % 10);
    }
    return std::stoll(digits);
}

DocumentBlob corrupt_document_amount(const DocumentBlob& blob, uint64_t seed) {
    OcrDecodeResult decoded = decode_document(blob.encoded_payload);
    if (decoded.status != OcrDecodeResult::Status::Ok) {
        throw std::logic_error("corrupt_document_amount: blob does not decode");
    }
    auto it = decoded.fields.find("amount_minor");
    if (it == decoded.fields.end()) {
        throw std::logic_error("corrupt_document_amount: no amount_minor field");
    }
    int64_t amount = std::stoll(it->second);
    it->second = std::to_string(alter_one_digit(amount, seed));
    DocumentBlob out = encode_document(decoded.fields);
    out.corrupted = true;
    return out;
}

DocumentBlob break_checksum(const DocumentBlob& blob) {
    DocumentBlob out = blob;
    size_t crc_pos = out.encoded_payload.rfind("CRC=");
    if (crc_pos == std::string::npos) return out;
    // overwrite the stored checksum with its bitwise complement
    std::string stored = out.encoded_payload.substr(crc_pos + 4, 16);
    uint64_t value = std::stoull(stored, nullptr, 16);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(~value));
    out.encoded_payload.replace(crc_pos + 4, 16, buf);
    return out;
}

} // namespace faultbench
