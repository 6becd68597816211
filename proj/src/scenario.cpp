#include "faultbench/scenario.hpp"

#include "faultbench/rng.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace faultbench {
namespace {

constexpr const char* kVendors[] = {
    "Acme Logistics",     "Borealis Print Co",  "Cobalt Partners",
    "Delta Freight",      "Everline Services",  "Fairmont Supply",
    "Granite Works",      "Harbor Analytics",   "Ironwood Media",
    "Juniper Labs",       "Kestrel Consulting", "Lumen Industrial",
    "Meridian Office",    "Northgate Foods",    "Orchid Systems",
    "Pinnacle Tooling",   "Quarry Materials",   "Rosewood Catering",
    "Summit Courier",     "Tidewater Energy",   "Umber Textiles",
    "Vantage Security",   "Willow Creek Farms", "Zephyr Transport",
};
constexpr size_t kVendorCount = sizeof(kVendors) / sizeof(kVendors[0]);

constexpr const char* kCurrencies[] = {"USD", "EUR", "GBP", "CAD"};
constexpr size_t kCurrencyCount = sizeof(kCurrencies) / sizeof(kCurrencies[0]);

constexpr int64_t kAmountMin = 100;      // 1.00 in minor units
constexpr int64_t kAmountMax = 9999999;  // 99,999.99 in minor units

std::string format_minor_impl(int64_t minor) {
    int64_t whole = minor / 100;
    int64_t frac = minor % 100;
    std::string digits = std::to_string(whole);
    std::string grouped;
    int run = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (run == 3) {
            grouped.push_back(',');
            run = 0;
        }
        grouped.push_back(*it);
        ++run;
    }
    std::reverse(grouped.begin(), grouped.end());
    char tail[8];
    std::snprintf(tail, sizeof(tail), ".%02" PRId64, frac);
    return grouped + tail;
}

std::optional<int64_t> parse_minor(const std::string& text) {
    std::string compact;
    compact.reserve(text.size());
    for (char c : text) {
        if (c == ',') continue;
        compact.push_back(c);
    }
    auto dot = compact.find('.');
    if (dot == std::string::npos || dot == 0 || compact.size() - dot - 1 != 2) {
        return std::nullopt;
    }
    for (size_t i = 0; i < compact.size(); ++i) {
        if (i == dot) continue;
        if (compact[i] < '0' || compact[i] > '9') return std::nullopt;
    }
    if (dot > 16) return std::nullopt;  // overflow guard
    int64_t whole = 0;
    for (size_t i = 0; i < dot; ++i) whole = whole * 10 + (compact[i] - '0');
    int64_t frac = (compact[dot + 1] - '0') * 10 + (compact[dot + 2] - '0');
    return whole * 100 + frac;
}

std::string random_date(SplitMix64& rng) {
    int year = static_cast<int>(2023 + rng.next_below(3));
    int month = static_cast<int>(1 + rng.next_below(12));
    int day = static_cast<int>(1 + rng.next_below(28));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::string random_invoice_id(SplitMix64& rng) {
    int year = static_cast<int>(2023 + rng.next_below(3));
    auto number = 10000 + rng.next_below(90000);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "INV-%04d-%05" PRIu64, year, number);
    return buf;
}

std::string random_payment_id(SplitMix64& rng) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "PAY-%08" PRIX64, rng.next_u64() & 0xFFFFFFFFu);
    return buf;
}

/// Returns `value` with two distinct digit positions rewritten, keeping
/// the leading digit nonzero. Guarantees a two-position difference so a
/// single-digit perturbation elsewhere can never bridge the gap.
int64_t two_digit_variant(int64_t value, SplitMix64& rng) {
    std::string digits = std::to_string(value);
    size_t len = digits.size();
    size_t p1 = static_cast<size_t>(rng.next_below(len));
    size_t p2 = static_cast<size_t>(rng.next_below(len - 1));
    if (p2 >= p1) ++p2;
    for (size_t pos : {p1, p2}) {
        char old = digits[pos];
        char low = (pos == 0) ? '1' : '0';
        int span = '9' - low;  // candidates excluding the old digit
        char pick = static_cast<char>(low + rng.next_below(static_cast<uint64_t>(span)));
        if (pick >= old) ++pick;
        digits[pos] = pick;
    }
    return std::stoll(digits);
}

void shuffle_records(std::vector<InvoiceRecord>& records, SplitMix64& rng) {
    for (size_t i = records.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(records[i - 1], records[j]);
    }
}

std::vector<Variant> variant_schedule(uint64_t per_modality, SplitMix64& rng) {
    uint64_t match_quota = per_modality * 4 / 5;
    std::vector<Variant> out(per_modality, Variant::Mismatch);
    std::fill(out.begin(), out.begin() + static_cast<ptrdiff_t>(match_quota), Variant::Match);
    for (size_t i = out.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next_below(i));
        std::swap(out[i - 1], out[j]);
    }
    return out;
}

} // namespace

std::string format_amount_minor(int64_t minor) { return format_minor_impl(minor); }

std::string_view modality_code(Modality m) {
    return m == Modality::Vision ? "VISION" : "TEXT";
}

std::string_view variant_code(Variant v) {
    return v == Variant::Match ? "MATCH" : "MISMATCH";
}

std::optional<Modality> modality_from_code(std::string_view code) {
    if (code == "VISION") return Modality::Vision;
    if (code == "TEXT") return Modality::Text;
    return std::nullopt;
}

std::optional<Variant> variant_from_code(std::string_view code) {
    if (code == "MATCH") return Variant::Match;
    if (code == "MISMATCH") return Variant::Mismatch;
    return std::nullopt;
}

FieldMap claim_fields(const std::string& invoice_id, const std::string& vendor,
                      int64_t amount_minor, const std::string& currency,
                      const std::string& invoice_date) {
    FieldMap fields;
    fields["invoice_id"] = invoice_id;
    fields["vendor"] = vendor;
    fields["amount_minor"] = std::to_string(amount_minor);
    fields["currency"] = currency;
    fields["invoice_date"] = invoice_date;
    return fields;
}

std::string render_email(const FieldMap& claim) {
    int64_t minor = 0;
    if (auto it = claim.find("amount_minor"); it != claim.end()) {
        minor = std::stoll(it->second);
    }
    auto field = [&](const char* key) -> std::string {
        auto it = claim.find(key);
        return it == claim.end() ? std::string() : it->second;
    };
    std::string out;
    out += "Subject: Remittance advice\n";
    out += "\n";
    out += "Hello,\n";
    out += "\n";
    out += "Please reconcile the payment recorded below.\n";
    out += "\n";
    out += "Invoice ID: " + field("invoice_id") + "\n";
    out += "Vendor: " + field("vendor") + "\n";
    out += "Amount: " + format_amount_minor(minor) + " " + field("currency") + "\n";
    out += "Invoice Date: " + field("invoice_date") + "\n";
    out += "\n";
    out += "Regards,\n";
    out += "Accounts Payable\n";
    return out;
}

std::optional<FieldMap> parse_email(const std::string& email_text) {
    std::optional<std::string> invoice_id;
    std::optional<std::string> vendor;
    std::optional<std::string> invoice_date;
    std::optional<int64_t> amount_minor;
    std::optional<std::string> currency;

    std::istringstream in(email_text);
    std::string line;
    while (std::getline(in, line)) {
        auto value_after = [&](const char* prefix) -> std::optional<std::string> {
            size_t n = std::string_view(prefix).size();
            if (line.rfind(prefix, 0) == 0) return line.substr(n);
            return std::nullopt;
        };
        if (auto v = value_after("Invoice ID: ")) invoice_id = *v;
        else if (auto v2 = value_after("Vendor: ")) vendor = *v2;
        else if (auto v3 = value_after("Invoice Date: ")) invoice_date = *v3;
        else if (auto v4 = value_after("Amount: ")) {
            auto space = v4->rfind(' ');
            if (space == std::string::npos) return std::nullopt;
            amount_minor = parse_minor(v4->substr(0, space));
            currency = v4->substr(space + 1);
            if (!amount_minor || currency->empty()) return std::nullopt;
        }
    }
    if (!invoice_id || !vendor || !invoice_date || !amount_minor || !currency) {
        return std::nullopt;
    }
    return claim_fields(*invoice_id, *vendor, *amount_minor, *currency, *invoice_date);
}

Dataset generate_dataset(uint64_t seed, uint64_t count) {
    if (count == 0 || count % 2 != 0) {
        throw std::invalid_argument(
            "dataset count must be positive and even (vision/text split)");
    }
    SplitMix64 rng(seed);
    std::vector<Variant> vision_schedule = variant_schedule(count / 2, rng);
    std::vector<Variant> text_schedule = variant_schedule(count / 2, rng);

    Dataset dataset;
    dataset.seed = seed;
    dataset.count = count;
    dataset.tasks.reserve(count);

    size_t vision_cursor = 0;
    size_t text_cursor = 0;
    for (uint64_t index = 0; index < count; ++index) {
        Modality modality = (index % 2 == 0) ? Modality::Vision : Modality::Text;
        Variant variant = (modality == Modality::Vision)
                              ? vision_schedule[vision_cursor++]
                              : text_schedule[text_cursor++];

        DatasetTask task;
        char id_buf[16];
        std::snprintf(id_buf, sizeof(id_buf), "T%06" PRIu64, index);
        task.instance.task_id = id_buf;
        task.instance.modality = modality;
        task.instance.seed = rng.next_u64();

        std::string target_id = random_invoice_id(rng);
        std::string vendor = kVendors[rng.next_below(kVendorCount)];
        std::string currency = kCurrencies[rng.next_below(kCurrencyCount)];
        std::string date = random_date(rng);
        int64_t claimed = kAmountMin + static_cast<int64_t>(rng.next_below(
                              static_cast<uint64_t>(kAmountMax - kAmountMin + 1)));
        int64_t stored = (variant == Variant::Mismatch) ? two_digit_variant(claimed, rng)
                                                        : claimed;

        InvoiceRecord target;
        target.invoice_id = target_id;
        target.vendor = vendor;
        target.amount_minor = stored;
        target.currency = currency;
        target.invoice_date = date;
        target.status = InvoiceStatus::Pending;

        std::set<std::string> used_ids{target_id};
        std::vector<InvoiceRecord> snapshot{target};
        uint64_t distractors = 4 + rng.next_below(6);
        for (uint64_t d = 0; d < distractors; ++d) {
            InvoiceRecord rec;
            do {
                rec.invoice_id = random_invoice_id(rng);
            } while (!used_ids.insert(rec.invoice_id).second);
            rec.vendor = kVendors[rng.next_below(kVendorCount)];
            rec.amount_minor = kAmountMin + static_cast<int64_t>(rng.next_below(
                                   static_cast<uint64_t>(kAmountMax - kAmountMin + 1)));
            rec.currency = kCurrencies[rng.next_below(kCurrencyCount)];
            rec.invoice_date = random_date(rng);
            switch (rng.next_below(3)) {
                case 0: rec.status = InvoiceStatus::Pending; break;
                case 1:
                    rec.status = InvoiceStatus::Reconciled;
                    rec.payment_id = random_payment_id(rng);
                    break;
                default: rec.status = InvoiceStatus::Disputed; break;
            }
            snapshot.push_back(std::move(rec));
        }
        shuffle_records(snapshot, rng);
        task.instance.store_snapshot = std::move(snapshot);

        FieldMap claim = claim_fields(target_id, vendor, claimed, currency, date);
        if (modality == Modality::Vision) {
            task.instance.document = encode_document(claim);
        } else {
            task.instance.email_text = render_email(claim);
        }

        task.truth.target_invoice_id = target_id;
        task.truth.variant = variant;
        task.truth.expected_status = (variant == Variant::Match) ? InvoiceStatus::Reconciled
                                                                 : InvoiceStatus::Disputed;
        task.truth.expected_amount_minor = claimed;
        task.truth.expected_fields = claim;
        task.truth.expected_plan = golden_plan(task.instance, task.truth);

        dataset.tasks.push_back(std::move(task));
    }
    return dataset;
}

GoldenPlan golden_plan(const TaskInstance& instance, const GroundTruth& truth) {
    GoldenPlan plan;
    if (instance.modality == Modality::Vision) {
        PlanStage ocr;
        ocr.tool = ToolKind::Ocr;
        ocr.expected_output = make_ocr_output(truth.expected_fields);
        plan.stages.push_back(std::move(ocr));
    }
    const InvoiceRecord* target = nullptr;
    for (const auto& rec : instance.store_snapshot) {
        if (rec.invoice_id == truth.target_invoice_id) {
            target = &rec;
            break;
        }
    }
    if (target == nullptr) {
        throw std::logic_error("golden_plan: target invoice missing from snapshot");
    }
    PlanStage query;
    query.tool = ToolKind::DbQuery;
    query.expected_output = make_query_output({*target});
    plan.stages.push_back(std::move(query));

    PlanStage update;
    update.tool = ToolKind::DbUpdate;
    update.expected_output = make_update_ack(truth.target_invoice_id, truth.expected_status);
    plan.stages.push_back(std::move(update));
    return plan;
}

InvoiceStore oracle_final_state(const TaskInstance& instance, const GroundTruth& truth) {
    InvoiceStore store = InvoiceStore::from_snapshot(instance.store_snapshot);
    if (!store.apply_update(truth.target_invoice_id, truth.expected_status, std::nullopt)) {
        throw std::logic_error("oracle_final_state: target invoice missing from snapshot");
    }
    return store;
}

Json dataset_task_to_json(const DatasetTask& task) {
    Json j;
    j["task_id"] = task.instance.task_id;
    j["modality"] = std::string(modality_code(task.instance.modality));
    j["seed"] = task.instance.seed;
    if (task.instance.email_text) {
        j["email_text"] = *task.instance.email_text;
    }
    if (task.instance.document) {
        j["document"] = Json{{"encoded_payload", task.instance.document->encoded_payload},
                             {"corrupted", task.instance.document->corrupted}};
    }
    Json snapshot = Json::array();
    for (const auto& rec : task.instance.store_snapshot) {
        snapshot.push_back(invoice_record_to_json(rec));
    }
    j["store_snapshot"] = std::move(snapshot);

    Json truth;
    truth["target_invoice_id"] = task.truth.target_invoice_id;
    truth["variant"] = std::string(variant_code(task.truth.variant));
    truth["expected_status"] = std::string(invoice_status_code(task.truth.expected_status));
    truth["expected_amount_minor"] = task.truth.expected_amount_minor;
    Json fields = Json::object();
    for (const auto& [key, value] : task.truth.expected_fields) {
        fields[key] = value;
    }
    truth["expected_fields"] = std::move(fields);
    j["truth"] = std::move(truth);
    return j;
}

DatasetTask dataset_task_from_json(const Json& j) {
    DatasetTask task;
    task.instance.task_id = j.at("task_id").get<std::string>();
    auto modality = modality_from_code(j.at("modality").get<std::string>());
    if (!modality) throw std::runtime_error("dataset task: bad modality code");
    task.instance.modality = *modality;
    task.instance.seed = j.at("seed").get<uint64_t>();
    if (j.contains("email_text")) {
        task.instance.email_text = j.at("email_text").get<std::string>();
    }
    if (j.contains("document")) {
        DocumentBlob blob;
        blob.encoded_payload = j.at("document").at("encoded_payload").get<std::string>();
        blob.corrupted = j.at("document").at("corrupted").get<bool>();
        task.instance.document = std::move(blob);
    }
    for (const auto& rec : j.at("store_snapshot")) {
        task.instance.store_snapshot.push_back(invoice_record_from_json(rec));
    }
    const Json& truth = j.at("truth");
    task.truth.target_invoice_id = truth.at("target_invoice_id").get<std::string>();
    auto variant = variant_from_code(truth.at("variant").get<std::string>());
    if (!variant) throw std::runtime_error("dataset task: bad variant code");
    task.truth.variant = *variant;
    auto status = invoice_status_from_code(truth.at("expected_status").get<std::string>());
    if (!status) throw std::runtime_error("dataset task: bad expected_status code");
    task.truth.expected_status = *status;
    task.truth.expected_amount_minor = truth.at("expected_amount_minor").get<int64_t>();
    for (const auto& [key, value] : truth.at("expected_fields").items()) {
        task.truth.expected_fields[key] = value.get<std::string>();
    }
    task.truth.expected_plan = golden_plan(task.instance, task.truth);
    return task;
}

void write_dataset_jsonl(const Dataset& dataset, std::ostream& out) {
    Json header;
    header["format_version"] = kDatasetFormatVersion;
    header["seed"] = dataset.seed;
    header["count"] = dataset.count;
    header["generator_version"] = kGeneratorVersion;
    out << header.dump() << "\n";
    for (const auto& task : dataset.tasks) {
        out << dataset_task_to_json(task).dump() << "\n";
    }
}

std::string dataset_to_jsonl(const Dataset& dataset) {
    std::ostringstream out;
    write_dataset_jsonl(dataset, out);
    return out.str();
}

Dataset read_dataset_jsonl(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("dataset file: missing header line");
    }
    Json header = Json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.is_object() || !header.contains("format_version")) {
        throw std::runtime_error("dataset file: malformed header line");
    }
    if (header.at("format_version").get<int>() != kDatasetFormatVersion) {
        throw std::runtime_error("dataset file: unsupported format_version");
    }
    Dataset dataset;
    dataset.seed = header.at("seed").get<uint64_t>();
    dataset.count = header.at("count").get<uint64_t>();
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw std::runtime_error("dataset file: malformed JSON at line " +
                                     std::to_string(line_no));
        }
        dataset.tasks.push_back(dataset_task_from_json(j));
    }
    if (dataset.tasks.size() != dataset.count) {
        throw std::runtime_error("dataset file: header count does not match task lines");
    }
    return dataset;
}

Dataset load_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    return read_dataset_jsonl(in);
}

void save_dataset_file(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    write_dataset_jsonl(dataset, out);
}

} // namespace faultbench
