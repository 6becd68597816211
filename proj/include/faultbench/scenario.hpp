#pragma once

#include "faultbench/invoice.hpp"
#include "faultbench/jsonio.hpp"
#include "faultbench/ocr_codec.hpp"
#include "faultbench/tools.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace faultbench {

enum class Modality { Vision, Text };
enum class Variant { Match, Mismatch };

std::string_view modality_code(Modality m);   // "VISION", "TEXT"
std::string_view variant_code(Variant v);     // "MATCH", "MISMATCH"
std::optional<Modality> modality_from_code(std::string_view code);
std::optional<Variant> variant_from_code(std::string_view code);

/// One synthetic reconciliation scenario. Vision tasks carry an encoded
/// document; text tasks carry a plain remittance email. Exactly one of
/// the two is present.
struct TaskInstance {
    std::string task_id;
    Modality modality = Modality::Text;
    std::optional<std::string> email_text;
    std::optional<DocumentBlob> document;
    std::vector<InvoiceRecord> store_snapshot;
    uint64_t seed = 0;
};

struct PlanStage {
    ToolKind tool = ToolKind::Ocr;
    ToolOutput expected_output;
};

/// Ordered expected tool sequence: [OCR,] DB_QUERY, DB_UPDATE. Repeats of
/// a completed stage are permitted in traces; stages complete in order.
struct GoldenPlan {
    std::vector<PlanStage> stages;
};

struct GroundTruth {
    std::string target_invoice_id;
    Variant variant = Variant::Match;
    InvoiceStatus expected_status = InvoiceStatus::Reconciled;
    int64_t expected_amount_minor = 0;
    FieldMap expected_fields;
    GoldenPlan expected_plan;
};

struct DatasetTask {
    TaskInstance instance;
    GroundTruth truth;
};

struct Dataset {
    uint64_t seed = 0;
    uint64_t count = 0;
    std::vector<DatasetTask> tasks;
};

inline constexpr const char* kGeneratorVersion = "1";
inline constexpr int kDatasetFormatVersion = 1;

/// Deterministic generation: identical (seed, count) yields byte-identical
/// datasets. count must be even and positive; modalities alternate
/// vision/text by index, each modality is 80% MATCH / 20% MISMATCH
/// (MATCH quota = floor(0.8 * per-modality count), positions shuffled by
/// seed). Every snapshot holds the target plus 4-9 distractors.
Dataset generate_dataset(uint64_t seed, uint64_t count);

/// Stage list with per-stage expected outputs, derived from ground truth.
GoldenPlan golden_plan(const TaskInstance& instance, const GroundTruth& truth);

/// The store a perfectly executed task leaves behind: the snapshot with
/// the target's status replaced by expected_status.
InvoiceStore oracle_final_state(const TaskInstance& instance, const GroundTruth& truth);

/// Minor units to display text: 123456 -> "1,234.56".
std::string format_amount_minor(int64_t minor);

/// Plain-text remittance email carrying the claimed invoice fields.
std::string render_email(const FieldMap& claim);

/// Parses an email produced by render_email back into the field map.
std::optional<FieldMap> parse_email(const std::string& email_text);

FieldMap claim_fields(const std::string& invoice_id, const std::string& vendor,
                      int64_t amount_minor, const std::string& currency,
                      const std::string& invoice_date);

// --- dataset file format (JSON Lines, header line first) ---

Json dataset_task_to_json(const DatasetTask& task);
DatasetTask dataset_task_from_json(const Json& j);

void write_dataset_jsonl(const Dataset& dataset, std::ostream& out);
std::string dataset_to_jsonl(const Dataset& dataset);

/// Throws std::runtime_error on a missing/invalid header or malformed line.
Dataset read_dataset_jsonl(std::istream& in);
Dataset load_dataset_file(const std::string& path);
void save_dataset_file(const Dataset& dataset, const std::string& path);

} // namespace faultbench
