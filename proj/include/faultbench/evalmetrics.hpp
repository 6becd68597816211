#pragma once

#include "faultbench/policy.hpp"
#include "faultbench/scenario.hpp"
#include "faultbench/trace.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace faultbench {

/// Stable identifier for a run configuration; equal inputs give equal ids.
std::string make_run_id(const BackendDescriptor& backend, uint64_t dataset_seed,
                        int step_limit, uint64_t task_count);

/// The five canonical fields out of an OCR payload, values as strings.
FieldMap ocr_fields_from_payload(const Json& payload);

/// Exact-match field F1: precision over extracted fields, recall over
/// the expected five, zero when both are empty.
double ocr_field_f1(const FieldMap& extracted, const FieldMap& expected);

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 when n < 2
};

MetricStats compute_stats(const std::vector<double>& values);

/// Failure counts per label over one population. Labels are the twelve
/// category codes plus OTHER and INFRASTRUCTURE.
struct ErrorMatrix {
    std::map<std::string, uint64_t> counts;
    uint64_t failures = 0;
    /// Tasks in the population the counts were drawn from. Rates are
    /// expressed against this, not against the failure total, so a cell
    /// reads "labelled failures per task of the slice".
    uint64_t denominator = 0;

    void add(const std::string& label);
    uint64_t count_of(const std::string& label) const;
    /// Share of the population's tasks carrying this label, in percent;
    /// 0 when the denominator is 0.
    double rate_percent(const std::string& label) const;
};

/// OTHER and INFRASTRUCTURE, after the twelve category codes.
std::vector<std::string> all_failure_labels();

struct ModalitySummary {
    uint64_t tasks = 0;
    uint64_t successes = 0;
    double success_rate_percent = 0.0;
    MetricStats time_ms;
    MetricStats steps;
    std::optional<MetricStats> ocr_f1;  // present when the slice has vision tasks
    ErrorMatrix errors;
};

struct RunSummary {
    std::string run_id;
    BackendDescriptor backend;
    uint64_t dataset_seed = 0;
    int step_limit = 0;
    uint64_t task_count = 0;
    ModalitySummary overall;
    ModalitySummary vision;
    ModalitySummary text;
};

RunSummary compute_summary(const std::vector<TaskResult>& results,
                           const BackendDescriptor& backend, uint64_t dataset_seed,
                           int step_limit);

/// canonical=true drops wall-clock statistics so identical behavior
/// serializes to identical bytes regardless of machine speed.
Json summary_to_json(const RunSummary& summary, bool canonical = false);
RunSummary summary_from_json(const Json& j);

struct RunConfig {
    int step_limit = 25;
    int workers = 1;
};

/// One full pass over the dataset. `traces` and `results` are indexed in
/// dataset order no matter how many workers executed them.
struct EvaluationRun {
    RunSummary summary;
    std::vector<TaskResult> results;
    std::vector<std::vector<StepRecord>> traces;
};

/// Throws std::invalid_argument on an empty dataset. Worker threads pull
/// tasks from a shared cursor; any exception beyond per-task
/// infrastructure failures propagates to the caller.
EvaluationRun run_evaluation(const Dataset& dataset, const PolicyFactory& factory,
                             const RunConfig& config = {});

} // namespace faultbench
