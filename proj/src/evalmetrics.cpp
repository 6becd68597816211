#include "faultbench/evalmetrics.hpp"

#include "faultbench/rng.hpp"
#include "faultbench/workflow.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace faultbench {
namespace {

ModalitySummary summarize_slice(const std::vector<const TaskResult*>& slice) {
    ModalitySummary summary;
    summary.tasks = slice.size();
    summary.errors.denominator = slice.size();
    std::vector<double> times;
    std::vector<double> steps;
    std::vector<double> f1s;
    for (const TaskResult* result : slice) {
        if (result->success) ++summary.successes;
        times.push_back(result->wall_ms);
        steps.push_back(static_cast<double>(result->steps));
        if (result->ocr_f1) f1s.push_back(*result->ocr_f1);
        if (!result->success) {
            summary.errors.add(result->error_code.value_or(kOtherLabel));
        }
    }
    if (summary.tasks > 0) {
        summary.success_rate_percent =
            100.0 * static_cast<double>(summary.successes) /
            static_cast<double>(summary.tasks);
    }
    summary.time_ms = compute_stats(times);
    summary.steps = compute_stats(steps);
    if (!f1s.empty()) summary.ocr_f1 = compute_stats(f1s);
    return summary;
}

Json stats_to_json(const MetricStats& stats) {
    return Json{{"mean", stats.mean}, {"stddev", stats.stddev}};
}

MetricStats stats_from_json(const Json& j) {
    MetricStats stats;
    stats.mean = j.at("mean").get<double>();
    stats.stddev = j.at("stddev").get<double>();
    return stats;
}

Json modality_to_json(const ModalitySummary& summary, bool canonical) {
    Json block;
    block["tasks"] = summary.tasks;
    block["successes"] = summary.successes;
    block["success_rate_percent"] = summary.success_rate_percent;
    if (!canonical) {
        block["time_ms"] = stats_to_json(summary.time_ms);
    }
    block["steps"] = stats_to_json(summary.steps);
    if (summary.ocr_f1) {
        block["ocr_f1"] = stats_to_json(*summary.ocr_f1);
    }
    Json counts = Json::object();
    for (const std::string& label : all_failure_labels()) {
        counts[label] = summary.errors.count_of(label);
    }
    block["errors"] = Json{{"failures", summary.errors.failures},
                           {"denominator", summary.errors.denominator},
                           {"counts", std::move(counts)}};
    return block;
}

ModalitySummary modality_from_json(const Json& j) {
    ModalitySummary summary;
    summary.tasks = j.at("tasks").get<uint64_t>();
    summary.successes = j.at("successes").get<uint64_t>();
    summary.success_rate_percent = j.at("success_rate_percent").get<double>();
    if (j.contains("time_ms")) summary.time_ms = stats_from_json(j.at("time_ms"));
    summary.steps = stats_from_json(j.at("steps"));
    if (j.contains("ocr_f1")) summary.ocr_f1 = stats_from_json(j.at("ocr_f1"));
    summary.errors.failures = j.at("errors").at("failures").get<uint64_t>();
    summary.errors.denominator =
        j.at("errors").value("denominator", summary.tasks);
    for (const auto& [label, count] : j.at("errors").at("counts").items()) {
        uint64_t n = count.get<uint64_t>();
        if (n > 0) summary.errors.counts[label] = n;
    }
    return summary;
}

} // namespace

std::string make_run_id(const BackendDescriptor& backend, uint64_t dataset_seed,
                        int step_limit, uint64_t task_count) {
    std::string material = backend.kind;
    material += '\x1f';
    material += backend.label;
    material += '\x1f';
    material += std::to_string(dataset_seed);
    material += '\x1f';
    material += std::to_string(step_limit);
    material += '\x1f';
    material += std::to_string(task_count);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "fb-%016" PRIx64, fnv1a64(material));
    return buf;
}

FieldMap ocr_fields_from_payload(const Json& payload) {
    FieldMap fields;
    if (!payload.is_object()) return fields;
    for (const char* name : kOcrFieldNames) {
        if (!payload.contains(name)) continue;
        const Json& value = payload.at(name);
        if (value.is_number_integer()) {
            fields[name] = std::to_string(value.get<int64_t>());
        } else if (value.is_string()) {
            fields[name] = value.get<std::string>();
        }
    }
    return fields;
}

double ocr_field_f1(const FieldMap& extracted, const FieldMap& expected) {
    size_t correct = 0;
    for (const auto& [key, value] : extracted) {
        auto it = expected.find(key);
        if (it != expected.end() && it->second == value) ++correct;
    }
    const double precision = extracted.empty()
                                 ? 0.0
                                 : static_cast<double>(correct) /
                                       static_cast<double>(extracted.size());
    const double recall = expected.empty()
                              ? 0.0
                              : static_cast<double>(correct) /
                                    static_cast<double>(expected.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

MetricStats compute_stats(const std::vector<double>& values) {
    MetricStats stats;
    if (values.empty()) return stats;
    double sum = 0.0;
    for (double v : values) sum += v;
    stats.mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return stats;
    double squares = 0.0;
    for (double v : values) squares += (v - stats.mean) * (v - stats.mean);
    stats.stddev = std::sqrt(squares / static_cast<double>(values.size() - 1));
    return stats;
}

void ErrorMatrix::add(const std::string& label) {
    ++counts[label];
    ++failures;
}

uint64_t ErrorMatrix::count_of(const std::string& label) const {
    auto it = counts.find(label);
    return it == counts.end() ? 0 : it->second;
}

double ErrorMatrix::rate_percent(const std::string& label) const {
    if (denominator == 0) return 0.0;
    return 100.0 * static_cast<double>(count_of(label)) /
           static_cast<double>(denominator);
}

std::vector<std::string> all_failure_labels() {
    std::vector<std::string> labels;
    for (const ErrorCategory& category : all_categories()) {
        labels.push_back(category_code(category));
    }
    labels.emplace_back(kOtherLabel);
    labels.emplace_back(kInfrastructureLabel);
    return labels;
}

RunSummary compute_summary(const std::vector<TaskResult>& results,
                           const BackendDescriptor& backend, uint64_t dataset_seed,
                           int step_limit) {
    RunSummary summary;
    summary.backend = backend;
    summary.dataset_seed = dataset_seed;
    summary.step_limit = step_limit;
    summary.task_count = results.size();
    summary.run_id = make_run_id(backend, dataset_seed, step_limit, results.size());

    std::vector<const TaskResult*> overall;
    std::vector<const TaskResult*> vision;
    std::vector<const TaskResult*> text;
    for (const TaskResult& result : results) {
        overall.push_back(&result);
        (result.modality == Modality::Vision ? vision : text).push_back(&result);
    }
    summary.overall = summarize_slice(overall);
    summary.vision = summarize_slice(vision);
    summary.text = summarize_slice(text);
    return summary;
}

Json summary_to_json(const RunSummary& summary, bool canonical) {
    Json j;
    j["run_id"] = summary.run_id;
    j["backend"] = Json{{"kind", summary.backend.kind}, {"label", summary.backend.label}};
    j["dataset_seed"] = summary.dataset_seed;
    j["step_limit"] = summary.step_limit;
    j["task_count"] = summary.task_count;
    j["overall"] = modality_to_json(summary.overall, canonical);
    j["vision"] = modality_to_json(summary.vision, canonical);
    j["text"] = modality_to_json(summary.text, canonical);
    return j;
}

RunSummary summary_from_json(const Json& j) {
    RunSummary summary;
    summary.run_id = j.at("run_id").get<std::string>();
    summary.backend.kind = j.at("backend").at("kind").get<std::string>();
    summary.backend.label = j.at("backend").at("label").get<std::string>();
    summary.dataset_seed = j.at("dataset_seed").get<uint64_t>();
    summary.step_limit = j.at("step_limit").get<int>();
    summary.task_count = j.at("task_count").get<uint64_t>();
    summary.overall = modality_from_json(j.at("overall"));
    summary.vision = modality_from_json(j.at("vision"));
    summary.text = modality_from_json(j.at("text"));
    return summary;
}

EvaluationRun run_evaluation(const Dataset& dataset, const PolicyFactory& factory,
                             const RunConfig& config) {
    if (dataset.tasks.empty()) {
        throw std::invalid_argument("run_evaluation: dataset has no tasks");
    }
    const size_t task_count = dataset.tasks.size();
    size_t workers = config.workers < 1 ? 1 : static_cast<size_t>(config.workers);
    if (workers > task_count) workers = task_count;

    EvaluationRun run;
    run.results.resize(task_count);
    run.traces.resize(task_count);

    std::atomic<size_t> cursor{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
        while (true) {
            size_t index = cursor.fetch_add(1);
            if (index >= task_count) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            try {
                const DatasetTask& task = dataset.tasks[index];
                auto policy = factory.make_policy(task);
                TaskExecution execution = run_task(task, *policy, config.step_limit,
                                                   factory.pre_task_hooks(task));
                run.results[index] = std::move(execution.result);
                run.traces[index] = std::move(execution.records);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (size_t i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& thread : pool) thread.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    run.summary = compute_summary(run.results, factory.descriptor(), dataset.seed,
                                  config.step_limit);
    return run;
}

} // namespace faultbench
