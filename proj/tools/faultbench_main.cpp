#include "faultbench/evalmetrics.hpp"
#include "faultbench/fault_profile.hpp"
#include "faultbench/offline_classify.hpp"
#include "faultbench/policy.hpp"
#include "faultbench/remote.hpp"
#include "faultbench/report.hpp"
#include "faultbench/scenario.hpp"
#include "faultbench/tools.hpp"
#include "faultbench/trace_io.hpp"
#include "faultbench/workflow.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace {

using namespace faultbench;

int cmd_gen(uint64_t seed, uint64_t count, const std::string& out_path) {
    Dataset dataset = generate_dataset(seed, count);
    save_dataset_file(dataset, out_path);
    std::printf("wrote %llu tasks (seed %llu) to %s\n",
                static_cast<unsigned long long>(dataset.count),
                static_cast<unsigned long long>(dataset.seed), out_path.c_str());
    return 0;
}

struct RunOptions {
    std::string dataset_path;
    std::string backend = "golden";
    std::string profile_path;
    std::string replay_trace_path;
    std::string remote_config_path;
    std::string out_dir = "run_out";
    int workers = 1;
    int limit = kDefaultStepLimit;
};

int cmd_run(const RunOptions& options) {
    Dataset dataset = load_dataset_file(options.dataset_path);

    std::unique_ptr<PolicyFactory> factory;
    std::optional<FaultProfile> header_profile;
    if (options.backend == "golden") {
        factory = std::make_unique<GoldenPolicyFactory>();
    } else if (options.backend == "fault") {
        if (options.profile_path.empty()) {
            throw ConfigError("run: --backend fault requires --profile");
        }
        FaultProfile profile = load_fault_profile_file(options.profile_path);
        header_profile = profile;
        factory = std::make_unique<FaultPolicyFactory>(std::move(profile));
    } else if (options.backend == "replay") {
        if (options.replay_trace_path.empty()) {
            throw ConfigError("run: --backend replay requires --replay-trace");
        }
        TraceFile trace = load_trace_file(options.replay_trace_path);
        header_profile = trace.header.fault_profile;
        factory = std::make_unique<ReplayPolicyFactory>(std::move(trace.by_task),
                                                        trace.header.fault_profile,
                                                        trace.header.run_id);
    } else if (options.backend == "remote") {
        if (options.remote_config_path.empty()) {
            throw ConfigError("run: --backend remote requires --remote-config");
        }
        factory = std::make_unique<RemotePolicyFactory>(
            load_remote_config_file(options.remote_config_path));
    } else {
        throw ConfigError("run: unknown backend '" + options.backend + "'");
    }

    RunConfig config;
    config.step_limit = options.limit;
    config.workers = options.workers;
    EvaluationRun run = run_evaluation(dataset, *factory, config);
    RunHeader header = make_run_header(run.summary, std::move(header_profile));
    write_run_archive(options.out_dir, header, run);

    const ModalitySummary& overall = run.summary.overall;
    std::printf("run %s: %llu/%llu succeeded (%.1f%%), archive in %s\n",
                run.summary.run_id.c_str(),
                static_cast<unsigned long long>(overall.successes),
                static_cast<unsigned long long>(overall.tasks),
                overall.success_rate_percent, options.out_dir.c_str());
    return 0;
}

int cmd_classify(const std::string& dataset_path, const std::string& trace_path,
                 const std::string& results_path, const std::string& out_path) {
    Dataset dataset = load_dataset_file(dataset_path);
    TraceFile trace = load_trace_file(trace_path);
    std::optional<ResultsFile> stored;
    if (!results_path.empty()) stored = load_results_file(results_path);

    OfflineReport report = classify_trace_file(dataset, trace, stored);

    ErrorMatrix vision, text;
    for (const DatasetTask& task : dataset.tasks) {
        ErrorMatrix& matrix =
            (task.instance.modality == Modality::Vision) ? vision : text;
        ++matrix.denominator;
    }
    size_t successes = 0;
    for (size_t i = 0; i < report.classifications.size(); ++i) {
        const OfflineTaskClassification& c = report.classifications[i];
        if (c.success) {
            ++successes;
            continue;
        }
        ErrorMatrix& matrix =
            (dataset.tasks[i].instance.modality == Modality::Vision) ? vision : text;
        matrix.add(c.error_code.value_or(kOtherLabel));
    }
    std::printf("classified %zu tasks: %zu succeeded, %zu failed\n",
                report.classifications.size(), successes,
                report.classifications.size() - successes);
    for (const auto& [name, matrix] :
         {std::pair<const char*, const ErrorMatrix&>{"vision", vision},
          {"text", text}}) {
        for (const auto& [label, count] : matrix.counts) {
            std::printf("%s %s %llu (%.2f%%)\n", name, label.c_str(),
                        static_cast<unsigned long long>(count),
                        matrix.rate_percent(label));
        }
    }

    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        for (const OfflineTaskClassification& c : report.classifications) {
            Json line;
            line["task_id"] = c.task_id;
            line["success"] = c.success;
            if (c.error_code) line["error_code"] = *c.error_code;
            if (c.error_mechanism) line["error_mechanism"] = *c.error_mechanism;
            out << line.dump() << "\n";
        }
    }

    if (report.comparison) {
        std::printf("stored results: %zu/%zu labels match\n",
                    report.comparison->matches, report.comparison->tasks);
        if (!report.comparison->mismatched_task_ids.empty()) {
            for (const std::string& task_id : report.comparison->mismatched_task_ids) {
                std::fprintf(stderr, "label mismatch on %s\n", task_id.c_str());
            }
            return 2;
        }
    }
    return 0;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& format,
               const std::string& out_path) {
    std::vector<RunSummary> summaries;
    for (const std::string& dir : run_dirs) {
        const std::string path = dir + "/summary.json";
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open summary file: " + path);
        Json j = Json::parse(in, nullptr, false);
        if (j.is_discarded()) {
            throw std::runtime_error("summary file is not valid JSON: " + path);
        }
        summaries.push_back(summary_from_json(j));
    }

    if (format == "md") {
        write_text_file(out_path, render_overview_markdown(summaries));
        std::printf("report: %zu run(s) -> %s\n", summaries.size(), out_path.c_str());
    } else if (format == "csv") {
        // The vision and text matrices are separate tables; --out names a
        // directory that receives one CSV per modality.
        std::filesystem::create_directories(out_path);
        write_text_file(out_path + "/matrix_vision.csv",
                        render_matrix_csv(summaries, Modality::Vision));
        write_text_file(out_path + "/matrix_text.csv",
                        render_matrix_csv(summaries, Modality::Text));
        std::printf("report: %zu run(s) -> %s/matrix_vision.csv, %s/matrix_text.csv\n",
                    summaries.size(), out_path.c_str(), out_path.c_str());
    } else {
        throw ConfigError("report: unknown format '" + format +
                          "' (expected md or csv)");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic multi-agent invoice reconciliation harness"};
    app.require_subcommand(1);

    uint64_t gen_seed = 42;
    uint64_t gen_count = 10;
    std::string gen_out = "dataset.jsonl";
    CLI::App* gen = app.add_subcommand("gen", "Generate a task dataset");
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("--count", gen_count, "Number of tasks (even)");
    gen->add_option("--out", gen_out, "Output dataset path");

    RunOptions run_options;
    CLI::App* run = app.add_subcommand("run", "Execute a dataset against a backend");
    run->add_option("--dataset", run_options.dataset_path, "Dataset path")->required();
    run->add_option("--backend", run_options.backend,
                    "Backend: golden | fault | replay | remote");
    run->add_option("--profile", run_options.profile_path,
                    "Fault profile JSON (fault backend)");
    run->add_option("--replay-trace", run_options.replay_trace_path,
                    "Source trace file (replay backend)");
    run->add_option("--remote-config", run_options.remote_config_path,
                    "Endpoint config JSON (remote backend)");
    run->add_option("--out", run_options.out_dir, "Archive output directory");
    run->add_option("--workers", run_options.workers, "Worker threads");
    run->add_option("--limit", run_options.limit, "Per-task step limit");

    std::string cls_dataset, cls_trace, cls_results, cls_out;
    CLI::App* classify =
        app.add_subcommand("classify", "Recompute failure labels from a trace");
    classify->add_option("--dataset", cls_dataset, "Dataset path")->required();
    classify->add_option("--trace", cls_trace, "Trace file")->required();
    classify->add_option("--results", cls_results,
                         "Stored results to compare against");
    classify->add_option("--out", cls_out, "Write recomputed labels (JSONL)");

    std::vector<std::string> rep_runs;
    std::string rep_format = "md";
    std::string rep_out;
    CLI::App* report =
        app.add_subcommand("report", "Render tables over one or more run archives");
    report->add_option("--runs", rep_runs, "Run archive directories")->required();
    report->add_option("--format", rep_format, "Output format: md | csv");
    report->add_option("--out", rep_out, "Output file (md) or directory (csv)")
        ->required();

    CLI::App* schemas = app.add_subcommand("schemas", "Print the tool schemas");

    // Exit codes: 0 success, 1 usage error (bad flags, bad configuration,
    // invalid arguments), 2 runtime failure (I/O errors, malformed files,
    // verification mismatches).
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_seed, gen_count, gen_out);
        if (run->parsed()) return cmd_run(run_options);
        if (classify->parsed()) {
            return cmd_classify(cls_dataset, cls_trace, cls_results, cls_out);
        }
        if (report->parsed()) {
            return cmd_report(rep_runs, rep_format, rep_out);
        }
        if (schemas->parsed()) {
            std::printf("%s\n", ToolRegistry::standard().descriptor().dump(2).c_str());
            return 0;
        }
    } catch (const ConfigError& error) {
        std::fprintf(stderr, "config error: %s\n", error.what());
        return 1;
    } catch (const std::invalid_argument& error) {
        std::fprintf(stderr, "config error: %s\n", error.what());
        return 1;
    } catch (const std::exception& error) {
        std::fprintf(stderr, "error: %s\n", error.what());
        return 2;
    }
    return 1;
}
