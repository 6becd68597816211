#include "faultbench/report.hpp"

#include <cinttypes>
#include <cstdio>

namespace faultbench {
namespace {

std::string fmt1(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.1f", x);
    return buf;
}

std::string fmt2(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

std::string fmt3(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", x);
    return buf;
}

std::string mean_pm_std1(const MetricStats& stats) {
    return fmt1(stats.mean) + " ± " + fmt1(stats.stddev);
}

// Wall time is tracked in milliseconds; the tables report seconds.
MetricStats to_seconds(const MetricStats& ms) {
    return MetricStats{ms.mean / 1000.0, ms.stddev / 1000.0};
}

std::string metrics_cells(const ModalitySummary& slice) {
    std::string row = std::to_string(slice.tasks);
    row += " | " + fmt1(slice.success_rate_percent);
    row += " | " + mean_pm_std1(to_seconds(slice.time_ms));
    row += " | " + mean_pm_std1(slice.steps);
    row += " | ";
    if (slice.ocr_f1) {
        row += fmt3(slice.ocr_f1->mean) + " ± " + fmt3(slice.ocr_f1->stddev);
    } else {
        row += "—";
    }
    return row;
}

std::string metrics_row(const char* name, const ModalitySummary& slice) {
    return "| " + std::string(name) + " | " + metrics_cells(slice) + " |\n";
}

std::string run_label(const RunSummary& summary) {
    return summary.backend.kind + " / " + summary.backend.label;
}

std::vector<std::string> table_labels(Modality modality) {
    std::vector<std::string> labels;
    for (const ErrorCategory& category : all_categories()) {
        if (modality == Modality::Text && category.tool == ToolKind::Ocr) continue;
        labels.push_back(category_code(category));
    }
    labels.emplace_back(kOtherLabel);
    labels.emplace_back(kInfrastructureLabel);
    return labels;
}

std::string error_table(const ModalitySummary& slice, Modality modality) {
    const std::vector<std::string> labels = table_labels(modality);
    std::string head = "| Failures |";
    std::string rule = "|---|";
    std::string body = "| " + std::to_string(slice.errors.failures) + " |";
    for (const std::string& label : labels) {
        head += " " + label + " |";
        rule += "---|";
        body += " " +
                format_matrix_cell(slice.errors.count_of(label),
                                   slice.errors.rate_percent(label)) +
                " |";
    }
    return head + "\n" + rule + "\n" + body + "\n";
}

} // namespace

std::string format_matrix_cell(uint64_t count, double rate_percent) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%" PRIu64 " (%.2f%%)", count, rate_percent);
    return buf;
}

std::string render_report_markdown(const RunSummary& summary) {
    std::string md;
    md += "# Run report\n\n";
    md += "Run `" + summary.run_id + "` — backend `" + summary.backend.kind + "` (" +
          summary.backend.label + "), dataset seed " +
          std::to_string(summary.dataset_seed) + ", step limit " +
          std::to_string(summary.step_limit) + ", " +
          std::to_string(summary.task_count) + " tasks.\n\n";

    md += "## Headline metrics\n\n";
    md += "| Slice | Tasks | SR (%) | Time (s) | Steps | OCR F1 |\n";
    md += "|---|---|---|---|---|---|\n";
    md += metrics_row("Overall", summary.overall);
    md += metrics_row("Vision", summary.vision);
    md += metrics_row("Text", summary.text);
    md += "\n";

    md += "## Error distribution — vision input\n\n";
    md += "Error counts and rates per category; percentages are based on the " +
          std::to_string(summary.vision.tasks) + " vision tasks.\n\n";
    md += error_table(summary.vision, Modality::Vision);
    md += "\n";

    md += "## Error distribution — text input\n\n";
    md += "Error counts and rates per category; percentages are based on the " +
          std::to_string(summary.text.tasks) +
          " text tasks. OCR categories cannot occur "
          "on text input and are omitted.\n\n";
    md += error_table(summary.text, Modality::Text);
    return md;
}

std::string render_overview_markdown(const std::vector<RunSummary>& summaries) {
    std::string md = "# Evaluation report\n\n";
    md += "## Overall performance\n\n";
    md += "| Run | Tasks | SR (%) | Time (s) | Steps | OCR F1 |\n";
    md += "|---|---|---|---|---|---|\n";
    for (const RunSummary& summary : summaries) {
        md += "| " + run_label(summary) + " | " + metrics_cells(summary.overall) +
              " |\n";
    }
    md += "\n";
    for (Modality modality : {Modality::Vision, Modality::Text}) {
        const bool vision = modality == Modality::Vision;
        md += vision ? "## Error distribution — vision input\n\n"
                     : "## Error distribution — text input\n\n";
        md += vision ? std::string("Percentages are based on each run's vision tasks.")
                     : std::string("Percentages are based on each run's text tasks. "
                                   "OCR categories cannot occur on text input and "
                                   "are omitted.");
        md += "\n\n";
        const std::vector<std::string> labels = table_labels(modality);
        std::string head = "| Run |";
        std::string rule = "|---|";
        for (const std::string& label : labels) {
            head += " " + label + " |";
            rule += "---|";
        }
        md += head + "\n" + rule + "\n";
        for (const RunSummary& summary : summaries) {
            const ModalitySummary& slice = vision ? summary.vision : summary.text;
            std::string row = "| " + run_label(summary) + " |";
            for (const std::string& label : labels) {
                row += " " +
                       format_matrix_cell(slice.errors.count_of(label),
                                          slice.errors.rate_percent(label)) +
                       " |";
            }
            md += row + "\n";
        }
        md += "\n";
    }
    return md;
}

std::string render_matrix_csv(const std::vector<RunSummary>& summaries,
                              Modality modality) {
    std::string csv = "platform_label,model_label,category_code,count,rate_percent\n";
    for (const RunSummary& summary : summaries) {
        const ModalitySummary& slice =
            (modality == Modality::Vision) ? summary.vision : summary.text;
        for (const std::string& label : all_failure_labels()) {
            csv += summary.backend.kind + "," + summary.backend.label + "," + label +
                   "," + std::to_string(slice.errors.count_of(label)) + "," +
                   fmt2(slice.errors.rate_percent(label)) + "\n";
        }
    }
    return csv;
}

std::string render_matrix_csv(const RunSummary& summary, Modality modality) {
    return render_matrix_csv(std::vector<RunSummary>{summary}, modality);
}

} // namespace faultbench
