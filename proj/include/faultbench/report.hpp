#pragma once

#include "faultbench/evalmetrics.hpp"

#include <string>
#include <vector>

namespace faultbench {

/// "756 (76.36%)" — the rate is percent of the slice's tasks.
std::string format_matrix_cell(uint64_t count, double rate_percent);

/// Human-readable run report: headline metrics per slice, then the error
/// distribution per modality. The text-modality table leaves out the OCR
/// categories (that tool never runs on text input) and says so.
std::string render_report_markdown(const RunSummary& summary);

/// Cross-run overview: one overall-performance row per run, then vision
/// and text error tables with one row per run.
std::string render_overview_markdown(const std::vector<RunSummary>& summaries);

/// Long-form CSV, one row per run and failure label:
/// platform_label,model_label,category_code,count,rate_percent
std::string render_matrix_csv(const std::vector<RunSummary>& summaries,
                              Modality modality);
std::string render_matrix_csv(const RunSummary& summary, Modality modality);

} // namespace faultbench
