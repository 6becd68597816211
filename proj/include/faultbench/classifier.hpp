#pragma once

#include "faultbench/scenario.hpp"
#include "faultbench/taxonomy.hpp"
#include "faultbench/trace.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace faultbench {

/// Result of inspecting one step against the plan: the deviation the
/// step exhibits (if any) and whether the expected stage advanced.
struct StepClassification {
    std::optional<StepDeviation> deviation;
    bool advanced = false;
};

/// Labels one step given how many plan stages are already complete.
///
/// Rules, in order of dispatch disposition:
///  - REJECTED_NAME while the acting agent owns the pending stage marks
///    that stage's tool NOT_INITIALIZED (BAD_NAME mechanism).
///  - REJECTED_STRUCTURE marks the called tool NOT_INITIALIZED
///    (BAD_STRUCTURE).
///  - REJECTED_VALUE marks the called tool ARGS_MISMATCH (BAD_VALUE).
///  - RUNTIME_ERROR marks the called tool ERROR (RUNTIME).
///  - OK on the pending stage's tool advances the stage; a payload that
///    differs from the expected output marks RESULT_MISMATCH
///    (OUTPUT_DIVERGENCE) but still advances.
///  - OK repeats of already-completed stages are benign.
///  - Any other OK call, or a HANDOFF, while the acting agent owns the
///    pending stage marks that stage NOT_INITIALIZED (OMISSION).
///  - FORCED_TERMINATION with a pending stage marks it NOT_INITIALIZED
///    (LOOP_TERMINATION).
///  - TEXT and FINAL_DECISION steps are never deviations themselves.
StepClassification classify_step(const StepRecord& record, const GoldenPlan& plan,
                                 size_t stages_completed);

/// Rewrites every record's deviation label from scratch and returns the
/// number of plan stages completed by the trace.
size_t classify_trace(std::vector<StepRecord>& records, const GoldenPlan& plan);

struct Attribution {
    std::string code;  // category code, OTHER, or INFRASTRUCTURE
    std::optional<Mechanism> mechanism;
};

/// Picks the failure label for a finished, unsuccessful task: the
/// earliest labeled deviation wins; a forced termination with no earlier
/// deviation is attributed to the first unfulfilled stage; otherwise
/// OTHER. Throws std::logic_error when called on a successful outcome.
Attribution attribute_task_failure(const std::vector<StepRecord>& records,
                                   const GoldenPlan& plan, const Outcome& outcome);

} // namespace faultbench
