#pragma once

#include "faultbench/fault_profile.hpp"
#include "faultbench/policy.hpp"
#include "faultbench/scenario.hpp"
#include "faultbench/trace.hpp"

#include <vector>

namespace faultbench {

/// Hard ceiling on counted steps per task; a task that reaches it is
/// forcibly terminated and marked accordingly.
inline constexpr int kDefaultStepLimit = 25;

Decision decision_for_status(InvoiceStatus status);

struct TaskExecution {
    std::vector<StepRecord> records;  // includes the forced-termination marker
    Outcome outcome;
    TaskResult result;
};

/// Drives one task against a policy until a final decision, a handoff
/// past the last agent, an infrastructure failure, or the step limit.
///
/// Mechanics:
///  - Agents act in pipeline order EMAIL -> DATA_ENG -> RECON; HANDOFF
///    moves control forward, and a handoff from RECON ends the episode
///    with no decision.
///  - Tool calls are validated against the registry and the caller's
///    ownership before dispatching against the task's store.
///  - FINAL_DECISION from any agent but RECON is recorded as TEXT.
///  - Hitting the step limit appends a FORCED_TERMINATION marker at
///    step_index == limit; the marker is not a counted step.
///  - `hooks` arm environment faults (raising tools, document damage,
///    corrupted query results) before and during the episode.
///
/// Success requires: no forced termination, no infrastructure failure,
/// the store equal to the oracle final state, and the decision equal to
/// the expected one. Deviation labels and the failure attribution are
/// filled in before returning.
TaskExecution run_task(const DatasetTask& task, PolicyBackend& policy,
                       int step_limit = kDefaultStepLimit,
                       const TaskHooks& hooks = {});

} // namespace faultbench
