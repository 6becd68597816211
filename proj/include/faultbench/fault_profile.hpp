#pragma once

#include "faultbench/jsonio.hpp"
#include "faultbench/taxonomy.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace faultbench {

/// Bad configuration input (profiles, CLI arguments). The CLI maps this
/// to its usage-error exit code.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-stage injection probabilities. At most one mechanism fires per
/// stage per task, so the seven probabilities must sum to at most 1.
struct StageFaultProbs {
    double p_omit = 0.0;
    double p_bad_name = 0.0;
    double p_bad_structure = 0.0;
    double p_bad_value = 0.0;
    double p_runtime = 0.0;
    double p_corrupt_result = 0.0;
    double p_loop = 0.0;

    double sum() const;
};

/// Injection configuration for a run. Stages are keyed by the owning
/// agent and tool, e.g. "DATA_ENG.DB_QUERY"; stages left out inject
/// nothing.
struct FaultProfile {
    uint64_t rng_seed = 0;
    std::map<ToolKind, StageFaultProbs> stages;
};

/// "EMAIL.OCR", "DATA_ENG.DB_QUERY", "DATA_ENG.DB_UPDATE".
std::string stage_key(ToolKind kind);
std::optional<ToolKind> stage_from_key(std::string_view key);

/// Throws ConfigError on unknown stage keys, unknown probability fields,
/// values outside [0,1], or per-stage sums above 1.
FaultProfile fault_profile_from_json(const Json& j);
Json fault_profile_to_json(const FaultProfile& profile);
FaultProfile load_fault_profile_file(const std::string& path);

/// A profile that injects nothing; running it must reproduce the
/// fault-free baseline byte for byte.
FaultProfile zero_fault_profile(uint64_t rng_seed = 0);

/// Environment-level switches handed to the harness for one task. These
/// sabotage inputs or tools directly rather than the policy's behavior.
struct TaskHooks {
    bool raise_on_query = false;          // db_query_tool raises
    bool raise_on_update = false;         // db_update_tool raises
    bool break_document_checksum = false; // document fails its integrity check
    bool corrupt_document = false;        // document decodes to a wrong amount
    bool corrupt_query_output = false;    // query result carries a wrong amount
    uint64_t corruption_seed = 0;
    bool operator==(const TaskHooks&) const = default;
};

struct StageFault {
    Mechanism mechanism = Mechanism::Omission;
    int structure_variant = 0;  // 0..3, used by BAD_STRUCTURE only
};

/// The mechanisms drawn for one task. Policy-side mechanisms live in
/// `stage`; environment-side ones are mirrored into `hooks`.
struct CompiledFaultPlan {
    std::array<std::optional<StageFault>, kAllToolKinds.size()> stage;
    TaskHooks hooks;

    const std::optional<StageFault>& for_tool(ToolKind kind) const {
        return stage[static_cast<size_t>(kind)];
    }
};

/// Deterministic per-task draw, independent of worker count and task
/// order: the stream is seeded by rng_seed XOR a hash of the task id.
CompiledFaultPlan compile_fault_plan(const FaultProfile& profile,
                                     const std::string& task_id);

} // namespace faultbench
