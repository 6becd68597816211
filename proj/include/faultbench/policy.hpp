#pragma once

#include "faultbench/fault_profile.hpp"
#include "faultbench/scenario.hpp"
#include "faultbench/tools.hpp"
#include "faultbench/trace.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace faultbench {

/// The backend could not be reached at all (network refusal, repeated
/// timeouts). Distinct from every behavioral failure category.
class InfrastructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One prior step as agents observe it: no deviation labels, no timings.
struct TranscriptEvent {
    AgentRole agent = AgentRole::Email;
    ActionKind action = ActionKind::Text;
    std::string tool_name;
    std::string raw_arguments;
    std::optional<DispatchKind> dispatch;
    std::string dispatch_detail;
    std::optional<Json> tool_output;
};

/// What a policy wants to do next. ForcedTermination is reserved for the
/// harness and is not a valid policy action.
struct AgentAction {
    ActionKind kind = ActionKind::Text;
    std::string tool_name;      // TOOL_CALL only
    std::string raw_arguments;  // call args / prose / decision token
};

AgentAction make_tool_call(std::string tool_name, std::string raw_arguments);
AgentAction make_text(std::string prose);
AgentAction make_handoff();
AgentAction make_final_decision(Decision decision);

/// Everything the active agent can see when asked to act.
struct ConversationState {
    const TaskInstance& instance;
    AgentRole agent;
    const std::vector<TranscriptEvent>& transcript;
};

class PolicyBackend {
public:
    virtual ~PolicyBackend() = default;
    /// May throw InfrastructureError; any other exception is a harness bug.
    virtual AgentAction next_action(const ConversationState& state) = 0;
};

struct BackendDescriptor {
    std::string kind;   // golden | fault | replay | remote
    std::string label;  // human-readable variant (model name, trace source, ...)
};

/// Builds one PolicyBackend per task plus the environment hooks that
/// must be armed before the task starts.
class PolicyFactory {
public:
    virtual ~PolicyFactory() = default;
    virtual BackendDescriptor descriptor() const = 0;
    virtual TaskHooks pre_task_hooks(const DatasetTask& task) const;
    virtual std::unique_ptr<PolicyBackend> make_policy(const DatasetTask& task) const = 0;
};

/// Scripted reference operator: runs the expected plan exactly, adapts
/// to tool failures by noting the problem and handing off, and decides
/// RECONCILED only when the observed claim matches the stored record
/// (DISPUTED when the claim is unverifiable). Stateless: every choice is
/// a function of the instance and the visible transcript.
class GoldenPolicy : public PolicyBackend {
public:
    AgentAction next_action(const ConversationState& state) override;
};

/// Wraps the golden operator and rewrites its behavior according to a
/// compiled per-task fault plan: skipped calls, wrong tool names,
/// malformed or wrong-valued arguments, corrupted update statuses, and
/// degenerate repetition loops.
class FaultPolicy : public PolicyBackend {
public:
    explicit FaultPolicy(CompiledFaultPlan plan);
    AgentAction next_action(const ConversationState& state) override;

private:
    GoldenPolicy inner_;
    CompiledFaultPlan plan_;
};

/// Replays the recorded actions of a previous run verbatim, in order.
/// Emits an inert TEXT step if asked for more actions than were recorded.
class ReplayPolicy : public PolicyBackend {
public:
    explicit ReplayPolicy(std::vector<StepRecord> records);
    AgentAction next_action(const ConversationState& state) override;

private:
    std::vector<StepRecord> actions_;
    size_t cursor_ = 0;
};

class GoldenPolicyFactory : public PolicyFactory {
public:
    BackendDescriptor descriptor() const override;
    std::unique_ptr<PolicyBackend> make_policy(const DatasetTask& task) const override;
};

class FaultPolicyFactory : public PolicyFactory {
public:
    explicit FaultPolicyFactory(FaultProfile profile);
    BackendDescriptor descriptor() const override;
    TaskHooks pre_task_hooks(const DatasetTask& task) const override;
    std::unique_ptr<PolicyBackend> make_policy(const DatasetTask& task) const override;
    const FaultProfile& profile() const { return profile_; }

private:
    FaultProfile profile_;
};

class ReplayPolicyFactory : public PolicyFactory {
public:
    /// `hooks_profile` restores the environment hooks of the original
    /// run; pass the profile recorded in the source run's header.
    ReplayPolicyFactory(std::map<std::string, std::vector<StepRecord>> records_by_task,
                        std::optional<FaultProfile> hooks_profile,
                        std::string source_label);
    BackendDescriptor descriptor() const override;
    TaskHooks pre_task_hooks(const DatasetTask& task) const override;
    /// Throws ConfigError when the trace has no records for the task.
    std::unique_ptr<PolicyBackend> make_policy(const DatasetTask& task) const override;

private:
    std::map<std::string, std::vector<StepRecord>> records_by_task_;
    std::optional<FaultProfile> hooks_profile_;
    std::string source_label_;
};

} // namespace faultbench
