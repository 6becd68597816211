#include "faultbench/fault_profile.hpp"

#include "faultbench/rng.hpp"

#include <fstream>
#include <utility>
#include <vector>

namespace faultbench {
namespace {

constexpr double kSumSlack = 1e-9;

using ProbField = std::pair<const char*, double StageFaultProbs::*>;

constexpr ProbField kProbFields[] = {
    {"p_omit", &StageFaultProbs::p_omit},
    {"p_bad_name", &StageFaultProbs::p_bad_name},
    {"p_bad_structure", &StageFaultProbs::p_bad_structure},
    {"p_bad_value", &StageFaultProbs::p_bad_value},
    {"p_runtime", &StageFaultProbs::p_runtime},
    {"p_corrupt_result", &StageFaultProbs::p_corrupt_result},
    {"p_loop", &StageFaultProbs::p_loop},
};

constexpr Mechanism kDrawOrder[] = {
    Mechanism::Omission,      Mechanism::BadName, Mechanism::BadStructure,
    Mechanism::BadValue,      Mechanism::Runtime, Mechanism::OutputDivergence,
    Mechanism::LoopTermination,
};

double prob_for(const StageFaultProbs& probs, Mechanism mechanism) {
    switch (mechanism) {
        case Mechanism::Omission: return probs.p_omit;
        case Mechanism::BadName: return probs.p_bad_name;
        case Mechanism::BadStructure: return probs.p_bad_structure;
        case Mechanism::BadValue: return probs.p_bad_value;
        case Mechanism::Runtime: return probs.p_runtime;
        case Mechanism::OutputDivergence: return probs.p_corrupt_result;
        case Mechanism::LoopTermination: return probs.p_loop;
    }
    return 0.0;
}

} // namespace

double StageFaultProbs::sum() const {
    return p_omit + p_bad_name + p_bad_structure + p_bad_value + p_runtime +
           p_corrupt_result + p_loop;
}

std::string stage_key(ToolKind kind) {
    std::string key(agent_role_code(owner_of(kind)));
    key += '.';
    key += tool_kind_code(kind);
    return key;
}

std::optional<ToolKind> stage_from_key(std::string_view key) {
    for (ToolKind kind : kAllToolKinds) {
        if (stage_key(kind) == key) return kind;
    }
    return std::nullopt;
}

FaultProfile fault_profile_from_json(const Json& j) {
    if (!j.is_object()) {
        throw ConfigError("fault profile: top level must be a JSON object");
    }
    FaultProfile profile;
    for (const auto& [key, value] : j.items()) {
        if (key == "rng_seed") {
            if (!value.is_number_integer() ||
                (!value.is_number_unsigned() && value.get<int64_t>() < 0)) {
                throw ConfigError("fault profile: rng_seed must be a non-negative integer");
            }
            profile.rng_seed = value.get<uint64_t>();
        } else if (key == "stages") {
            if (!value.is_object()) {
                throw ConfigError("fault profile: stages must be an object");
            }
        } else {
            throw ConfigError("fault profile: unknown top-level field '" + key + "'");
        }
    }
    if (!j.contains("stages")) return profile;

    for (const auto& [key, stage_json] : j.at("stages").items()) {
        auto kind = stage_from_key(key);
        if (!kind) {
            throw ConfigError("fault profile: unknown stage key '" + key + "'");
        }
        if (!stage_json.is_object()) {
            throw ConfigError("fault profile: stage '" + key + "' must be an object");
        }
        StageFaultProbs probs;
        for (const auto& [field, value] : stage_json.items()) {
            bool known = false;
            for (const auto& [name, member] : kProbFields) {
                if (field == name) {
                    if (!value.is_number()) {
                        throw ConfigError("fault profile: " + key + "." + field +
                                          " must be a number");
                    }
                    double p = value.get<double>();
                    if (p < 0.0 || p > 1.0) {
                        throw ConfigError("fault profile: " + key + "." + field +
                                          " must lie in [0, 1]");
                    }
                    probs.*member = p;
                    known = true;
                    break;
                }
            }
            if (!known) {
                throw ConfigError("fault profile: unknown field '" + field +
                                  "' in stage '" + key + "'");
            }
        }
        if (probs.sum() > 1.0 + kSumSlack) {
            throw ConfigError("fault profile: probabilities for stage '" + key +
                              "' sum above 1");
        }
        profile.stages[*kind] = probs;
    }
    return profile;
}

Json fault_profile_to_json(const FaultProfile& profile) {
    Json stages = Json::object();
    for (ToolKind kind : kAllToolKinds) {
        auto it = profile.stages.find(kind);
        if (it == profile.stages.end()) continue;
        Json stage = Json::object();
        for (const auto& [name, member] : kProbFields) {
            stage[name] = it->second.*member;
        }
        stages[stage_key(kind)] = std::move(stage);
    }
    Json j;
    j["rng_seed"] = profile.rng_seed;
    j["stages"] = std::move(stages);
    return j;
}

FaultProfile load_fault_profile_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open fault profile: " + path);
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("fault profile: invalid JSON in " + path);
    return fault_profile_from_json(j);
}

FaultProfile zero_fault_profile(uint64_t rng_seed) {
    FaultProfile profile;
    profile.rng_seed = rng_seed;
    return profile;
}

CompiledFaultPlan compile_fault_plan(const FaultProfile& profile,
                                     const std::string& task_id) {
    SplitMix64 rng(profile.rng_seed ^ fnv1a64(task_id));
    CompiledFaultPlan plan;
    static const StageFaultProbs kZeroProbs{};
    for (ToolKind kind : kAllToolKinds) {
        auto it = profile.stages.find(kind);
        const StageFaultProbs& probs = (it == profile.stages.end()) ? kZeroProbs
                                                                    : it->second;
        double u = rng.next_double();
        double cumulative = 0.0;
        for (Mechanism mechanism : kDrawOrder) {
            cumulative += prob_for(probs, mechanism);
            if (u < cumulative) {
                plan.stage[static_cast<size_t>(kind)] = StageFault{mechanism, 0};
                break;
            }
        }
    }
    for (ToolKind kind : kAllToolKinds) {
        auto& fault = plan.stage[static_cast<size_t>(kind)];
        if (fault && fault->mechanism == Mechanism::BadStructure) {
            fault->structure_variant = static_cast<int>(rng.next_below(4));
        }
    }
    plan.hooks.corruption_seed = rng.next_u64();

    if (const auto& ocr = plan.for_tool(ToolKind::Ocr)) {
        if (ocr->mechanism == Mechanism::Runtime) plan.hooks.break_document_checksum = true;
        if (ocr->mechanism == Mechanism::OutputDivergence) plan.hooks.corrupt_document = true;
    }
    if (const auto& query = plan.for_tool(ToolKind::DbQuery)) {
        if (query->mechanism == Mechanism::Runtime) plan.hooks.raise_on_query = true;
        if (query->mechanism == Mechanism::OutputDivergence) {
            plan.hooks.corrupt_query_output = true;
        }
    }
    if (const auto& update = plan.for_tool(ToolKind::DbUpdate)) {
        if (update->mechanism == Mechanism::Runtime) plan.hooks.raise_on_update = true;
    }
    return plan;
}

} // namespace faultbench
