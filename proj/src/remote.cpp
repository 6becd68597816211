#include "faultbench/remote.hpp"

#include "faultbench/fault_profile.hpp"
#include "faultbench/tools.hpp"

#include <httplib.h>

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

namespace faultbench {
namespace {

/// Caps concurrent HTTP requests across worker threads.
class Gate {
public:
    explicit Gate(int slots) : available_(slots < 1 ? 1 : slots) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [this] { return available_ > 0; });
        --available_;
    }

    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
};

struct GateSlot {
    explicit GateSlot(Gate& gate) : gate_(gate) { gate_.acquire(); }
    ~GateSlot() { gate_.release(); }
    Gate& gate_;
};

std::string trim(const std::string& text) {
    size_t begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    size_t end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

std::string role_brief(AgentRole role) {
    switch (role) {
        case AgentRole::Email:
            return "You are EMAIL, the intake agent. Read the remittance input; for "
                   "an attached encoded document call your OCR tool to extract the "
                   "claim fields, then summarize the claim and hand off.";
        case AgentRole::DataEng:
            return "You are DATA_ENG, the data engineering agent. Verify the claimed "
                   "invoice against the database with your query tool, write the "
                   "reconciliation status with your update tool, then hand off.";
        case AgentRole::Recon:
            return "You are RECON, the reconciliation agent. Review the thread and "
                   "issue the final decision.";
    }
    return "";
}

std::string system_prompt(AgentRole role, const Json& tools_descriptor) {
    std::string prompt =
        "You are one agent in a three-agent invoice reconciliation pipeline "
        "(EMAIL -> DATA_ENG -> RECON). " +
        role_brief(role) +
        "\nRespond with exactly one action per turn: call one tool, or reply "
        "with plain text, or reply exactly HANDOFF to pass control, or reply "
        "exactly 'FINAL: RECONCILED' or 'FINAL: DISPUTED' to close the case "
        "(RECON only).\nAvailable tools and owners:\n";
    prompt += tools_descriptor.dump();
    return prompt;
}

std::string render_event(const TranscriptEvent& event) {
    std::string line = "[";
    line += agent_role_code(event.agent);
    line += "] ";
    line += action_kind_code(event.action);
    switch (event.action) {
        case ActionKind::ToolCall: {
            line += " " + event.tool_name + " args=" + event.raw_arguments;
            if (event.dispatch) {
                line += " -> ";
                line += dispatch_kind_code(*event.dispatch);
                if (event.tool_output) {
                    line += " output=" + event.tool_output->dump();
                } else if (!event.dispatch_detail.empty()) {
                    line += " detail=" + event.dispatch_detail;
                }
            }
            break;
        }
        case ActionKind::Text:
        case ActionKind::FinalDecision:
            line += ": " + event.raw_arguments;
            break;
        default:
            break;
    }
    return line;
}

std::string user_message(const ConversationState& state) {
    std::string message = "Task " + state.instance.task_id + ".\n";
    if (state.instance.email_text) {
        message += "Remittance email:\n" + *state.instance.email_text + "\n";
    }
    if (state.instance.document) {
        message += "Attached encoded document:\n" +
                   state.instance.document->encoded_payload + "\n";
    }
    message += "\nConversation so far:\n";
    if (state.transcript.empty()) {
        message += "(none)\n";
    } else {
        for (const TranscriptEvent& event : state.transcript) {
            message += render_event(event) + "\n";
        }
    }
    message += "\nYou are acting as ";
    message += agent_role_code(state.agent);
    message += ". Take your next action.";
    return message;
}

/// tools array in the wire format the endpoint expects.
Json wire_tools(const ToolRegistry& registry, AgentRole role) {
    Json tools = Json::array();
    for (const ToolSchema* schema : registry.owned_by(role)) {
        Json properties = Json::object();
        Json required = Json::array();
        for (const ParamSpec& param : schema->parameters) {
            Json prop;
            switch (param.kind) {
                case ParamKind::String: prop["type"] = "string"; break;
                case ParamKind::Integer: prop["type"] = "integer"; break;
                case ParamKind::Enum:
                    prop["type"] = "string";
                    prop["enum"] = param.enum_values;
                    break;
            }
            properties[param.name] = std::move(prop);
            if (param.required) required.push_back(param.name);
        }
        tools.push_back(Json{
            {"type", "function"},
            {"function", Json{{"name", schema->name},
                              {"description", schema->description},
                              {"parameters", Json{{"type", "object"},
                                                  {"properties", std::move(properties)},
                                                  {"required", std::move(required)}}}}}});
    }
    return tools;
}

AgentAction action_from_response(const std::string& body) {
    Json response = Json::parse(body, nullptr, false);
    if (response.is_discarded() || !response.is_object() ||
        !response.contains("choices") || !response.at("choices").is_array() ||
        response.at("choices").empty()) {
        return make_text(body.empty() ? "(empty backend response)" : body);
    }
    const Json& message = response.at("choices").at(0).value("message", Json::object());
    if (message.contains("tool_calls") && message.at("tool_calls").is_array() &&
        !message.at("tool_calls").empty()) {
        const Json& call = message.at("tool_calls").at(0).value("function", Json::object());
        return make_tool_call(call.value("name", ""), call.value("arguments", ""));
    }
    std::string content = trim(message.value("content", ""));
    if (content == "HANDOFF") return make_handoff();
    if (content.rfind("FINAL: ", 0) == 0) {
        std::string token = trim(content.substr(7));
        if (auto decision = decision_from_code(token)) {
            return make_final_decision(*decision);
        }
    }
    return make_text(content.empty() ? "(empty backend response)" : content);
}

} // namespace

RemoteEndpointConfig remote_config_from_json(const Json& j) {
    if (!j.is_object()) {
        throw ConfigError("remote config: top level must be a JSON object");
    }
    RemoteEndpointConfig config;
    for (const auto& [key, value] : j.items()) {
        if (key == "base_url") config.base_url = value.get<std::string>();
        else if (key == "model_name") config.model_name = value.get<std::string>();
        else if (key == "api_key_env") config.api_key_env = value.get<std::string>();
        else if (key == "timeout_ms") config.timeout_ms = value.get<int>();
        else if (key == "max_retries") config.max_retries = value.get<int>();
        else if (key == "max_in_flight") config.max_in_flight = value.get<int>();
        else throw ConfigError("remote config: unknown field '" + key + "'");
    }
    if (config.base_url.empty()) throw ConfigError("remote config: base_url is required");
    if (config.model_name.empty()) {
        throw ConfigError("remote config: model_name is required");
    }
    if (config.api_key_env.empty()) {
        throw ConfigError("remote config: api_key_env must name an environment variable");
    }
    if (config.timeout_ms < 1) throw ConfigError("remote config: timeout_ms must be >= 1");
    if (config.max_retries < 0) {
        throw ConfigError("remote config: max_retries must be >= 0");
    }
    return config;
}

RemoteEndpointConfig load_remote_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open remote config: " + path);
    Json j = Json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("remote config: invalid JSON in " + path);
    return remote_config_from_json(j);
}

struct RemotePolicyFactory::Shared {
    RemoteEndpointConfig config;
    std::string api_key;
    ToolRegistry registry = ToolRegistry::standard();
    Json tools_descriptor;
    Gate gate;

    Shared(RemoteEndpointConfig cfg, std::string key)
        : config(std::move(cfg)), api_key(std::move(key)), gate(config.max_in_flight) {
        tools_descriptor = registry.descriptor();
    }
};

namespace {

class RemotePolicy : public PolicyBackend {
public:
    explicit RemotePolicy(std::shared_ptr<RemotePolicyFactory::Shared> shared)
        : shared_(std::move(shared)) {}

    AgentAction next_action(const ConversationState& state) override {
        Json request;
        request["model"] = shared_->config.model_name;
        request["temperature"] = kRemoteTemperature;
        request["messages"] = Json::array({
            Json{{"role", "system"},
                 {"content", system_prompt(state.agent, shared_->tools_descriptor)}},
            Json{{"role", "user"}, {"content", user_message(state)}},
        });
        request["tools"] = wire_tools(shared_->registry, state.agent);
        const std::string body = request.dump();

        GateSlot slot(shared_->gate);
        std::string last_error;
        const int attempts = shared_->config.max_retries + 1;
        for (int attempt = 0; attempt < attempts; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(10 * attempt));
            }
            httplib::Client client(shared_->config.base_url);
            const auto timeout =
                std::chrono::milliseconds(shared_->config.timeout_ms);
            client.set_connection_timeout(timeout);
            client.set_read_timeout(timeout);
            client.set_write_timeout(timeout);
            client.set_bearer_token_auth(shared_->api_key);

            auto result = client.Post("/v1/chat/completions", body, "application/json");
            if (!result) {
                last_error = "transport error: " + httplib::to_string(result.error());
                continue;
            }
            if (result->status >= 500) {
                last_error = "server error: HTTP " + std::to_string(result->status);
                continue;
            }
            if (result->status != 200) {
                throw InfrastructureError("backend rejected request: HTTP " +
                                          std::to_string(result->status));
            }
            return action_from_response(result->body);
        }
        throw InfrastructureError("backend unreachable after " +
                                  std::to_string(attempts) + " attempts (" +
                                  last_error + ")");
    }

private:
    std::shared_ptr<RemotePolicyFactory::Shared> shared_;
};

} // namespace

RemotePolicyFactory::RemotePolicyFactory(RemoteEndpointConfig config) {
    const char* key = std::getenv(config.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw ConfigError("remote backend: environment variable " + config.api_key_env +
                          " is not set; the API key is read only from the environment");
    }
    shared_ = std::make_shared<Shared>(std::move(config), key);
}

BackendDescriptor RemotePolicyFactory::descriptor() const {
    return BackendDescriptor{"remote", shared_->config.model_name};
}

std::unique_ptr<PolicyBackend> RemotePolicyFactory::make_policy(const DatasetTask&) const {
    return std::make_unique<RemotePolicy>(shared_);
}

} // namespace faultbench
