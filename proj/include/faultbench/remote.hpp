#pragma once

#include "faultbench/jsonio.hpp"
#include "faultbench/policy.hpp"

#include <memory>
#include <string>

namespace faultbench {

/// Sampling temperature sent with every request. Zero keeps repeated
/// runs against the same backend as comparable as the backend allows.
inline constexpr double kRemoteTemperature = 0.0;

struct RemoteEndpointConfig {
    std::string base_url;  // e.g. http://127.0.0.1:8089
    std::string model_name;
    /// Name of the environment variable holding the API key. The key is
    /// only ever read from the environment, never from files or flags.
    std::string api_key_env = "FAULTBENCH_API_KEY";
    int timeout_ms = 30000;
    int max_retries = 2;    // further attempts after the first failure
    int max_in_flight = 4;  // concurrent requests across all workers
};

RemoteEndpointConfig remote_config_from_json(const Json& j);
RemoteEndpointConfig load_remote_config_file(const std::string& path);

/// Chat-completions flavored HTTP backend. Each agent turn is one POST;
/// the reply is mapped onto an action: a tool call entry becomes
/// TOOL_CALL (arguments verbatim), the exact text "HANDOFF" becomes a
/// handoff, "FINAL: <STATUS>" from any agent becomes a final decision,
/// and anything else — including malformed reply bodies — becomes TEXT.
/// Connection failures and server errors are retried; when retries are
/// exhausted the task fails with InfrastructureError.
class RemotePolicyFactory : public PolicyFactory {
public:
    /// Throws ConfigError when the key environment variable is unset or
    /// the base URL is unusable.
    explicit RemotePolicyFactory(RemoteEndpointConfig config);
    BackendDescriptor descriptor() const override;
    std::unique_ptr<PolicyBackend> make_policy(const DatasetTask& task) const override;

    struct Shared; // implementation detail, defined in the .cpp

private:
    std::shared_ptr<Shared> shared_;
};

} // namespace faultbench
