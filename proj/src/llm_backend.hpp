#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "llm_templates.hpp"

namespace chronochat::llm {

enum class BackendMode { Http, Mock };

struct BackendConfig {
    BackendMode mode = BackendMode::Mock;
    std::string endpoint;     // http mode: full chat-completion URL
    std::string key_var;      // name of the env var holding the credential
    std::string model;
    std::string fixture_path; // mock mode
    int timeout_seconds = 30;
    int max_retries = 2;
    int rate_per_minute = 60; // process-wide token bucket for http calls

    // Reads CHRONOCHAT_LLM_MODE / _URL / _KEY_VAR / _MODEL.
    static BackendConfig from_env();
    static BackendConfig from_json(const std::string& json_text);

    void validate() const; // BadConfig on missing endpoint/credential/fixture
};

struct ChatMessage {
    std::string role;
    std::string content;
};

// Identifies the rendered call for mock fixture lookup.
struct CallKey {
    std::string template_name;
    SlotMap bindings;
};

class Backend {
public:
    virtual ~Backend() = default;

    // Single chat completion. Http mode posts the messages with bounded
    // retries on transient failures; mock mode replays a recorded reply
    // for the call key and never fabricates.
    virtual std::string complete(const std::vector<ChatMessage>& messages,
                                 const CallKey& key) = 0;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

// Convenience: render a template, then complete with the result as a
// single user message.
std::string complete_template(Backend& backend, const std::string& template_name,
                              const SlotMap& bindings);

} // namespace chronochat::llm
