#include "llm_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <json.hpp>

#include "errors.hpp"

namespace chronochat::llm {

namespace {

using nlohmann::json;

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return value ? std::string(value) : fallback;
}

// Process-wide token bucket: at most `rate` http calls per minute.
void acquire_rate_token(int rate) {
    using Clock = std::chrono::steady_clock;
    static std::mutex mutex;
    static std::deque<Clock::time_point> calls;

    if (rate <= 0)
        return;
    for (;;) {
        Clock::duration wait{};
        {
            std::lock_guard lock(mutex);
            const auto now = Clock::now();
            while (!calls.empty() && now - calls.front() > std::chrono::minutes(1))
                calls.pop_front();
            if (static_cast<int>(calls.size()) < rate) {
                calls.push_back(now);
                return;
            }
            wait = calls.front() + std::chrono::minutes(1) - now;
        }
        std::this_thread::sleep_for(wait);
    }
}

struct ParsedUrl {
    std::string base; // scheme://host:port
    std::string path;
};

ParsedUrl parse_url(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        raise(Errc::bad_config, "endpoint must include a scheme: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

class HttpBackend : public Backend {
public:
    explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {}

    std::string complete(const std::vector<ChatMessage>& messages, const CallKey&) override {
        if (messages.empty())
            raise(Errc::empty_reply, "completion requires at least one message");

        json body;
        body["model"] = config_.model;
        body["messages"] = json::array();
        for (const auto& message : messages)
            body["messages"].push_back({{"role", message.role}, {"content", message.content}});
        const std::string payload = body.dump();

        const ParsedUrl url = parse_url(config_.endpoint);
        httplib::Client client(url.base);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);
        client.set_write_timeout(config_.timeout_seconds, 0);

        httplib::Headers headers;
        if (!config_.key_var.empty()) {
            if (const char* key = std::getenv(config_.key_var.c_str()))
                headers.emplace("Authorization", std::string("Bearer ") + key);
        }

        httplib::Result result;
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
            acquire_rate_token(config_.rate_per_minute);
            result = client.Post(url.path, headers, payload, "application/json");
            if (result && result->status < 400)
                return read_content(result->body);
            const bool transient = !result || result->status == 408 || result->status == 429 ||
                                   result->status >= 500;
            if (!transient)
                break;
        }

        if (!result) {
            const auto err = result.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                err == httplib::Error::Write)
                raise(Errc::timeout, "completion request timed out");
            raise(Errc::http_error, "completion request failed: " + httplib::to_string(err));
        }
        if (result->status == 429)
            raise(Errc::rate_limited, "completion endpoint rate limited the request");
        raise(Errc::http_error, "completion endpoint returned status " +
                                    std::to_string(result->status));
    }

private:
    // Only choices[0].message.content is read from the response.
    static std::string read_content(const std::string& body) {
        try {
            const json doc = json::parse(body);
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            raise(Errc::http_error, std::string("malformed completion response: ") + e.what());
        }
    }

    BackendConfig config_;
};

class MockBackend : public Backend {
public:
    explicit MockBackend(const BackendConfig& config) {
        std::ifstream file(config.fixture_path);
        if (!file)
            raise(Errc::missing_file, "cannot open fixture file: " + config.fixture_path);
        json doc;
        try {
            file >> doc;
        } catch (const json::exception& e) {
            raise(Errc::malformed_document, std::string("bad fixture file: ") + e.what());
        }
        const json replies = doc.value("replies", json::object());
        for (const auto& [key, value] : replies.items())
            replies_[key] = value.get<std::string>();
        const json sequences = doc.value("sequences", json::object());
        for (const auto& [name, list] : sequences.items())
            for (const auto& value : list)
                sequences_[name].push_back(value.get<std::string>());
    }

    std::string complete(const std::vector<ChatMessage>& messages, const CallKey& key) override {
        if (messages.empty())
            raise(Errc::empty_reply, "completion requires at least one message");
        if (key.template_name.empty())
            raise(Errc::missing_fixture, "mock completion without a call key");

        const std::string fixture = fixture_key(key.template_name, key.bindings);
        if (const auto it = replies_.find(fixture); it != replies_.end())
            return it->second;

        if (const auto it = sequences_.find(key.template_name); it != sequences_.end()) {
            auto& cursor = cursors_[key.template_name];
            const std::string& reply = it->second[cursor % it->second.size()];
            ++cursor;
            return reply;
        }
        raise(Errc::missing_fixture, "no recorded reply for " + fixture);
    }

private:
    std::unordered_map<std::string, std::string> replies_;
    std::unordered_map<std::string, std::vector<std::string>> sequences_;
    std::unordered_map<std::string, std::size_t> cursors_;
};

} // namespace

BackendConfig BackendConfig::from_env() {
    BackendConfig config;
    config.mode = env_or("CHRONOCHAT_LLM_MODE", "mock") == "http" ? BackendMode::Http
                                                                  : BackendMode::Mock;
    config.endpoint = env_or("CHRONOCHAT_LLM_URL", "");
    config.key_var = env_or("CHRONOCHAT_LLM_KEY_VAR", "");
    config.model = env_or("CHRONOCHAT_LLM_MODEL", "");
    return config;
}

BackendConfig BackendConfig::from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        raise(Errc::bad_config, std::string("bad backend config: ") + e.what());
    }
    BackendConfig config;
    config.mode = doc.value("mode", "mock") == "http" ? BackendMode::Http : BackendMode::Mock;
    config.endpoint = doc.value("endpoint", "");
    config.key_var = doc.value("key_var", "");
    config.model = doc.value("model", "");
    config.fixture_path = doc.value("fixtures", "");
    config.timeout_seconds = doc.value("timeout_seconds", 30);
    config.max_retries = doc.value("max_retries", 2);
    config.rate_per_minute = doc.value("rate_per_minute", 60);
    return config;
}

void BackendConfig::validate() const {
    if (mode == BackendMode::Http) {
        if (endpoint.empty())
            raise(Errc::bad_config, "http backend requires an endpoint");
        if (key_var.empty())
            raise(Errc::bad_config, "http backend requires a credential env-var name");
    } else if (fixture_path.empty()) {
        raise(Errc::bad_config, "mock backend requires a fixture path");
    }
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
    config.validate();
    if (config.mode == BackendMode::Http)
        return std::make_unique<HttpBackend>(config);
    return std::make_unique<MockBackend>(config);
}

std::string complete_template(Backend& backend, const std::string& template_name,
                              const SlotMap& bindings) {
    const std::string prompt = render_prompt(template_name, bindings);
    return backend.complete({{"user", prompt}}, {template_name, bindings});
}

} // namespace chronochat::llm
