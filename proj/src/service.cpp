#include "service.hpp"

#include <cstdlib>
#include <filesystem>

#include <httplib.h>
#include <json.hpp>

#include "errors.hpp"

namespace chronochat {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int status_for(Errc code) {
    switch (code) {
    case Errc::no_such_room: return 404;
    case Errc::missing_file: return 404;
    case Errc::room_full: return 409;
    case Errc::wrong_phase: return 409;
    case Errc::too_few_utterances: return 409;
    case Errc::invalid_token: return 403;
    default: return 400;
    }
}

void reply_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, const Error& error) {
    reply_json(res, {{"error", {{"code", errc_name(error.code())}, {"message", error.what()}}}},
               status_for(error.code()));
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        reply_error(res, e);
    } catch (const std::exception& e) {
        reply_json(res, {{"error", {{"code", "Internal"}, {"message", e.what()}}}}, 500);
    }
}

json parse_body(const std::string& body) {
    if (body.empty())
        return json::object();
    try {
        return json::parse(body);
    } catch (const json::exception& e) {
        raise(Errc::bad_config, std::string("request body is not valid JSON: ") + e.what());
    }
}

} // namespace

struct SessionService::Http {
    httplib::Server server;
};

ServiceConfig ServiceConfig::from_env() {
    ServiceConfig config;
    if (const char* dir = std::getenv("CHRONOCHAT_DATA_DIR"))
        config.data_dir = dir;
    if (const char* addr = std::getenv("CHRONOCHAT_BIND_ADDR"))
        config.bind_addr = addr;
    return config;
}

SessionService::SessionService(ServiceConfig config)
    : config_(std::move(config)), http_(std::make_unique<Http>()) {
    if (config_.data_dir.empty())
        raise(Errc::bad_config, "service needs a data directory");
    fs::create_directories(fs::path(config_.data_dir) / "rooms");
    load_existing_rooms();
    register_routes();
}

SessionService::~SessionService() { stop(); }

void SessionService::load_existing_rooms() {
    const fs::path rooms_dir = fs::path(config_.data_dir) / "rooms";
    for (const auto& entry : fs::directory_iterator(rooms_dir)) {
        if (!entry.is_directory() || !fs::exists(entry.path() / "room.json"))
            continue;
        auto room = Room::recover(entry.path().string());
        rooms_[room->id()] = room;
        // room ids are "room-<number>"; keep the counter past them
        const std::string& id = room->id();
        const auto dash = id.rfind('-');
        if (dash != std::string::npos) {
            const long number = std::atol(id.c_str() + dash + 1);
            if (number >= static_cast<long>(next_room_number_))
                next_room_number_ = static_cast<std::size_t>(number) + 1;
        }
    }
}

std::string SessionService::create_room(const std::string& body_json) {
    const json body = parse_body(body_json);
    RoomConfig config;
    config.pool_path = body.value("pool", config_.default_pool);
    config.num_sessions = body.value("num_sessions", 3);
    config.min_utterances = body.value("min_utterances", 20);
    config.seed = body.value("seed", 0ULL);

    std::lock_guard lock(rooms_mutex_);
    char name[32];
    std::snprintf(name, sizeof(name), "room-%06zu", next_room_number_++);
    const std::string room_id = name;
    const std::string directory =
        (fs::path(config_.data_dir) / "rooms" / room_id).string();
    rooms_[room_id] = Room::create(room_id, std::move(config), directory);
    return room_id;
}

std::shared_ptr<Room> SessionService::room(const std::string& room_id) {
    std::lock_guard lock(rooms_mutex_);
    const auto it = rooms_.find(room_id);
    if (it == rooms_.end())
        raise(Errc::no_such_room, "no room named " + room_id);
    return it->second;
}

std::size_t SessionService::room_count() {
    std::lock_guard lock(rooms_mutex_);
    return rooms_.size();
}

void SessionService::register_routes() {
    auto& server = http_->server;

    server.Post("/rooms", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { reply_json(res, {{"room_id", create_room(req.body)}}); });
    });

    server.Post(R"(/rooms/([\w-]+)/join)",
                [this](const httplib::Request& req, httplib::Response& res) {
                    guarded(res, [&] {
                        const json body = parse_body(req.body);
                        reply_json(res, room(req.matches[1])
                                            ->join(body.value("display_name", "anonymous")));
                    });
                });

    server.Post(R"(/rooms/([\w-]+)/utterances)",
                [this](const httplib::Request& req, httplib::Response& res) {
                    guarded(res, [&] {
                        const json body = parse_body(req.body);
                        reply_json(res, room(req.matches[1])
                                            ->post_utterance(body.value("token", ""),
                                                             body.value("text", "")));
                    });
                });

    server.Post(R"(/rooms/([\w-]+)/end-session)",
                [this](const httplib::Request& req, httplib::Response& res) {
                    guarded(res, [&] {
                        const json body = parse_body(req.body);
                        reply_json(res, room(req.matches[1])->end_session(body.value("token", "")));
                    });
                });

    server.Get(R"(/rooms/([\w-]+)/state)",
               [this](const httplib::Request& req, httplib::Response& res) {
                   guarded(res, [&] {
                       reply_json(res, room(req.matches[1])
                                           ->state_view(req.get_param_value("token")));
                   });
               });

    server.Get(R"(/rooms/([\w-]+)/events)",
               [this](const httplib::Request& req, httplib::Response& res) {
                   guarded(res, [&] {
                       const std::int64_t since =
                           req.has_param("since")
                               ? std::strtoll(req.get_param_value("since").c_str(), nullptr, 10)
                               : 0;
                       int wait_seconds = config_.poll_wait_seconds;
                       if (req.has_param("wait"))
                           wait_seconds = std::atoi(req.get_param_value("wait").c_str());
                       reply_json(res, room(req.matches[1])
                                           ->events_since(since, req.get_param_value("token"),
                                                          std::chrono::seconds(wait_seconds)));
                   });
               });
}

int SessionService::start() {
    auto& server = http_->server;
    if (config_.port > 0) {
        if (!server.bind_to_port(config_.bind_addr, config_.port))
            raise(Errc::bad_config, "cannot bind " + config_.bind_addr + ":" +
                                        std::to_string(config_.port));
        port_ = config_.port;
    } else {
        port_ = server.bind_to_any_port(config_.bind_addr);
        if (port_ <= 0)
            raise(Errc::bad_config, "cannot bind an ephemeral port on " + config_.bind_addr);
    }
    server_thread_ = std::thread([this] { http_->server.listen_after_bind(); });
    server.wait_until_ready();
    return port_;
}

void SessionService::stop() {
    if (server_thread_.joinable()) {
        http_->server.stop();
        server_thread_.join();
    }
}

} // namespace chronochat
