#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "room.hpp"

namespace chronochat {

struct ServiceConfig {
    std::string data_dir;             // CHRONOCHAT_DATA_DIR
    std::string bind_addr = "127.0.0.1"; // CHRONOCHAT_BIND_ADDR
    int port = 0;                     // 0 picks an ephemeral port
    std::string default_pool;         // used when a create request omits one
    int poll_wait_seconds = 25;

    static ServiceConfig from_env();
};

// HTTP session service hosting the chat rooms. Rooms persist under
// <data_dir>/rooms/<room_id> and are recovered at startup. Each room's
// mutations are serialized; different rooms run in parallel.
class SessionService {
public:
    explicit SessionService(ServiceConfig config);
    ~SessionService();

    // Binds and serves on a background thread; returns the bound port.
    int start();
    void stop();
    int port() const { return port_; }

    // Core access, also used by the HTTP handlers.
    std::string create_room(const std::string& body_json);
    std::shared_ptr<Room> room(const std::string& room_id);
    std::size_t room_count();

private:
    void load_existing_rooms();
    void register_routes();

    ServiceConfig config_;
    std::map<std::string, std::shared_ptr<Room>> rooms_;
    std::mutex rooms_mutex_;
    std::size_t next_room_number_ = 1;

    struct Http; // hides httplib from this header
    std::unique_ptr<Http> http_;
    std::thread server_thread_;
    int port_ = 0;
};

} // namespace chronochat
