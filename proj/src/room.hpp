#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "event_pool.hpp"
#include "rng.hpp"
#include "timeline.hpp"

namespace chronochat {

struct RoomConfig {
    std::string pool_path;
    int num_sessions = 3;    // 3..5
    int min_utterances = 20; // before end-session is allowed
    std::uint64_t seed = 0;
};

enum class RoomPhase { WaitingForPartner, InSession, BetweenSessions, Completed };
const char* room_phase_name(RoomPhase phase);

struct RoomEvent {
    std::int64_t seq = 0;
    std::string kind; // joined | utterance | session_ended | updates_shown |
                      // session_started | completed
    nlohmann::json payload;
};

// A two-party timed chat room. All mutations are serialized on the room
// mutex, appended to an on-disk event log and observable through long
// polls. Replaying the log reconstructs the exact pre-crash state; gaps
// are re-drawn from the seeded rng during replay and verified against
// the logged values. All timestamps are simulated-clock values.
class Room {
public:
    // Creates a fresh room directory (room.json + events.log).
    static std::shared_ptr<Room> create(const std::string& room_id, RoomConfig config,
                                        const std::string& directory);

    // Rebuilds a room from its directory.
    static std::shared_ptr<Room> recover(const std::string& directory);

    ~Room();

    const std::string& id() const { return id_; }
    RoomPhase phase() const;

    // Second join flips the room into its first session. Each participant
    // sees only their own event cards.
    nlohmann::json join(const std::string& display_name);

    // Free-form chat; turn order is not enforced.
    nlohmann::json post_utterance(const std::string& token, const std::string& text);

    // In session: ends it once min_utterances is reached, samples the gap,
    // advances the timelines and emits per-speaker update cards; the final
    // session completes the room and persists the conversation. Between
    // sessions: acknowledges the updates and begins the next session.
    nlohmann::json end_session(const std::string& token);

    nlohmann::json state_view(const std::string& token) const;

    // Events with seq > since, redacted to the caller; long-polls up to
    // `wait` when empty.
    nlohmann::json events_since(std::int64_t since, const std::string& token,
                                std::chrono::milliseconds wait);

    std::string conversation_path() const;

private:
    Room(std::string room_id, RoomConfig config, std::string directory);

    void build_timelines();
    void replay_log();
    void append_event(const std::string& kind, nlohmann::json payload);
    void apply_event(const RoomEvent& event, bool replay);
    void write_snapshot_locked() const;
    void persist_conversation_locked() const;
    std::string token_for(const std::string& speaker) const;
    int speaker_slot(const std::string& token) const; // -1 when unknown
    nlohmann::json redacted_event(const RoomEvent& event, const std::string& speaker) const;
    nlohmann::json bundle_card(const UpdateBundle& bundle) const;
    std::vector<std::string> current_event_descriptions(int slot) const;
    nlohmann::json state_view_locked(const std::string& token) const;

    mutable std::mutex mutex_;
    std::condition_variable cv_;

    std::string id_;
    RoomConfig config_;
    std::string directory_;
    Rng rng_;
    Timeline timelines_[2];

    RoomPhase phase_ = RoomPhase::WaitingForPartner;
    struct Participant {
        std::string display_name;
        std::string speaker;
    };
    std::vector<Participant> participants_;
    std::int64_t elapsed_minutes_ = 0;
    int session_index_ = 1;
    std::optional<Duration> last_gap_;
    SessionRecord current_session_;
    std::vector<SessionRecord> finished_sessions_;
    nlohmann::json pending_cards_; // updates_shown payload awaiting ack

    std::vector<RoomEvent> log_;
    int log_fd_ = -1;
};

} // namespace chronochat
