#include "room.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "errors.hpp"
#include "text.hpp"

namespace chronochat {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kSpeakers[2] = {"A", "B"};

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value) {
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
    return buffer;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::trunc);
    if (!file)
        raise(Errc::io_error, "cannot write " + path);
    file << text;
}

} // namespace

const char* room_phase_name(RoomPhase phase) {
    switch (phase) {
    case RoomPhase::WaitingForPartner: return "waiting_for_partner";
    case RoomPhase::InSession: return "in_session";
    case RoomPhase::BetweenSessions: return "between_sessions";
    case RoomPhase::Completed: return "completed";
    }
    return "waiting_for_partner";
}

Room::Room(std::string room_id, RoomConfig config, std::string directory)
    : id_(std::move(room_id)), config_(std::move(config)), directory_(std::move(directory)),
      rng_(config_.seed) {}

void Room::build_timelines() {
    const EventPool pool = load_event_pool(config_.pool_path);
    const Duration horizon = Duration::of(config_.num_sessions + 1, TimeUnit::Year);
    auto pair = generate_timeline_pair(pool, "A", "B", horizon, rng_);
    timelines_[0] = std::move(pair.first);
    timelines_[1] = std::move(pair.second);
}

std::shared_ptr<Room> Room::create(const std::string& room_id, RoomConfig config,
                                   const std::string& directory) {
    if (config.num_sessions < 3 || config.num_sessions > 5)
        raise(Errc::bad_config, "num_sessions must be between 3 and 5");
    if (config.min_utterances < 1)
        raise(Errc::bad_config, "min_utterances must be at least 1");
    if (config.pool_path.empty())
        raise(Errc::bad_config, "room config needs a pool path");

    auto room = std::shared_ptr<Room>(new Room(room_id, std::move(config), directory));
    room->build_timelines(); // validates the pool before anything touches disk
    fs::create_directories(directory);

    ordered_json meta;
    meta["room_id"] = room->id_;
    meta["pool"] = room->config_.pool_path;
    meta["num_sessions"] = room->config_.num_sessions;
    meta["min_utterances"] = room->config_.min_utterances;
    meta["seed"] = room->config_.seed;
    write_text_file(directory + "/room.json", meta.dump(2) + "\n");

    room->log_fd_ = ::open((directory + "/events.log").c_str(),
                           O_CREAT | O_WRONLY | O_APPEND, 0644);
    if (room->log_fd_ < 0)
        raise(Errc::io_error, "cannot open event log in " + directory);
    return room;
}

std::shared_ptr<Room> Room::recover(const std::string& directory) {
    std::ifstream meta_file(directory + "/room.json");
    if (!meta_file)
        raise(Errc::missing_file, "no room.json in " + directory);
    json meta;
    try {
        meta_file >> meta;
    } catch (const json::exception& e) {
        raise(Errc::malformed_document, std::string("bad room.json: ") + e.what());
    }
    RoomConfig config;
    config.pool_path = meta.at("pool").get<std::string>();
    config.num_sessions = meta.at("num_sessions").get<int>();
    config.min_utterances = meta.at("min_utterances").get<int>();
    config.seed = meta.at("seed").get<std::uint64_t>();

    auto room = std::shared_ptr<Room>(
        new Room(meta.at("room_id").get<std::string>(), std::move(config), directory));
    room->build_timelines();
    room->replay_log();

    // Cross-check against the last snapshot when it covers the whole log.
    std::ifstream snapshot_file(directory + "/snapshot.json");
    if (snapshot_file) {
        json snapshot;
        try {
            snapshot_file >> snapshot;
        } catch (const json::exception&) {
            snapshot = json::object();
        }
        const std::int64_t last_seq =
            room->log_.empty() ? 0 : room->log_.back().seq;
        if (snapshot.value("seq", std::int64_t{0}) == last_seq && last_seq > 0) {
            if (snapshot.value("phase", "") != room_phase_name(room->phase_) ||
                snapshot.value("session_index", 0) != room->session_index_ ||
                snapshot.value("elapsed_minutes", std::int64_t{0}) != room->elapsed_minutes_)
                raise(Errc::malformed_document,
                      "snapshot disagrees with the replayed log for room " + room->id_);
        }
    }

    room->log_fd_ = ::open((directory + "/events.log").c_str(),
                           O_CREAT | O_WRONLY | O_APPEND, 0644);
    if (room->log_fd_ < 0)
        raise(Errc::io_error, "cannot open event log in " + directory);
    return room;
}

Room::~Room() {
    if (log_fd_ >= 0)
        ::close(log_fd_);
}

void Room::replay_log() {
    std::ifstream file(directory_ + "/events.log");
    if (!file)
        return; // nothing happened yet
    std::string line;
    std::int64_t expected_seq = 1;
    while (std::getline(file, line)) {
        if (trim(line).empty())
            continue;
        json node;
        try {
            node = json::parse(line);
        } catch (const json::exception& e) {
            raise(Errc::malformed_document, std::string("corrupt event log: ") + e.what());
        }
        RoomEvent event;
        event.seq = node.at("seq").get<std::int64_t>();
        event.kind = node.at("kind").get<std::string>();
        event.payload = node.value("payload", json::object());
        if (event.seq != expected_seq)
            raise(Errc::malformed_document, "event log has a sequence gap at " +
                                                std::to_string(event.seq));
        ++expected_seq;
        apply_event(event, true);
        log_.push_back(std::move(event));
    }
}

std::string Room::token_for(const std::string& speaker) const {
    return hex64(fnv1a(id_ + ":" + speaker + ":" + std::to_string(config_.seed)));
}

int Room::speaker_slot(const std::string& token) const {
    for (std::size_t i = 0; i < participants_.size(); ++i)
        if (token_for(participants_[i].speaker) == token)
            return static_cast<int>(i);
    return -1;
}

void Room::append_event(const std::string& kind, json payload) {
    RoomEvent event;
    event.seq = static_cast<std::int64_t>(log_.size()) + 1;
    event.kind = kind;
    event.payload = std::move(payload);

    ordered_json line;
    line["seq"] = event.seq;
    line["kind"] = event.kind;
    line["payload"] = event.payload;
    const std::string text = line.dump() + "\n";
    if (log_fd_ >= 0 && ::write(log_fd_, text.data(), text.size()) < 0)
        raise(Errc::io_error, "cannot append to event log of room " + id_);

    apply_event(event, false);
    log_.push_back(std::move(event));
    cv_.notify_all();
}

nlohmann::json Room::bundle_card(const UpdateBundle& bundle) const {
    ordered_json card;
    card["finished_progress"] = ordered_json::array();
    for (const auto& note : bundle.finished_progress)
        card["finished_progress"].push_back({{"event", note.description}, {"text", note.text}});
    card["completed"] = ordered_json::array();
    for (const auto& note : bundle.completed)
        card["completed"].push_back(note.description);
    card["new_events"] = ordered_json::array();
    for (const auto& note : bundle.new_events)
        card["new_events"].push_back(note.kind == EntryKind::Life
                                         ? life_event_card(note.description, note.nominal_duration)
                                         : note.description);
    card["future_plans"] = bundle.future_plans;
    return card;
}

void Room::apply_event(const RoomEvent& event, bool replay) {
    if (event.kind == "joined") {
        participants_.push_back({event.payload.at("display_name").get<std::string>(),
                                 event.payload.at("speaker").get<std::string>()});
        if (participants_.size() == 2) {
            phase_ = RoomPhase::InSession;
            current_session_ = SessionRecord{};
            current_session_.index = 1;
            for (int slot = 0; slot < 2; ++slot)
                current_session_.events_shown[kSpeakers[slot]] =
                    initial_event_cards(timelines_[slot]);
        }
    } else if (event.kind == "utterance") {
        current_session_.utterances.push_back(
            {event.payload.at("speaker").get<std::string>(),
             event.payload.at("text").get<std::string>()});
    } else if (event.kind == "session_ended") {
        finished_sessions_.push_back(current_session_);
        if (!event.payload.value("final", false)) {
            const Duration drawn = sample_session_gap(rng_);
            const std::string logged = event.payload.at("gap").get<std::string>();
            if (replay && drawn.format() != logged)
                raise(Errc::malformed_document,
                      "event log gap '" + logged + "' does not match the seeded draw '" +
                          drawn.format() + "'");
            last_gap_ = parse_duration(logged);
            elapsed_minutes_ += last_gap_->total_minutes();
        }
        phase_ = RoomPhase::BetweenSessions;
    } else if (event.kind == "updates_shown") {
        pending_cards_ = event.payload.value("cards", json::object());
    } else if (event.kind == "session_started") {
        session_index_ += 1;
        current_session_ = SessionRecord{};
        current_session_.index = session_index_;
        current_session_.gap_before = last_gap_;
        for (int slot = 0; slot < 2; ++slot) {
            std::vector<std::string> cards;
            if (pending_cards_.contains(kSpeakers[slot]))
                for (const auto& card :
                     pending_cards_.at(kSpeakers[slot]).value("new_events", json::array()))
                    cards.push_back(card.get<std::string>());
            current_session_.events_shown[kSpeakers[slot]] = std::move(cards);
        }
        phase_ = RoomPhase::InSession;
    } else if (event.kind == "completed") {
        phase_ = RoomPhase::Completed;
        persist_conversation_locked();
    } else {
        raise(Errc::malformed_document, "unknown event kind in log: " + event.kind);
    }
}

RoomPhase Room::phase() const {
    std::lock_guard lock(mutex_);
    return phase_;
}

json Room::join(const std::string& display_name) {
    std::lock_guard lock(mutex_);
    if (phase_ == RoomPhase::Completed)
        raise(Errc::wrong_phase, "room is completed");
    if (participants_.size() >= 2)
        raise(Errc::room_full, "room already has two participants");
    const std::string speaker = kSpeakers[participants_.size()];
    append_event("joined", {{"display_name", display_name}, {"speaker", speaker}});

    ordered_json out;
    out["token"] = token_for(speaker);
    out["speaker"] = speaker;
    out["phase"] = room_phase_name(phase_);
    out["initial_events"] = initial_event_cards(timelines_[speaker == "A" ? 0 : 1]);
    return out;
}

json Room::post_utterance(const std::string& token, const std::string& text) {
    std::lock_guard lock(mutex_);
    if (phase_ != RoomPhase::InSession)
        raise(Errc::wrong_phase, std::string("cannot post while ") + room_phase_name(phase_));
    const int slot = speaker_slot(token);
    if (slot < 0)
        raise(Errc::invalid_token, "unknown participant token");
    if (trim(text).empty())
        raise(Errc::empty_text, "utterance text is empty");

    append_event("utterance", {{"speaker", participants_[slot].speaker}, {"text", text}});

    ordered_json out;
    out["seq"] = log_.back().seq;
    out["utterance_count"] = current_session_.utterances.size();
    out["end_session_available"] =
        current_session_.utterances.size() >= static_cast<std::size_t>(config_.min_utterances);
    return out;
}

json Room::end_session(const std::string& token) {
    std::lock_guard lock(mutex_);
    const int slot = speaker_slot(token);
    if (slot < 0)
        raise(Errc::invalid_token, "unknown participant token");

    if (phase_ == RoomPhase::BetweenSessions) {
        // Acknowledge the updates and begin the next session.
        append_event("session_started", {{"session_index", session_index_ + 1}});
        write_snapshot_locked();
        ordered_json out;
        out["phase"] = room_phase_name(phase_);
        out["session_index"] = session_index_;
        out["gap"] = last_gap_ ? last_gap_->format() : "";
        out["events_shown"] = current_session_.events_shown[participants_[slot].speaker];
        return out;
    }

    if (phase_ != RoomPhase::InSession)
        raise(Errc::wrong_phase, std::string("cannot end session while ") + room_phase_name(phase_));
    if (current_session_.utterances.size() < static_cast<std::size_t>(config_.min_utterances))
        raise(Errc::too_few_utterances,
              "session needs " +
                  std::to_string(config_.min_utterances - current_session_.utterances.size()) +
                  " more utterances");

    const bool final_session = session_index_ >= config_.num_sessions;
    if (final_session) {
        append_event("session_ended", {{"session_index", session_index_}, {"final", true}});
        append_event("completed", json::object());
        if (log_fd_ >= 0)
            ::fsync(log_fd_);
        write_snapshot_locked();
        ordered_json out;
        out["phase"] = room_phase_name(phase_);
        out["conversation"] = conversation_path();
        return out;
    }

    // Peek the gap the rng will draw so the log can carry it; apply_event
    // re-draws from the real rng and verifies on replay.
    Rng peek = rng_;
    const Duration gap = sample_session_gap(peek);

    const ClockState clock{Duration::minutes(elapsed_minutes_), session_index_};
    UpdateBundle bundles[2];
    for (int s = 0; s < 2; ++s)
        bundles[s] = advance(timelines_[s], clock, gap).second;

    append_event("session_ended", {{"session_index", session_index_}, {"gap", gap.format()}});
    json cards;
    for (int s = 0; s < 2; ++s)
        cards[kSpeakers[s]] = bundle_card(bundles[s]);
    append_event("updates_shown", {{"gap", gap.format()}, {"cards", cards}});
    if (log_fd_ >= 0)
        ::fsync(log_fd_);
    write_snapshot_locked();

    ordered_json out;
    out["phase"] = room_phase_name(phase_);
    out["gap"] = gap.format();
    out["updates"] = cards[participants_[slot].speaker];
    out["ended_session_index"] = session_index_;
    return out;
}

std::vector<std::string> Room::current_event_descriptions(int slot) const {
    std::vector<std::string> descriptions;
    for (const auto& entry : timelines_[slot].entries) {
        if (entry.kind != EntryKind::Life)
            continue;
        const std::int64_t start = entry.start_offset.total_minutes();
        const std::int64_t end = start + entry.duration.total_minutes();
        if (start <= elapsed_minutes_ && elapsed_minutes_ < end)
            descriptions.push_back(entry.description);
    }
    return descriptions;
}

json Room::state_view_locked(const std::string& token) const {
    ordered_json out;
    out["room_id"] = id_;
    out["phase"] = room_phase_name(phase_);
    out["session_index"] = session_index_;
    out["num_sessions"] = config_.num_sessions;
    out["min_utterances"] = config_.min_utterances;
    out["utterance_count"] = current_session_.utterances.size();
    out["end_session_available"] =
        phase_ == RoomPhase::InSession &&
        current_session_.utterances.size() >= static_cast<std::size_t>(config_.min_utterances);
    out["participants"] = ordered_json::array();
    for (const auto& participant : participants_)
        out["participants"].push_back(participant.display_name);
    out["last_seq"] = log_.empty() ? 0 : log_.back().seq;
    if (last_gap_)
        out["last_gap"] = last_gap_->format();
    if (!token.empty()) {
        const int slot = speaker_slot(token);
        if (slot < 0)
            raise(Errc::invalid_token, "unknown participant token");
        ordered_json you;
        you["speaker"] = participants_[slot].speaker;
        you["current_events"] = current_event_descriptions(slot);
        const auto it = current_session_.events_shown.find(participants_[slot].speaker);
        you["events_shown"] =
            it == current_session_.events_shown.end() ? std::vector<std::string>{} : it->second;
        out["you"] = std::move(you);
    }
    return out;
}

json Room::state_view(const std::string& token) const {
    std::lock_guard lock(mutex_);
    return state_view_locked(token);
}

json Room::redacted_event(const RoomEvent& event, const std::string& speaker) const {
    ordered_json out;
    out["seq"] = event.seq;
    out["kind"] = event.kind;
    if (event.kind == "updates_shown") {
        ordered_json payload;
        payload["gap"] = event.payload.value("gap", "");
        const auto& cards = event.payload.value("cards", json::object());
        if (cards.contains(speaker))
            payload["card"] = cards.at(speaker);
        out["payload"] = std::move(payload);
    } else {
        out["payload"] = event.payload;
    }
    return out;
}

json Room::events_since(std::int64_t since, const std::string& token,
                        std::chrono::milliseconds wait) {
    std::unique_lock lock(mutex_);
    const int slot = speaker_slot(token);
    if (slot < 0)
        raise(Errc::invalid_token, "unknown participant token");
    cv_.wait_for(lock, wait, [&] {
        return !log_.empty() && log_.back().seq > since;
    });

    json out;
    out["events"] = json::array();
    for (const auto& event : log_)
        if (event.seq > since)
            out["events"].push_back(redacted_event(event, participants_[slot].speaker));
    return out;
}

std::string Room::conversation_path() const {
    return directory_ + "/conversation.chrono.jsonl";
}

void Room::persist_conversation_locked() const {
    Conversation conversation;
    conversation.id = id_;
    conversation.split = "train";
    conversation.sessions = finished_sessions_;
    std::ofstream file(conversation_path(), std::ios::trunc);
    if (!file)
        raise(Errc::io_error, "cannot write conversation for room " + id_);
    file << export_conversation(conversation) << '\n';
}

void Room::write_snapshot_locked() const {
    ordered_json snapshot;
    snapshot["seq"] = log_.empty() ? 0 : log_.back().seq;
    snapshot["phase"] = room_phase_name(phase_);
    snapshot["session_index"] = session_index_;
    snapshot["elapsed_minutes"] = elapsed_minutes_;
    snapshot["participants"] = participants_.size();
    write_text_file(directory_ + "/snapshot.json", snapshot.dump(2) + "\n");
}

} // namespace chronochat
