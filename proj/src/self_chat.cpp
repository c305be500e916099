#include "self_chat.hpp"

#include <algorithm>

#include <json.hpp>

#include "errors.hpp"
#include "rng.hpp"
#include "session_memory.hpp"
#include "text.hpp"
#include "timeline.hpp"

namespace chronochat {

namespace {

using nlohmann::json;

struct SpeakerState {
    std::string id;
    Timeline timeline;
    llm::Backend* backend = nullptr;
};

// Events relevant to the speaker at time t: everything still running plus
// whatever completed during the last gap (it is news worth mentioning).
struct EventView {
    std::vector<const TimelineEntry*> active;
    std::vector<const TimelineEntry*> completed_in_gap;
};

EventView view_events(const Timeline& timeline, std::int64_t t0, std::int64_t t1) {
    EventView view;
    for (const auto& entry : timeline.entries) {
        if (entry.kind != EntryKind::Life)
            continue;
        const std::int64_t start = entry.start_offset.total_minutes();
        const std::int64_t end = start + entry.duration.total_minutes();
        if (start <= t1 && t1 < end)
            view.active.push_back(&entry);
        else if (end <= t1 && end > t0)
            view.completed_in_gap.push_back(&entry);
    }
    return view;
}

std::vector<std::string> event_descriptions(const EventView& view) {
    std::vector<std::string> descriptions;
    for (const auto* entry : view.active)
        descriptions.push_back(entry->description);
    for (const auto* entry : view.completed_in_gap)
        descriptions.push_back(entry->description);
    return descriptions;
}

std::vector<ProgressItem> progress_items(const EventView& view, std::int64_t t) {
    std::vector<ProgressItem> items;
    for (const auto* entry : view.active)
        items.push_back({entry->description,
                         compute_progress_label(entry->duration,
                                                Duration::minutes(t - entry->start_offset.total_minutes()))});
    for (const auto* entry : view.completed_in_gap)
        items.push_back({entry->description, ProgressLabel::Finished});
    return items;
}

std::vector<ScheduleItem> schedule_items(const EventView& view, std::int64_t t) {
    std::vector<ScheduleItem> items;
    for (const auto* entry : view.active) {
        if (entry->steps.empty())
            continue;
        Schedule schedule{entry->steps};
        items.push_back({entry->description,
                         split_schedule(schedule,
                                        Duration::minutes(t - entry->start_offset.total_minutes()))});
    }
    return items;
}

std::string utterance_line(const Utterance& utterance) {
    return utterance.speaker + ": " + utterance.text;
}

constexpr const char* kFarewells[2] = {
    "It was great catching up. Let's talk again soon!",
    "Likewise! Talk to you later.",
};

} // namespace

std::vector<Utterance> default_opening_script() {
    return {
        {"A", "Hi! How are you doing?"},
        {"B", "Hey! I'm doing well. I just started something new recently."},
        {"A", "That sounds exciting! Tell me more about it."},
    };
}

SelfChatOutcome run_self_chat(const SelfChatConfig& config, llm::Backend& backend_a,
                              llm::Backend& backend_b, const EventPool& pool) {
    if (config.num_sessions < 3 || config.num_sessions > 5)
        raise(Errc::bad_config, "num_sessions must be between 3 and 5");
    if (config.min_utterances < 1)
        raise(Errc::bad_config, "min_utterances must be at least 1");
    if (!config.gaps.empty() &&
        config.gaps.size() != static_cast<std::size_t>(config.num_sessions) - 1)
        raise(Errc::bad_config, "gap list must have num_sessions - 1 entries");

    Rng rng(config.seed);
    const Duration horizon = Duration::of(config.num_sessions, TimeUnit::Year);
    auto [timeline_a, timeline_b] = generate_timeline_pair(pool, "A", "B", horizon, rng);

    std::vector<Duration> gaps = config.gaps;
    if (gaps.empty())
        for (int i = 0; i + 1 < config.num_sessions; ++i)
            gaps.push_back(sample_session_gap(rng));

    SpeakerState speakers[2] = {
        {"A", std::move(timeline_a), &backend_a},
        {"B", std::move(timeline_b), &backend_b},
    };

    SelfChatOutcome outcome;
    Conversation& conversation = outcome.conversation;
    conversation.id = config.conversation_id.empty()
                          ? "selfchat-" + std::to_string(config.seed)
                          : config.conversation_id;
    conversation.split = config.split;

    const auto script =
        config.opening_script.empty() ? default_opening_script() : config.opening_script;

    SessionMemory memory;
    std::int64_t previous_t = 0;
    std::int64_t current_t = 0;

    for (int session_number = 1; session_number <= config.num_sessions; ++session_number) {
        SessionRecord session;
        session.index = session_number;
        if (session_number > 1)
            session.gap_before = gaps[static_cast<std::size_t>(session_number) - 2];

        EventView views[2];
        for (int s = 0; s < 2; ++s) {
            views[s] = view_events(speakers[s].timeline, previous_t, current_t);
            if (session_number == 1) {
                session.events_shown[speakers[s].id] = initial_event_cards(speakers[s].timeline);
            } else {
                std::vector<std::string> cards;
                for (const auto* entry : views[s].active)
                    if (entry->start_offset.total_minutes() > previous_t)
                        cards.push_back(life_event_card(entry->description, entry->nominal_duration));
                session.events_shown[speakers[s].id] = std::move(cards);
            }
        }

        if (session_number == 1)
            session.utterances = script;

        int next_speaker = session.utterances.empty()
                               ? 0
                               : (session.utterances.back().speaker == "A" ? 1 : 0);

        const ContextMode session_mode = session_number == 1 ? ContextMode::None : config.mode;
        while (static_cast<int>(session.utterances.size()) < config.min_utterances) {
            SpeakerState& speaker = speakers[next_speaker];
            const EventView& view = views[next_speaker];

            ContextInputs inputs;
            for (const auto& utterance : session.utterances)
                inputs.history.push_back(utterance_line(utterance));
            // Retrieved session documents are prepended, newest last.
            if (!memory.documents().empty()) {
                const std::string query = inputs.history.empty()
                                              ? memory.documents().back().text
                                              : inputs.history.back();
                auto retrieved = memory.retrieve_top_k(query, config.retrieval_k);
                std::sort(retrieved.begin(), retrieved.end(),
                          [](const SessionDocument& a, const SessionDocument& b) {
                              return a.session_index < b.session_index;
                          });
                std::vector<std::string> lines;
                for (const auto& document : retrieved)
                    lines.push_back(document.text);
                inputs.history.insert(inputs.history.begin(), lines.begin(), lines.end());
            }
            if (!view.active.empty() || !view.completed_in_gap.empty())
                inputs.events.push_back({speaker.id, event_descriptions(view)});
            if (session_mode == ContextMode::Progress || session_mode == ContextMode::Both)
                inputs.progress.push_back({speaker.id, progress_items(view, current_t)});
            if (session_mode == ContextMode::Schedule || session_mode == ContextMode::Both)
                inputs.schedules.push_back({speaker.id, schedule_items(view, current_t)});
            if (session_mode != ContextMode::None)
                inputs.gap = *session.gap_before;

            // Degenerate but possible: no progress whatsoever to report.
            ContextMode effective_mode = session_mode;
            if (inputs.progress.size() == 1 && inputs.progress.front().items.empty())
                inputs.progress.clear();
            if (inputs.schedules.size() == 1 && inputs.schedules.front().items.empty())
                inputs.schedules.clear();
            if (effective_mode == ContextMode::Both && inputs.progress.empty() &&
                inputs.schedules.empty())
                effective_mode = ContextMode::GapOnly;
            else if (effective_mode == ContextMode::Both && inputs.progress.empty())
                effective_mode = ContextMode::Schedule;
            else if (effective_mode == ContextMode::Both && inputs.schedules.empty())
                effective_mode = ContextMode::Progress;
            else if (effective_mode == ContextMode::Progress && inputs.progress.empty())
                effective_mode = ContextMode::GapOnly;
            else if (effective_mode == ContextMode::Schedule && inputs.schedules.empty())
                effective_mode = ContextMode::GapOnly;

            const std::string context = build_context(inputs, effective_mode, config.char_budget);
            llm::SlotMap bindings{
                {"speaker", speaker.id},
                {"session", std::to_string(session_number)},
                {"turn", std::to_string(session.utterances.size() + 1)},
                {"mode", context_mode_name(config.mode)},
            };
            std::string reply;
            try {
                reply = speaker.backend->complete({{"user", context}},
                                                  {"self_chat_turn", bindings});
            } catch (const Error& e) {
                conversation.sessions.push_back(std::move(session));
                outcome.error = e.what();
                return outcome;
            }
            std::string text = trim(reply);
            for (char& c : text)
                if (c == '\n' || c == '\r')
                    c = ' ';
            if (text.empty())
                text = "...";
            session.utterances.push_back({speaker.id, text});
            next_speaker = 1 - next_speaker;
        }

        for (int i = 0; i < 2; ++i) {
            session.utterances.push_back({speakers[next_speaker].id, kFarewells[i]});
            next_speaker = 1 - next_speaker;
        }

        std::string transcript;
        for (const auto& utterance : session.utterances)
            transcript += utterance_line(utterance) + "\n";
        memory.store(transcript, session_number);
        conversation.sessions.push_back(std::move(session));

        if (session_number < config.num_sessions) {
            previous_t = current_t;
            current_t += gaps[static_cast<std::size_t>(session_number) - 1].total_minutes();
        }
    }

    outcome.completed = true;
    return outcome;
}

SelfChatConfig self_chat_config_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        raise(Errc::bad_config, std::string("bad self-chat config: ") + e.what());
    }
    SelfChatConfig config;
    config.num_sessions = doc.value("num_sessions", 3);
    config.min_utterances = doc.value("min_utterances", 20);
    config.seed = doc.value("seed", 0ULL);
    config.char_budget = doc.value("char_budget", kDefaultContextBudget);
    config.retrieval_k = doc.value("retrieval_k", 5);
    config.conversation_id = doc.value("id", "");
    config.split = doc.value("split", "train");
    if (doc.contains("mode")) {
        const auto mode = context_mode_from_name(doc.at("mode").get<std::string>());
        if (!mode)
            raise(Errc::bad_config, "unknown mode: " + doc.at("mode").get<std::string>());
        config.mode = *mode;
    }
    for (const auto& node : doc.value("opening_script", json::array()))
        config.opening_script.push_back(
            {node.at("speaker").get<std::string>(), node.at("text").get<std::string>()});
    for (const auto& node : doc.value("gaps", json::array()))
        config.gaps.push_back(parse_duration(node.get<std::string>()));
    return config;
}

} // namespace chronochat
