#include "gapchat_adapter.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "errors.hpp"
#include "text.hpp"

namespace chronochat {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Mapper {
    AdapterReport* report;
    std::map<std::string, std::string> speaker_ids; // source speaker -> A/B

    void note_unmapped(const std::string& key) { ++report->unmapped_fields[key]; }

    std::string map_speaker(const std::string& raw) {
        auto it = speaker_ids.find(raw);
        if (it != speaker_ids.end())
            return it->second;
        const std::string assigned = speaker_ids.empty() ? "A" : "B";
        if (speaker_ids.size() >= 2)
            return "A"; // third voice; fold into A rather than invent a speaker
        speaker_ids.emplace(raw, assigned);
        return assigned;
    }

    const json* pick(const json& node, std::initializer_list<const char*> names) {
        for (const char* name : names)
            if (node.contains(name))
                return &node.at(name);
        return nullptr;
    }

    std::optional<Utterance> read_utterance(const json& node) {
        if (node.is_string())
            return Utterance{map_speaker("0"), node.get<std::string>()};
        if (!node.is_object())
            return std::nullopt;
        const json* text = pick(node, {"text", "utterance", "message", "content"});
        if (!text || !text->is_string())
            return std::nullopt;
        const json* speaker = pick(node, {"speaker", "id", "role", "sender"});
        std::string speaker_raw = "0";
        if (speaker && speaker->is_string())
            speaker_raw = speaker->get<std::string>();
        for (const auto& [key, value] : node.items()) {
            (void)value;
            if (key != "text" && key != "utterance" && key != "message" && key != "content" &&
                key != "speaker" && key != "id" && key != "role" && key != "sender")
                note_unmapped("utterance." + key);
        }
        return Utterance{map_speaker(speaker_raw), text->get<std::string>()};
    }

    std::optional<SessionRecord> read_session(const json& node, int index) {
        SessionRecord session;
        session.index = index;
        const json* utterances = nullptr;
        if (node.is_array()) {
            utterances = &node;
        } else if (node.is_object()) {
            utterances = pick(node, {"dialog", "dialogue", "utterances", "turns", "messages"});
            const json* gap = pick(node, {"gap", "time_gap", "gap_before", "time_elapsed"});
            if (gap && gap->is_string()) {
                if (auto parsed = find_duration_phrase(gap->get<std::string>()))
                    session.gap_before = parsed;
            }
            const json* events = pick(node, {"events", "events_shown", "event_info"});
            if (events) {
                if (events->is_object()) {
                    for (const auto& [speaker, cards] : events->items()) {
                        auto& bucket = session.events_shown[map_speaker(speaker)];
                        if (cards.is_array()) {
                            for (const auto& card : cards)
                                if (card.is_string())
                                    bucket.push_back(card.get<std::string>());
                        } else if (cards.is_string()) {
                            bucket.push_back(cards.get<std::string>());
                        }
                    }
                } else if (events->is_array()) {
                    for (const auto& card : *events)
                        if (card.is_string())
                            session.events_shown["A"].push_back(card.get<std::string>());
                }
            }
            for (const auto& [key, value] : node.items()) {
                (void)value;
                static const std::vector<std::string> known{
                    "dialog", "dialogue", "utterances", "turns", "messages", "gap",
                    "time_gap", "gap_before", "time_elapsed", "events", "events_shown",
                    "event_info", "index", "session_id"};
                if (std::find(known.begin(), known.end(), key) == known.end())
                    note_unmapped("session." + key);
            }
        }
        if (!utterances || !utterances->is_array())
            return std::nullopt;
        for (const auto& utterance_node : *utterances)
            if (auto utterance = read_utterance(utterance_node))
                if (!trim(utterance->text).empty())
                    session.utterances.push_back(std::move(*utterance));
        if (session.utterances.empty())
            return std::nullopt;
        return session;
    }

    std::optional<Conversation> read_conversation(const json& node, const std::string& fallback_id) {
        if (!node.is_object() && !node.is_array())
            return std::nullopt;
        Conversation conversation;
        conversation.id = fallback_id;
        const json* sessions = &node;
        if (node.is_object()) {
            if (const json* id = pick(node, {"id", "conversation_id", "conv_id"}))
                if (id->is_string())
                    conversation.id = id->get<std::string>();
            if (const json* split = pick(node, {"split", "partition"}))
                if (split->is_string())
                    conversation.split = split->get<std::string>();
            sessions = pick(node, {"sessions", "dialogs", "dialogues"});
            if (!sessions)
                return std::nullopt;
            for (const auto& [key, value] : node.items()) {
                (void)value;
                static const std::vector<std::string> known{
                    "id", "conversation_id", "conv_id", "split", "partition",
                    "sessions", "dialogs", "dialogues"};
                if (std::find(known.begin(), known.end(), key) == known.end())
                    note_unmapped("conversation." + key);
            }
        }
        if (!sessions->is_array())
            return std::nullopt;

        speaker_ids.clear();
        int index = 1;
        for (const auto& session_node : *sessions) {
            if (auto session = read_session(session_node, index)) {
                // First session carries no gap by definition.
                if (index == 1)
                    session->gap_before.reset();
                else if (!session->gap_before)
                    session->gap_before = Duration::of(1, TimeUnit::Hour);
                conversation.sessions.push_back(std::move(*session));
                ++index;
            }
        }
        if (conversation.sessions.size() < 3 || conversation.sessions.size() > 5)
            return std::nullopt;
        return conversation;
    }
};

} // namespace

std::vector<Conversation> import_gapchat_directory(const std::string& directory,
                                                   AdapterReport& report) {
    if (!fs::is_directory(directory))
        raise(Errc::missing_file, "not a directory: " + directory);

    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(directory)) {
        if (!entry.is_regular_file())
            continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".json" || ext == ".jsonl")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    Mapper mapper{&report, {}};
    std::vector<Conversation> corpus;
    for (const auto& path : files) {
        std::ifstream file(path);
        if (!file) {
            report.issues.push_back("unreadable file: " + path.string());
            continue;
        }
        ++report.files_read;
        std::vector<json> documents;
        if (path.extension() == ".jsonl") {
            std::string line;
            while (std::getline(file, line)) {
                if (trim(line).empty())
                    continue;
                try {
                    documents.push_back(json::parse(line));
                } catch (const json::exception&) {
                    report.issues.push_back("bad JSON line in " + path.string());
                }
            }
        } else {
            try {
                json doc;
                file >> doc;
                if (doc.is_array())
                    for (auto& item : doc)
                        documents.push_back(std::move(item));
                else
                    documents.push_back(std::move(doc));
            } catch (const json::exception&) {
                report.issues.push_back("bad JSON file: " + path.string());
            }
        }

        std::size_t counter = 0;
        for (const auto& doc : documents) {
            const std::string fallback =
                path.stem().string() + "-" + std::to_string(++counter);
            if (auto conversation = mapper.read_conversation(doc, fallback)) {
                try {
                    validate_conversation(*conversation);
                    corpus.push_back(std::move(*conversation));
                } catch (const Error& e) {
                    report.issues.push_back(fallback + ": " + e.what());
                }
            } else {
                report.issues.push_back(fallback + ": no recognizable conversation structure");
            }
        }
    }
    return corpus;
}

} // namespace chronochat
