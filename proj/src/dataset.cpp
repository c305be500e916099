#include "dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"
#include "text.hpp"

namespace chronochat {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void violation(const std::string& id, const std::string& rule) {
    raise(Errc::invariant_violation, "conversation '" + id + "' violates rule " + rule);
}

} // namespace

void validate_conversation(const Conversation& conversation) {
    if (conversation.id.empty())
        violation(conversation.id, "empty-id");
    if (conversation.split != "train" && conversation.split != "valid" &&
        conversation.split != "test")
        violation(conversation.id, "unknown-split");
    if (conversation.sessions.size() < 3 || conversation.sessions.size() > 5)
        violation(conversation.id, "session-count-3-to-5");
    for (std::size_t i = 0; i < conversation.sessions.size(); ++i) {
        const auto& session = conversation.sessions[i];
        if (session.index != static_cast<int>(i) + 1)
            violation(conversation.id, "session-index-order");
        if (i == 0 && session.gap_before)
            violation(conversation.id, "first-session-has-gap");
        if (i > 0 && !session.gap_before)
            violation(conversation.id, "missing-session-gap");
        for (const auto& utterance : session.utterances) {
            if (utterance.speaker != "A" && utterance.speaker != "B")
                violation(conversation.id, "speaker-not-a-or-b");
            if (trim(utterance.text).empty())
                violation(conversation.id, "empty-utterance");
        }
    }
}

std::string export_conversation(const Conversation& conversation) {
    validate_conversation(conversation);
    ordered_json doc;
    doc["id"] = conversation.id;
    doc["split"] = conversation.split;
    doc["sessions"] = ordered_json::array();
    for (const auto& session : conversation.sessions) {
        ordered_json node;
        node["index"] = session.index;
        if (session.gap_before)
            node["gap_before"] = session.gap_before->format();
        node["events_shown"] = ordered_json::object();
        for (const auto& [speaker, cards] : session.events_shown)
            node["events_shown"][speaker] = cards;
        node["utterances"] = ordered_json::array();
        for (const auto& utterance : session.utterances)
            node["utterances"].push_back(
                {{"speaker", utterance.speaker}, {"text", utterance.text}});
        doc["sessions"].push_back(std::move(node));
    }
    return doc.dump();
}

Conversation conversation_from_json(const std::string& line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::exception& e) {
        raise(Errc::malformed_document, std::string("not valid JSON: ") + e.what());
    }
    Conversation conversation;
    try {
        conversation.id = doc.at("id").get<std::string>();
        conversation.split = doc.value("split", "train");
        for (const auto& node : doc.at("sessions")) {
            SessionRecord session;
            session.index = node.at("index").get<int>();
            if (node.contains("gap_before"))
                session.gap_before = parse_duration(node.at("gap_before").get<std::string>());
            const json events_shown = node.value("events_shown", json::object());
            for (const auto& [speaker, cards] : events_shown.items())
                for (const auto& card : cards)
                    session.events_shown[speaker].push_back(card.get<std::string>());
            for (const auto& utterance_node : node.value("utterances", json::array()))
                session.utterances.push_back({utterance_node.at("speaker").get<std::string>(),
                                              utterance_node.at("text").get<std::string>()});
            conversation.sessions.push_back(std::move(session));
        }
    } catch (const json::exception& e) {
        raise(Errc::malformed_document, std::string("bad conversation field: ") + e.what());
    }
    validate_conversation(conversation);
    return conversation;
}

void export_corpus(const std::vector<Conversation>& corpus, const std::string& path) {
    std::ofstream file(path);
    if (!file)
        raise(Errc::io_error, "cannot write corpus: " + path);
    for (const auto& conversation : corpus)
        file << export_conversation(conversation) << '\n';
}

std::vector<Conversation> import_conversations(const std::string& path, ImportReport& report) {
    std::ifstream file(path);
    if (!file)
        raise(Errc::missing_file, "cannot open corpus: " + path);
    std::vector<Conversation> corpus;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(file, line)) {
        ++line_number;
        if (trim(line).empty())
            continue;
        try {
            corpus.push_back(conversation_from_json(line));
        } catch (const Error& e) {
            report.issues.push_back({line_number, e.what()});
        }
    }
    return corpus;
}

CorpusStats compute_stats(const std::vector<Conversation>& corpus) {
    if (corpus.empty())
        raise(Errc::empty_corpus, "no conversations to summarize");
    CorpusStats stats;
    for (const auto& conversation : corpus) {
        std::size_t utterances = 0;
        for (const auto& session : conversation.sessions)
            utterances += session.utterances.size();
        auto& row = stats.by_session_count[static_cast<int>(conversation.sessions.size())];
        row.dialogues += 1;
        row.utterances += utterances;
        stats.total_dialogues += 1;
        stats.total_utterances += utterances;
        stats.split_counts[conversation.split] += 1;
    }

    const double total = static_cast<double>(stats.total_dialogues);
    const auto count_of = [&](const char* split) {
        const auto it = stats.split_counts.find(split);
        return it == stats.split_counts.end() ? 0.0 : static_cast<double>(it->second);
    };
    stats.split_ratio_ok = std::abs(count_of("train") - 0.7 * total) <= 1.0 &&
                           std::abs(count_of("valid") - 0.1 * total) <= 1.0 &&
                           std::abs(count_of("test") - 0.2 * total) <= 1.0;
    return stats;
}

std::string stats_to_text(const CorpusStats& stats) {
    std::ostringstream out;
    out << "#Session  Dialogues  Utterances\n";
    for (const auto& [count, row] : stats.by_session_count) {
        out << count << "         " << row.dialogues;
        for (std::size_t pad = std::to_string(row.dialogues).size(); pad < 11; ++pad)
            out << ' ';
        out << row.utterances << '\n';
    }
    out << "Total     " << stats.total_dialogues;
    for (std::size_t pad = std::to_string(stats.total_dialogues).size(); pad < 11; ++pad)
        out << ' ';
    out << stats.total_utterances << '\n';
    out << "Splits:";
    for (const auto& [split, count] : stats.split_counts)
        out << ' ' << split << '=' << count;
    out << (stats.split_ratio_ok ? " (0.7/0.1/0.2 within tolerance)" : "") << '\n';
    return out.str();
}

std::string stats_to_json(const CorpusStats& stats) {
    ordered_json doc;
    doc["by_session_count"] = ordered_json::object();
    for (const auto& [count, row] : stats.by_session_count)
        doc["by_session_count"][std::to_string(count)] = {{"dialogues", row.dialogues},
                                                          {"utterances", row.utterances}};
    doc["total_dialogues"] = stats.total_dialogues;
    doc["total_utterances"] = stats.total_utterances;
    doc["split_counts"] = stats.split_counts;
    doc["split_ratio_ok"] = stats.split_ratio_ok;
    return doc.dump(2);
}

} // namespace chronochat
