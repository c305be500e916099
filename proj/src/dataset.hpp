#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "duration.hpp"

namespace chronochat {

struct Utterance {
    std::string speaker; // "A" or "B"
    std::string text;
};

struct SessionRecord {
    int index = 1;
    std::optional<Duration> gap_before; // absent for session 1
    std::map<std::string, std::vector<std::string>> events_shown; // speaker -> cards
    std::vector<Utterance> utterances;
};

// A multi-session conversation of 3 to 5 sessions.
struct Conversation {
    std::string id;
    std::vector<SessionRecord> sessions;
    std::string split = "train"; // train | valid | test
};

// Throws InvariantViolation describing the first broken rule.
void validate_conversation(const Conversation& conversation);

// One conversation per line, deterministic field order (.chrono.jsonl).
std::string export_conversation(const Conversation& conversation);
Conversation conversation_from_json(const std::string& line);

void export_corpus(const std::vector<Conversation>& corpus, const std::string& path);

struct ImportIssue {
    std::size_t line = 0;
    std::string reason;
};

struct ImportReport {
    std::vector<ImportIssue> issues;
};

// Valid lines parse; malformed lines land in the report with line numbers.
std::vector<Conversation> import_conversations(const std::string& path, ImportReport& report);

struct CorpusStats {
    struct Row {
        std::size_t dialogues = 0;
        std::size_t utterances = 0;
    };
    std::map<int, Row> by_session_count;
    std::size_t total_dialogues = 0;
    std::size_t total_utterances = 0;
    std::map<std::string, std::size_t> split_counts;
    // Train/valid/test within one conversation of the 0.7/0.1/0.2 ratio.
    bool split_ratio_ok = false;
};

CorpusStats compute_stats(const std::vector<Conversation>& corpus);
std::string stats_to_text(const CorpusStats& stats);
std::string stats_to_json(const CorpusStats& stats);

} // namespace chronochat
