#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "context.hpp"
#include "dataset.hpp"
#include "event_pool.hpp"
#include "llm_backend.hpp"

namespace chronochat {

struct SelfChatConfig {
    int num_sessions = 3;      // 3..5
    int min_utterances = 20;   // per session, before the closing exchange
    std::vector<Utterance> opening_script; // first utterances of session 1
    std::vector<Duration> gaps; // empty: sampled from the seed
    ContextMode mode = ContextMode::Both;
    std::uint64_t seed = 0;
    std::size_t char_budget = kDefaultContextBudget;
    std::size_t retrieval_k = 5;
    std::string conversation_id; // empty: derived from the seed
    std::string split = "train";
};

struct SelfChatOutcome {
    Conversation conversation;
    bool completed = false;
    std::string error; // set when a backend aborted the run
};

// Two backends talk across num_sessions sessions. Session 1 is seeded with
// the opening script; turns alternate until min_utterances, then a short
// closing exchange. Between sessions the shared clock advances by the gap,
// progress is computed and each backend's next context is built per mode.
// The gap and event streams depend only on (pool, seed), never on the mode.
// Backend failures end the run early with the partial transcript preserved.
SelfChatOutcome run_self_chat(const SelfChatConfig& config, llm::Backend& backend_a,
                              llm::Backend& backend_b, const EventPool& pool);

std::vector<Utterance> default_opening_script();

SelfChatConfig self_chat_config_from_json(const std::string& json_text);

} // namespace chronochat
