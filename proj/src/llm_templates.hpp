#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace chronochat::llm {

using SlotMap = std::map<std::string, std::string>;

// A named prompt body with {slot} markers. Required slots are derived
// from the body; rendering fails unless every one of them is bound.
struct PromptTemplate {
    std::string name;
    std::string body;
    std::set<std::string> required_slots;
};

PromptTemplate make_template(std::string name, std::string body);

// Shipped templates: extract_events (plus the slot_filling and qa styles),
// estimate_duration, craft_event_steps, get_schedule and the chat-session
// prompts with their gap/progress/schedule variants.
const PromptTemplate& find_template(const std::string& name);
std::vector<std::string> template_names();

// Deterministic one-pass substitution; throws MissingSlot naming the
// first unbound slot.
std::string render_prompt(const PromptTemplate& tmpl, const SlotMap& bindings);
std::string render_prompt(const std::string& template_name, const SlotMap& bindings);

// Stable fixture key for mock lookups: template name plus an FNV-1a hash
// of the canonicalized bindings. Stable across platforms and runs.
std::string fixture_key(const std::string& template_name, const SlotMap& bindings);

} // namespace chronochat::llm
