#pragma once

#include <optional>
#include <string>
#include <vector>

#include "duration.hpp"
#include "event_pool.hpp"
#include "llm_backend.hpp"

namespace chronochat::llm {

struct ExtractedEvent {
    std::string speaker;
    std::string description;
    std::optional<Duration> estimated_duration;
};

struct ExtractionResult {
    std::vector<ExtractedEvent> events;
    std::size_t skipped_lines = 0; // non-empty lines that failed the grammar
};

enum class ExtractionStyle { Instruction, SlotFilling, QuestionAnswering };

const char* extraction_template_name(ExtractionStyle style);

// Parses reply lines of the form `<speaker>: <description> (about <duration>)`
// plus the sentence form `<speaker> is engaging in <description>, which takes
// about <duration>`. "something is not mentioned" yields no event. No reply
// text can crash the parser; failing lines are counted, never fixed.
ExtractionResult parse_extraction_reply(const std::string& reply);

// Renders the extraction prompt for the style, completes it and parses
// the reply. Throws EmptyReply for blank replies.
ExtractionResult extract_events(Backend& backend, const std::string& history,
                                ExtractionStyle style = ExtractionStyle::Instruction);

// First duration phrase of the reply to the estimation prompt.
// Throws NoDurationInReply.
Duration estimate_event_duration(Backend& backend, const std::string& description);

// Parses `<duration> for <step>` segments. Replies longer than 7 steps are
// truncated; `truncated_steps`, when given, receives the overflow count.
Schedule parse_schedule_reply(const std::string& reply, std::size_t* truncated_steps = nullptr);

// Prompts for a schedule of the event and parses it. Throws NoParsableSteps.
Schedule generate_event_schedule(Backend& backend, const std::string& description,
                                 const Duration& duration,
                                 std::size_t* truncated_steps = nullptr);

} // namespace chronochat::llm
