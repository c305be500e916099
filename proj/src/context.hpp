#pragma once

#include <optional>
#include <string>
#include <vector>

#include "duration.hpp"
#include "progress.hpp"

namespace chronochat {

// Which time representations are injected into the model input.
enum class ContextMode { None, GapOnly, Progress, Schedule, Both };

const char* context_mode_name(ContextMode mode);
std::optional<ContextMode> context_mode_from_name(std::string_view name);

struct SpeakerEvents {
    std::string speaker;
    std::vector<std::string> descriptions;
};

struct SpeakerProgress {
    std::string speaker;
    std::vector<ProgressItem> items;
};

struct SpeakerSchedules {
    std::string speaker;
    std::vector<ScheduleItem> items;
};

struct ContextInputs {
    std::vector<std::string> history; // oldest first
    std::vector<SpeakerEvents> events;
    std::vector<SpeakerProgress> progress;
    std::vector<SpeakerSchedules> schedules;
    std::optional<Duration> gap;
};

// `<speaker>: <desc>, <desc>.`
std::string render_events_line(const std::string& speaker,
                               const std::vector<std::string>& descriptions);

constexpr std::size_t kDefaultContextBudget = 4096;

// Renders the model input: history lines, then literal `Events`, `Progress`,
// `Schedule` and `Gap` sections as the mode requires. When the result would
// exceed the character budget the oldest history lines are dropped first;
// section content is never dropped. Throws ModeSectionMismatch when the
// inputs disagree with the mode.
std::string build_context(const ContextInputs& inputs, ContextMode mode,
                          std::size_t char_budget = kDefaultContextBudget);

} // namespace chronochat
