#pragma once

#include <optional>
#include <string>
#include <vector>

#include "duration.hpp"
#include "event_pool.hpp"

namespace chronochat {

// Quantized completion state of an event, ordered.
enum class ProgressLabel {
    NoSignificantProgress,
    QuarterFinished,
    HalfFinished,
    ThreeQuartersFinished,
    Finished,
};

// Exact label strings consumed by context builders; a bit-exact contract.
const char* progress_label_text(ProgressLabel label);
std::optional<ProgressLabel> progress_label_from_text(const std::string& text);

// Quantizes elapsed/duration to the nearest quartile of {0, 1/4, 1/2, 3/4},
// ties rounding down. Finished only when elapsed covers the full duration,
// so completion is never announced early. Throws ZeroDuration.
ProgressLabel compute_progress_label(const Duration& duration, const Duration& elapsed);

// Partition of a schedule into the maximal completed prefix and the rest.
// A step counts as finished only when it fits whole within the elapsed time.
struct ScheduleSplit {
    std::vector<Step> finished;
    std::vector<Step> todo;
};

ScheduleSplit split_schedule(const Schedule& schedule, const Duration& elapsed);

struct ProgressItem {
    std::string description;
    ProgressLabel label;
};

struct ScheduleItem {
    std::string description;
    ScheduleSplit split;
};

// `<speaker>: <desc> [<label>], <desc> [<label>].`
std::string render_progress_line(const std::string& speaker,
                                 const std::vector<ProgressItem>& items);

// `<speaker>: <desc> [finished: s1; s2 | to-do: s3; s4].`
// Empty sides render as "finished: none" / "to-do: none".
std::string render_schedule_line(const std::string& speaker,
                                 const std::vector<ScheduleItem>& items);

// Bracketed split text without the speaker prefix, used in update cards.
std::string render_split(const ScheduleSplit& split);

} // namespace chronochat
