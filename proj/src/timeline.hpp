#pragma once

#include <string>
#include <utility>
#include <vector>

#include "duration.hpp"
#include "event_pool.hpp"
#include "progress.hpp"

namespace chronochat {

enum class EntryKind { Life, World };

// A placed event. Entries are self-contained (description, durations and
// the chosen schedule's steps are resolved at generation time) so that
// timelines can be dumped, reloaded and advanced without the pool.
struct TimelineEntry {
    std::string event_id;
    EntryKind kind = EntryKind::Life;
    std::size_t schedule_choice = 0;
    Duration start_offset;
    Duration duration;         // effective duration; zero for world events
    Duration nominal_duration; // as declared in the pool, used in cards
    std::string description;   // life description or world headline
    std::vector<Step> steps;   // empty when the event has no schedule
};

struct Timeline {
    std::string speaker_id;
    std::vector<TimelineEntry> entries;
    Duration horizon;
};

// The advancing clock of one conversation.
struct ClockState {
    Duration elapsed;
    int session_index = 1;
};

struct ProgressNote {
    std::string event_id;
    std::string description;
    std::string text; // progress description, or exactly "No significant progress."
};

struct CompletionNote {
    std::string event_id;
    std::string description;
};

struct NewEventNote {
    std::string event_id;
    EntryKind kind = EntryKind::Life;
    std::string description;
    Duration nominal_duration; // life events only
};

// What a speaker is shown after time moves forward. An event id appears
// in at most one of finished_progress / completed.
struct UpdateBundle {
    std::vector<ProgressNote> finished_progress;
    std::vector<CompletionNote> completed;
    std::vector<NewEventNote> new_events;
    std::vector<std::string> future_plans;
};

struct TimelineGenOptions {
    std::size_t max_world_events = 10;
};

// Places sampled life events on two lanes (a gapless chain from the origin
// plus a sparser overlapping lane, so at most 2 run concurrently) and world
// events at sorted random offsets in real-world order.
Timeline generate_timeline(const EventPool& pool, const std::string& speaker_id,
                           const Duration& horizon, Rng& rng,
                           const TimelineGenOptions& options = {});

// Same, for a conversation pairing: world event placements are generated
// once and shared by both timelines.
std::pair<Timeline, Timeline> generate_timeline_pair(const EventPool& pool,
                                                     const std::string& speaker_a,
                                                     const std::string& speaker_b,
                                                     const Duration& horizon, Rng& rng,
                                                     const TimelineGenOptions& options = {});

struct ActiveEvent {
    std::string event_id;
    Duration elapsed_within;
};

// Entries with start_offset <= t < start_offset + duration.
// Throws BeyondHorizon when t exceeds the timeline horizon.
std::vector<ActiveEvent> events_active_at(const Timeline& timeline, const Duration& t);

// Moves the clock forward by gap and reports what changed: progress on
// still-ongoing events ("No significant progress." when the next schedule
// step is out of reach), completion notices, newly started events and
// future plans.
std::pair<ClockState, UpdateBundle> advance(const Timeline& timeline, const ClockState& clock,
                                            const Duration& gap);

// "You just started <description>, which would take about <duration>."
std::string life_event_card(const std::string& description, const Duration& nominal);

// Cards for the events already running at the timeline origin.
std::vector<std::string> initial_event_cards(const Timeline& timeline);

// Reproducibility dumps (same structured-text family as pool documents).
std::string timeline_to_json(const Timeline& timeline);
Timeline timeline_from_json(const std::string& text);
std::string update_bundle_to_json(const ClockState& clock, const UpdateBundle& bundle);

} // namespace chronochat
