#pragma once

#include <map>
#include <string>
#include <vector>

#include "duration.hpp"
#include "rng.hpp"

namespace chronochat {

struct Step {
    std::string description;
    Duration duration;
};

// Ordered decomposition of a life event, at most 7 steps.
struct Schedule {
    std::vector<Step> steps;

    Duration total_duration() const;
};

constexpr std::size_t kMaxScheduleSteps = 7;

struct LifeEvent {
    std::string id;
    std::string description;
    Duration nominal_duration;
    std::vector<Schedule> schedules;

    bool has_schedule() const { return !schedules.empty(); }
};

struct WorldEvent {
    std::string id;
    std::string headline;
    // Global chronological rank; world events always appear in this order.
    int real_world_index = 0;
};

struct EventPool {
    std::vector<LifeEvent> life_events;
    std::vector<WorldEvent> world_events;
    std::map<GapBucket, std::vector<std::string>> bucket_index;

    const LifeEvent* find_life_event(const std::string& id) const;
};

// Loads and validates a pool document (JSON, durations as phrases).
// Violations are reported as InvariantViolation with the event id and
// rule name; unreadable documents as MissingFile / MalformedDocument.
EventPool load_event_pool(const std::string& path);
EventPool parse_event_pool(const std::string& json_text);

// Sum of the selected schedule's step durations; nominal duration for
// schedule-less events. Progress computations always use this value.
Duration effective_duration(const LifeEvent& event, std::size_t schedule_index = 0);

// Longest effective duration over all events and schedule choices.
Duration longest_event_duration(const EventPool& pool);

// Distinct events, uniform without replacement.
std::vector<LifeEvent> sample_life_events(const EventPool& pool, std::size_t count, Rng& rng);

} // namespace chronochat
