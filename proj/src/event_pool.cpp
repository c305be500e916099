#include "event_pool.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace chronochat {

namespace {

using nlohmann::json;

[[noreturn]] void violation(const std::string& id, const std::string& rule) {
    raise(Errc::invariant_violation, "event '" + id + "' violates rule " + rule);
}

Duration read_duration(const json& value, const std::string& id) {
    if (!value.is_string())
        violation(id, "duration-not-a-phrase");
    return parse_duration(value.get<std::string>());
}

LifeEvent read_life_event(const json& node) {
    if (!node.is_object() || !node.contains("id"))
        raise(Errc::malformed_document, "life event without id");
    LifeEvent event;
    event.id = node.at("id").get<std::string>();
    if (!node.contains("description") || !node.contains("duration"))
        violation(event.id, "missing-field");
    event.description = node.at("description").get<std::string>();
    if (event.description.empty())
        violation(event.id, "empty-description");
    event.nominal_duration = read_duration(node.at("duration"), event.id);

    for (const auto& schedule_node : node.value("schedules", json::array())) {
        Schedule schedule;
        for (const auto& step_node : schedule_node) {
            Step step;
            step.description = step_node.at("description").get<std::string>();
            if (step.description.empty())
                violation(event.id, "empty-step-description");
            step.duration = read_duration(step_node.at("duration"), event.id);
            if (step.duration.total_minutes() < 1)
                violation(event.id, "step-duration-positive");
            schedule.steps.push_back(std::move(step));
        }
        if (schedule.steps.empty())
            violation(event.id, "empty-schedule");
        if (schedule.steps.size() > kMaxScheduleSteps)
            violation(event.id, "max-7-steps");
        event.schedules.push_back(std::move(schedule));
    }
    return event;
}

void validate(const EventPool& pool) {
    constexpr std::int64_t kHour = 60;
    constexpr std::int64_t kMonth = 43200;

    std::set<std::string> ids;
    for (const auto& event : pool.life_events) {
        if (!ids.insert(event.id).second)
            violation(event.id, "duplicate-id");
        const std::int64_t nominal = event.nominal_duration.total_minutes();
        if (nominal > kHour && event.schedules.empty())
            violation(event.id, "schedule-required");
        if (nominal > kMonth && event.schedules.size() != 2)
            violation(event.id, "two-schedules-required");
    }

    std::set<int> indices;
    for (const auto& event : pool.world_events) {
        if (!ids.insert(event.id).second)
            violation(event.id, "duplicate-id");
        if (event.headline.empty())
            violation(event.id, "empty-headline");
        if (!indices.insert(event.real_world_index).second)
            violation(event.id, "duplicate-world-index");
    }
}

} // namespace

Duration Schedule::total_duration() const {
    std::int64_t total = 0;
    for (const auto& step : steps)
        total += step.duration.total_minutes();
    return Duration::minutes(total);
}

const LifeEvent* EventPool::find_life_event(const std::string& id) const {
    for (const auto& event : life_events)
        if (event.id == id)
            return &event;
    return nullptr;
}

EventPool parse_event_pool(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        raise(Errc::malformed_document, std::string("pool document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("life_events"))
        raise(Errc::malformed_document, "pool document must contain life_events");

    EventPool pool;
    try {
        for (const auto& node : doc.at("life_events"))
            pool.life_events.push_back(read_life_event(node));
        for (const auto& node : doc.value("world_events", json::array())) {
            WorldEvent event;
            event.id = node.at("id").get<std::string>();
            event.headline = node.at("headline").get<std::string>();
            event.real_world_index = node.at("index").get<int>();
            pool.world_events.push_back(std::move(event));
        }
    } catch (const json::exception& e) {
        raise(Errc::malformed_document, std::string("bad pool field: ") + e.what());
    }

    validate(pool);

    for (const auto& event : pool.life_events)
        pool.bucket_index[classify_gap_bucket(event.nominal_duration)].push_back(event.id);
    return pool;
}

EventPool load_event_pool(const std::string& path) {
    std::ifstream file(path);
    if (!file)
        raise(Errc::missing_file, "cannot open pool document: " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_event_pool(buffer.str());
}

Duration effective_duration(const LifeEvent& event, std::size_t schedule_index) {
    if (event.schedules.empty())
        return event.nominal_duration;
    if (schedule_index >= event.schedules.size())
        raise(Errc::no_such_schedule,
              "event '" + event.id + "' has no schedule " + std::to_string(schedule_index));
    return event.schedules[schedule_index].total_duration();
}

Duration longest_event_duration(const EventPool& pool) {
    std::int64_t longest = 0;
    for (const auto& event : pool.life_events) {
        if (event.schedules.empty()) {
            longest = std::max(longest, event.nominal_duration.total_minutes());
        } else {
            for (std::size_t i = 0; i < event.schedules.size(); ++i)
                longest = std::max(longest, effective_duration(event, i).total_minutes());
        }
    }
    return Duration::minutes(longest);
}

std::vector<LifeEvent> sample_life_events(const EventPool& pool, std::size_t count, Rng& rng) {
    if (count > pool.life_events.size())
        raise(Errc::pool_exhausted,
              "requested " + std::to_string(count) + " events from a pool of " +
                  std::to_string(pool.life_events.size()));
    // Partial Fisher-Yates over index positions.
    std::vector<std::size_t> order(pool.life_events.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::vector<LifeEvent> sampled;
    sampled.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + rng.index(order.size() - i);
        std::swap(order[i], order[j]);
        sampled.push_back(pool.life_events[order[i]]);
    }
    return sampled;
}

} // namespace chronochat
