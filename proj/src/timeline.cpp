#include "timeline.hpp"

#include <algorithm>

#include <json.hpp>

#include "errors.hpp"

namespace chronochat {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Offsets may legitimately be zero; parse_duration rejects zero by contract.
Duration parse_offset(const std::string& text) {
    if (text == "0 minutes")
        return Duration::minutes(0);
    return parse_duration(text);
}

TimelineEntry make_life_entry(const LifeEvent& event, const Duration& start, Rng& rng) {
    TimelineEntry entry;
    entry.event_id = event.id;
    entry.kind = EntryKind::Life;
    entry.start_offset = start;
    entry.nominal_duration = event.nominal_duration;
    entry.description = event.description;
    if (!event.schedules.empty()) {
        entry.schedule_choice =
            event.schedules.size() > 1 ? rng.index(event.schedules.size()) : 0;
        entry.steps = event.schedules[entry.schedule_choice].steps;
    }
    entry.duration = effective_duration(event, entry.schedule_choice);
    return entry;
}

// World events keep their real-world order: offsets are drawn, sorted and
// assigned to the chronologically sorted subset.
std::vector<TimelineEntry> place_world_events(const EventPool& pool, const Duration& horizon,
                                              Rng& rng, std::size_t max_count) {
    const std::size_t count = std::min(max_count, pool.world_events.size());
    std::vector<std::size_t> order(pool.world_events.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    rng.shuffle(order);
    order.resize(count);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pool.world_events[a].real_world_index < pool.world_events[b].real_world_index;
    });

    std::vector<std::int64_t> offsets;
    offsets.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        offsets.push_back(rng.uniform_int(0, std::max<std::int64_t>(horizon.total_minutes() - 1, 0)));
    std::sort(offsets.begin(), offsets.end());

    std::vector<TimelineEntry> entries;
    for (std::size_t i = 0; i < count; ++i) {
        const auto& event = pool.world_events[order[i]];
        TimelineEntry entry;
        entry.event_id = event.id;
        entry.kind = EntryKind::World;
        entry.start_offset = Duration::minutes(offsets[i]);
        entry.description = event.headline;
        entries.push_back(std::move(entry));
    }
    return entries;
}

// Two lanes of life events: a gapless chain from the origin (so a session
// always has a live topic) and a sparser lane at random offsets. Within a
// lane nothing overlaps, so at most 2 life events run concurrently.
std::vector<TimelineEntry> place_life_events(const EventPool& pool, const Duration& horizon,
                                             Rng& rng) {
    auto sampled = sample_life_events(pool, pool.life_events.size(), rng);

    std::vector<TimelineEntry> entries;
    std::size_t next = 0;
    std::int64_t cursor = 0;
    while (next < sampled.size() && cursor < horizon.total_minutes()) {
        auto entry = make_life_entry(sampled[next++], Duration::minutes(cursor), rng);
        cursor += entry.duration.total_minutes();
        entries.push_back(std::move(entry));
    }

    const std::int64_t max_idle = std::max<std::int64_t>(horizon.total_minutes() / 6, 1);
    cursor = rng.uniform_int(0, max_idle);
    while (next < sampled.size() && cursor < horizon.total_minutes()) {
        auto entry = make_life_entry(sampled[next++], Duration::minutes(cursor), rng);
        cursor += entry.duration.total_minutes() + rng.uniform_int(0, max_idle);
        entries.push_back(std::move(entry));
    }
    return entries;
}

Timeline assemble(const std::string& speaker_id, const Duration& horizon,
                  std::vector<TimelineEntry> world, std::vector<TimelineEntry> life) {
    Timeline timeline;
    timeline.speaker_id = speaker_id;
    timeline.horizon = horizon;
    timeline.entries = std::move(world);
    timeline.entries.insert(timeline.entries.end(), std::make_move_iterator(life.begin()),
                            std::make_move_iterator(life.end()));
    std::stable_sort(timeline.entries.begin(), timeline.entries.end(),
                     [](const TimelineEntry& a, const TimelineEntry& b) {
                         return a.start_offset < b.start_offset;
                     });
    return timeline;
}

void check_preconditions(const EventPool& pool, const Duration& horizon) {
    if (pool.life_events.empty())
        raise(Errc::bad_config, "event pool has no life events");
    const Duration longest = longest_event_duration(pool);
    if (horizon < longest)
        raise(Errc::horizon_too_short, "horizon " + horizon.format() +
                                           " is shorter than the longest event (" +
                                           longest.format() + ")");
}

std::size_t finished_step_count(const std::vector<Step>& steps, std::int64_t elapsed) {
    std::size_t count = 0;
    std::int64_t cumulative = 0;
    for (const auto& step : steps) {
        cumulative += step.duration.total_minutes();
        if (cumulative > elapsed)
            break;
        ++count;
    }
    return count;
}

constexpr const char* kNoProgressMessage = "No significant progress.";

std::string progress_text(const TimelineEntry& entry, std::int64_t elapsed_before,
                          std::int64_t elapsed_after) {
    if (!entry.steps.empty()) {
        const auto before = finished_step_count(entry.steps, elapsed_before);
        const auto after = finished_step_count(entry.steps, elapsed_after);
        if (after == before)
            return kNoProgressMessage;
        Schedule schedule{entry.steps};
        return render_split(split_schedule(schedule, Duration::minutes(elapsed_after)));
    }
    const auto before = compute_progress_label(entry.duration, Duration::minutes(elapsed_before));
    const auto after = compute_progress_label(entry.duration, Duration::minutes(elapsed_after));
    if (after == before)
        return kNoProgressMessage;
    return progress_label_text(after);
}

const char* kind_name(EntryKind kind) { return kind == EntryKind::Life ? "life" : "world"; }

EntryKind kind_from_name(const std::string& name) {
    return name == "world" ? EntryKind::World : EntryKind::Life;
}

} // namespace

Timeline generate_timeline(const EventPool& pool, const std::string& speaker_id,
                           const Duration& horizon, Rng& rng,
                           const TimelineGenOptions& options) {
    check_preconditions(pool, horizon);
    auto world = place_world_events(pool, horizon, rng, options.max_world_events);
    auto life = place_life_events(pool, horizon, rng);
    return assemble(speaker_id, horizon, std::move(world), std::move(life));
}

std::pair<Timeline, Timeline> generate_timeline_pair(const EventPool& pool,
                                                     const std::string& speaker_a,
                                                     const std::string& speaker_b,
                                                     const Duration& horizon, Rng& rng,
                                                     const TimelineGenOptions& options) {
    check_preconditions(pool, horizon);
    auto world = place_world_events(pool, horizon, rng, options.max_world_events);
    auto life_a = place_life_events(pool, horizon, rng);
    auto life_b = place_life_events(pool, horizon, rng);
    auto timeline_a = assemble(speaker_a, horizon, world, std::move(life_a));
    auto timeline_b = assemble(speaker_b, horizon, std::move(world), std::move(life_b));
    return {std::move(timeline_a), std::move(timeline_b)};
}

std::vector<ActiveEvent> events_active_at(const Timeline& timeline, const Duration& t) {
    if (t > timeline.horizon)
        raise(Errc::beyond_horizon,
              "time " + t.format() + " is beyond the horizon " + timeline.horizon.format());
    std::vector<ActiveEvent> active;
    for (const auto& entry : timeline.entries) {
        const std::int64_t start = entry.start_offset.total_minutes();
        const std::int64_t end = start + entry.duration.total_minutes();
        if (start <= t.total_minutes() && t.total_minutes() < end)
            active.push_back({entry.event_id, Duration::minutes(t.total_minutes() - start)});
    }
    return active;
}

std::pair<ClockState, UpdateBundle> advance(const Timeline& timeline, const ClockState& clock,
                                            const Duration& gap) {
    const std::int64_t t0 = clock.elapsed.total_minutes();
    const std::int64_t t1 = t0 + gap.total_minutes();

    UpdateBundle bundle;
    std::vector<const TimelineEntry*> still_active;
    for (const auto& entry : timeline.entries) {
        const std::int64_t start = entry.start_offset.total_minutes();
        const std::int64_t end = start + entry.duration.total_minutes();
        if (entry.kind == EntryKind::World) {
            if (t0 < start && start <= t1)
                bundle.new_events.push_back(
                    {entry.event_id, EntryKind::World, entry.description, Duration::minutes(0)});
            continue;
        }
        if (start <= t0 && t0 < end) {
            if (end <= t1) {
                bundle.completed.push_back({entry.event_id, entry.description});
            } else {
                bundle.finished_progress.push_back(
                    {entry.event_id, entry.description, progress_text(entry, t0 - start, t1 - start)});
                still_active.push_back(&entry);
            }
        } else if (start > t0 && end <= t1) {
            // started and finished entirely within the gap
            bundle.completed.push_back({entry.event_id, entry.description});
        } else if (start > t0 && start <= t1 && t1 < end) {
            bundle.new_events.push_back(
                {entry.event_id, EntryKind::Life, entry.description, entry.nominal_duration});
        }
    }

    for (const auto* entry : still_active) {
        if (entry->steps.empty())
            continue;
        const auto done = finished_step_count(entry->steps, t1 - entry->start_offset.total_minutes());
        if (done < entry->steps.size()) {
            const auto& step = entry->steps[done];
            bundle.future_plans.push_back("next step of " + entry->description + ": " +
                                          step.duration.format() + " for " + step.description);
        }
    }
    if (!bundle.completed.empty() || still_active.empty()) {
        std::vector<const TimelineEntry*> upcoming;
        for (const auto& entry : timeline.entries)
            if (entry.kind == EntryKind::Life && entry.start_offset.total_minutes() > t1)
                upcoming.push_back(&entry);
        std::sort(upcoming.begin(), upcoming.end(),
                  [](const TimelineEntry* a, const TimelineEntry* b) {
                      return a->start_offset < b->start_offset;
                  });
        for (std::size_t i = 0; i < upcoming.size() && i < 2; ++i)
            bundle.future_plans.push_back("coming up: " + upcoming[i]->description +
                                          ", which would take about " +
                                          upcoming[i]->nominal_duration.format());
    }

    ClockState next;
    next.elapsed = Duration::minutes(t1);
    next.session_index = clock.session_index + 1;
    return {next, std::move(bundle)};
}

std::string life_event_card(const std::string& description, const Duration& nominal) {
    return "You just started " + description + ", which would take about " + nominal.format() + ".";
}

std::vector<std::string> initial_event_cards(const Timeline& timeline) {
    std::vector<std::string> cards;
    for (const auto& entry : timeline.entries)
        if (entry.kind == EntryKind::Life && entry.start_offset.total_minutes() == 0)
            cards.push_back(life_event_card(entry.description, entry.nominal_duration));
    return cards;
}

std::string timeline_to_json(const Timeline& timeline) {
    ordered_json doc;
    doc["speaker_id"] = timeline.speaker_id;
    doc["horizon"] = timeline.horizon.format();
    doc["entries"] = ordered_json::array();
    for (const auto& entry : timeline.entries) {
        ordered_json node;
        node["event_id"] = entry.event_id;
        node["kind"] = kind_name(entry.kind);
        node["start_offset"] =
            entry.start_offset.total_minutes() == 0 ? "0 minutes" : entry.start_offset.format();
        node["description"] = entry.description;
        if (entry.kind == EntryKind::Life) {
            node["schedule_choice"] = entry.schedule_choice;
            node["duration"] = entry.duration.format();
            node["nominal_duration"] = entry.nominal_duration.format();
            node["steps"] = ordered_json::array();
            for (const auto& step : entry.steps)
                node["steps"].push_back(
                    {{"description", step.description}, {"duration", step.duration.format()}});
        }
        doc["entries"].push_back(std::move(node));
    }
    return doc.dump(2);
}

Timeline timeline_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise(Errc::malformed_document, std::string("timeline dump is not valid JSON: ") + e.what());
    }
    Timeline timeline;
    try {
        timeline.speaker_id = doc.at("speaker_id").get<std::string>();
        timeline.horizon = parse_duration(doc.at("horizon").get<std::string>());
        for (const auto& node : doc.at("entries")) {
            TimelineEntry entry;
            entry.event_id = node.at("event_id").get<std::string>();
            entry.kind = kind_from_name(node.value("kind", "life"));
            entry.start_offset = parse_offset(node.at("start_offset").get<std::string>());
            entry.description = node.at("description").get<std::string>();
            if (entry.kind == EntryKind::Life) {
                entry.schedule_choice = node.value("schedule_choice", 0);
                entry.duration = parse_duration(node.at("duration").get<std::string>());
                entry.nominal_duration = parse_duration(node.at("nominal_duration").get<std::string>());
                for (const auto& step_node : node.value("steps", json::array()))
                    entry.steps.push_back({step_node.at("description").get<std::string>(),
                                           parse_duration(step_node.at("duration").get<std::string>())});
            }
            timeline.entries.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        raise(Errc::malformed_document, std::string("bad timeline field: ") + e.what());
    }
    return timeline;
}

std::string update_bundle_to_json(const ClockState& clock, const UpdateBundle& bundle) {
    ordered_json doc;
    doc["clock"] = {{"elapsed", clock.elapsed.total_minutes() == 0 ? "0 minutes"
                                                                   : clock.elapsed.format()},
                    {"session_index", clock.session_index}};
    ordered_json updates;
    updates["finished_progress"] = ordered_json::array();
    for (const auto& note : bundle.finished_progress)
        updates["finished_progress"].push_back({{"event_id", note.event_id},
                                                {"description", note.description},
                                                {"text", note.text}});
    updates["completed"] = ordered_json::array();
    for (const auto& note : bundle.completed)
        updates["completed"].push_back(
            {{"event_id", note.event_id}, {"description", note.description}});
    updates["new_events"] = ordered_json::array();
    for (const auto& note : bundle.new_events) {
        ordered_json node{{"event_id", note.event_id},
                          {"kind", kind_name(note.kind)},
                          {"description", note.description}};
        if (note.kind == EntryKind::Life)
            node["card"] = life_event_card(note.description, note.nominal_duration);
        updates["new_events"].push_back(std::move(node));
    }
    updates["future_plans"] = bundle.future_plans;
    doc["updates"] = std::move(updates);
    return doc.dump(2);
}

} // namespace chronochat
