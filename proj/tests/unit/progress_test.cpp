#include <doctest.h>

#include <cstdlib>

#include "errors.hpp"
#include "progress.hpp"
#include "test_support.hpp"

using namespace chronochat;

namespace {

// Independent oracle: nearest quartile of {0, 1/4, 1/2, 3/4} with ties to
// the smaller one, in exact integer arithmetic (argmin over k of
// |e/d - k/4| = |4e - kd| / 4d); elapsed >= duration forces Finished.
ProgressLabel oracle_label(std::int64_t duration, std::int64_t elapsed) {
    if (elapsed >= duration)
        return ProgressLabel::Finished;
    int best_k = 0;
    std::int64_t best = std::llabs(4 * elapsed - 0 * duration);
    for (int k = 1; k <= 3; ++k) {
        const std::int64_t distance = std::llabs(4 * elapsed - k * duration);
        if (distance < best) {
            best = distance;
            best_k = k;
        }
    }
    switch (best_k) {
    case 0: return ProgressLabel::NoSignificantProgress;
    case 1: return ProgressLabel::QuarterFinished;
    case 2: return ProgressLabel::HalfFinished;
    default: return ProgressLabel::ThreeQuartersFinished;
    }
}

// Inverse parser oracles for the line grammars.
std::vector<ProgressItem> parse_progress_line(const std::string& line) {
    std::vector<ProgressItem> items;
    const auto colon = line.find(": ");
    REQUIRE(colon != std::string::npos);
    REQUIRE(line.back() == '.');
    std::string rest = line.substr(colon + 2, line.size() - colon - 3);
    std::size_t cursor = 0;
    while (cursor < rest.size()) {
        const auto open = rest.find(" [", cursor);
        REQUIRE(open != std::string::npos);
        const auto close = rest.find(']', open);
        REQUIRE(close != std::string::npos);
        ProgressItem item;
        item.description = rest.substr(cursor, open - cursor);
        const auto label = progress_label_from_text(rest.substr(open + 2, close - open - 2));
        REQUIRE(label.has_value());
        item.label = *label;
        items.push_back(std::move(item));
        cursor = close + 1;
        if (cursor < rest.size()) {
            REQUIRE(rest.substr(cursor, 2) == ", ");
            cursor += 2;
        }
    }
    return items;
}

std::vector<Step> parse_step_list(const std::string& text) {
    std::vector<Step> steps;
    if (text == "none")
        return steps;
    std::size_t cursor = 0;
    while (cursor <= text.size()) {
        auto stop = text.find("; ", cursor);
        if (stop == std::string::npos)
            stop = text.size();
        const std::string segment = text.substr(cursor, stop - cursor);
        const auto split_at = segment.find(" for ");
        REQUIRE(split_at != std::string::npos);
        steps.push_back(
            {segment.substr(split_at + 5), parse_duration(segment.substr(0, split_at))});
        if (stop == text.size())
            break;
        cursor = stop + 2;
    }
    return steps;
}

ScheduleSplit parse_split_text(const std::string& text) {
    REQUIRE(text.front() == '[');
    REQUIRE(text.back() == ']');
    const auto bar = text.find(" | to-do: ");
    REQUIRE(bar != std::string::npos);
    constexpr std::size_t finished_prefix = 11; // "[finished: "
    ScheduleSplit split;
    split.finished = parse_step_list(text.substr(finished_prefix, bar - finished_prefix));
    split.todo = parse_step_list(text.substr(bar + 10, text.size() - bar - 11));
    return split;
}

Schedule driver_license_schedule() {
    Schedule schedule;
    schedule.steps = {
        {"learning rules", parse_duration("one week")},
        {"practicing", parse_duration("2 weeks")},
        {"passing exams", parse_duration("2 weeks")},
        {"road check", parse_duration("one week")},
        {"getting license", parse_duration("one week")},
    };
    return schedule;
}

} // namespace

TEST_CASE("progress label matches the published example") {
    // duration "2 months", gap "6 weeks" -> 3/4 finished
    const auto label = compute_progress_label(parse_duration("2 months"), parse_duration("6 weeks"));
    CHECK(label == ProgressLabel::ThreeQuartersFinished);
    CHECK(std::string(progress_label_text(label)) == "3/4 finished");
}

TEST_CASE("progress label edges") {
    const Duration d8h = parse_duration("8 hours");
    CHECK(compute_progress_label(d8h, Duration::minutes(0)) ==
          ProgressLabel::NoSignificantProgress);
    CHECK(compute_progress_label(d8h, d8h) == ProgressLabel::Finished);
    CHECK(compute_progress_label(d8h, parse_duration("9 hours")) == ProgressLabel::Finished);
    // f = 1/8 exactly rounds down
    CHECK(compute_progress_label(d8h, parse_duration("1 hour")) ==
          ProgressLabel::NoSignificantProgress);
    try {
        compute_progress_label(Duration::minutes(0), Duration::minutes(5));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::zero_duration);
    }
}

TEST_CASE("progress label agrees with the quartile oracle on 10k pairs") {
    Rng rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const std::int64_t duration = rng.uniform_int(1, 600000);
        const std::int64_t elapsed = rng.uniform_int(0, 700000);
        const auto computed =
            compute_progress_label(Duration::minutes(duration), Duration::minutes(elapsed));
        CHECK(computed == oracle_label(duration, elapsed));
    }
    // boundary pairs around each threshold
    for (std::int64_t d : {8LL, 16LL, 80LL, 43200LL}) {
        for (std::int64_t numerator : {1LL, 3LL, 5LL}) {
            const std::int64_t boundary = numerator * d / 8;
            for (std::int64_t e : {boundary - 1, boundary, boundary + 1}) {
                if (e < 0)
                    continue;
                CHECK(compute_progress_label(Duration::minutes(d), Duration::minutes(e)) ==
                      oracle_label(d, e));
            }
        }
    }
}

TEST_CASE("progress label is monotone in elapsed") {
    Rng rng(31);
    for (int i = 0; i < 300; ++i) {
        const std::int64_t duration = rng.uniform_int(1, 100000);
        ProgressLabel previous = ProgressLabel::NoSignificantProgress;
        for (std::int64_t e = 0; e <= duration + 10; e += std::max<std::int64_t>(duration / 37, 1)) {
            const auto label = compute_progress_label(Duration::minutes(duration),
                                                      Duration::minutes(e));
            CHECK(static_cast<int>(label) >= static_cast<int>(previous));
            previous = label;
        }
    }
}

TEST_CASE("split_schedule matches the driver-license example") {
    const Schedule schedule = driver_license_schedule();
    const ScheduleSplit split = split_schedule(schedule, parse_duration("2 weeks"));
    REQUIRE(split.finished.size() == 1);
    CHECK(split.finished[0].description == "learning rules");
    CHECK(split.todo.size() == 4);
    CHECK(split.todo[0].description == "practicing");

    const ScheduleSplit none = split_schedule(schedule, Duration::minutes(0));
    CHECK(none.finished.empty());
    CHECK(none.todo.size() == 5);

    const ScheduleSplit all = split_schedule(schedule, parse_duration("8 weeks"));
    CHECK(all.todo.empty());
    CHECK(all.finished.size() == 5);
}

TEST_CASE("split_schedule prefix and conservation properties") {
    Rng rng(77);
    for (int i = 0; i < 1000; ++i) {
        Schedule schedule;
        const std::size_t count = 1 + rng.index(7);
        std::int64_t total = 0;
        for (std::size_t s = 0; s < count; ++s) {
            const std::int64_t minutes = rng.uniform_int(1, 20000);
            total += minutes;
            schedule.steps.push_back({testsupport::random_phrase(rng),
                                      Duration::minutes(minutes)});
        }
        const std::int64_t elapsed = rng.uniform_int(0, total + 5000);
        const ScheduleSplit split = split_schedule(schedule, Duration::minutes(elapsed));

        // conservation: finished ++ todo equals the original order
        REQUIRE(split.finished.size() + split.todo.size() == schedule.steps.size());
        for (std::size_t s = 0; s < schedule.steps.size(); ++s) {
            const Step& expected = schedule.steps[s];
            const Step& actual = s < split.finished.size()
                                     ? split.finished[s]
                                     : split.todo[s - split.finished.size()];
            CHECK(actual.description == expected.description);
            CHECK(actual.duration == expected.duration);
        }
        // maximal prefix with cumulative duration <= elapsed
        std::int64_t cumulative = 0;
        std::size_t expected_finished = 0;
        for (const auto& step : schedule.steps) {
            cumulative += step.duration.total_minutes();
            if (cumulative <= elapsed)
                ++expected_finished;
            else
                break;
        }
        CHECK(split.finished.size() == expected_finished);

        // consistency with the label when duration = sum of steps
        const bool todo_empty = split.todo.empty();
        const bool finished_label =
            compute_progress_label(Duration::minutes(total), Duration::minutes(elapsed)) ==
            ProgressLabel::Finished;
        CHECK(todo_empty == finished_label);
    }
}

TEST_CASE("render_progress_line matches the published input format") {
    const std::string line = render_progress_line(
        "B", {{"writing doctorate thesis", ProgressLabel::NoSignificantProgress},
              {"book reading event", ProgressLabel::Finished}});
    CHECK(line ==
          "B: writing doctorate thesis [no significant progress], book reading event [finished].");

    CHECK(render_progress_line("A", {{"watching a movie", ProgressLabel::HalfFinished}}) ==
          "A: watching a movie [half finished].");

    try {
        render_progress_line("A", {});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_items);
    }
}

TEST_CASE("progress line round-trips through the inverse parser") {
    Rng rng(13);
    for (int i = 0; i < 300; ++i) {
        std::vector<ProgressItem> items;
        const std::size_t count = 1 + rng.index(4);
        for (std::size_t c = 0; c < count; ++c)
            items.push_back({testsupport::random_phrase(rng),
                             static_cast<ProgressLabel>(rng.index(5))});
        const auto parsed = parse_progress_line(render_progress_line("B", items));
        REQUIRE(parsed.size() == items.size());
        for (std::size_t c = 0; c < count; ++c) {
            CHECK(parsed[c].description == items[c].description);
            CHECK(parsed[c].label == items[c].label);
        }
    }
}

TEST_CASE("render_schedule_line grammar and round-trip") {
    const Schedule schedule = driver_license_schedule();
    const ScheduleSplit split = split_schedule(schedule, parse_duration("2 weeks"));
    const std::string line = render_schedule_line("B", {{"getting a driver license", split}});
    CHECK(line == "B: getting a driver license [finished: 1 week for learning rules | "
                  "to-do: 2 weeks for practicing; 2 weeks for passing exams; "
                  "1 week for road check; 1 week for getting license].");

    const ScheduleSplit fresh = split_schedule(schedule, Duration::minutes(0));
    CHECK(render_schedule_line("A", {{"getting a driver license", fresh}}).find(
              "[finished: none | to-do:") != std::string::npos);

    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        Schedule random_schedule;
        const std::size_t count = 1 + rng.index(5);
        std::int64_t total = 0;
        for (std::size_t s = 0; s < count; ++s) {
            const auto minutes = rng.uniform_int(1, 40) * 1440; // whole days round-trip cleanly
            total += minutes;
            random_schedule.steps.push_back(
                {testsupport::random_phrase(rng), Duration::minutes(minutes)});
        }
        const ScheduleSplit random_split =
            split_schedule(random_schedule, Duration::minutes(rng.uniform_int(0, total)));
        const std::string rendered = render_split(random_split);
        const ScheduleSplit parsed = parse_split_text(rendered);
        REQUIRE(parsed.finished.size() == random_split.finished.size());
        REQUIRE(parsed.todo.size() == random_split.todo.size());
        for (std::size_t s = 0; s < parsed.finished.size(); ++s) {
            CHECK(parsed.finished[s].description == random_split.finished[s].description);
            CHECK(parsed.finished[s].duration == random_split.finished[s].duration);
        }
        for (std::size_t s = 0; s < parsed.todo.size(); ++s) {
            CHECK(parsed.todo[s].description == random_split.todo[s].description);
            CHECK(parsed.todo[s].duration == random_split.todo[s].duration);
        }
    }
}
