#include <doctest.h>

#include <algorithm>
#include <set>

#include "errors.hpp"
#include "event_pool.hpp"
#include "test_support.hpp"

using namespace chronochat;

#ifndef TEST_POOL_PATH
#define TEST_POOL_PATH "data/event_pool.json"
#endif

namespace {

Errc violation_code(const std::string& json_text) {
    try {
        parse_event_pool(json_text);
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::io_error; // sentinel: no error raised
}

std::string violation_message(const std::string& json_text) {
    try {
        parse_event_pool(json_text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("bundled reference pool has 50 life events, 10 per bucket") {
    const EventPool pool = load_event_pool(TEST_POOL_PATH);
    CHECK(pool.life_events.size() == 50);
    REQUIRE(pool.bucket_index.size() == 5);
    for (const auto& [bucket, ids] : pool.bucket_index) {
        INFO(gap_bucket_name(bucket));
        CHECK(ids.size() == 10);
    }
    CHECK(pool.world_events.size() >= 5);
    for (const auto& event : pool.life_events) {
        CHECK(event.schedules.size() <= 2);
        for (const auto& schedule : event.schedules)
            CHECK(schedule.steps.size() <= kMaxScheduleSteps);
    }
}

TEST_CASE("pool validation names the broken rule") {
    const char* eight_steps = R"({"life_events":[{"id":"x","description":"long event",
        "duration":"2 days","schedules":[[
        {"description":"s1","duration":"1 hour"},{"description":"s2","duration":"1 hour"},
        {"description":"s3","duration":"1 hour"},{"description":"s4","duration":"1 hour"},
        {"description":"s5","duration":"1 hour"},{"description":"s6","duration":"1 hour"},
        {"description":"s7","duration":"1 hour"},{"description":"s8","duration":"1 hour"}]]}]})";
    CHECK(violation_code(eight_steps) == Errc::invariant_violation);
    CHECK(violation_message(eight_steps).find("max-7-steps") != std::string::npos);

    const char* missing_second = R"({"life_events":[{"id":"y","description":"long event",
        "duration":"3 months","schedules":[[{"description":"s1","duration":"3 months"}]]}]})";
    CHECK(violation_code(missing_second) == Errc::invariant_violation);
    CHECK(violation_message(missing_second).find("two-schedules-required") != std::string::npos);

    const char* no_schedule = R"({"life_events":[{"id":"z","description":"long event",
        "duration":"2 days","schedules":[]}]})";
    CHECK(violation_message(no_schedule).find("schedule-required") != std::string::npos);

    CHECK(violation_code("") == Errc::malformed_document);
    CHECK(violation_code("{\"world_events\":[]}") == Errc::malformed_document);
}

TEST_CASE("load_event_pool reports a missing file") {
    try {
        load_event_pool("/nonexistent/pool.json");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::missing_file);
    }
}

TEST_CASE("effective_duration sums the selected schedule") {
    const EventPool pool = load_event_pool(TEST_POOL_PATH);
    const LifeEvent* license = pool.find_life_event("driver-license");
    REQUIRE(license != nullptr);
    // one week + 2 weeks + 2 weeks + one week + one week
    CHECK(effective_duration(*license, 0).total_minutes() == 7 * 10080);

    const LifeEvent* thesis = pool.find_life_event("doctor-thesis");
    REQUIRE(thesis != nullptr);
    CHECK(effective_duration(*thesis, 0).total_minutes() == 10 * 43200);

    LifeEvent quick;
    quick.id = "quick";
    quick.description = "a quick errand";
    quick.nominal_duration = Duration::minutes(30);
    CHECK(effective_duration(quick).total_minutes() == 30);

    try {
        effective_duration(*license, 5);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::no_such_schedule);
    }
}

TEST_CASE("sample_life_events is uniform without replacement and seeded") {
    const EventPool pool = load_event_pool(TEST_POOL_PATH);

    Rng rng(5);
    const auto everything = sample_life_events(pool, pool.life_events.size(), rng);
    std::set<std::string> ids;
    for (const auto& event : everything)
        ids.insert(event.id);
    CHECK(ids.size() == pool.life_events.size()); // a permutation

    Rng rng_zero(5);
    CHECK(sample_life_events(pool, 0, rng_zero).empty());

    Rng rng_a(99);
    Rng rng_b(99);
    const auto pick_a = sample_life_events(pool, 10, rng_a);
    const auto pick_b = sample_life_events(pool, 10, rng_b);
    for (std::size_t i = 0; i < pick_a.size(); ++i)
        CHECK(pick_a[i].id == pick_b[i].id);

    Rng rng_over(1);
    try {
        sample_life_events(pool, pool.life_events.size() + 1, rng_over);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::pool_exhausted);
    }
}
