// Exercises the shared-library surface: handles, error codes, string
// ownership. Links against the C API only, like the CLI does.
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "chronochat/chronochat.h"

using nlohmann::json;

#ifndef TEST_POOL_PATH
#define TEST_POOL_PATH "data/event_pool.json"
#endif

namespace {

std::string take(char* text) {
    std::string out = text ? text : "";
    chrono_free(text);
    return out;
}

} // namespace

TEST_CASE("duration parse/format and error reporting") {
    int64_t minutes = 0;
    CHECK(chrono_duration_parse("2 months", &minutes) == CHRONO_OK);
    CHECK(minutes == 86400);

    char* phrase = nullptr;
    CHECK(chrono_duration_format(60480, &phrase) == CHRONO_OK);
    CHECK(take(phrase) == "6 weeks");

    CHECK(chrono_duration_parse("3 fortnights", &minutes) == CHRONO_E_UNRECOGNIZED_UNIT);
    CHECK(std::string(chrono_last_error()).find("fortnight") != std::string::npos);
    CHECK(chrono_duration_parse(nullptr, &minutes) == CHRONO_E_BAD_CONFIG);
}

TEST_CASE("gap bucket and sampled gaps") {
    char* bucket = nullptr;
    CHECK(chrono_gap_bucket("10 minutes", &bucket) == CHRONO_OK);
    CHECK(take(bucket) == "minutes");

    char* first = nullptr;
    char* second = nullptr;
    CHECK(chrono_sample_gaps(42, 50, &first) == CHRONO_OK);
    CHECK(chrono_sample_gaps(42, 50, &second) == CHRONO_OK);
    const std::string gaps = take(first);
    CHECK(gaps == take(second));
    CHECK(json::parse(gaps).size() == 50);
}

TEST_CASE("progress label and schedule split") {
    char* label = nullptr;
    CHECK(chrono_progress_label("2 months", "6 weeks", &label) == CHRONO_OK);
    CHECK(take(label) == "3/4 finished");
    CHECK(chrono_progress_label("0 minutes", "1 hour", nullptr) ==
          CHRONO_E_NON_POSITIVE_QUANTITY);

    const char* schedule = R"([
        {"description":"learning rules","duration":"one week"},
        {"description":"practicing","duration":"2 weeks"}])";
    char* split = nullptr;
    CHECK(chrono_split_schedule(schedule, "2 weeks", &split) == CHRONO_OK);
    const json doc = json::parse(take(split));
    REQUIRE(doc.at("finished").size() == 1);
    CHECK(doc.at("finished")[0].at("description") == "learning rules");
    CHECK(doc.at("todo").size() == 1);
}

TEST_CASE("pool and timeline through opaque handles") {
    chrono_pool* pool = nullptr;
    REQUIRE(chrono_pool_open(TEST_POOL_PATH, &pool) == CHRONO_OK);

    char* summary = nullptr;
    CHECK(chrono_pool_summary(pool, &summary) == CHRONO_OK);
    const json info = json::parse(take(summary));
    CHECK(info.at("life_events") == 50);

    char* pair = nullptr;
    REQUIRE(chrono_timeline_generate(pool, "4 years", 42, &pair) == CHRONO_OK);
    const json timelines = json::parse(take(pair));
    const std::string timeline_a = timelines.at("speakers").at("A").dump();

    char* advanced = nullptr;
    REQUIRE(chrono_timeline_advance(timeline_a.c_str(), "0 minutes", 1, "3 weeks", &advanced) ==
            CHRONO_OK);
    const json result = json::parse(take(advanced));
    CHECK(result.at("clock").at("session_index") == 2);
    CHECK(result.at("clock").at("elapsed") == "3 weeks");

    chrono_pool_close(pool);
    CHECK(chrono_pool_open("/no/such/pool.json", &pool) == CHRONO_E_MISSING_FILE);
}

TEST_CASE("prompt rendering and mock extraction through the C API") {
    char* prompt = nullptr;
    REQUIRE(chrono_render_prompt("get_schedule",
                                 R"({"event":"getting a driver license","duration":"2 months"})",
                                 &prompt) == CHRONO_OK);
    const std::string text = take(prompt);
    CHECK(text.find("getting a driver license") != std::string::npos);
    CHECK(chrono_render_prompt("no_such", "{}", nullptr) == CHRONO_E_UNKNOWN_TEMPLATE);

    // fixture file addressed by the documented key format
    const auto dir = std::filesystem::temp_directory_path() / "chronochat-capi-test";
    std::filesystem::create_directories(dir);
    const std::string fixtures = (dir / "fixtures.json").string();
    {
        // write a sequence fixture: usable without knowing hashed keys
        std::ofstream out(fixtures);
        out << R"json({"replies":{},"sequences":{"extract_events":
                 ["B: executing a social media marketing (about 3 months)"]}})json";
    }
    json config{{"mode", "mock"}, {"fixtures", fixtures}};
    chrono_backend* backend = nullptr;
    REQUIRE(chrono_backend_open(config.dump().c_str(), &backend) == CHRONO_OK);
    char* events = nullptr;
    REQUIRE(chrono_extract_events(backend, "A: Hi!\nB: busy with marketing.", "instruction",
                                  &events) == CHRONO_OK);
    const json parsed = json::parse(take(events));
    REQUIRE(parsed.at("events").size() == 1);
    CHECK(parsed.at("events")[0].at("speaker") == "B");
    CHECK(parsed.at("events")[0].at("duration") == "3 months");
    chrono_backend_close(backend);
    std::filesystem::remove_all(dir);
}

TEST_CASE("context building through the C API") {
    const char* inputs = R"({
        "history": ["A: Hey, how are you doing?"],
        "events": [{"speaker":"B","descriptions":["writing doctorate thesis"]}],
        "progress": [{"speaker":"B","items":[
            {"description":"writing doctorate thesis","label":"no significant progress"}]}],
        "gap": "2 hours"})";
    char* text = nullptr;
    REQUIRE(chrono_build_context(inputs, "progress", 0, &text) == CHRONO_OK);
    const std::string context = take(text);
    CHECK(context.find("Events\n") != std::string::npos);
    CHECK(context.find("Progress\n") != std::string::npos);
    CHECK(context.find("Gap\n2 hours\n") != std::string::npos);
    CHECK(chrono_build_context(inputs, "none", 0, nullptr) == CHRONO_E_MODE_SECTION_MISMATCH);
}

TEST_CASE("fleiss kappa through the C API") {
    double kappa = 0.0;
    REQUIRE(chrono_eval_kappa("[[3,0],[2,1],[0,3],[1,2]]", 3, &kappa) == CHRONO_OK);
    CHECK(kappa == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(chrono_eval_kappa("[[3,0],[3,0]]", 3, &kappa) == CHRONO_E_DEGENERATE_AGREEMENT);
}

TEST_CASE("version and last error are always readable") {
    CHECK(std::string(chrono_version()) == "0.1.0");
    CHECK(chrono_last_error() != nullptr);
}
