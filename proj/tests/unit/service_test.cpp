#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <future>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "errors.hpp"
#include "room.hpp"
#include "service.hpp"
#include "test_support.hpp"

using namespace chronochat;
using nlohmann::json;

#ifndef TEST_POOL_PATH
#define TEST_POOL_PATH "data/event_pool.json"
#endif

namespace {

struct Client {
    httplib::Client http;
    explicit Client(int port) : http("127.0.0.1", port) {
        http.set_read_timeout(30, 0);
    }

    json post(const std::string& path, const json& body, int expected_status = 200) {
        auto res = http.Post(path, body.dump(), "application/json");
        REQUIRE(res);
        CHECK(res->status == expected_status);
        return json::parse(res->body);
    }

    json get(const std::string& path, int expected_status = 200) {
        auto res = http.Get(path);
        REQUIRE(res);
        CHECK(res->status == expected_status);
        return json::parse(res->body);
    }
};

ServiceConfig test_config(const std::string& data_dir) {
    ServiceConfig config;
    config.data_dir = data_dir;
    config.default_pool = TEST_POOL_PATH;
    config.poll_wait_seconds = 1;
    return config;
}

void chat_n(Client& client, const std::string& room, const std::string& token_a,
            const std::string& token_b, int count) {
    for (int i = 0; i < count; ++i) {
        const std::string& token = i % 2 == 0 ? token_a : token_b;
        client.post("/rooms/" + room + "/utterances",
                    {{"token", token}, {"text", "utterance number " + std::to_string(i)}});
    }
}

} // namespace

TEST_CASE("two clients complete a full three-session room") {
    testsupport::TempDir dir("svc-full");
    SessionService service(test_config(dir.str()));
    const int port = service.start();
    Client client(port);

    const json created = client.post("/rooms", {{"num_sessions", 3},
                                                {"min_utterances", 20},
                                                {"seed", 42}});
    const std::string room = created.at("room_id");

    const json join_a = client.post("/rooms/" + room + "/join", {{"display_name", "alice"}});
    CHECK(join_a.at("speaker") == "A");
    CHECK(join_a.at("phase") == "waiting_for_partner");
    CHECK(!join_a.at("initial_events").empty());

    const json join_b = client.post("/rooms/" + room + "/join", {{"display_name", "bob"}});
    CHECK(join_b.at("phase") == "in_session");
    const std::string token_a = join_a.at("token");
    const std::string token_b = join_b.at("token");

    // third join is rejected
    client.post("/rooms/" + room + "/join", {{"display_name", "carol"}}, 409);

    // ending before 20 utterances is rejected
    chat_n(client, room, token_a, token_b, 19);
    const json too_few = client.post("/rooms/" + room + "/end-session", {{"token", token_a}}, 409);
    CHECK(too_few.at("error").at("code") == "TooFewUtterances");

    // the 20th utterance flips end_session_available
    const json twentieth = client.post("/rooms/" + room + "/utterances",
                                       {{"token", token_b}, {"text", "the twentieth"}});
    CHECK(twentieth.at("end_session_available") == true);

    for (int session = 1; session <= 3; ++session) {
        if (session > 1)
            chat_n(client, room, token_a, token_b, 20);
        const json ended = client.post("/rooms/" + room + "/end-session", {{"token", token_a}});
        if (session < 3) {
            CHECK(ended.at("phase") == "between_sessions");
            CHECK(!ended.at("gap").get<std::string>().empty());
            CHECK(ended.contains("updates"));
            // posting while between sessions is rejected
            const json wrong = client.post("/rooms/" + room + "/utterances",
                                           {{"token", token_a}, {"text", "too early"}}, 409);
            CHECK(wrong.at("error").at("code") == "WrongPhase");
            // the partner acknowledges and the next session starts
            const json started =
                client.post("/rooms/" + room + "/end-session", {{"token", token_b}});
            CHECK(started.at("phase") == "in_session");
        } else {
            CHECK(ended.at("phase") == "completed");
            const std::string conversation_path = ended.at("conversation");
            CHECK(std::filesystem::exists(conversation_path));
            // the persisted record is a valid conversation line
            ImportReport report;
            const auto corpus = import_conversations(conversation_path, report);
            CHECK(report.issues.empty());
            REQUIRE(corpus.size() == 1);
            CHECK(corpus[0].sessions.size() == 3);
            for (const auto& session_record : corpus[0].sessions)
                CHECK(session_record.utterances.size() >= 20);
        }
    }

    const json state = client.get("/rooms/" + room + "/state");
    CHECK(state.at("phase") == "completed");
    service.stop();
}

TEST_CASE("room config and lookup errors") {
    testsupport::TempDir dir("svc-errors");
    SessionService service(test_config(dir.str()));
    const int port = service.start();
    Client client(port);

    const json bad = client.post("/rooms", {{"num_sessions", 6}}, 400);
    CHECK(bad.at("error").at("code") == "BadConfig");
    client.get("/rooms/room-999999/state", 404);

    const json created = client.post("/rooms", {{"seed", 1}});
    const std::string room = created.at("room_id");
    const json invalid = client.post("/rooms/" + room + "/utterances",
                                     {{"token", "bogus"}, {"text", "hi"}}, 409);
    // not joined yet: phase error comes first
    CHECK(invalid.at("error").at("code") == "WrongPhase");
    service.stop();
}

TEST_CASE("identical seeds give identical initial events") {
    testsupport::TempDir dir("svc-seed");
    SessionService service(test_config(dir.str()));
    const int port = service.start();
    Client client(port);

    std::vector<json> initial;
    for (int i = 0; i < 2; ++i) {
        const json created = client.post("/rooms", {{"seed", 77}});
        const std::string room = created.at("room_id");
        const json joined = client.post("/rooms/" + room + "/join", {{"display_name", "x"}});
        initial.push_back(joined.at("initial_events"));
    }
    CHECK(initial[0] == initial[1]);
    service.stop();
}

TEST_CASE("kill and restart reconstructs the exact room state from the log") {
    testsupport::TempDir dir("svc-recover");
    std::string room;
    std::string token_a, token_b;
    json state_before;

    {
        SessionService service(test_config(dir.str()));
        const int port = service.start();
        Client client(port);
        const json created = client.post("/rooms", {{"num_sessions", 3},
                                                    {"min_utterances", 5},
                                                    {"seed", 11}});
        room = created.at("room_id");
        token_a = client.post("/rooms/" + room + "/join", {{"display_name", "alice"}})
                      .at("token").get<std::string>();
        token_b = client.post("/rooms/" + room + "/join", {{"display_name", "bob"}})
                      .at("token").get<std::string>();
        chat_n(client, room, token_a, token_b, 6);
        client.post("/rooms/" + room + "/end-session", {{"token", token_a}});
        client.post("/rooms/" + room + "/end-session", {{"token", token_b}}); // start session 2
        chat_n(client, room, token_a, token_b, 3); // mid-session state
        state_before = client.get("/rooms/" + room + "/state?token=" + token_a);
        service.stop();
        // no graceful shutdown of rooms: the service object just goes away
    }

    SessionService recovered(test_config(dir.str()));
    const int port = recovered.start();
    Client client(port);
    const json state_after = client.get("/rooms/" + room + "/state?token=" + token_a);
    CHECK(state_after == state_before);

    // the room remains usable after recovery
    chat_n(client, room, token_a, token_b, 2);
    const json state = client.get("/rooms/" + room + "/state");
    CHECK(state.at("utterance_count") == 5);
    recovered.stop();
}

TEST_CASE("interleaved posters: both pollers observe the same gapless order") {
    testsupport::TempDir dir("svc-poll");
    SessionService service(test_config(dir.str()));
    const int port = service.start();
    Client setup(port);

    const json created = setup.post("/rooms", {{"seed", 5}, {"min_utterances", 5}});
    const std::string room = created.at("room_id");
    const std::string token_a =
        setup.post("/rooms/" + room + "/join", {{"display_name", "alice"}}).at("token");
    const std::string token_b =
        setup.post("/rooms/" + room + "/join", {{"display_name", "bob"}}).at("token");

    constexpr int kPostsPerSide = 15;
    std::atomic<bool> done{false};
    auto poll_all = [&](const std::string& token) {
        std::vector<std::pair<std::int64_t, std::string>> seen;
        Client poller(port);
        std::int64_t since = 0;
        while (true) {
            const json events = poller.get("/rooms/" + room + "/events?since=" +
                                           std::to_string(since) + "&token=" + token + "&wait=1");
            for (const auto& event : events.at("events")) {
                seen.emplace_back(event.at("seq").get<std::int64_t>(),
                                  event.at("kind").get<std::string>());
                since = event.at("seq");
            }
            if (done && seen.size() >= static_cast<std::size_t>(2 + 2 * kPostsPerSide))
                break;
        }
        return seen;
    };

    auto future_a = std::async(std::launch::async, poll_all, token_a);
    auto future_b = std::async(std::launch::async, poll_all, token_b);

    std::thread poster_a([&] {
        Client client(port);
        for (int i = 0; i < kPostsPerSide; ++i)
            client.post("/rooms/" + room + "/utterances",
                        {{"token", token_a}, {"text", "from alice " + std::to_string(i)}});
    });
    std::thread poster_b([&] {
        Client client(port);
        for (int i = 0; i < kPostsPerSide; ++i)
            client.post("/rooms/" + room + "/utterances",
                        {{"token", token_b}, {"text", "from bob " + std::to_string(i)}});
    });
    poster_a.join();
    poster_b.join();
    done = true;

    const auto seen_a = future_a.get();
    const auto seen_b = future_b.get();
    REQUIRE(seen_a.size() == seen_b.size());
    CHECK(seen_a == seen_b);
    for (std::size_t i = 0; i < seen_a.size(); ++i)
        CHECK(seen_a[i].first == static_cast<std::int64_t>(i) + 1); // gapless from 1
    service.stop();
}

TEST_CASE("participants never see the partner's update cards") {
    testsupport::TempDir dir("svc-privacy");
    SessionService service(test_config(dir.str()));
    const int port = service.start();
    Client client(port);

    const json created = client.post("/rooms", {{"seed", 3}, {"min_utterances", 4}});
    const std::string room = created.at("room_id");
    const std::string token_a =
        client.post("/rooms/" + room + "/join", {{"display_name", "alice"}}).at("token");
    const std::string token_b =
        client.post("/rooms/" + room + "/join", {{"display_name", "bob"}}).at("token");
    chat_n(client, room, token_a, token_b, 4);
    client.post("/rooms/" + room + "/end-session", {{"token", token_a}});

    const json events_a =
        client.get("/rooms/" + room + "/events?since=0&token=" + token_a + "&wait=0");
    for (const auto& event : events_a.at("events")) {
        if (event.at("kind") != "updates_shown")
            continue;
        CHECK(event.at("payload").contains("card"));
        CHECK(!event.at("payload").contains("cards"));
    }
    service.stop();
}
