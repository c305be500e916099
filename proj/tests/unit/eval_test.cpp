#include <doctest.h>

#include <map>

#include "errors.hpp"
#include "eval.hpp"
#include "test_support.hpp"

using namespace chronochat;

namespace {

Judgment make_judgment(const std::string& task, const std::string& annotator, int question,
                       const std::string& choice, const std::string& left,
                       const std::string& right, double seconds = 300,
                       const std::string& justification = "clear and well reasoned choice") {
    Judgment judgment;
    judgment.task_id = task;
    judgment.annotator_id = annotator;
    judgment.question_id = question;
    judgment.choice = choice;
    judgment.justification = justification;
    judgment.work_seconds = seconds;
    judgment.left_model = left;
    judgment.right_model = right;
    return judgment;
}

// Random judgment set covering all four attributes for swap/oracle checks.
std::vector<Judgment> random_judgments(Rng& rng, std::size_t count, const std::string& model,
                                       const std::string& baseline) {
    std::vector<Judgment> judgments;
    for (std::size_t i = 0; i < count; ++i) {
        const int question = static_cast<int>(1 + rng.index(11));
        const bool left_is_model = rng.index(2) == 0;
        judgments.push_back(make_judgment(
            "task-" + std::to_string(rng.index(10)), "ann-" + std::to_string(rng.index(7)),
            question, rng.index(2) == 0 ? "left" : "right",
            left_is_model ? model : baseline, left_is_model ? baseline : model));
    }
    // guarantee every attribute appears
    for (int question : {1, 4, 7, 10})
        judgments.push_back(make_judgment("task-x", "ann-x", question, "left", model, baseline));
    return judgments;
}

double attribute_score(const ComparisonReport& report, EvalAttribute attribute) {
    for (const auto& score : report.attributes)
        if (score.attribute == attribute)
            return score.score;
    FAIL("attribute missing from report");
    return 0;
}

} // namespace

TEST_CASE("question to attribute mapping follows the questionnaire grouping") {
    CHECK(attribute_of_question(1) == EvalAttribute::Naturalness);
    CHECK(attribute_of_question(3) == EvalAttribute::Naturalness);
    CHECK(attribute_of_question(4) == EvalAttribute::Informativeness);
    CHECK(attribute_of_question(6) == EvalAttribute::Informativeness);
    CHECK(attribute_of_question(7) == EvalAttribute::Relevance);
    CHECK(attribute_of_question(9) == EvalAttribute::Relevance);
    CHECK(attribute_of_question(10) == EvalAttribute::TimeAwareness);
    CHECK(attribute_of_question(11) == EvalAttribute::TimeAwareness);
    CHECK(question_reverse_keyed(5));
    CHECK(!question_reverse_keyed(4));
}

TEST_CASE("work-time filter boundary is exactly 200 seconds") {
    auto kept_with_seconds = [](double seconds) {
        const auto result = filter_judgments(
            {make_judgment("t", "a", 1, "left", "m", "b", seconds)});
        return result.kept.size() == 1;
    };
    CHECK(!kept_with_seconds(199));
    CHECK(!kept_with_seconds(199.9));
    CHECK(kept_with_seconds(200));
    CHECK(kept_with_seconds(201));

    const auto dropped = filter_judgments({make_judgment("t", "a", 1, "left", "m", "b", 199)});
    REQUIRE(dropped.dropped.size() == 1);
    CHECK(dropped.dropped[0].reason == "short_work_time");
}

TEST_CASE("repetitive and short justifications are dropped") {
    std::vector<Judgment> raw;
    for (int i = 0; i < 4; ++i)
        raw.push_back(make_judgment("t" + std::to_string(i), "annotator-1", 1, "left", "m", "b",
                                    300, "good answer overall"));
    raw.push_back(make_judgment("t9", "annotator-2", 1, "left", "m", "b", 300, "good"));
    const auto result = filter_judgments(raw);
    CHECK(result.kept.empty());
    std::map<std::string, int> reasons;
    for (const auto& dropped : result.dropped)
        ++reasons[dropped.reason];
    CHECK(reasons["repetitive_justification"] == 4);
    CHECK(reasons["short_justification"] == 1);

    // two identical justifications are still fine
    std::vector<Judgment> pair_only;
    for (int i = 0; i < 2; ++i)
        pair_only.push_back(make_judgment("t" + std::to_string(i), "annotator-1", 1, "left", "m",
                                          "b", 300, "good answer overall"));
    CHECK(filter_judgments(pair_only).kept.size() == 2);
}

TEST_CASE("justifications copied from the transcript are dropped") {
    Judgment copied = make_judgment("t", "a", 1, "left", "m", "b");
    copied.transcript = "A: the marathon training plan is going well this week";
    copied.justification = "the marathon training plan is going well";
    Judgment original = make_judgment("t", "a", 2, "left", "m", "b");
    original.transcript = copied.transcript;
    original.justification = "speaker B asks far better follow-up questions";
    const auto result = filter_judgments({copied, original});
    CHECK(result.kept.size() == 1);
    REQUIRE(result.dropped.size() == 1);
    CHECK(result.dropped[0].reason == "copied_justification");
}

TEST_CASE("filtering is idempotent") {
    Rng rng(3);
    auto raw = random_judgments(rng, 200, "m", "b");
    for (std::size_t i = 0; i < raw.size(); i += 3)
        raw[i].work_seconds = 150;
    for (std::size_t i = 0; i < raw.size(); i += 7)
        raw[i].justification = "ok";
    const auto once = filter_judgments(raw);
    const auto twice = filter_judgments(once.kept);
    CHECK(twice.dropped.empty());
    CHECK(twice.kept.size() == once.kept.size());
}

TEST_CASE("self-comparison scores zero on every attribute") {
    Rng rng(17);
    std::vector<Judgment> judgments;
    for (int i = 0; i < 400; ++i) {
        const int question = static_cast<int>(1 + rng.index(11));
        // the same model on both sides under shuffled labels
        judgments.push_back(make_judgment("t" + std::to_string(i), "a", question,
                                          rng.index(2) == 0 ? "left" : "right", "m", "m"));
    }
    const auto report = aggregate_attribute_scores(judgments, "m", "m");
    for (const auto& score : report.attributes)
        CHECK(score.score == doctest::Approx(0.0));
    CHECK(report.total_score == doctest::Approx(0.0));
}

TEST_CASE("net preference formula: 6 of 10 wins is +20") {
    std::vector<Judgment> judgments;
    for (int i = 0; i < 10; ++i)
        judgments.push_back(make_judgment("t" + std::to_string(i), "a", 1,
                                          i < 6 ? "left" : "right", "m", "b"));
    const auto report = aggregate_attribute_scores(judgments, "m", "b", true);
    CHECK(attribute_score(report, EvalAttribute::Naturalness) == doctest::Approx(20.0));
    CHECK(report.total_score == doctest::Approx(20.0));
}

TEST_CASE("question 5 is reverse keyed") {
    // choosing a model on "who asks annoying questions" counts against it
    std::vector<Judgment> judgments{make_judgment("t", "a", 5, "left", "m", "b")};
    const auto report = aggregate_attribute_scores(judgments, "m", "b", true);
    CHECK(attribute_score(report, EvalAttribute::Informativeness) == doctest::Approx(-100.0));
    CHECK(report.reverse_keyed_questions == std::vector<int>{5});
}

TEST_CASE("scores negate when model and baseline swap") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const auto judgments = random_judgments(rng, 40, "m", "b");
        const auto forward = aggregate_attribute_scores(judgments, "m", "b");
        const auto backward = aggregate_attribute_scores(judgments, "b", "m");
        REQUIRE(forward.attributes.size() == backward.attributes.size());
        for (std::size_t i = 0; i < forward.attributes.size(); ++i)
            CHECK(forward.attributes[i].score ==
                  doctest::Approx(-backward.attributes[i].score));
        CHECK(forward.total_score == doctest::Approx(-backward.total_score));
    }
}

TEST_CASE("aggregation matches a brute-force recount") {
    Rng rng(29);
    const auto judgments = random_judgments(rng, 500, "m", "b");
    const auto report = aggregate_attribute_scores(judgments, "m", "b");

    std::map<EvalAttribute, std::pair<int, int>> tally; // wins, total
    for (const auto& judgment : judgments) {
        std::string chosen =
            judgment.choice == "left" ? judgment.left_model : judgment.right_model;
        if (judgment.question_id == 5)
            chosen = chosen == "m" ? "b" : "m";
        auto& [wins, total] = tally[attribute_of_question(judgment.question_id)];
        ++total;
        if (chosen == "m")
            ++wins;
    }
    for (const auto& score : report.attributes) {
        const auto [wins, total] = tally.at(score.attribute);
        CHECK(score.score == doctest::Approx(100.0 * (2.0 * wins - total) / total));
    }
}

TEST_CASE("missing attribute raises unless explicitly allowed") {
    std::vector<Judgment> only_naturalness{make_judgment("t", "a", 1, "left", "m", "b")};
    try {
        aggregate_attribute_scores(only_naturalness, "m", "b");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::no_judgments_for_attribute);
    }
    const auto lenient = aggregate_attribute_scores(only_naturalness, "m", "b", true);
    CHECK(lenient.attributes.size() == 1);
}

TEST_CASE("fleiss kappa: unanimity, the 4x2 fixture, and invariances") {
    CHECK(fleiss_kappa({{3, 0}, {0, 3}, {3, 0}}, 3) == doctest::Approx(1.0));
    // Hand evaluation: P_bar = 2/3, P_e = 1/2, kappa = 1/3.
    CHECK(fleiss_kappa({{3, 0}, {2, 1}, {0, 3}, {1, 2}}, 3) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    // invariant under category relabeling
    CHECK(fleiss_kappa({{0, 3}, {1, 2}, {3, 0}, {2, 1}}, 3) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-9));

    try {
        fleiss_kappa({{3, 0}, {3, 0}}, 3); // every rater in one category
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::degenerate_agreement);
    }
    try {
        fleiss_kappa({{2, 0}}, 1);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::bad_config);
    }
}

TEST_CASE("gap bucket report echoes counts and partitions the total") {
    const std::map<GapBucket, int> multiplicities{
        {GapBucket::Minutes, 82}, {GapBucket::Hours, 90}, {GapBucket::Days, 65},
        {GapBucket::Weeks, 78},   {GapBucket::Months, 62}, {GapBucket::Year, 73},
    };
    std::vector<Judgment> judgments;
    int task_counter = 0;
    for (const auto& [bucket, count] : multiplicities) {
        for (int i = 0; i < count; ++i) {
            Judgment judgment = make_judgment("task-" + std::to_string(task_counter++), "a", 1,
                                              "left", "m", "b");
            judgment.gap_bucket = bucket;
            judgments.push_back(judgment);
        }
    }
    const auto rows = gap_bucket_report(judgments, "m", "b");
    REQUIRE(rows.size() == 6);
    std::size_t total = 0;
    for (const auto& row : rows) {
        CHECK(row.sessions == static_cast<std::size_t>(multiplicities.at(row.bucket)));
        CHECK(row.report.total_score == doctest::Approx(100.0)); // uniform wins
        total += row.report.total_judgments;
    }
    CHECK(total == judgments.size());
    CHECK(rows.front().bucket == GapBucket::Minutes);
    CHECK(rows.back().bucket == GapBucket::Year);
}

TEST_CASE("topic-selection counting follows the mention rule") {
    SessionPairCase avoided;
    avoided.labelled_events = {{"writing doctorate thesis", ProgressLabel::NoSignificantProgress}};
    avoided.follow_up_utterances = {"How was your weekend?", "Did you watch the game?"};

    SessionPairCase mentioned;
    mentioned.labelled_events = {{"writing doctorate thesis",
                                  ProgressLabel::NoSignificantProgress}};
    mentioned.follow_up_utterances = {"how is the doctorate thesis going?"};

    SessionPairCase finished_ok;
    finished_ok.labelled_events = {{"writing doctorate thesis", ProgressLabel::Finished}};
    finished_ok.follow_up_utterances = {"how is the doctorate thesis going?"};

    CHECK(count_correct_event_selection({avoided}) == 1);
    CHECK(count_correct_event_selection({mentioned}) == 0);
    CHECK(count_correct_event_selection({finished_ok}) == 1);
}

TEST_CASE("topic-selection count equals planted ground truth on 60 pairs") {
    Rng rng(31);
    std::vector<SessionPairCase> pairs;
    std::size_t planted_correct = 0;
    for (int i = 0; i < 60; ++i) {
        SessionPairCase pair;
        const std::string stalled = "rebuilding the old sailboat";
        pair.labelled_events = {{stalled, ProgressLabel::NoSignificantProgress},
                                {"watering plants", ProgressLabel::Finished}};
        const bool mention = rng.index(2) == 0;
        if (mention) {
            pair.follow_up_utterances = {"small talk first",
                                         "is rebuilding the sailboat still on hold?"};
        } else {
            pair.follow_up_utterances = {"small talk first", "how were the plants doing?"};
            ++planted_correct;
        }
        pairs.push_back(std::move(pair));
    }
    CHECK(count_correct_event_selection(pairs) == planted_correct);
}

TEST_CASE("judgment JSONL parsing validates fields") {
    const Judgment judgment = judgment_from_json(
        R"({"task_id":"t1","annotator_id":"a1","question_id":5,"choice":"left",
            "justification":"thought through","work_seconds":250,
            "left_model":"TA-RAG-both","right_model":"RAG-FT","gap_bucket":"weeks"})");
    CHECK(judgment.question_id == 5);
    REQUIRE(judgment.gap_bucket.has_value());
    CHECK(*judgment.gap_bucket == GapBucket::Weeks);

    CHECK_THROWS_AS(judgment_from_json("{}"), Error);
    CHECK_THROWS_AS(judgment_from_json(
                        R"({"task_id":"t","annotator_id":"a","question_id":12,
                            "choice":"left","left_model":"m","right_model":"b"})"),
                    Error);
}
