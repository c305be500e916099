#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "errors.hpp"
#include "text.hpp"

namespace chronochat {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr EvalAttribute kAllAttributes[] = {
    EvalAttribute::Naturalness,
    EvalAttribute::Informativeness,
    EvalAttribute::Relevance,
    EvalAttribute::TimeAwareness,
};

} // namespace

EvalAttribute attribute_of_question(int question_id) {
    if (question_id >= 1 && question_id <= 3)
        return EvalAttribute::Naturalness;
    if (question_id >= 4 && question_id <= 6)
        return EvalAttribute::Informativeness;
    if (question_id >= 7 && question_id <= 9)
        return EvalAttribute::Relevance;
    if (question_id == 10 || question_id == 11)
        return EvalAttribute::TimeAwareness;
    raise(Errc::bad_config, "question_id must be 1..11, got " + std::to_string(question_id));
}

const char* attribute_name(EvalAttribute attribute) {
    switch (attribute) {
    case EvalAttribute::Naturalness: return "Naturalness";
    case EvalAttribute::Informativeness: return "Informativeness";
    case EvalAttribute::Relevance: return "Relevance";
    case EvalAttribute::TimeAwareness: return "Time-Awareness";
    }
    return "Naturalness";
}

bool question_reverse_keyed(int question_id) { return question_id == 5; }

FilterResult filter_judgments(const std::vector<Judgment>& raw) {
    // Byte-identical justifications per annotator, counted over the input.
    std::map<std::pair<std::string, std::string>, std::size_t> repeats;
    for (const auto& judgment : raw)
        ++repeats[{judgment.annotator_id, judgment.justification}];

    FilterResult result;
    for (const auto& judgment : raw) {
        if (judgment.work_seconds < 200.0) {
            result.dropped.push_back({judgment, "short_work_time"});
            continue;
        }
        const auto content = content_tokens(judgment.justification);
        if (content.size() < 2) {
            result.dropped.push_back({judgment, "short_justification"});
            continue;
        }
        if (repeats[{judgment.annotator_id, judgment.justification}] >= 3) {
            result.dropped.push_back({judgment, "repetitive_justification"});
            continue;
        }
        if (!judgment.transcript.empty()) {
            const auto just_tokens = tokenize(judgment.justification);
            std::unordered_set<std::string> transcript_tokens;
            for (const auto& token : tokenize(judgment.transcript))
                transcript_tokens.insert(token);
            std::size_t overlap = 0;
            for (const auto& token : just_tokens)
                if (transcript_tokens.count(token))
                    ++overlap;
            if (!just_tokens.empty() &&
                static_cast<double>(overlap) / static_cast<double>(just_tokens.size()) >= 0.9) {
                result.dropped.push_back({judgment, "copied_justification"});
                continue;
            }
        }
        result.kept.push_back(judgment);
    }
    return result;
}

namespace {

// Model the judgment voted for, after reverse keying.
std::optional<std::string> winner_of(const Judgment& judgment, const std::string& model,
                                     const std::string& baseline) {
    const bool pair_matches =
        (judgment.left_model == model && judgment.right_model == baseline) ||
        (judgment.left_model == baseline && judgment.right_model == model);
    if (!pair_matches)
        return std::nullopt;
    std::string chosen = judgment.choice == "left" ? judgment.left_model : judgment.right_model;
    if (question_reverse_keyed(judgment.question_id))
        chosen = chosen == model ? baseline : model;
    return chosen;
}

std::optional<double> comparison_kappa(const std::vector<Judgment>& judgments,
                                       const std::string& model, const std::string& baseline) {
    // Rows are (task, question) items; categories are the two models.
    std::map<std::pair<std::string, int>, std::pair<int, int>> items;
    for (const auto& judgment : judgments) {
        const auto winner = winner_of(judgment, model, baseline);
        if (!winner)
            continue;
        auto& counts = items[{judgment.task_id, judgment.question_id}];
        if (*winner == model)
            ++counts.first;
        else
            ++counts.second;
    }
    // Fleiss needs a constant rater count; keep the modal count >= 2.
    std::map<int, std::size_t> by_raters;
    for (const auto& [key, counts] : items) {
        (void)key;
        ++by_raters[counts.first + counts.second];
    }
    int best_n = 0;
    std::size_t best_count = 0;
    for (const auto& [n, count] : by_raters)
        if (n >= 2 && count > best_count) {
            best_n = n;
            best_count = count;
        }
    if (best_n < 2)
        return std::nullopt;
    std::vector<std::vector<int>> matrix;
    for (const auto& [key, counts] : items) {
        (void)key;
        if (counts.first + counts.second == best_n)
            matrix.push_back({counts.first, counts.second});
    }
    try {
        return fleiss_kappa(matrix, best_n);
    } catch (const Error&) {
        return std::nullopt; // degenerate agreement
    }
}

} // namespace

ComparisonReport aggregate_attribute_scores(const std::vector<Judgment>& judgments,
                                            const std::string& model,
                                            const std::string& baseline,
                                            bool allow_empty_attributes) {
    ComparisonReport report;
    report.model = model;
    report.baseline = baseline;
    report.reverse_keyed_questions = {5};

    // A choice counts toward every side whose model it names, so a model
    // compared against itself nets exactly zero.
    struct Tally {
        std::size_t model_wins = 0;
        std::size_t baseline_wins = 0;
        std::size_t count = 0;
    };
    std::map<EvalAttribute, Tally> tally;
    Tally total;
    for (const auto& judgment : judgments) {
        const auto winner = winner_of(judgment, model, baseline);
        if (!winner)
            continue;
        auto& bucket = tally[attribute_of_question(judgment.question_id)];
        for (Tally* t : {&bucket, &total}) {
            ++t->count;
            if (*winner == model)
                ++t->model_wins;
            if (*winner == baseline)
                ++t->baseline_wins;
        }
    }

    const auto net = [](const Tally& t) {
        return t.count == 0 ? 0.0
                            : 100.0 *
                                  (static_cast<double>(t.model_wins) -
                                   static_cast<double>(t.baseline_wins)) /
                                  static_cast<double>(t.count);
    };

    for (EvalAttribute attribute : kAllAttributes) {
        const auto it = tally.find(attribute);
        if (it == tally.end() || it->second.count == 0) {
            if (!allow_empty_attributes)
                raise(Errc::no_judgments_for_attribute,
                      std::string("no judgments for attribute ") + attribute_name(attribute));
            continue;
        }
        AttributeScore score;
        score.attribute = attribute;
        score.judgments = it->second.count;
        score.score = net(it->second);
        report.attributes.push_back(score);
    }

    report.total_judgments = total.count;
    report.total_score = net(total);
    report.retained = total.count;
    report.kappa = comparison_kappa(judgments, model, baseline);
    return report;
}

double fleiss_kappa(const std::vector<std::vector<int>>& matrix, int raters_per_item) {
    if (raters_per_item < 2)
        raise(Errc::bad_config, "fleiss kappa needs at least 2 raters per item");
    if (matrix.empty())
        raise(Errc::bad_config, "fleiss kappa needs at least one item");
    const std::size_t categories = matrix.front().size();
    const double n = raters_per_item;
    const double items = static_cast<double>(matrix.size());

    double mean_agreement = 0.0;
    std::vector<double> category_share(categories, 0.0);
    for (const auto& row : matrix) {
        if (row.size() != categories)
            raise(Errc::bad_config, "ragged kappa matrix");
        int sum = 0;
        double same_pairs = 0.0;
        for (std::size_t j = 0; j < categories; ++j) {
            sum += row[j];
            same_pairs += static_cast<double>(row[j]) * row[j];
            category_share[j] += row[j];
        }
        if (sum != raters_per_item)
            raise(Errc::bad_config, "kappa matrix row does not sum to the rater count");
        mean_agreement += (same_pairs - n) / (n * (n - 1.0));
    }
    mean_agreement /= items;

    double expected = 0.0;
    for (double share : category_share) {
        const double p = share / (items * n);
        expected += p * p;
    }
    if (expected >= 1.0)
        raise(Errc::degenerate_agreement, "expected agreement is 1; kappa undefined");
    return (mean_agreement - expected) / (1.0 - expected);
}

std::vector<GapBucketRow> gap_bucket_report(const std::vector<Judgment>& judgments,
                                            const std::string& model,
                                            const std::string& baseline) {
    constexpr GapBucket kOrder[] = {GapBucket::Minutes, GapBucket::Hours, GapBucket::Days,
                                    GapBucket::Weeks,   GapBucket::Months, GapBucket::Year};
    std::vector<GapBucketRow> rows;
    for (GapBucket bucket : kOrder) {
        std::vector<Judgment> in_bucket;
        std::set<std::string> tasks;
        for (const auto& judgment : judgments)
            if (judgment.gap_bucket && *judgment.gap_bucket == bucket) {
                in_bucket.push_back(judgment);
                tasks.insert(judgment.task_id);
            }
        if (in_bucket.empty())
            continue;
        GapBucketRow row;
        row.bucket = bucket;
        row.sessions = tasks.size();
        row.report = aggregate_attribute_scores(in_bucket, model, baseline, true);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::size_t count_correct_event_selection(const std::vector<SessionPairCase>& pairs) {
    std::size_t correct = 0;
    for (const auto& pair : pairs) {
        bool mentioned_stalled = false;
        for (const auto& [description, label] : pair.labelled_events) {
            if (label != ProgressLabel::NoSignificantProgress)
                continue;
            const auto words = content_tokens(description);
            if (words.empty())
                continue;
            for (const auto& utterance : pair.follow_up_utterances) {
                std::unordered_set<std::string> utterance_tokens;
                for (const auto& token : tokenize(utterance))
                    utterance_tokens.insert(token);
                std::size_t hits = 0;
                for (const auto& word : words)
                    if (utterance_tokens.count(word))
                        ++hits;
                if (static_cast<double>(hits) / static_cast<double>(words.size()) >= 0.5) {
                    mentioned_stalled = true;
                    break;
                }
            }
            if (mentioned_stalled)
                break;
        }
        if (!mentioned_stalled)
            ++correct;
    }
    return correct;
}

Judgment judgment_from_json(const std::string& line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::exception& e) {
        raise(Errc::malformed_document, std::string("not valid JSON: ") + e.what());
    }
    Judgment judgment;
    try {
        judgment.task_id = doc.at("task_id").get<std::string>();
        judgment.annotator_id = doc.at("annotator_id").get<std::string>();
        judgment.question_id = doc.at("question_id").get<int>();
        judgment.choice = doc.at("choice").get<std::string>();
        judgment.justification = doc.value("justification", "");
        judgment.work_seconds = doc.value("work_seconds", 0.0);
        judgment.left_model = doc.at("left_model").get<std::string>();
        judgment.right_model = doc.at("right_model").get<std::string>();
        judgment.transcript = doc.value("transcript", "");
        if (doc.contains("gap_bucket")) {
            const auto bucket = gap_bucket_from_name(doc.at("gap_bucket").get<std::string>());
            if (!bucket)
                raise(Errc::malformed_document,
                      "unknown gap bucket: " + doc.at("gap_bucket").get<std::string>());
            judgment.gap_bucket = bucket;
        }
    } catch (const json::exception& e) {
        raise(Errc::malformed_document, std::string("bad judgment field: ") + e.what());
    }
    if (judgment.question_id < 1 || judgment.question_id > kQuestionCount)
        raise(Errc::malformed_document, "question_id out of range");
    if (judgment.choice != "left" && judgment.choice != "right")
        raise(Errc::malformed_document, "choice must be left or right");
    return judgment;
}

std::vector<Judgment> load_judgments(const std::string& path, std::vector<std::string>* issues) {
    std::ifstream file(path);
    if (!file)
        raise(Errc::missing_file, "cannot open judgments: " + path);
    std::vector<Judgment> judgments;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(file, line)) {
        ++line_number;
        if (trim(line).empty())
            continue;
        try {
            judgments.push_back(judgment_from_json(line));
        } catch (const Error& e) {
            if (issues)
                issues->push_back("line " + std::to_string(line_number) + ": " + e.what());
        }
    }
    return judgments;
}

namespace {

std::string format_score(double score) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%+.2f", score);
    return buffer;
}

} // namespace

std::string report_to_text(const ComparisonReport& report) {
    std::ostringstream out;
    out << report.model << " vs " << report.baseline << " (judgments=" << report.total_judgments;
    if (report.kappa)
        out << ", kappa=" << format_score(*report.kappa).substr(1);
    out << ")\n";
    out << "Attribute         Score\n";
    for (const auto& score : report.attributes) {
        std::string name = attribute_name(score.attribute);
        name.resize(18, ' ');
        out << name << format_score(score.score) << '\n';
    }
    std::string total = "Total";
    total.resize(18, ' ');
    out << total << format_score(report.total_score) << '\n';
    return out.str();
}

std::string report_to_json(const ComparisonReport& report) {
    ordered_json doc;
    doc["model"] = report.model;
    doc["baseline"] = report.baseline;
    doc["attributes"] = ordered_json::object();
    for (const auto& score : report.attributes)
        doc["attributes"][attribute_name(score.attribute)] = {{"score", score.score},
                                                              {"judgments", score.judgments}};
    doc["total"] = report.total_score;
    doc["total_judgments"] = report.total_judgments;
    if (report.kappa)
        doc["kappa"] = *report.kappa;
    doc["retained"] = report.retained;
    doc["filtered"] = report.filtered;
    doc["reverse_keyed_questions"] = report.reverse_keyed_questions;
    return doc.dump(2);
}

std::string gap_report_to_text(const std::vector<GapBucketRow>& rows) {
    std::ostringstream out;
    out << "Session gap  #sessions  Total\n";
    for (const auto& row : rows) {
        std::string name = gap_bucket_name(row.bucket);
        name.resize(13, ' ');
        std::string sessions = std::to_string(row.sessions);
        sessions.resize(11, ' ');
        out << name << sessions << format_score(row.report.total_score) << '\n';
    }
    return out.str();
}

} // namespace chronochat
