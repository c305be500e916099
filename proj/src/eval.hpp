#pragma once

#include <optional>
#include <string>
#include <vector>

#include "duration.hpp"
#include "progress.hpp"

namespace chronochat {

// One annotator's answer to one questionnaire item of a pairwise
// model comparison.
struct Judgment {
    std::string task_id;
    std::string annotator_id;
    int question_id = 1; // 1..11
    std::string choice;  // "left" | "right"
    std::string justification;
    double work_seconds = 0.0;
    std::string left_model;
    std::string right_model;
    std::optional<GapBucket> gap_bucket;
    std::string transcript; // evaluated text, used by the copied-text check
};

enum class EvalAttribute { Naturalness, Informativeness, Relevance, TimeAwareness };

constexpr int kQuestionCount = 11;
EvalAttribute attribute_of_question(int question_id);
const char* attribute_name(EvalAttribute attribute);

// Q5 asks which speaker is annoying; picking a model there counts
// against it.
bool question_reverse_keyed(int question_id);

struct DroppedJudgment {
    Judgment judgment;
    std::string reason; // short_work_time | short_justification |
                        // repetitive_justification | copied_justification
};

struct FilterResult {
    std::vector<Judgment> kept;
    std::vector<DroppedJudgment> dropped;
};

// Drops answers faster than 200 seconds, justifications with fewer than
// two content tokens, justifications byte-identical across >= 3 answers
// by one annotator, and justifications with >= 90% token overlap with
// the evaluated transcript. Idempotent over its own kept set.
FilterResult filter_judgments(const std::vector<Judgment>& raw);

struct AttributeScore {
    EvalAttribute attribute;
    double score = 0.0; // 100 * (wins - losses) / judgments, in [-100, 100]
    std::size_t judgments = 0;
};

struct ComparisonReport {
    std::string model;
    std::string baseline;
    std::vector<AttributeScore> attributes;
    double total_score = 0.0;
    std::size_t total_judgments = 0;
    std::optional<double> kappa; // absent when no item has >= 2 raters
    std::size_t retained = 0;
    std::size_t filtered = 0;
    std::vector<int> reverse_keyed_questions; // metadata: {5}
};

// Net preference per attribute plus the Total row over all 11 questions.
// Throws NoJudgmentsForAttribute when an attribute has no judgments
// (unless allow_empty_attributes).
ComparisonReport aggregate_attribute_scores(const std::vector<Judgment>& judgments,
                                            const std::string& model,
                                            const std::string& baseline,
                                            bool allow_empty_attributes = false);

// Standard Fleiss formula over an items x categories count matrix where
// every row sums to raters_per_item. Throws DegenerateAgreement when the
// expected agreement is 1.
double fleiss_kappa(const std::vector<std::vector<int>>& matrix, int raters_per_item);

struct GapBucketRow {
    GapBucket bucket;
    std::size_t sessions = 0; // distinct tasks in the bucket
    ComparisonReport report;
};

// Per-bucket attribute scores, buckets ordered Minutes through Year.
std::vector<GapBucketRow> gap_bucket_report(const std::vector<Judgment>& judgments,
                                            const std::string& model,
                                            const std::string& baseline);

struct SessionPairCase {
    std::vector<std::pair<std::string, ProgressLabel>> labelled_events;
    std::vector<std::string> follow_up_utterances;
};

// A pair counts as correct when no follow-up utterance mentions an event
// labelled "no significant progress". Mention: at least half of the event
// description's content words occur in a single utterance.
std::size_t count_correct_event_selection(const std::vector<SessionPairCase>& pairs);

// Line-delimited judgment records.
Judgment judgment_from_json(const std::string& line);
std::vector<Judgment> load_judgments(const std::string& path,
                                     std::vector<std::string>* issues = nullptr);

std::string report_to_text(const ComparisonReport& report);
std::string report_to_json(const ComparisonReport& report);
std::string gap_report_to_text(const std::vector<GapBucketRow>& rows);

} // namespace chronochat
