#include "chronochat/chronochat.h"

#include <cstdlib>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "context.hpp"
#include "dataset.hpp"
#include "errors.hpp"
#include "eval.hpp"
#include "event_pool.hpp"
#include "gapchat_adapter.hpp"
#include "llm_backend.hpp"
#include "llm_parsers.hpp"
#include "llm_templates.hpp"
#include "progress.hpp"
#include "self_chat.hpp"
#include "service.hpp"
#include "text.hpp"
#include "timeline.hpp"

using namespace chronochat;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

// Keep the numbering in sync with Errc and the header enum.
int status_of(Errc code) { return static_cast<int>(code); }

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return CHRONO_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CHRONO_E_INTERNAL;
    }
}

json parse_json_arg(const char* text, const char* what) {
    if (!text)
        raise(Errc::bad_config, std::string(what) + " must not be null");
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        raise(Errc::malformed_document, std::string("bad ") + what + ": " + e.what());
    }
}

std::string require(const char* text, const char* what) {
    if (!text)
        raise(Errc::bad_config, std::string(what) + " must not be null");
    return text;
}

Schedule schedule_from_json(const json& steps) {
    Schedule schedule;
    for (const auto& node : steps)
        schedule.steps.push_back({node.at("description").get<std::string>(),
                                  parse_duration(node.at("duration").get<std::string>())});
    return schedule;
}

ordered_json steps_to_json(const std::vector<Step>& steps) {
    ordered_json out = ordered_json::array();
    for (const auto& step : steps)
        out.push_back({{"description", step.description}, {"duration", step.duration.format()}});
    return out;
}

llm::BackendConfig backend_config_from(const char* config_json) {
    if (!config_json || trim(config_json).empty())
        return llm::BackendConfig::from_env();
    return llm::BackendConfig::from_json(config_json);
}

} // namespace

struct chrono_pool {
    EventPool pool;
};

struct chrono_backend {
    std::unique_ptr<llm::Backend> backend;
};

struct chrono_service {
    std::unique_ptr<SessionService> service;
};

extern "C" {

const char* chrono_version(void) { return "0.1.0"; }

const char* chrono_last_error(void) { return g_last_error.c_str(); }

void chrono_free(char* text) { std::free(text); }

int chrono_duration_parse(const char* phrase, int64_t* minutes_out) {
    return guarded([&] {
        const Duration duration = parse_duration(require(phrase, "phrase"));
        if (minutes_out)
            *minutes_out = duration.total_minutes();
    });
}

int chrono_duration_format(int64_t minutes, char** phrase_out) {
    return guarded([&] {
        if (minutes < 0)
            raise(Errc::non_positive_quantity, "minutes must be non-negative");
        if (phrase_out)
            *phrase_out = dup_string(Duration::minutes(minutes).format());
    });
}

int chrono_gap_bucket(const char* phrase, char** bucket_out) {
    return guarded([&] {
        const GapBucket bucket = classify_gap_bucket(parse_duration(require(phrase, "phrase")));
        if (bucket_out)
            *bucket_out = dup_string(gap_bucket_name(bucket));
    });
}

int chrono_sample_gaps(uint64_t seed, size_t count, char** json_out) {
    return guarded([&] {
        Rng rng(seed);
        ordered_json out = ordered_json::array();
        for (size_t i = 0; i < count; ++i)
            out.push_back(sample_session_gap(rng).format());
        if (json_out)
            *json_out = dup_string(out.dump());
    });
}

int chrono_progress_label(const char* duration_phrase, const char* elapsed_phrase,
                          char** label_out) {
    return guarded([&] {
        const ProgressLabel label =
            compute_progress_label(parse_duration(require(duration_phrase, "duration")),
                                   parse_duration(require(elapsed_phrase, "elapsed")));
        if (label_out)
            *label_out = dup_string(progress_label_text(label));
    });
}

int chrono_split_schedule(const char* schedule_json, const char* elapsed_phrase,
                          char** split_json_out) {
    return guarded([&] {
        const Schedule schedule =
            schedule_from_json(parse_json_arg(schedule_json, "schedule"));
        const ScheduleSplit split =
            split_schedule(schedule, parse_duration(require(elapsed_phrase, "elapsed")));
        ordered_json out;
        out["finished"] = steps_to_json(split.finished);
        out["todo"] = steps_to_json(split.todo);
        out["rendered"] = render_split(split);
        if (split_json_out)
            *split_json_out = dup_string(out.dump(2));
    });
}

int chrono_pool_open(const char* path, chrono_pool** pool_out) {
    return guarded([&] {
        auto handle = std::make_unique<chrono_pool>();
        handle->pool = load_event_pool(require(path, "path"));
        if (pool_out)
            *pool_out = handle.release();
    });
}

void chrono_pool_close(chrono_pool* pool) { delete pool; }

int chrono_pool_summary(const chrono_pool* pool, char** json_out) {
    return guarded([&] {
        if (!pool)
            raise(Errc::bad_config, "pool handle is null");
        ordered_json out;
        out["life_events"] = pool->pool.life_events.size();
        out["world_events"] = pool->pool.world_events.size();
        out["buckets"] = ordered_json::object();
        for (const auto& [bucket, ids] : pool->pool.bucket_index)
            out["buckets"][gap_bucket_name(bucket)] = ids.size();
        if (json_out)
            *json_out = dup_string(out.dump(2));
    });
}

int chrono_timeline_generate(const chrono_pool* pool, const char* horizon_phrase, uint64_t seed,
                             char** pair_json_out) {
    return guarded([&] {
        if (!pool)
            raise(Errc::bad_config, "pool handle is null");
        Rng rng(seed);
        const Duration horizon = parse_duration(require(horizon_phrase, "horizon"));
        auto [a, b] = generate_timeline_pair(pool->pool, "A", "B", horizon, rng);
        ordered_json out;
        out["seed"] = seed;
        out["speakers"]["A"] = json::parse(timeline_to_json(a));
        out["speakers"]["B"] = json::parse(timeline_to_json(b));
        if (pair_json_out)
            *pair_json_out = dup_string(out.dump(2));
    });
}

int chrono_timeline_advance(const char* timeline_json, const char* elapsed_phrase,
                            int session_index, const char* gap_phrase, char** result_json_out) {
    return guarded([&] {
        const Timeline timeline = timeline_from_json(require(timeline_json, "timeline"));
        ClockState clock;
        const std::string elapsed = require(elapsed_phrase, "elapsed");
        clock.elapsed = elapsed == "0 minutes" ? Duration::minutes(0) : parse_duration(elapsed);
        clock.session_index = session_index;
        const auto [next_clock, bundle] =
            advance(timeline, clock, parse_duration(require(gap_phrase, "gap")));
        if (result_json_out)
            *result_json_out = dup_string(update_bundle_to_json(next_clock, bundle));
    });
}

int chrono_backend_open(const char* config_json, chrono_backend** backend_out) {
    return guarded([&] {
        auto handle = std::make_unique<chrono_backend>();
        handle->backend = llm::make_backend(backend_config_from(config_json));
        if (backend_out)
            *backend_out = handle.release();
    });
}

void chrono_backend_close(chrono_backend* backend) { delete backend; }

int chrono_render_prompt(const char* template_name, const char* bindings_json, char** text_out) {
    return guarded([&] {
        llm::SlotMap bindings;
        if (bindings_json && !trim(bindings_json).empty()) {
            const json doc = parse_json_arg(bindings_json, "bindings");
            for (const auto& [key, value] : doc.items())
                bindings[key] = value.get<std::string>();
        }
        const std::string text =
            llm::render_prompt(require(template_name, "template name"), bindings);
        if (text_out)
            *text_out = dup_string(text);
    });
}

int chrono_extract_events(chrono_backend* backend, const char* history, const char* style,
                          char** events_json_out) {
    return guarded([&] {
        if (!backend)
            raise(Errc::bad_config, "backend handle is null");
        llm::ExtractionStyle extraction_style = llm::ExtractionStyle::Instruction;
        if (style && std::string(style) == "slot_filling")
            extraction_style = llm::ExtractionStyle::SlotFilling;
        else if (style && std::string(style) == "qa")
            extraction_style = llm::ExtractionStyle::QuestionAnswering;
        const auto result = llm::extract_events(*backend->backend, require(history, "history"),
                                                extraction_style);
        ordered_json out;
        out["events"] = ordered_json::array();
        for (const auto& event : result.events) {
            ordered_json node{{"speaker", event.speaker}, {"description", event.description}};
            if (event.estimated_duration)
                node["duration"] = event.estimated_duration->format();
            out["events"].push_back(std::move(node));
        }
        out["skipped_lines"] = result.skipped_lines;
        if (events_json_out)
            *events_json_out = dup_string(out.dump(2));
    });
}

int chrono_estimate_duration(chrono_backend* backend, const char* description, char** phrase_out) {
    return guarded([&] {
        if (!backend)
            raise(Errc::bad_config, "backend handle is null");
        const Duration duration =
            llm::estimate_event_duration(*backend->backend, require(description, "description"));
        if (phrase_out)
            *phrase_out = dup_string(duration.format());
    });
}

int chrono_generate_schedule(chrono_backend* backend, const char* description,
                             const char* duration_phrase, char** schedule_json_out) {
    return guarded([&] {
        if (!backend)
            raise(Errc::bad_config, "backend handle is null");
        std::size_t truncated = 0;
        const Schedule schedule = llm::generate_event_schedule(
            *backend->backend, require(description, "description"),
            parse_duration(require(duration_phrase, "duration")), &truncated);
        ordered_json out;
        out["steps"] = steps_to_json(schedule.steps);
        out["truncated_steps"] = truncated;
        if (schedule_json_out)
            *schedule_json_out = dup_string(out.dump(2));
    });
}

int chrono_build_context(const char* inputs_json, const char* mode, size_t char_budget,
                         char** text_out) {
    return guarded([&] {
        const json doc = parse_json_arg(inputs_json, "context inputs");
        const auto parsed_mode = context_mode_from_name(require(mode, "mode"));
        if (!parsed_mode)
            raise(Errc::bad_config, std::string("unknown mode: ") + mode);

        ContextInputs inputs;
        for (const auto& line : doc.value("history", json::array()))
            inputs.history.push_back(line.get<std::string>());
        for (const auto& node : doc.value("events", json::array())) {
            SpeakerEvents events;
            events.speaker = node.at("speaker").get<std::string>();
            for (const auto& description : node.at("descriptions"))
                events.descriptions.push_back(description.get<std::string>());
            inputs.events.push_back(std::move(events));
        }
        for (const auto& node : doc.value("progress", json::array())) {
            SpeakerProgress progress;
            progress.speaker = node.at("speaker").get<std::string>();
            for (const auto& item : node.at("items")) {
                const std::string label_text = item.at("label").get<std::string>();
                const auto label = progress_label_from_text(label_text);
                if (!label)
                    raise(Errc::bad_config, "unknown progress label: " + label_text);
                progress.items.push_back({item.at("description").get<std::string>(), *label});
            }
            inputs.progress.push_back(std::move(progress));
        }
        for (const auto& node : doc.value("schedules", json::array())) {
            SpeakerSchedules schedules;
            schedules.speaker = node.at("speaker").get<std::string>();
            for (const auto& item : node.at("items")) {
                const Schedule schedule = schedule_from_json(item.at("steps"));
                const ScheduleSplit split = split_schedule(
                    schedule, parse_duration(item.at("elapsed").get<std::string>()));
                schedules.items.push_back({item.at("description").get<std::string>(), split});
            }
            inputs.schedules.push_back(std::move(schedules));
        }
        if (doc.contains("gap"))
            inputs.gap = parse_duration(doc.at("gap").get<std::string>());

        const std::string text = build_context(
            inputs, *parsed_mode, char_budget == 0 ? kDefaultContextBudget : char_budget);
        if (text_out)
            *text_out = dup_string(text);
    });
}

int chrono_self_chat(const char* config_json, const char* backend_a_json,
                     const char* backend_b_json, const char* pool_path,
                     char** conversation_json_out) {
    return guarded([&] {
        const SelfChatConfig config =
            self_chat_config_from_json(require(config_json, "self-chat config"));
        auto backend_a = llm::make_backend(backend_config_from(backend_a_json));
        auto backend_b = llm::make_backend(backend_config_from(backend_b_json));
        const EventPool pool = load_event_pool(require(pool_path, "pool path"));
        const SelfChatOutcome outcome = run_self_chat(config, *backend_a, *backend_b, pool);
        if (!outcome.completed)
            raise(Errc::http_error, "self-chat aborted: " + outcome.error);
        if (conversation_json_out)
            *conversation_json_out = dup_string(export_conversation(outcome.conversation));
    });
}

int chrono_import_corpus(const char* path, const char* out_path, char** report_json_out) {
    return guarded([&] {
        ImportReport report;
        const auto corpus = import_conversations(require(path, "path"), report);
        if (out_path && *out_path)
            export_corpus(corpus, out_path);
        ordered_json out;
        out["conversations"] = corpus.size();
        out["issues"] = ordered_json::array();
        for (const auto& issue : report.issues)
            out["issues"].push_back({{"line", issue.line}, {"reason", issue.reason}});
        if (report_json_out)
            *report_json_out = dup_string(out.dump(2));
    });
}

int chrono_import_gapchat(const char* directory, const char* out_path, char** report_json_out) {
    return guarded([&] {
        AdapterReport report;
        const auto corpus = import_gapchat_directory(require(directory, "directory"), report);
        if (out_path && *out_path)
            export_corpus(corpus, out_path);
        ordered_json out;
        out["conversations"] = corpus.size();
        out["files_read"] = report.files_read;
        out["unmapped_fields"] = report.unmapped_fields;
        out["issues"] = report.issues;
        if (!corpus.empty()) {
            const CorpusStats stats = compute_stats(corpus);
            out["stats"] = json::parse(stats_to_json(stats));
        }
        if (report_json_out)
            *report_json_out = dup_string(out.dump(2));
    });
}

int chrono_corpus_stats(const char* path, int as_json, char** out) {
    return guarded([&] {
        ImportReport report;
        const auto corpus = import_conversations(require(path, "path"), report);
        const CorpusStats stats = compute_stats(corpus);
        if (out)
            *out = dup_string(as_json ? stats_to_json(stats) : stats_to_text(stats));
    });
}

int chrono_eval_compare(const char* judgments_path, const char* model, const char* baseline,
                        int as_json, int by_gap, char** out) {
    return guarded([&] {
        const auto raw = load_judgments(require(judgments_path, "judgments path"));
        const FilterResult filtered = filter_judgments(raw);
        if (by_gap) {
            const auto rows = gap_bucket_report(filtered.kept, require(model, "model"),
                                                require(baseline, "baseline"));
            if (as_json) {
                ordered_json doc = ordered_json::array();
                for (const auto& row : rows)
                    doc.push_back({{"bucket", gap_bucket_name(row.bucket)},
                                   {"sessions", row.sessions},
                                   {"report", json::parse(report_to_json(row.report))}});
                if (out)
                    *out = dup_string(doc.dump(2));
            } else if (out) {
                *out = dup_string(gap_report_to_text(rows));
            }
            return;
        }
        ComparisonReport report = aggregate_attribute_scores(
            filtered.kept, require(model, "model"), require(baseline, "baseline"));
        report.filtered = filtered.dropped.size();
        report.retained = filtered.kept.size();
        if (out)
            *out = dup_string(as_json ? report_to_json(report) : report_to_text(report));
    });
}

int chrono_eval_kappa(const char* matrix_json, int raters_per_item, double* kappa_out) {
    return guarded([&] {
        const json doc = parse_json_arg(matrix_json, "kappa matrix");
        std::vector<std::vector<int>> matrix;
        for (const auto& row : doc)
            matrix.push_back(row.get<std::vector<int>>());
        const double kappa = fleiss_kappa(matrix, raters_per_item);
        if (kappa_out)
            *kappa_out = kappa;
    });
}

int chrono_eval_topic_selection(const char* pairs_path, size_t* correct_out, size_t* total_out) {
    return guarded([&] {
        std::ifstream file(require(pairs_path, "pairs path"));
        if (!file)
            raise(Errc::missing_file, std::string("cannot open pairs file: ") + pairs_path);
        std::vector<SessionPairCase> pairs;
        std::string line;
        while (std::getline(file, line)) {
            if (trim(line).empty())
                continue;
            json node;
            try {
                node = json::parse(line);
            } catch (const json::exception& e) {
                raise(Errc::malformed_document, std::string("bad pair line: ") + e.what());
            }
            SessionPairCase pair;
            for (const auto& [description, label_text] : node.at("labels").items()) {
                const auto label = progress_label_from_text(label_text.get<std::string>());
                if (!label)
                    raise(Errc::malformed_document,
                          "unknown progress label: " + label_text.get<std::string>());
                pair.labelled_events.emplace_back(description, *label);
            }
            for (const auto& utterance : node.at("utterances"))
                pair.follow_up_utterances.push_back(utterance.get<std::string>());
            pairs.push_back(std::move(pair));
        }
        if (correct_out)
            *correct_out = count_correct_event_selection(pairs);
        if (total_out)
            *total_out = pairs.size();
    });
}

int chrono_service_start(const char* config_json, chrono_service** service_out) {
    return guarded([&] {
        ServiceConfig config = ServiceConfig::from_env();
        if (config_json && !trim(config_json).empty()) {
            const json doc = parse_json_arg(config_json, "service config");
            if (doc.contains("data_dir"))
                config.data_dir = doc.at("data_dir").get<std::string>();
            if (doc.contains("bind_addr"))
                config.bind_addr = doc.at("bind_addr").get<std::string>();
            config.port = doc.value("port", config.port);
            config.default_pool = doc.value("default_pool", config.default_pool);
            config.poll_wait_seconds = doc.value("poll_wait_seconds", config.poll_wait_seconds);
        }
        auto handle = std::make_unique<chrono_service>();
        handle->service = std::make_unique<SessionService>(std::move(config));
        handle->service->start();
        if (service_out)
            *service_out = handle.release();
    });
}

int chrono_service_port(const chrono_service* service) {
    return service && service->service ? service->service->port() : -1;
}

int chrono_service_stop(chrono_service* service) {
    return guarded([&] {
        if (service) {
            service->service->stop();
            delete service;
        }
    });
}

} // extern "C"
