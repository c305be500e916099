// chronochat: every pipeline stage as a verb subcommand over the C API.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chronochat/chronochat.h"

namespace {

using nlohmann::json;

int fail(int status) {
    std::cerr << "error: " << chrono_last_error() << "\n";
    return status == CHRONO_OK ? 1 : 1;
}

std::string take(char* text) {
    std::string out = text ? text : "";
    chrono_free(text);
    return out;
}

std::string read_file_or_stdin(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream file(path);
    if (!file) {
        std::cerr << "error: cannot open " << path << "\n";
        std::exit(1);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n')
            std::cout << '\n';
        return;
    }
    std::ofstream file(out_path);
    if (!file) {
        std::cerr << "error: cannot write " << out_path << "\n";
        std::exit(1);
    }
    file << text;
    if (text.empty() || text.back() != '\n')
        file << '\n';
}

struct BackendFlags {
    std::string mode;
    std::string endpoint;
    std::string key_var;
    std::string model;
    std::string fixtures;

    void attach(CLI::App* cmd) {
        cmd->add_option("--backend", mode, "Backend mode: mock or http");
        cmd->add_option("--endpoint", endpoint, "Chat-completion URL (http mode)");
        cmd->add_option("--key-var", key_var, "Name of the env var holding the API key");
        cmd->add_option("--model", model, "Model name sent to the endpoint");
        cmd->add_option("--fixtures", fixtures, "Fixture file (mock mode)");
    }

    // Empty string means: let the library read CHRONOCHAT_LLM_* itself.
    std::string config_json() const {
        if (mode.empty() && endpoint.empty() && key_var.empty() && model.empty() &&
            fixtures.empty())
            return "";
        json doc;
        if (!mode.empty())
            doc["mode"] = mode;
        if (!endpoint.empty())
            doc["endpoint"] = endpoint;
        if (!key_var.empty())
            doc["key_var"] = key_var;
        if (!model.empty())
            doc["model"] = model;
        if (!fixtures.empty())
            doc["fixtures"] = fixtures;
        return doc.dump();
    }
};

std::atomic<bool> g_stop{false};
void handle_signal(int) { g_stop = true; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chronochat: simulated-time multi-session dialogue toolkit"};
    app.require_subcommand(1);

    // gen-timeline
    auto* gen_timeline = app.add_subcommand("gen-timeline", "Generate a speaker pair's timelines");
    std::string gt_pool, gt_horizon = "4 years", gt_out;
    std::uint64_t gt_seed = 0;
    gen_timeline->add_option("--pool", gt_pool, "Event pool document")->required();
    gen_timeline->add_option("--seed", gt_seed, "Random seed")->required();
    gen_timeline->add_option("--horizon", gt_horizon, "Timeline horizon phrase");
    gen_timeline->add_option("--out", gt_out, "Output file (default stdout)");

    // advance
    auto* advance = app.add_subcommand("advance", "Advance a timeline across a session gap");
    std::string adv_timeline, adv_elapsed = "0 minutes", adv_gap, adv_speaker, adv_out;
    int adv_session = 1;
    advance->add_option("--timeline", adv_timeline, "Timeline dump (single speaker or pair)")
        ->required();
    advance->add_option("--speaker", adv_speaker, "Speaker to pick from a pair dump (A or B)");
    advance->add_option("--elapsed", adv_elapsed, "Elapsed time before the gap");
    advance->add_option("--session", adv_session, "Current session index");
    advance->add_option("--gap", adv_gap, "Session gap phrase")->required();
    advance->add_option("--out", adv_out, "Output file (default stdout)");

    // progress
    auto* progress = app.add_subcommand("progress", "Compute a progress label");
    std::string pr_duration, pr_elapsed;
    progress->add_option("--duration", pr_duration, "Event duration phrase")->required();
    progress->add_option("--elapsed", pr_elapsed, "Elapsed time phrase")->required();

    // split-schedule
    auto* split = app.add_subcommand("split-schedule", "Split a schedule into finished and to-do");
    std::string sp_schedule, sp_elapsed;
    split->add_option("--schedule", sp_schedule, "Schedule JSON file")->required();
    split->add_option("--elapsed", sp_elapsed, "Elapsed time phrase")->required();

    // extract-events
    auto* extract = app.add_subcommand("extract-events", "Extract ongoing events from a history");
    std::string ex_history, ex_style = "instruction", ex_out;
    BackendFlags ex_backend;
    extract->add_option("--history", ex_history, "Dialogue history file, or - for stdin")
        ->required();
    extract->add_option("--style", ex_style, "Prompt style: instruction, slot_filling or qa");
    extract->add_option("--out", ex_out, "Output file (default stdout)");
    ex_backend.attach(extract);

    // estimate-duration
    auto* estimate = app.add_subcommand("estimate-duration", "Estimate a typical event duration");
    std::string es_event;
    BackendFlags es_backend;
    estimate->add_option("--event", es_event, "Event description")->required();
    es_backend.attach(estimate);

    // gen-schedule
    auto* gen_schedule = app.add_subcommand("gen-schedule", "Generate an event schedule");
    std::string gs_event, gs_duration, gs_out;
    BackendFlags gs_backend;
    gen_schedule->add_option("--event", gs_event, "Event description")->required();
    gen_schedule->add_option("--duration", gs_duration, "Event duration phrase")->required();
    gen_schedule->add_option("--out", gs_out, "Output file (default stdout)");
    gs_backend.attach(gen_schedule);

    // build-context
    auto* build = app.add_subcommand("build-context", "Assemble a time-aware model input");
    std::string bc_input, bc_mode = "none", bc_out;
    std::size_t bc_budget = 4096;
    build->add_option("--input", bc_input, "Context inputs JSON file")->required();
    build->add_option("--mode", bc_mode, "none, gap_only, progress, schedule or both");
    build->add_option("--budget", bc_budget, "Character budget");
    build->add_option("--out", bc_out, "Output file (default stdout)");

    // self-chat
    auto* self_chat = app.add_subcommand("self-chat", "Run a multi-session self-chat");
    std::string sc_pool, sc_mode = "both", sc_out, sc_split = "train", sc_dump_timeline;
    std::uint64_t sc_seed = 0;
    int sc_sessions = 3, sc_min_utterances = 20, sc_parallel = 1;
    BackendFlags sc_backend;
    self_chat->add_option("--pool", sc_pool, "Event pool document")->required();
    self_chat->add_option("--seed", sc_seed, "Random seed")->required();
    self_chat->add_option("--mode", sc_mode, "Time-representation mode");
    self_chat->add_option("--sessions", sc_sessions, "Number of sessions (3-5)");
    self_chat->add_option("--min-utterances", sc_min_utterances, "Minimum utterances per session");
    self_chat->add_option("--split", sc_split, "Dataset split for the output record");
    self_chat->add_option("--parallel", sc_parallel,
                          "Run N independent conversations (seeds seed..seed+N-1)");
    self_chat->add_option("--out", sc_out, "Output .chrono.jsonl file (default stdout)");
    self_chat->add_option("--dump-timeline", sc_dump_timeline,
                          "Also dump the generated timelines to this file");
    sc_backend.attach(self_chat);

    // import
    auto* import_cmd = app.add_subcommand("import", "Import conversations");
    std::string im_path, im_gapchat, im_out;
    import_cmd->add_option("path", im_path, "A .chrono.jsonl corpus");
    import_cmd->add_option("--from-gapchat", im_gapchat, "Adapt a published GapChat checkout");
    import_cmd->add_option("--out", im_out, "Re-export the valid conversations here");

    // stats
    auto* stats = app.add_subcommand("stats", "Corpus statistics");
    std::string st_path;
    bool st_json = false;
    stats->add_option("path", st_path, "A .chrono.jsonl corpus")->required();
    stats->add_flag("--json", st_json, "Emit machine-readable output");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Aggregate pairwise human judgments");
    std::string ev_judgments, ev_model, ev_baseline, ev_matrix, ev_pairs, ev_out;
    int ev_raters = 0;
    bool ev_json = false, ev_by_gap = false;
    eval_cmd->add_option("--judgments", ev_judgments, "Judgments .jsonl file");
    eval_cmd->add_option("--model", ev_model, "Model under comparison");
    eval_cmd->add_option("--baseline", ev_baseline, "Baseline model");
    eval_cmd->add_flag("--json", ev_json, "Emit machine-readable output");
    eval_cmd->add_flag("--by-gap", ev_by_gap, "Break scores down by gap bucket");
    eval_cmd->add_option("--kappa-matrix", ev_matrix, "Fleiss matrix JSON file");
    eval_cmd->add_option("--raters", ev_raters, "Raters per item for --kappa-matrix");
    eval_cmd->add_option("--topic-pairs", ev_pairs, "Session-pair fixtures for topic selection");
    eval_cmd->add_option("--out", ev_out, "Output file (default stdout)");

    // serve
    auto* serve = app.add_subcommand("serve", "Run the chat-room session service");
    std::string sv_data_dir, sv_bind, sv_pool;
    int sv_port = 0, sv_poll_wait = 25;
    serve->add_option("--data-dir", sv_data_dir, "Room persistence directory");
    serve->add_option("--bind", sv_bind, "Bind address (default CHRONOCHAT_BIND_ADDR)");
    serve->add_option("--port", sv_port, "Port (0 picks one)");
    serve->add_option("--pool", sv_pool, "Default event pool for new rooms");
    serve->add_option("--poll-wait", sv_poll_wait, "Long-poll wait in seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    char* out = nullptr;
    int rc = CHRONO_OK;

    if (gen_timeline->parsed()) {
        chrono_pool* pool = nullptr;
        rc = chrono_pool_open(gt_pool.c_str(), &pool);
        if (rc != CHRONO_OK)
            return fail(rc);
        rc = chrono_timeline_generate(pool, gt_horizon.c_str(), gt_seed, &out);
        chrono_pool_close(pool);
        if (rc != CHRONO_OK)
            return fail(rc);
        write_output(take(out), gt_out);
    } else if (advance->parsed()) {
        std::string timeline = read_file_or_stdin(adv_timeline);
        if (!adv_speaker.empty()) {
            const json doc = json::parse(timeline, nullptr, false);
            if (!doc.is_discarded() && doc.contains("speakers"))
                timeline = doc.at("speakers").at(adv_speaker).dump();
        }
        rc = chrono_timeline_advance(timeline.c_str(), adv_elapsed.c_str(), adv_session,
                                     adv_gap.c_str(), &out);
        if (rc != CHRONO_OK)
            return fail(rc);
        write_output(take(out), adv_out);
    } else if (progress->parsed()) {
        rc = chrono_progress_label(pr_duration.c_str(), pr_elapsed.c_str(), &out);
        if (rc != CHRONO_OK)
            return fail(rc);
        std::cout << take(out) << "\n";
    } else if (split->parsed()) {
        const std::string schedule = read_file_or_stdin(sp_schedule);
        rc = chrono_split_schedule(schedule.c_str(), sp_elapsed.c_str(), &out);
        if (rc != CHRONO_OK)
            return fail(rc);
        const json doc = json::parse(take(out));
        auto step_list = [](const json& steps) {
            std::string text;
            for (const auto& step : steps) {
                if (!text.empty())
                    text += "; ";
                text += step.at("duration").get<std::string>() + " for " +
                        step.at("description").get<std::string>();
            }
            return text.empty() ? std::string("none") : text;
        };
        std::cout << "finished: " << step_list(doc.at("finished")) << "\n";
        std::cout << "to-do: " << step_list(doc.at("todo")) << "\n";
    } else if (extract->parsed()) {
        chrono_backend* backend = nullptr;
        rc = chrono_backend_open(ex_backend.config_json().c_str(), &backend);
        if (rc != CHRONO_OK)
            return fail(rc);
        const std::string history = read_file_or_stdin(ex_history);
        rc = chrono_extract_events(backend, history.c_str(), ex_style.c_str(), &out);
        chrono_backend_close(backend);
        if (rc != CHRONO_OK)
            return fail(rc);
        write_output(take(out), ex_out);
    } else if (estimate->parsed()) {
        chrono_backend* backend = nullptr;
        rc = chrono_backend_open(es_backend.config_json().c_str(), &backend);
        if (rc != CHRONO_OK)
            return fail(rc);
        rc = chrono_estimate_duration(backend, es_event.c_str(), &out);
        chrono_backend_close(backend);
        if (rc != CHRONO_OK)
            return fail(rc);
        std::cout << take(out) << "\n";
    } else if (gen_schedule->parsed()) {
        chrono_backend* backend = nullptr;
        rc = chrono_backend_open(gs_backend.config_json().c_str(), &backend);
        if (rc != CHRONO_OK)
            return fail(rc);
        rc = chrono_generate_schedule(backend, gs_event.c_str(), gs_duration.c_str(), &out);
        chrono_backend_close(backend);
        if (rc != CHRONO_OK)
            return fail(rc);
        write_output(take(out), gs_out);
    } else if (build->parsed()) {
        const std::string inputs = read_file_or_stdin(bc_input);
        rc = chrono_build_context(inputs.c_str(), bc_mode.c_str(), bc_budget, &out);
        if (rc != CHRONO_OK)
            return fail(rc);
        write_output(take(out), bc_out);
    } else if (self_chat->parsed()) {
        const std::string backend_json = sc_backend.config_json();
        auto run_one = [&](std::uint64_t seed, std::string* line) {
            json config;
            config["num_sessions"] = sc_sessions;
            config["min_utterances"] = sc_min_utterances;
            config["mode"] = sc_mode;
            config["seed"] = seed;
            config["split"] = sc_split;
            char* conversation = nullptr;
            const int status = chrono_self_chat(config.dump().c_str(), backend_json.c_str(),
                                                backend_json.c_str(), sc_pool.c_str(),
                                                &conversation);
            if (status == CHRONO_OK)
                *line = take(conversation);
            return status;
        };
        std::vector<std::string> lines(static_cast<std::size_t>(std::max(sc_parallel, 1)));
        if (lines.size() == 1) {
            rc = run_one(sc_seed, &lines[0]);
            if (rc != CHRONO_OK)
                return fail(rc);
        } else {
            std::vector<std::thread> workers;
            std::vector<int> results(lines.size(), CHRONO_OK);
            std::vector<std::string> errors(lines.size());
            for (std::size_t i = 0; i < lines.size(); ++i)
                workers.emplace_back([&, i] {
                    results[i] = run_one(sc_seed + i, &lines[i]);
                    if (results[i] != CHRONO_OK)
                        errors[i] = chrono_last_error(); // thread-local to this worker
                });
            for (auto& worker : workers)
                worker.join();
            for (std::size_t i = 0; i < results.size(); ++i)
                if (results[i] != CHRONO_OK) {
                    std::cerr << "error: " << errors[i] << "\n";
                    return 1;
                }
        }
        std::string combined;
        for (const auto& line : lines)
            combined += line + "\n";
        combined.pop_back();
        write_output(combined, sc_out);
        if (!sc_dump_timeline.empty()) {
            chrono_pool* pool = nullptr;
            if (chrono_pool_open(sc_pool.c_str(), &pool) != CHRONO_OK)
                return fail(rc);
            char* dump = nullptr;
            const std::string horizon = std::to_string(sc_sessions) + " years";
            if (chrono_timeline_generate(pool, horizon.c_str(), sc_seed, &dump) != CHRONO_OK) {
                chrono_pool_close(pool);
                return fail(rc);
            }
            chrono_pool_close(pool);
            write_output(take(dump), sc_dump_timeline);
        }
    } else if (import_cmd->parsed()) {
        if (!im_gapchat.empty())
            rc = chrono_import_gapchat(im_gapchat.c_str(), im_out.c_str(), &out);
        else if (!im_path.empty())
            rc = chrono_import_corpus(im_path.c_str(), im_out.c_str(), &out);
        else {
            std::cerr << "error: import needs a path or --from-gapchat\n";
            return 2;
        }
        if (rc != CHRONO_OK)
            return fail(rc);
        write_output(take(out), "");
    } else if (stats->parsed()) {
        rc = chrono_corpus_stats(st_path.c_str(), st_json ? 1 : 0, &out);
        if (rc != CHRONO_OK)
            return fail(rc);
        write_output(take(out), "");
    } else if (eval_cmd->parsed()) {
        if (!ev_matrix.empty()) {
            if (ev_raters < 2) {
                std::cerr << "error: --kappa-matrix needs --raters\n";
                return 2;
            }
            double kappa = 0.0;
            rc = chrono_eval_kappa(read_file_or_stdin(ev_matrix).c_str(), ev_raters, &kappa);
            if (rc != CHRONO_OK)
                return fail(rc);
            std::printf("%.4f\n", kappa);
        } else if (!ev_pairs.empty()) {
            size_t correct = 0, total = 0;
            rc = chrono_eval_topic_selection(ev_pairs.c_str(), &correct, &total);
            if (rc != CHRONO_OK)
                return fail(rc);
            std::cout << correct << " / " << total << " session-pairs select correct events\n";
        } else {
            if (ev_judgments.empty() || ev_model.empty() || ev_baseline.empty()) {
                std::cerr << "error: eval needs --judgments, --model and --baseline\n";
                return 2;
            }
            rc = chrono_eval_compare(ev_judgments.c_str(), ev_model.c_str(), ev_baseline.c_str(),
                                     ev_json ? 1 : 0, ev_by_gap ? 1 : 0, &out);
            if (rc != CHRONO_OK)
                return fail(rc);
            write_output(take(out), ev_out);
        }
    } else if (serve->parsed()) {
        json config;
        if (!sv_data_dir.empty())
            config["data_dir"] = sv_data_dir;
        if (!sv_bind.empty())
            config["bind_addr"] = sv_bind;
        config["port"] = sv_port;
        if (!sv_pool.empty())
            config["default_pool"] = sv_pool;
        config["poll_wait_seconds"] = sv_poll_wait;
        chrono_service* service = nullptr;
        rc = chrono_service_start(config.dump().c_str(), &service);
        if (rc != CHRONO_OK)
            return fail(rc);
        std::cout << "listening on port " << chrono_service_port(service) << "\n" << std::flush;
        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        while (!g_stop)
            std::this_thread::sleep_for(std::chrono::milliseconds(200));
        chrono_service_stop(service);
    }

    return 0;
}
