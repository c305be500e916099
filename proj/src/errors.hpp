#pragma once

#include <stdexcept>
#include <string>

namespace chronochat {

// Every domain failure carries one of these codes. The C API maps them
// to stable integers in chronochat.h; keep the order in sync.
enum class Errc {
    // temporal
    unrecognized_unit = 1,
    non_positive_quantity,
    unparseable_text,
    zero_gap,
    // event catalog
    missing_file,
    malformed_document,
    invariant_violation,
    no_such_schedule,
    pool_exhausted,
    // timeline
    horizon_too_short,
    beyond_horizon,
    // progress
    zero_duration,
    empty_items,
    // llm gateway
    missing_slot,
    unknown_template,
    timeout,
    http_error,
    missing_fixture,
    rate_limited,
    empty_reply,
    no_duration_in_reply,
    no_parsable_steps,
    // dialogue engine
    mode_section_mismatch,
    empty_memory,
    // dataset
    empty_corpus,
    // eval
    no_judgments_for_attribute,
    degenerate_agreement,
    // service
    bad_config,
    room_full,
    no_such_room,
    wrong_phase,
    invalid_token,
    empty_text,
    too_few_utterances,
    // generic
    io_error,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace chronochat
