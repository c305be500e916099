#include "errors.hpp"

namespace chronochat {

const char* errc_name(Errc code) {
    switch (code) {
    case Errc::unrecognized_unit: return "UnrecognizedUnit";
    case Errc::non_positive_quantity: return "NonPositiveQuantity";
    case Errc::unparseable_text: return "UnparseableText";
    case Errc::zero_gap: return "ZeroGap";
    case Errc::missing_file: return "MissingFile";
    case Errc::malformed_document: return "MalformedDocument";
    case Errc::invariant_violation: return "InvariantViolation";
    case Errc::no_such_schedule: return "NoSuchSchedule";
    case Errc::pool_exhausted: return "PoolExhausted";
    case Errc::horizon_too_short: return "HorizonTooShort";
    case Errc::beyond_horizon: return "BeyondHorizon";
    case Errc::zero_duration: return "ZeroDuration";
    case Errc::empty_items: return "EmptyItems";
    case Errc::missing_slot: return "MissingSlot";
    case Errc::unknown_template: return "UnknownTemplate";
    case Errc::timeout: return "Timeout";
    case Errc::http_error: return "HttpError";
    case Errc::missing_fixture: return "MissingFixture";
    case Errc::rate_limited: return "RateLimited";
    case Errc::empty_reply: return "EmptyReply";
    case Errc::no_duration_in_reply: return "NoDurationInReply";
    case Errc::no_parsable_steps: return "NoParsableSteps";
    case Errc::mode_section_mismatch: return "ModeSectionMismatch";
    case Errc::empty_memory: return "EmptyMemory";
    case Errc::empty_corpus: return "EmptyCorpus";
    case Errc::no_judgments_for_attribute: return "NoJudgmentsForAttribute";
    case Errc::degenerate_agreement: return "DegenerateAgreement";
    case Errc::bad_config: return "BadConfig";
    case Errc::room_full: return "RoomFull";
    case Errc::no_such_room: return "NoSuchRoom";
    case Errc::wrong_phase: return "WrongPhase";
    case Errc::invalid_token: return "InvalidToken";
    case Errc::empty_text: return "EmptyText";
    case Errc::too_few_utterances: return "TooFewUtterances";
    case Errc::io_error: return "IoError";
    }
    return "UnknownError";
}

} // namespace chronochat
