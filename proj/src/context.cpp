#include "context.hpp"

#include "errors.hpp"

namespace chronochat {

const char* context_mode_name(ContextMode mode) {
    switch (mode) {
    case ContextMode::None: return "none";
    case ContextMode::GapOnly: return "gap_only";
    case ContextMode::Progress: return "progress";
    case ContextMode::Schedule: return "schedule";
    case ContextMode::Both: return "both";
    }
    return "none";
}

std::optional<ContextMode> context_mode_from_name(std::string_view name) {
    if (name == "none") return ContextMode::None;
    if (name == "gap_only") return ContextMode::GapOnly;
    if (name == "progress") return ContextMode::Progress;
    if (name == "schedule") return ContextMode::Schedule;
    if (name == "both") return ContextMode::Both;
    return std::nullopt;
}

std::string render_events_line(const std::string& speaker,
                               const std::vector<std::string>& descriptions) {
    if (descriptions.empty())
        raise(Errc::empty_items, "events line needs at least one description");
    std::string line = speaker + ": ";
    for (std::size_t i = 0; i < descriptions.size(); ++i) {
        if (i > 0)
            line += ", ";
        line += descriptions[i];
    }
    line += ".";
    return line;
}

namespace {

void check_mode(const ContextInputs& inputs, ContextMode mode) {
    const bool wants_gap = mode != ContextMode::None;
    const bool wants_progress = mode == ContextMode::Progress || mode == ContextMode::Both;
    const bool wants_schedule = mode == ContextMode::Schedule || mode == ContextMode::Both;

    if (wants_gap != inputs.gap.has_value())
        raise(Errc::mode_section_mismatch,
              std::string("mode ") + context_mode_name(mode) +
                  (wants_gap ? " requires a gap" : " does not take a gap"));
    if (wants_progress != !inputs.progress.empty())
        raise(Errc::mode_section_mismatch,
              std::string("mode ") + context_mode_name(mode) +
                  (wants_progress ? " requires progress items" : " does not take progress items"));
    if (wants_schedule != !inputs.schedules.empty())
        raise(Errc::mode_section_mismatch,
              std::string("mode ") + context_mode_name(mode) +
                  (wants_schedule ? " requires schedule items" : " does not take schedule items"));
}

std::string render(const ContextInputs& inputs, ContextMode mode, std::size_t skip_history) {
    std::string out;
    for (std::size_t i = skip_history; i < inputs.history.size(); ++i) {
        out += inputs.history[i];
        out += '\n';
    }
    if (!inputs.events.empty()) {
        out += "Events\n";
        for (const auto& events : inputs.events) {
            out += render_events_line(events.speaker, events.descriptions);
            out += '\n';
        }
    }
    if (mode == ContextMode::Progress || mode == ContextMode::Both) {
        out += "Progress\n";
        for (const auto& progress : inputs.progress) {
            out += render_progress_line(progress.speaker, progress.items);
            out += '\n';
        }
    }
    if (mode == ContextMode::Schedule || mode == ContextMode::Both) {
        out += "Schedule\n";
        for (const auto& schedules : inputs.schedules) {
            out += render_schedule_line(schedules.speaker, schedules.items);
            out += '\n';
        }
    }
    if (mode != ContextMode::None) {
        out += "Gap\n";
        out += inputs.gap->format();
        out += '\n';
    }
    return out;
}

} // namespace

std::string build_context(const ContextInputs& inputs, ContextMode mode,
                          std::size_t char_budget) {
    check_mode(inputs, mode);
    std::size_t skip = 0;
    std::string out = render(inputs, mode, skip);
    while (out.size() > char_budget && skip < inputs.history.size()) {
        ++skip;
        out = render(inputs, mode, skip);
    }
    return out;
}

} // namespace chronochat
