#include "llm_parsers.hpp"

#include <cctype>
#include <sstream>

#include "errors.hpp"
#include "text.hpp"

namespace chronochat::llm {

namespace {

bool mentions_nothing(const std::string& description) {
    const std::string lowered = [&] {
        std::string out = description;
        for (char& c : out)
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    }();
    return lowered.find("not mentioned") != std::string::npos;
}

std::string strip_trailing_punctuation(std::string text) {
    while (!text.empty() && (text.back() == '.' || text.back() == ',' || text.back() == ';'))
        text.pop_back();
    return trim(text);
}

// Normalizes "speaker B" / "Speaker 1" prefixes to the bare id.
std::optional<std::string> normalize_speaker(std::string raw) {
    raw = trim(raw);
    if (raw.size() > 24)
        return std::nullopt;
    const std::string lowered = [&] {
        std::string out = raw;
        for (char& c : out)
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    }();
    if (lowered.rfind("speaker ", 0) == 0)
        raw = trim(raw.substr(8));
    if (raw.empty() || raw.size() > 12)
        return std::nullopt;
    for (char c : raw)
        if (!std::isalnum(static_cast<unsigned char>(c)))
            return std::nullopt;
    return raw;
}

// `<speaker>: <description> (about <duration>)`, duration part optional.
bool parse_event_line(const std::string& line, ExtractionResult& result) {
    const auto colon = line.find(':');
    if (colon == std::string::npos)
        return false;
    const auto speaker = normalize_speaker(line.substr(0, colon));
    if (!speaker)
        return false;

    std::string rest = trim(line.substr(colon + 1));
    if (rest.empty())
        return false;

    ExtractedEvent event;
    event.speaker = *speaker;
    if (rest.back() == ')') {
        const auto open = rest.rfind('(');
        if (open != std::string::npos) {
            const std::string inner = rest.substr(open + 1, rest.size() - open - 2);
            if (auto duration = find_duration_phrase(inner)) {
                event.estimated_duration = duration;
                rest = rest.substr(0, open);
            }
        }
    }
    event.description = strip_trailing_punctuation(rest);
    if (event.description.empty())
        return false;
    if (mentions_nothing(event.description))
        return true; // explicit no-event marker
    result.events.push_back(std::move(event));
    return true;
}

// `<speaker> is engaging in <description>, which takes about <duration>`.
bool parse_engaging_sentences(const std::string& line, ExtractionResult& result) {
    constexpr std::string_view kMarker = " is engaging in ";
    bool any = false;
    std::size_t cursor = 0;
    while (cursor < line.size()) {
        auto stop = line.find('.', cursor);
        if (stop == std::string::npos)
            stop = line.size();
        const std::string sentence = line.substr(cursor, stop - cursor);
        cursor = stop + 1;

        const auto marker = sentence.find(kMarker);
        if (marker == std::string::npos)
            continue;
        const auto speaker_start = sentence.find_last_of(" \t", marker == 0 ? 0 : marker - 1);
        const std::string speaker_raw =
            sentence.substr(speaker_start == std::string::npos ? 0 : speaker_start + 1,
                            marker - (speaker_start == std::string::npos ? 0 : speaker_start + 1));
        const auto speaker = normalize_speaker(speaker_raw);
        if (!speaker)
            continue;

        std::string rest = trim(sentence.substr(marker + kMarker.size()));
        ExtractedEvent event;
        event.speaker = *speaker;
        const auto which = rest.find(", which takes");
        if (which != std::string::npos) {
            event.estimated_duration = find_duration_phrase(rest.substr(which));
            rest = rest.substr(0, which);
        }
        event.description = strip_trailing_punctuation(rest);
        if (event.description.empty())
            continue;
        any = true;
        if (!mentions_nothing(event.description))
            result.events.push_back(std::move(event));
    }
    return any;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line))
        lines.push_back(line);
    return lines;
}

std::string strip_enumeration(std::string text) {
    std::size_t i = 0;
    while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) ||
                               text[i] == '.' || text[i] == ')' || text[i] == '-' ||
                               text[i] == '*' || text[i] == ' '))
        ++i;
    // Only treat it as enumeration when it is short; "4 weeks for x" must survive.
    if (i > 0 && i <= 4 && i < text.size() && !std::isdigit(static_cast<unsigned char>(text[i]))) {
        const std::string head = text.substr(0, i);
        if (head.find('.') != std::string::npos || head.find(')') != std::string::npos ||
            head.find('-') != std::string::npos || head.find('*') != std::string::npos)
            return trim(text.substr(i));
    }
    return text;
}

} // namespace

const char* extraction_template_name(ExtractionStyle style) {
    switch (style) {
    case ExtractionStyle::Instruction: return "extract_events";
    case ExtractionStyle::SlotFilling: return "extract_events_slot_filling";
    case ExtractionStyle::QuestionAnswering: return "extract_events_qa";
    }
    return "extract_events";
}

ExtractionResult parse_extraction_reply(const std::string& reply) {
    ExtractionResult result;
    for (const auto& raw_line : split_lines(reply)) {
        const std::string line = trim(raw_line);
        if (line.empty())
            continue;
        if (parse_event_line(line, result))
            continue;
        if (parse_engaging_sentences(line, result))
            continue;
        ++result.skipped_lines;
    }
    return result;
}

ExtractionResult extract_events(Backend& backend, const std::string& history,
                                ExtractionStyle style) {
    if (trim(history).empty())
        raise(Errc::empty_text, "dialogue history is empty");
    const std::string reply =
        complete_template(backend, extraction_template_name(style), {{"history", history}});
    if (trim(reply).empty())
        raise(Errc::empty_reply, "extraction backend returned an empty reply");
    return parse_extraction_reply(reply);
}

Duration estimate_event_duration(Backend& backend, const std::string& description) {
    if (trim(description).empty())
        raise(Errc::empty_text, "event description is empty");
    const std::string reply =
        complete_template(backend, "estimate_duration", {{"event", description}});
    const auto duration = find_duration_phrase(reply);
    if (!duration)
        raise(Errc::no_duration_in_reply, "no duration phrase in reply: " + reply);
    return *duration;
}

Schedule parse_schedule_reply(const std::string& reply, std::size_t* truncated_steps) {
    if (truncated_steps)
        *truncated_steps = 0;
    Schedule schedule;
    std::string segment;
    auto flush = [&] {
        std::string text = strip_enumeration(trim(segment));
        segment.clear();
        if (text.empty())
            return;
        if (text.rfind("and ", 0) == 0)
            text = text.substr(4);
        const auto split_at = text.find(" for ");
        if (split_at == std::string::npos)
            return;
        const auto duration = find_duration_phrase(text.substr(0, split_at));
        if (!duration)
            return;
        const std::string description = strip_trailing_punctuation(text.substr(split_at + 5));
        if (description.empty())
            return;
        if (schedule.steps.size() >= kMaxScheduleSteps) {
            if (truncated_steps)
                ++*truncated_steps;
            return;
        }
        schedule.steps.push_back({description, *duration});
    };
    for (char c : reply) {
        if (c == ',' || c == ';' || c == '\n')
            flush();
        else
            segment.push_back(c);
    }
    flush();
    return schedule;
}

Schedule generate_event_schedule(Backend& backend, const std::string& description,
                                 const Duration& duration, std::size_t* truncated_steps) {
    if (trim(description).empty())
        raise(Errc::empty_text, "event description is empty");
    const std::string reply = complete_template(
        backend, "get_schedule", {{"event", description}, {"duration", duration.format()}});
    Schedule schedule = parse_schedule_reply(reply, truncated_steps);
    if (schedule.steps.empty())
        raise(Errc::no_parsable_steps, "no parsable schedule steps in reply: " + reply);
    return schedule;
}

} // namespace chronochat::llm
