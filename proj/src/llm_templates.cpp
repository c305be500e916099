#include "llm_templates.hpp"

#include <cctype>
#include <cstdint>

#include "errors.hpp"

namespace chronochat::llm {

namespace {

const char* kExtractInstance = R"(Conversation:
A: Hi how are you?
B: Yes I am fine and how are you doing today?
A: Doing good. What is the plan for tonight?
B: Not yet planed for something. I just started with preparing and executing a social media marketing campaign for my company.
A: Oh are you busy in that?)";

std::string extract_events_body() {
    std::string body =
        "In the following conversation, the speakers are engaging in some events that take a "
        "certain amount of time. Extract such events and estimate the expected time to finish "
        "these events.\n\n";
    body += kExtractInstance;
    body += "\nEvents:\nB: executing a social media marketing (about 3 months)\n\n";
    body += "Conversation:\n{history}\nEvents:\n";
    return body;
}

std::string extract_events_slot_filling_body() {
    std::string body = kExtractInstance;
    body += "\nEvents:\n";
    body += "In the above conversation, speakers talked about the events they are engaging. "
            "A is engaging in something is not mentioned. B is engaging in executing a social "
            "media marketing, which takes about 3 months.\n\n";
    body += "Conversation:\n{history}\nEvents:\n";
    body += "In the above conversation, speakers talked about the events they are engaging. "
            "____ is engaging in ____. ____ is engaging in ____.\n";
    return body;
}

std::string extract_events_qa_body() {
    std::string body = kExtractInstance;
    body += R"(
Question 1:
Did speaker A mention any events that speaker A is engaging? Answer with Yes or No
Answer: No
Question 2:
Did speaker B mention any events that speaker B is engaging? Answer with Yes or No
Answer: Yes
Question 3:
What are the events that speaker B is engaging? Answer the content of the event and an estimated time to finish that event.
Answer: Speaker B is engaging in executing a social media marketing, which takes about 3 months to finish.

Conversation:
{history}
Question 1:
Did speaker A mention any events that speaker A is engaging? Answer with Yes or No
Answer:)";
    return body;
}

constexpr const char* kEstimateDurationBody =
    "How long will it usually take to finish \"{event}\"? "
    "Answer with a typical duration, such as \"2 hours\" or \"3 months\".";

constexpr const char* kCraftEventStepsBody =
    "Generate the steps towards finishing the event \"{event}\" within {duration}. "
    "List a maximum of 7 steps, each in the format \"<duration> for <step>\", "
    "separated by commas.";

constexpr const char* kGetScheduleBody =
    "Give a short schedule for the event \"{event}\", which takes about {duration} to finish. "
    "Use a maximum of 7 steps, each in the format \"<duration> for <step>\", "
    "separated by commas.";

constexpr const char* kFirstSessionBody =
    R"(You are speaker {speaker}, having a conversation with a friend. Share and discuss the following events in a natural way, like two friends updating each other on their daily lives. Keep each reply to one short utterance.
Your events:
{events}
Conversation so far:
{history}
{speaker}:)";

constexpr const char* kSubsequentSessionIntro =
    R"(You are speaker {speaker}, continuing a multi-session conversation with a friend. There is a time gap between this session and the previous one. Be mindful of how much time has passed when choosing what to ask and share. Keep each reply to one short utterance.
Gap:
{gap}
Your events:
{events}
)";

std::string subsequent_body(bool with_progress, bool with_schedule) {
    std::string body = kSubsequentSessionIntro;
    if (with_progress)
        body += "Progress of events:\n{progress}\n";
    if (with_schedule)
        body += "Schedules of events:\n{schedule}\n";
    body += "Previous dialogue history:\n{history}\n{speaker}:";
    return body;
}

std::set<std::string> scan_slots(const std::string& body) {
    std::set<std::string> slots;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{')
            continue;
        const auto close = body.find('}', i + 1);
        if (close == std::string::npos)
            break;
        const std::string name = body.substr(i + 1, close - i - 1);
        if (!name.empty() &&
            name.find_first_not_of("abcdefghijklmnopqrstuvwxyz_") == std::string::npos)
            slots.insert(name);
        i = close;
    }
    return slots;
}

const std::vector<PromptTemplate>& registry() {
    static const std::vector<PromptTemplate> templates = [] {
        std::vector<PromptTemplate> list;
        list.push_back(make_template("extract_events", extract_events_body()));
        list.push_back(make_template("extract_events_slot_filling", extract_events_slot_filling_body()));
        list.push_back(make_template("extract_events_qa", extract_events_qa_body()));
        list.push_back(make_template("estimate_duration", kEstimateDurationBody));
        list.push_back(make_template("craft_event_steps", kCraftEventStepsBody));
        list.push_back(make_template("get_schedule", kGetScheduleBody));
        list.push_back(make_template("chatgpt_first_session", kFirstSessionBody));
        list.push_back(make_template("chatgpt_subsequent_session", subsequent_body(false, false)));
        list.push_back(make_template("chatgpt_subsequent_session_progress", subsequent_body(true, false)));
        list.push_back(make_template("chatgpt_subsequent_session_schedule", subsequent_body(false, true)));
        list.push_back(make_template("chatgpt_subsequent_session_both", subsequent_body(true, true)));
        return list;
    }();
    return templates;
}

} // namespace

PromptTemplate make_template(std::string name, std::string body) {
    PromptTemplate tmpl;
    tmpl.name = std::move(name);
    tmpl.body = std::move(body);
    tmpl.required_slots = scan_slots(tmpl.body);
    return tmpl;
}

const PromptTemplate& find_template(const std::string& name) {
    for (const auto& tmpl : registry())
        if (tmpl.name == name)
            return tmpl;
    raise(Errc::unknown_template, "unknown prompt template: " + name);
}

std::vector<std::string> template_names() {
    std::vector<std::string> names;
    for (const auto& tmpl : registry())
        names.push_back(tmpl.name);
    return names;
}

std::string render_prompt(const PromptTemplate& tmpl, const SlotMap& bindings) {
    for (const auto& slot : tmpl.required_slots)
        if (bindings.find(slot) == bindings.end())
            raise(Errc::missing_slot, "template '" + tmpl.name + "' is missing slot: " + slot);

    std::string out;
    out.reserve(tmpl.body.size());
    for (std::size_t i = 0; i < tmpl.body.size(); ++i) {
        if (tmpl.body[i] == '{') {
            const auto close = tmpl.body.find('}', i + 1);
            if (close != std::string::npos) {
                const std::string name = tmpl.body.substr(i + 1, close - i - 1);
                const auto it = bindings.find(name);
                if (it != bindings.end()) {
                    out += it->second;
                    i = close;
                    continue;
                }
            }
        }
        out += tmpl.body[i];
    }
    return out;
}

std::string render_prompt(const std::string& template_name, const SlotMap& bindings) {
    return render_prompt(find_template(template_name), bindings);
}

std::string fixture_key(const std::string& template_name, const SlotMap& bindings) {
    std::uint64_t hash = 1469598103934665603ULL; // FNV-1a offset basis
    auto mix = [&hash](const std::string& text) {
        for (unsigned char c : text) {
            hash ^= c;
            hash *= 1099511628211ULL;
        }
        hash ^= 0xff;
        hash *= 1099511628211ULL;
    };
    for (const auto& [key, value] : bindings) {
        mix(key);
        mix(value);
    }
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
    return template_name + "#" + buffer;
}

} // namespace chronochat::llm
