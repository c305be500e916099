#include "progress.hpp"

#include <sstream>

#include "errors.hpp"

namespace chronochat {

const char* progress_label_text(ProgressLabel label) {
    switch (label) {
    case ProgressLabel::NoSignificantProgress: return "no significant progress";
    case ProgressLabel::QuarterFinished: return "1/4 finished";
    case ProgressLabel::HalfFinished: return "half finished";
    case ProgressLabel::ThreeQuartersFinished: return "3/4 finished";
    case ProgressLabel::Finished: return "finished";
    }
    return "no significant progress";
}

std::optional<ProgressLabel> progress_label_from_text(const std::string& text) {
    constexpr ProgressLabel all[] = {
        ProgressLabel::NoSignificantProgress, ProgressLabel::QuarterFinished,
        ProgressLabel::HalfFinished, ProgressLabel::ThreeQuartersFinished,
        ProgressLabel::Finished,
    };
    for (ProgressLabel label : all)
        if (text == progress_label_text(label))
            return label;
    return std::nullopt;
}

ProgressLabel compute_progress_label(const Duration& duration, const Duration& elapsed) {
    const std::int64_t d = duration.total_minutes();
    const std::int64_t e = elapsed.total_minutes();
    if (d < 1)
        raise(Errc::zero_duration, "event duration must be at least 1 minute");
    if (e >= d)
        return ProgressLabel::Finished;
    // Fraction thresholds at 1/8, 3/8 and 5/8, exact boundaries rounding
    // down; all arithmetic stays in integers.
    if (8 * e <= d)
        return ProgressLabel::NoSignificantProgress;
    if (8 * e <= 3 * d)
        return ProgressLabel::QuarterFinished;
    if (8 * e <= 5 * d)
        return ProgressLabel::HalfFinished;
    return ProgressLabel::ThreeQuartersFinished;
}

ScheduleSplit split_schedule(const Schedule& schedule, const Duration& elapsed) {
    ScheduleSplit split;
    std::int64_t cumulative = 0;
    bool in_prefix = true;
    for (const auto& step : schedule.steps) {
        if (in_prefix) {
            cumulative += step.duration.total_minutes();
            if (cumulative <= elapsed.total_minutes()) {
                split.finished.push_back(step);
                continue;
            }
            in_prefix = false;
        }
        split.todo.push_back(step);
    }
    return split;
}

namespace {

std::string step_phrase(const Step& step) {
    return step.duration.format() + " for " + step.description;
}

std::string join_steps(const std::vector<Step>& steps) {
    if (steps.empty())
        return "none";
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i > 0)
            out += "; ";
        out += step_phrase(steps[i]);
    }
    return out;
}

} // namespace

std::string render_progress_line(const std::string& speaker,
                                 const std::vector<ProgressItem>& items) {
    if (items.empty())
        raise(Errc::empty_items, "progress line needs at least one item");
    std::ostringstream line;
    line << speaker << ": ";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0)
            line << ", ";
        line << items[i].description << " [" << progress_label_text(items[i].label) << "]";
    }
    line << ".";
    return line.str();
}

std::string render_split(const ScheduleSplit& split) {
    return "[finished: " + join_steps(split.finished) + " | to-do: " + join_steps(split.todo) + "]";
}

std::string render_schedule_line(const std::string& speaker,
                                 const std::vector<ScheduleItem>& items) {
    if (items.empty())
        raise(Errc::empty_items, "schedule line needs at least one item");
    std::ostringstream line;
    line << speaker << ": ";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0)
            line << ", ";
        line << items[i].description << " " << render_split(items[i].split);
    }
    line << ".";
    return line.str();
}

} // namespace chronochat
