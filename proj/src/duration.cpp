#include "duration.hpp"

#include <array>
#include <cctype>
#include <vector>

namespace chronochat {

namespace {

struct UnitRow {
    TimeUnit unit;
    const char* name;
    std::int64_t minutes;
};

constexpr std::array<UnitRow, 6> kUnits{{
    {TimeUnit::Minute, "minute", 1},
    {TimeUnit::Hour, "hour", 60},
    {TimeUnit::Day, "day", 1440},
    {TimeUnit::Week, "week", 10080},
    {TimeUnit::Month, "month", 43200},
    {TimeUnit::Year, "year", 525600},
}};

constexpr std::array<const char*, 12> kNumberWords{
    "one", "two", "three", "four", "five", "six",
    "seven", "eight", "nine", "ten", "eleven", "twelve",
};

std::string lowercase(std::string_view text) {
    std::string out(text);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::string current;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) {
                words.push_back(current);
                current.clear();
            }
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty())
        words.push_back(current);
    return words;
}

std::optional<std::int64_t> parse_quantity(const std::string& word) {
    for (std::size_t i = 0; i < kNumberWords.size(); ++i)
        if (word == kNumberWords[i])
            return static_cast<std::int64_t>(i) + 1;
    if (word.empty())
        return std::nullopt;
    std::int64_t value = 0;
    for (char c : word) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return std::nullopt;
        value = value * 10 + (c - '0');
        if (value > 100'000'000) // keeps minute totals comfortably in range
            return std::nullopt;
    }
    return value;
}

// Accepts "week", "weeks", and a trailing punctuation mark ("weeks,").
std::optional<TimeUnit> parse_unit(std::string word) {
    while (!word.empty() && !std::isalpha(static_cast<unsigned char>(word.back())))
        word.pop_back();
    if (word.size() > 1 && word.back() == 's')
        word.pop_back();
    for (const auto& row : kUnits)
        if (word == row.name)
            return row.unit;
    return std::nullopt;
}

} // namespace

std::int64_t unit_minutes(TimeUnit unit) {
    for (const auto& row : kUnits)
        if (row.unit == unit)
            return row.minutes;
    return 1;
}

const char* unit_name(TimeUnit unit) {
    for (const auto& row : kUnits)
        if (row.unit == unit)
            return row.name;
    return "minute";
}

Duration::Duration(std::int64_t minutes, TimeUnit display_unit)
    : minutes_(minutes), display_unit_(display_unit) {
    if (minutes_ < 0)
        raise(Errc::non_positive_quantity, "duration cannot be negative");
}

Duration Duration::of(std::int64_t quantity, TimeUnit unit) {
    return Duration(quantity * unit_minutes(unit), unit);
}

std::string Duration::format() const {
    if (minutes_ == 0)
        return "0 minutes";
    TimeUnit unit = display_unit_;
    // Computed values carry the minute unit; show them in the largest unit
    // that divides evenly. The same fallback covers display units that
    // stopped dividing after arithmetic.
    if (unit == TimeUnit::Minute || minutes_ % unit_minutes(unit) != 0) {
        unit = TimeUnit::Minute;
        for (auto it = kUnits.rbegin(); it != kUnits.rend(); ++it) {
            if (minutes_ % it->minutes == 0) {
                unit = it->unit;
                break;
            }
        }
    }
    const std::int64_t quantity = minutes_ / unit_minutes(unit);
    std::string phrase = std::to_string(quantity);
    phrase += ' ';
    phrase += unit_name(unit);
    if (quantity != 1)
        phrase += 's';
    return phrase;
}

Duration parse_duration(std::string_view text) {
    auto words = split_words(lowercase(text));
    if (!words.empty() && words.front() == "about")
        words.erase(words.begin());
    if (words.size() != 2)
        raise(Errc::unparseable_text, "expected '<quantity> <unit>', got: " + std::string(text));

    const auto quantity = parse_quantity(words[0]);
    if (!quantity)
        raise(Errc::unparseable_text, "unreadable quantity: " + words[0]);
    if (*quantity <= 0)
        raise(Errc::non_positive_quantity, "duration quantity must be positive: " + words[0]);

    const auto unit = parse_unit(words[1]);
    if (!unit)
        raise(Errc::unrecognized_unit, "unrecognized time unit: " + words[1]);

    return Duration::of(*quantity, *unit);
}

std::optional<Duration> find_duration_phrase(std::string_view text) {
    const auto words = split_words(lowercase(text));
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
        const auto quantity = parse_quantity(words[i]);
        if (!quantity || *quantity <= 0)
            continue;
        const auto unit = parse_unit(words[i + 1]);
        if (!unit)
            continue;
        return Duration::of(*quantity, *unit);
    }
    return std::nullopt;
}

const char* gap_bucket_name(GapBucket bucket) {
    switch (bucket) {
    case GapBucket::Minutes: return "minutes";
    case GapBucket::Hours: return "hours";
    case GapBucket::Days: return "days";
    case GapBucket::Weeks: return "weeks";
    case GapBucket::Months: return "months";
    case GapBucket::Year: return "year";
    }
    return "minutes";
}

std::optional<GapBucket> gap_bucket_from_name(std::string_view name) {
    constexpr std::array<GapBucket, 6> all{
        GapBucket::Minutes, GapBucket::Hours, GapBucket::Days,
        GapBucket::Weeks, GapBucket::Months, GapBucket::Year,
    };
    for (GapBucket bucket : all)
        if (name == gap_bucket_name(bucket))
            return bucket;
    return std::nullopt;
}

GapBucket classify_gap_bucket(const Duration& gap) {
    const std::int64_t m = gap.total_minutes();
    if (m < 1)
        raise(Errc::zero_gap, "gap must be at least 1 minute");
    if (m < 60)
        return GapBucket::Minutes;
    if (m < 1440)
        return GapBucket::Hours;
    if (m < 10080)
        return GapBucket::Days;
    if (m < 43200)
        return GapBucket::Weeks;
    if (m < 525600)
        return GapBucket::Months;
    return GapBucket::Year;
}

Duration sample_session_gap(Rng& rng) {
    switch (rng.uniform_int(0, kGapBucketCount - 1)) {
    case 0: return Duration::of(rng.uniform_int(10, 59), TimeUnit::Minute);
    case 1: return Duration::of(rng.uniform_int(1, 23), TimeUnit::Hour);
    case 2: return Duration::of(rng.uniform_int(1, 6), TimeUnit::Day);
    case 3: return Duration::of(rng.uniform_int(1, 4), TimeUnit::Week);
    case 4: return Duration::of(rng.uniform_int(1, 11), TimeUnit::Month);
    default: return Duration::of(1, TimeUnit::Year);
    }
}

} // namespace chronochat
