#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "rng.hpp"

namespace chronochat {

enum class TimeUnit { Minute, Hour, Day, Week, Month, Year };

// Fixed conversion table: month = 30 days, year = 365 days.
std::int64_t unit_minutes(TimeUnit unit);
const char* unit_name(TimeUnit unit);

// A span of simulated time. Canonical value is whole minutes; the display
// unit only affects formatting and never the arithmetic.
class Duration {
public:
    Duration() = default;
    Duration(std::int64_t minutes, TimeUnit display_unit);

    static Duration of(std::int64_t quantity, TimeUnit unit);
    static Duration minutes(std::int64_t m) { return Duration(m, TimeUnit::Minute); }

    std::int64_t total_minutes() const { return minutes_; }
    TimeUnit display_unit() const { return display_unit_; }

    // Textual phrase, e.g. "3 days". Falls back to the largest unit that
    // divides the value evenly when the display unit does not.
    std::string format() const;

    bool operator==(const Duration& other) const { return minutes_ == other.minutes_; }
    auto operator<=>(const Duration& other) const { return minutes_ <=> other.minutes_; }

    Duration operator+(const Duration& other) const {
        return Duration(minutes_ + other.minutes_, display_unit_);
    }

private:
    std::int64_t minutes_ = 0;
    TimeUnit display_unit_ = TimeUnit::Minute;
};

// Parses `[about ]<integer|one..twelve> <unit>[s]`, e.g. "2 months",
// "about 3 weeks", "one year".
// Throws UnrecognizedUnit, NonPositiveQuantity or UnparseableText.
Duration parse_duration(std::string_view text);

// First duration phrase found anywhere in free text, if any.
std::optional<Duration> find_duration_phrase(std::string_view text);

// Magnitude classes of a session gap, ordered smallest to largest.
enum class GapBucket { Minutes, Hours, Days, Weeks, Months, Year };

constexpr int kGapBucketCount = 6;
const char* gap_bucket_name(GapBucket bucket);
std::optional<GapBucket> gap_bucket_from_name(std::string_view name);

// Total classification of a positive gap. Throws ZeroGap for gaps < 1 minute.
GapBucket classify_gap_bucket(const Duration& gap);

// Random session gap in [10 minutes, 1 year]: the bucket is drawn
// uniformly from the six classes, then a uniform quantity within it
// (minutes 10-59, hours 1-23, days 1-6, weeks 1-4, months 1-11, year 1).
Duration sample_session_gap(Rng& rng);

} // namespace chronochat
