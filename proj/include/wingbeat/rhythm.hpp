#pragma once

#include <cstddef>
#include <vector>

namespace wingbeat {

inline constexpr double kMinutesPerDay = 1440.0;

// Wall-clock time of day; wraps modulo 24 h.
struct TimeOfDay {
    double minutes_since_midnight = 0.0;

    TimeOfDay() = default;
    explicit TimeOfDay(double minutes);
    static TimeOfDay from_hm(int hour, int minute) {
        return TimeOfDay(60.0 * hour + minute);
    }
};

enum class RhythmProvenance { learned, proxy_taxon, text_template, uniform };

// Normalized flight-activity density over time of day. density sums to 1 and
// every bin is at least an epsilon above zero.
struct CircadianRhythm {
    int bin_minutes = 1;
    std::vector<double> density;
    RhythmProvenance provenance = RhythmProvenance::uniform;

    std::size_t num_bins() const { return density.size(); }
    std::size_t bin_of(TimeOfDay t) const;
};

// Piecewise activity levels over the day; 1 = low, 2 = medium, 3 = high.
// Intervals are half-open [start, end) and may wrap past midnight; together
// they must cover the full day exactly once.
struct ActivityTemplateSpec {
    struct Interval {
        TimeOfDay start;
        TimeOfDay end;
        int level = 1;
    };
    std::vector<Interval> intervals;
};

inline constexpr double kDefaultRhythmEpsilon = 1e-6;

// Histogram of observation times, floored at smoothing_epsilon per bin and
// renormalized to sum 1.
CircadianRhythm learn_rhythm(const std::vector<TimeOfDay>& timestamps,
                             int bin_minutes = 1,
                             double smoothing_epsilon = kDefaultRhythmEpsilon);

// Piecewise-constant rhythm at the template's activity levels.
CircadianRhythm template_rhythm(const ActivityTemplateSpec& spec,
                                int bin_minutes = 1,
                                double smoothing_epsilon = kDefaultRhythmEpsilon);

CircadianRhythm uniform_rhythm(int bin_minutes = 1);

// P(time-of-intercept falls in the bin containing t | class); strictly positive.
double rhythm_density(const CircadianRhythm& rhythm, TimeOfDay t);

// Throws InvalidInput unless density sums to 1 and every bin is positive.
void validate_rhythm(const CircadianRhythm& rhythm);

}  // namespace wingbeat
