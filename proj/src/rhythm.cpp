#include "wingbeat/rhythm.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "wingbeat/errors.hpp"

namespace wingbeat {

namespace {

void check_bin_minutes(int bin_minutes) {
    if (bin_minutes <= 0 || 1440 % bin_minutes != 0) {
        throw InvalidInput("bin_minutes must be a positive divisor of 1440, got " +
                           std::to_string(bin_minutes));
    }
}

// Floor every bin at eps, then normalize to sum 1.
void floor_and_normalize(std::vector<double>& density, double eps) {
    for (double& d : density) d = std::max(d, eps);
    const double total = std::accumulate(density.begin(), density.end(), 0.0);
    for (double& d : density) d /= total;
}

}  // namespace

TimeOfDay::TimeOfDay(double minutes) {
    minutes_since_midnight = std::fmod(minutes, kMinutesPerDay);
    if (minutes_since_midnight < 0.0) minutes_since_midnight += kMinutesPerDay;
}

std::size_t CircadianRhythm::bin_of(TimeOfDay t) const {
    auto bin = static_cast<std::size_t>(t.minutes_since_midnight / bin_minutes);
    return bin < density.size() ? bin : density.size() - 1;
}

CircadianRhythm learn_rhythm(const std::vector<TimeOfDay>& timestamps,
                             int bin_minutes, double smoothing_epsilon) {
    if (timestamps.empty()) throw EmptyInput("learn_rhythm: no timestamps");
    check_bin_minutes(bin_minutes);
    if (smoothing_epsilon <= 0.0) throw InvalidInput("learn_rhythm: epsilon must be > 0");

    CircadianRhythm rhythm;
    rhythm.bin_minutes = bin_minutes;
    rhythm.provenance = RhythmProvenance::learned;
    rhythm.density.assign(static_cast<std::size_t>(1440 / bin_minutes), 0.0);
    const double weight = 1.0 / static_cast<double>(timestamps.size());
    for (TimeOfDay t : timestamps) rhythm.density[rhythm.bin_of(t)] += weight;
    floor_and_normalize(rhythm.density, smoothing_epsilon);
    return rhythm;
}

CircadianRhythm template_rhythm(const ActivityTemplateSpec& spec,
                                int bin_minutes, double smoothing_epsilon) {
    check_bin_minutes(bin_minutes);
    const std::size_t n_bins = static_cast<std::size_t>(1440 / bin_minutes);
    std::vector<int> levels(n_bins, 0);

    for (const auto& iv : spec.intervals) {
        if (iv.level < 1 || iv.level > 3) {
            throw InvalidTemplate("activity level must be 1, 2 or 3, got " +
                                  std::to_string(iv.level));
        }
        double start = iv.start.minutes_since_midnight;
        double end = iv.end.minutes_since_midnight;
        if (end <= start) end += kMinutesPerDay;  // wraps past midnight
        for (double m = start; m < end - 1e-9; m += bin_minutes) {
            const auto bin = static_cast<std::size_t>(std::fmod(m, kMinutesPerDay)) /
                             static_cast<std::size_t>(bin_minutes);
            if (levels[bin] != 0) {
                throw InvalidTemplate("template intervals overlap at minute " +
                                      std::to_string(std::fmod(m, kMinutesPerDay)));
            }
            levels[bin] = iv.level;
        }
    }
    for (std::size_t i = 0; i < n_bins; ++i) {
        if (levels[i] == 0) {
            throw InvalidTemplate("template leaves minute " +
                                  std::to_string(i * static_cast<std::size_t>(bin_minutes)) +
                                  " uncovered");
        }
    }

    CircadianRhythm rhythm;
    rhythm.bin_minutes = bin_minutes;
    rhythm.provenance = RhythmProvenance::text_template;
    rhythm.density.assign(n_bins, 0.0);
    for (std::size_t i = 0; i < n_bins; ++i) rhythm.density[i] = levels[i];
    floor_and_normalize(rhythm.density, smoothing_epsilon);
    return rhythm;
}

CircadianRhythm uniform_rhythm(int bin_minutes) {
    check_bin_minutes(bin_minutes);
    CircadianRhythm rhythm;
    rhythm.bin_minutes = bin_minutes;
    rhythm.provenance = RhythmProvenance::uniform;
    const std::size_t n_bins = static_cast<std::size_t>(1440 / bin_minutes);
    rhythm.density.assign(n_bins, 1.0 / static_cast<double>(n_bins));
    return rhythm;
}

double rhythm_density(const CircadianRhythm& rhythm, TimeOfDay t) {
    if (rhythm.density.empty()) throw InvalidInput("rhythm_density: empty rhythm");
    return rhythm.density[rhythm.bin_of(t)];
}

void validate_rhythm(const CircadianRhythm& rhythm) {
    if (rhythm.density.empty()) throw InvalidInput("rhythm has no bins");
    double total = 0.0;
    for (double d : rhythm.density) {
        if (!(d > 0.0)) throw InvalidInput("rhythm density must be strictly positive");
        total += d;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InvalidInput("rhythm density sums to " + std::to_string(total));
    }
}

}  // namespace wingbeat
