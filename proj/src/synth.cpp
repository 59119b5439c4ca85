#include "wingbeat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wingbeat/errors.hpp"

namespace wingbeat {

namespace {

constexpr double kPi = 3.14159265358979323846;

double burst_rms(const std::vector<double>& samples, std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += samples[i] * samples[i];
    const auto n = static_cast<double>(end - begin);
    return n > 0.0 ? std::sqrt(acc / n) : 0.0;
}

// Raised-cosine windowed harmonic stack; amplitude 1 before scaling.
std::vector<double> make_burst(double f0_hz, const std::vector<double>& amplitudes,
                               std::size_t n_samples, int rate) {
    std::vector<double> burst(n_samples, 0.0);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / rate;
        const double w = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) /
                                                static_cast<double>(n_samples)));
        double s = 0.0;
        for (std::size_t h = 0; h < amplitudes.size(); ++h) {
            const double f = f0_hz * static_cast<double>(h + 1);
            if (f >= rate / 2.0) break;  // keep harmonics below Nyquist
            s += amplitudes[h] * std::sin(2.0 * kPi * f * t);
        }
        burst[i] = w * s;
    }
    return burst;
}

void normalize_peak(std::vector<double>& samples, double peak = 0.95) {
    double maxabs = 0.0;
    for (double s : samples) maxabs = std::max(maxabs, std::abs(s));
    if (maxabs > peak) {
        const double scale = peak / maxabs;
        for (double& s : samples) s *= scale;
    }
}

double draw_truncated_fundamental(const SpeciesSpec& spec, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(spec.fundamental_mean_hz, spec.fundamental_std_hz);
    for (int i = 0; i < 1000; ++i) {
        const double f = dist(rng);
        if (f >= 100.0 && f <= 2000.0) return f;
    }
    throw InvalidInput("fundamental distribution has almost no mass in [100, 2000] Hz");
}

std::vector<double> jittered_amplitudes(const SpeciesSpec& spec, std::mt19937_64& rng) {
    std::vector<double> amps = spec.harmonic_amplitudes;
    if (spec.harmonic_jitter > 0.0) {
        std::uniform_real_distribution<double> jit(1.0 - spec.harmonic_jitter,
                                                   1.0 + spec.harmonic_jitter);
        for (double& a : amps) a *= jit(rng);
    }
    return amps;
}

}  // namespace

GeneratedClip gen_wingbeat_clip(const SpeciesSpec& spec, std::uint64_t seed,
                                const SynthOptions& options) {
    if (spec.harmonic_amplitudes.empty() || spec.harmonic_amplitudes.front() <= 0.0) {
        throw InvalidInput("species spec needs a positive first harmonic amplitude");
    }
    const int rate = options.sample_rate_hz;
    std::mt19937_64 rng(seed);

    const double f0 = draw_truncated_fundamental(spec, rng);
    std::uniform_real_distribution<double> djit(-spec.duration_jitter_ms,
                                                spec.duration_jitter_ms);
    const double duration_ms = std::max(10.0, spec.duration_mean_ms +
                                                  (spec.duration_jitter_ms > 0.0 ? djit(rng) : 0.0));
    const auto n_burst = static_cast<std::size_t>(duration_ms * 1e-3 * rate);
    const auto burst = make_burst(f0, jittered_amplitudes(spec, rng), n_burst, rate);

    AudioClip clip;
    clip.sample_rate_hz = rate;
    clip.samples.assign(static_cast<std::size_t>(rate), 0.0);
    const std::size_t start = (clip.samples.size() - n_burst) / 2;  // centered
    std::copy(burst.begin(), burst.end(), clip.samples.begin() + static_cast<std::ptrdiff_t>(start));

    if (options.snr_db) {
        const double signal_rms = burst_rms(clip.samples, start, start + n_burst);
        const double noise_rms = signal_rms * std::pow(10.0, -*options.snr_db / 20.0);
        std::normal_distribution<double> noise(0.0, noise_rms);
        for (double& s : clip.samples) s += noise(rng);
    }
    normalize_peak(clip.samples);
    return {clip, f0};
}

CircadianRhythm gaussian_mixture_rhythm(const std::vector<RhythmPeak>& peaks,
                                        int bin_minutes, double epsilon) {
    if (peaks.empty()) throw InvalidInput("gaussian_mixture_rhythm: no peaks");
    const auto n_bins = static_cast<std::size_t>(1440 / bin_minutes);
    CircadianRhythm rhythm;
    rhythm.bin_minutes = bin_minutes;
    rhythm.provenance = RhythmProvenance::learned;
    rhythm.density.assign(n_bins, 0.0);
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double t = (static_cast<double>(b) + 0.5) * bin_minutes;
        for (const RhythmPeak& peak : peaks) {
            // Wrapped normal: nearest image of the peak center.
            double d = std::abs(t - peak.center.minutes_since_midnight);
            d = std::min(d, kMinutesPerDay - d);
            const double z = d / peak.sigma_minutes;
            rhythm.density[b] += peak.weight * std::exp(-0.5 * z * z);
        }
    }
    double total = 0.0;
    for (double& d : rhythm.density) {
        d = std::max(d, epsilon);
        total += d;
    }
    for (double& d : rhythm.density) d /= total;
    return rhythm;
}

TimeOfDay draw_time_of_day(const CircadianRhythm& rhythm, std::mt19937_64& rng) {
    std::discrete_distribution<std::size_t> bins(rhythm.density.begin(), rhythm.density.end());
    const std::size_t bin = bins(rng);
    std::uniform_real_distribution<double> within(0.0, rhythm.bin_minutes);
    return TimeOfDay(static_cast<double>(bin) * rhythm.bin_minutes + within(rng));
}

std::vector<TimeOfDay> draw_times_of_day(const CircadianRhythm& rhythm, std::size_t n,
                                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TimeOfDay> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(draw_time_of_day(rhythm, rng));
    return out;
}

std::vector<Exemplar> gen_snippet_dataset(const std::vector<SpeciesSpec>& specs,
                                          std::size_t n_per_class, std::uint64_t seed,
                                          const SnippetDatasetOptions& options) {
    std::vector<Exemplar> out;
    out.reserve(specs.size() * n_per_class);
    std::mt19937_64 time_rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uint64_t clip_seed = seed;
    for (const SpeciesSpec& spec : specs) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            const auto gen = gen_wingbeat_clip(spec, ++clip_seed, options.synth);
            Exemplar e;
            e.spectrum = snippet_spectrum(gen.clip);
            e.label = spec.label;
            if (options.with_timestamps) e.time = draw_time_of_day(spec.rhythm, time_rng);
            out.push_back(std::move(e));
        }
    }
    return out;
}

GeneratedRecording gen_recording(const std::vector<SpeciesSpec>& specs,
                                 std::size_t n_events, std::uint64_t seed,
                                 const RecordingOptions& options) {
    const int rate = options.sample_rate_hz;
    const auto n_samples = static_cast<std::size_t>(options.duration_s * rate);
    std::mt19937_64 rng(seed);

    GeneratedRecording rec;
    rec.clip.sample_rate_hz = rate;
    rec.clip.samples.assign(n_samples, 0.0);

    std::normal_distribution<double> noise(0.0, options.noise_rms);
    for (double& s : rec.clip.samples) s = noise(rng);
    if (options.hum_60hz_amplitude > 0.0) {
        for (std::size_t i = 0; i < n_samples; ++i) {
            rec.clip.samples[i] += options.hum_60hz_amplitude *
                                   std::sin(2.0 * kPi * 60.0 * static_cast<double>(i) / rate);
        }
    }

    if (n_events > 0 && !specs.empty()) {
        if (static_cast<double>(n_events) * options.min_spacing_s * 2.0 > options.duration_s) {
            throw InvalidInput("recording too short for the requested event count and spacing");
        }
        // Burst centers drawn from each species' rhythm restricted to the
        // recording's wall-clock window, at least min_spacing apart.
        const double window_min = options.duration_s / 60.0;
        const auto slot_count = static_cast<std::size_t>(std::ceil(window_min));
        std::vector<std::discrete_distribution<std::size_t>> slot_dist;
        for (const SpeciesSpec& spec : specs) {
            std::vector<double> weights(slot_count);
            for (std::size_t m = 0; m < slot_count; ++m) {
                const TimeOfDay t(options.start_time.minutes_since_midnight +
                                  static_cast<double>(m));
                weights[m] = spec.rhythm.density[spec.rhythm.bin_of(t)] *
                             std::min(1.0, window_min - static_cast<double>(m));
            }
            slot_dist.emplace_back(weights.begin(), weights.end());
        }

        std::uniform_int_distribution<std::size_t> pick(0, specs.size() - 1);
        std::uniform_real_distribution<double> within(0.0, 1.0);
        std::vector<std::pair<double, std::size_t>> placed;  // (offset_s, spec index)
        const double margin = 0.6;
        long attempts = 0;
        while (placed.size() < n_events) {
            if (++attempts > 200000) {
                throw InvalidInput("could not place events with the requested spacing");
            }
            const std::size_t which = pick(rng);
            const double slot_min = static_cast<double>(slot_dist[which](rng)) + within(rng);
            const double offset = slot_min * 60.0;
            if (offset < margin || offset > options.duration_s - margin) continue;
            const bool clash = std::any_of(placed.begin(), placed.end(), [&](const auto& other) {
                return std::abs(other.first - offset) < options.min_spacing_s;
            });
            if (!clash) placed.emplace_back(offset, which);
        }
        std::sort(placed.begin(), placed.end());

        for (const auto& [center, which] : placed) {
            const SpeciesSpec& spec = specs[which];
            const double f0 = draw_truncated_fundamental(spec, rng);
            std::uniform_real_distribution<double> djit(-spec.duration_jitter_ms,
                                                        spec.duration_jitter_ms);
            const double duration_ms =
                std::max(10.0, spec.duration_mean_ms +
                                   (spec.duration_jitter_ms > 0.0 ? djit(rng) : 0.0));
            const auto n_burst = static_cast<std::size_t>(duration_ms * 1e-3 * rate);
            auto burst = make_burst(f0, jittered_amplitudes(spec, rng), n_burst, rate);

            const double rms = burst_rms(burst, 0, burst.size());
            const double target_rms = options.noise_rms * std::pow(10.0, options.snr_db / 20.0);
            const double scale = rms > 0.0 ? target_rms / rms : 0.0;
            const auto center_idx = static_cast<std::size_t>(center * rate);
            const std::size_t start = center_idx > n_burst / 2 ? center_idx - n_burst / 2 : 0;
            for (std::size_t i = 0; i < n_burst && start + i < n_samples; ++i) {
                rec.clip.samples[start + i] += scale * burst[i];
            }

            PlantedEvent ev;
            ev.offset_s = center;
            ev.label = spec.label;
            ev.fundamental_hz = f0;
            ev.time = TimeOfDay(options.start_time.minutes_since_midnight + center / 60.0);
            rec.events.push_back(ev);
        }
    }
    normalize_peak(rec.clip.samples);
    return rec;
}

std::map<std::string, std::vector<GeoDraw>> gen_geo_samples(const GeoScenario& scenario,
                                                            std::size_t n_per_species,
                                                            std::uint64_t seed) {
    if (scenario.bumps.empty()) throw InvalidInput("geo scenario has no species bumps");
    for (const auto& b : scenario.bumps) {
        if (!(b.sigma_x > 0.0) || !(b.sigma_y > 0.0)) {
            throw InvalidInput("geo bump covariance must be positive-definite");
        }
    }
    for (const auto& s : scenario.sensors) {
        if (!(s.half_width > 0.0)) throw InvalidInput("sensor capture square is degenerate");
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);

    std::map<std::string, std::vector<GeoDraw>> captured;
    for (const auto& sensor : scenario.sensors) captured[sensor.id] = {};

    for (const auto& bump : scenario.bumps) {
        for (std::size_t i = 0; i < n_per_species; ++i) {
            const double x = bump.center_x + bump.sigma_x * unit(rng);
            const double y = bump.center_y + bump.sigma_y * unit(rng);
            for (const auto& sensor : scenario.sensors) {
                if (std::abs(x - sensor.center_x) <= sensor.half_width &&
                    std::abs(y - sensor.center_y) <= sensor.half_width) {
                    captured[sensor.id].push_back({bump.label, x, y});
                }
            }
        }
    }
    return captured;
}

std::map<std::string, std::map<ClassLabel, std::size_t>> geo_capture_counts(
    const std::map<std::string, std::vector<GeoDraw>>& samples) {
    std::map<std::string, std::map<ClassLabel, std::size_t>> counts;
    for (const auto& [sensor, draws] : samples) {
        auto& per_class = counts[sensor];
        for (const auto& d : draws) ++per_class[d.label];
    }
    return counts;
}

}  // namespace wingbeat
