#include "wingbeat/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wingbeat/errors.hpp"

namespace wingbeat {

namespace {

struct WindowScan {
    std::vector<Spectrum> spectra;   // truncated to the band
    std::vector<double> energies;    // band energy per window
    std::size_t window_samples = 0;
    std::size_t hop_samples = 0;
};

AudioClip window_clip(const AudioClip& recording, std::size_t start, std::size_t n) {
    AudioClip w;
    w.sample_rate_hz = recording.sample_rate_hz;
    w.samples.assign(recording.samples.begin() + static_cast<std::ptrdiff_t>(start),
                     recording.samples.begin() + static_cast<std::ptrdiff_t>(start + n));
    return w;
}

WindowScan scan_windows(const AudioClip& recording, double window_ms, double hop_ms,
                        double lo_hz, double hi_hz) {
    WindowScan scan;
    scan.window_samples = static_cast<std::size_t>(window_ms * 1e-3 * recording.sample_rate_hz);
    scan.hop_samples = std::max<std::size_t>(
        1, static_cast<std::size_t>(hop_ms * 1e-3 * recording.sample_rate_hz));
    if (scan.window_samples < 2 || recording.samples.size() <= scan.window_samples) {
        throw InvalidInput("recording shorter than the detection window");
    }
    for (std::size_t start = 0; start + scan.window_samples <= recording.samples.size();
         start += scan.hop_samples) {
        const auto spec = compute_spectrum(window_clip(recording, start, scan.window_samples),
                                           scan.window_samples);
        scan.spectra.push_back(truncate_band(spec, lo_hz, hi_hz));
        scan.energies.push_back(band_energy(scan.spectra.back(), lo_hz, hi_hz));
    }
    return scan;
}

// Median band energy over the trailing horizon ending at window w.
double trailing_median(const std::vector<double>& energies, std::size_t w,
                       std::size_t horizon_windows) {
    const std::size_t begin = w + 1 > horizon_windows ? w + 1 - horizon_windows : 0;
    std::vector<double> slice(energies.begin() + static_cast<std::ptrdiff_t>(begin),
                              energies.begin() + static_cast<std::ptrdiff_t>(w + 1));
    const auto mid = slice.size() / 2;
    std::nth_element(slice.begin(), slice.begin() + static_cast<std::ptrdiff_t>(mid), slice.end());
    return slice[mid];
}

bool nearest_is_insect(const Spectrum& window, const DetectorModel& model) {
    double best = std::numeric_limits<double>::infinity();
    bool insect = false;
    for (const Spectrum& e : model.insect_exemplars) {
        double acc = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double d = window.magnitudes[i] - e.magnitudes[i];
            acc += d * d;
        }
        if (acc < best) {
            best = acc;
            insect = true;
        }
    }
    for (const Spectrum& e : model.background_exemplars) {
        double acc = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double d = window.magnitudes[i] - e.magnitudes[i];
            acc += d * d;
        }
        if (acc < best) {
            best = acc;
            insect = false;
        }
    }
    return insect;
}

void check_geometry(const DetectorModel& model, const Spectrum& window) {
    for (const Spectrum& e : model.insect_exemplars) {
        if (!e.same_geometry(window)) {
            throw BinMismatch("detector exemplars do not match the window geometry");
        }
    }
    for (const Spectrum& e : model.background_exemplars) {
        if (!e.same_geometry(window)) {
            throw BinMismatch("detector exemplars do not match the window geometry");
        }
    }
}

// Lowest-energy windows of the recording, non-overlapping, for background
// exemplars.
std::vector<Spectrum> lowest_energy_windows(const AudioClip& recording, std::size_t n,
                                            double window_ms, double lo_hz, double hi_hz) {
    const auto window_samples =
        static_cast<std::size_t>(window_ms * 1e-3 * recording.sample_rate_hz);
    const auto scan = scan_windows(recording, window_ms, window_ms, lo_hz, hi_hz);
    (void)window_samples;
    if (scan.spectra.size() < n) {
        throw NotEnoughBackground("need " + std::to_string(n) +
                                  " background windows, recording has " +
                                  std::to_string(scan.spectra.size()));
    }
    std::vector<std::size_t> order(scan.spectra.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scan.energies[a] < scan.energies[b];
    });
    std::vector<Spectrum> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(scan.spectra[order[i]]);
    return out;
}

}  // namespace

Spectrum detector_exemplar(const AudioClip& clip, double window_ms,
                           double band_lo_hz, double band_hi_hz) {
    const auto window_samples =
        static_cast<std::size_t>(window_ms * 1e-3 * clip.sample_rate_hz);
    if (clip.samples.size() < window_samples || window_samples < 2) {
        throw InvalidInput("clip shorter than the detector window");
    }
    // Hop a quarter window to find the highest-energy placement.
    const std::size_t hop = std::max<std::size_t>(1, window_samples / 4);
    double best_energy = -1.0;
    std::size_t best_start = 0;
    for (std::size_t start = 0; start + window_samples <= clip.samples.size(); start += hop) {
        double e = 0.0;
        for (std::size_t i = start; i < start + window_samples; ++i) {
            e += clip.samples[i] * clip.samples[i];
        }
        if (e > best_energy) {
            best_energy = e;
            best_start = start;
        }
    }
    const auto spec = compute_spectrum(window_clip(clip, best_start, window_samples),
                                       window_samples);
    return truncate_band(spec, band_lo_hz, band_hi_hz);
}

DetectorModel build_detector_model(const std::vector<AudioClip>& insect_clips,
                                   const AudioClip& background_recording,
                                   std::size_t n_background, double window_ms,
                                   const DetectorModel::Tuning& tuning) {
    if (insect_clips.empty()) throw EmptyInput("build_detector_model: no insect clips");
    DetectorModel model;
    model.tuning = tuning;
    for (const AudioClip& clip : insect_clips) {
        model.insect_exemplars.push_back(
            detector_exemplar(clip, window_ms, tuning.band_lo_hz, tuning.band_hi_hz));
    }
    model.background_exemplars = lowest_energy_windows(
        background_recording, n_background, window_ms, tuning.band_lo_hz, tuning.band_hi_hz);
    return model;
}

std::vector<EventSnippet> detect_events(const AudioClip& recording, const DetectorModel& model,
                                        double window_ms, double hop_ms,
                                        const std::string& source_id) {
    if (model.insect_exemplars.empty() || model.background_exemplars.empty()) {
        throw InvalidInput("detector model needs both exemplar lists");
    }
    const auto scan = scan_windows(recording, window_ms, hop_ms,
                                   model.tuning.band_lo_hz, model.tuning.band_hi_hz);
    check_geometry(model, scan.spectra.front());

    const double gate_factor = std::pow(10.0, model.tuning.gate_db / 10.0);
    const auto horizon = std::max<std::size_t>(
        1, static_cast<std::size_t>(model.tuning.median_window_s * 1000.0 / hop_ms));

    std::vector<std::size_t> positives;
    for (std::size_t w = 0; w < scan.spectra.size(); ++w) {
        const double median = trailing_median(scan.energies, w, horizon);
        const double gate = std::max(model.energy_gate, median * gate_factor);
        if (!(scan.energies[w] > gate) || scan.energies[w] <= 0.0) continue;
        if (nearest_is_insect(scan.spectra[w], model)) positives.push_back(w);
    }

    const int rate = recording.sample_rate_hz;
    const auto merge_gap = static_cast<std::size_t>(
        std::max(1.0, model.tuning.merge_gap_ms * 1e-3 * rate));

    std::vector<EventSnippet> events;
    std::size_t i = 0;
    while (i < positives.size()) {
        std::size_t j = i;
        while (j + 1 < positives.size() &&
               (positives[j + 1] - positives[j]) * scan.hop_samples <= merge_gap) {
            ++j;
        }
        // Event center: middle of the highest-energy positive window in the run.
        std::size_t best = positives[i];
        for (std::size_t k = i; k <= j; ++k) {
            if (scan.energies[positives[k]] > scan.energies[best]) best = positives[k];
        }
        const std::size_t span_start = positives[i] * scan.hop_samples;
        const std::size_t span_end =
            std::min(recording.samples.size(),
                     positives[j] * scan.hop_samples + scan.window_samples);
        const std::size_t center = best * scan.hop_samples + scan.window_samples / 2;

        EventSnippet snip;
        snip.source_id = source_id;
        snip.event_offset_s = static_cast<double>(center) / rate;
        snip.clip.sample_rate_hz = rate;
        snip.clip.samples.assign(static_cast<std::size_t>(rate), 0.0);
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(rate) / 2 -
                                     static_cast<std::ptrdiff_t>(center);
        for (std::size_t s = span_start; s < span_end; ++s) {
            const std::ptrdiff_t dest = static_cast<std::ptrdiff_t>(s) + shift;
            if (dest >= 0 && dest < static_cast<std::ptrdiff_t>(snip.clip.samples.size())) {
                snip.clip.samples[static_cast<std::size_t>(dest)] = recording.samples[s];
            }
        }
        events.push_back(std::move(snip));
        i = j + 1;
    }
    return events;
}

DetectorModel refresh_background(const DetectorModel& model, const AudioClip& recording,
                                 double every_s) {
    if (model.background_exemplars.empty()) {
        throw InvalidInput("refresh_background: model has no background exemplars");
    }
    const auto window_count = model.background_exemplars.size();
    // bin width = rate / window_samples, so the window length in ms is
    // 1000 / bin_width.
    const double window_ms = 1000.0 / model.background_exemplars.front().bin_width_hz;

    AudioClip recent = recording;
    const auto keep = static_cast<std::size_t>(every_s * recording.sample_rate_hz);
    if (keep > 0 && keep < recording.samples.size()) {
        recent.samples.assign(recording.samples.end() - static_cast<std::ptrdiff_t>(keep),
                              recording.samples.end());
    }

    DetectorModel out = model;
    out.background_exemplars = lowest_energy_windows(
        recent, window_count, window_ms, model.tuning.band_lo_hz, model.tuning.band_hi_hz);
    return out;
}

}  // namespace wingbeat
