#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wingbeat/audio.hpp"
#include "wingbeat/bayes_types.hpp"
#include "wingbeat/dataset.hpp"
#include "wingbeat/rhythm.hpp"

namespace wingbeat {

// Generative description of one insect class: Gaussian fundamental frequency,
// decaying harmonic stack, flight-activity rhythm, and burst length.
struct SpeciesSpec {
    ClassLabel label;
    double fundamental_mean_hz = 365.0;
    double fundamental_std_hz = 41.0;
    std::vector<double> harmonic_amplitudes = {1.0, 0.5, 0.25, 0.12};
    double harmonic_jitter = 0.2;  // per-clip multiplicative amplitude jitter
    CircadianRhythm rhythm = uniform_rhythm();
    double duration_mean_ms = 100.0;
    double duration_jitter_ms = 30.0;
};

struct SynthOptions {
    int sample_rate_hz = 8000;
    std::optional<double> snr_db;  // unset = noiseless
};

// A 1-s snippet: raised-cosine windowed harmonic burst centered in zeros,
// plus optional white noise at the requested SNR. Returns the drawn
// fundamental as ground truth.
struct GeneratedClip {
    AudioClip clip;
    double true_fundamental_hz = 0.0;
};
GeneratedClip gen_wingbeat_clip(const SpeciesSpec& spec, std::uint64_t seed,
                                const SynthOptions& options = {});

// Wrapped-Gaussian mixture over the day; the stock way to write synthetic
// crepuscular/diurnal/nocturnal rhythms.
struct RhythmPeak {
    TimeOfDay center;
    double sigma_minutes = 60.0;
    double weight = 1.0;
};
CircadianRhythm gaussian_mixture_rhythm(const std::vector<RhythmPeak>& peaks,
                                        int bin_minutes = 1,
                                        double epsilon = kDefaultRhythmEpsilon);

// Draws a wall-clock time of day from the rhythm (bin by mass, uniform within
// the bin).
TimeOfDay draw_time_of_day(const CircadianRhythm& rhythm, std::mt19937_64& rng);
std::vector<TimeOfDay> draw_times_of_day(const CircadianRhythm& rhythm, std::size_t n,
                                         std::uint64_t seed);

// Labeled snippet exemplars for classification experiments: spectra from
// gen_wingbeat_clip, timestamps from each spec's rhythm.
struct SnippetDatasetOptions {
    SynthOptions synth;
    bool with_timestamps = true;
};
std::vector<Exemplar> gen_snippet_dataset(const std::vector<SpeciesSpec>& specs,
                                          std::size_t n_per_class, std::uint64_t seed,
                                          const SnippetDatasetOptions& options = {});

// Continuous recording with planted bursts over a noise floor.
struct RecordingOptions {
    int sample_rate_hz = 8000;
    double duration_s = 60.0;
    double noise_rms = 0.01;
    double hum_60hz_amplitude = 0.0;  // mains bleed-through
    double snr_db = 15.0;             // burst RMS over noise RMS
    double min_spacing_s = 1.0;
    TimeOfDay start_time = TimeOfDay::from_hm(6, 0);
};
struct PlantedEvent {
    double offset_s = 0.0;  // burst center in the recording
    ClassLabel label;
    double fundamental_hz = 0.0;
    TimeOfDay time;
};
struct GeneratedRecording {
    AudioClip clip;
    std::vector<PlantedEvent> events;
};
GeneratedRecording gen_recording(const std::vector<SpeciesSpec>& specs,
                                 std::size_t n_events, std::uint64_t seed,
                                 const RecordingOptions& options = {});

// Fig-10-style geographic layout: one 2-D Gaussian bump per species and
// square capture regions around each sensor.
struct GeoScenario {
    struct Bump {
        ClassLabel label;
        double center_x = 0.0, center_y = 0.0;
        double sigma_x = 1.0, sigma_y = 1.0;
    };
    struct Sensor {
        std::string id;
        double center_x = 0.0, center_y = 0.0;
        double half_width = 1.0;
    };
    std::vector<Bump> bumps;
    std::vector<Sensor> sensors;
};

struct GeoDraw {
    ClassLabel label;
    double x = 0.0, y = 0.0;
};

// Projects n_per_species exemplars per bump onto the map and keeps the draws
// inside each sensor's capture square.
std::map<std::string, std::vector<GeoDraw>> gen_geo_samples(const GeoScenario& scenario,
                                                            std::size_t n_per_species,
                                                            std::uint64_t seed);

std::map<std::string, std::map<ClassLabel, std::size_t>> geo_capture_counts(
    const std::map<std::string, std::vector<GeoDraw>>& samples);

}  // namespace wingbeat
