#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wingbeat/audio.hpp"
#include "wingbeat/spectrum.hpp"

namespace wingbeat {

// Insect|non-insect detector: 1-NN over band-truncated window spectra, gated
// on band energy.
struct DetectorModel {
    struct Tuning {
        double band_lo_hz = kBandLoHz;
        double band_hi_hz = kBandHiHz;
        double gate_db = 6.0;           // gate above the rolling median band energy
        double merge_gap_ms = 150.0;    // positive windows this close coalesce
        double median_window_s = 5.0;   // rolling median horizon
    };

    std::vector<Spectrum> insect_exemplars;      // truncated, window geometry
    std::vector<Spectrum> background_exemplars;  // truncated, window geometry
    double energy_gate = 0.0;                    // absolute band-energy floor
    Tuning tuning;
};

// A detected event saved as a 1-second clip: the event signal centered, zeros
// elsewhere.
struct EventSnippet {
    AudioClip clip;
    double event_offset_s = 0.0;  // event center in the source recording
    std::string source_id;
};

// Band-truncated spectrum of the clip's highest-energy window; the form used
// for detector exemplars.
Spectrum detector_exemplar(const AudioClip& clip, double window_ms = 100.0,
                           double band_lo_hz = kBandLoHz, double band_hi_hz = kBandHiHz);

// Builds a model from insect snippet clips plus background exemplars drawn
// from the lowest-energy windows of a background recording.
DetectorModel build_detector_model(const std::vector<AudioClip>& insect_clips,
                                   const AudioClip& background_recording,
                                   std::size_t n_background = 10,
                                   double window_ms = 100.0,
                                   const DetectorModel::Tuning& tuning = {});

// Slides a window over the recording, flags insect windows (energy gate +
// nearest exemplar), merges overlapping positives and emits centered 1-s
// zero-padded snippets sorted by offset.
std::vector<EventSnippet> detect_events(const AudioClip& recording,
                                        const DetectorModel& model,
                                        double window_ms = 100.0,
                                        double hop_ms = 10.0,
                                        const std::string& source_id = "");

// Re-draws the background exemplars from the lowest-energy windows of the
// most recent every_s seconds; insect exemplars are untouched.
DetectorModel refresh_background(const DetectorModel& model, const AudioClip& recording,
                                 double every_s);

}  // namespace wingbeat
