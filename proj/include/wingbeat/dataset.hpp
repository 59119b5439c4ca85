#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wingbeat/audio.hpp"
#include "wingbeat/bayes_types.hpp"
#include "wingbeat/rhythm.hpp"
#include "wingbeat/spectrum.hpp"

namespace wingbeat {

// One detected event ready for classification: band-truncated spectrum plus
// the optional cheap features. Unset optionals mark missing features.
struct Exemplar {
    Spectrum spectrum;                       // truncated to the wingbeat band
    std::optional<TimeOfDay> time;           // time-of-intercept
    std::optional<std::string> sensor;       // location-of-intercept
    std::optional<ClassLabel> label;         // absent for queries
    std::string path;                        // source snippet, if any
};

// One manifest row: path,label,timestamp,sensor with "?" for missing fields.
struct ManifestRow {
    std::string path;
    std::string label = "?";
    std::string timestamp = "?";
    std::string sensor = "?";
};

// Local wall-clock timestamp, no timezone math.
struct Timestamp {
    int year = 1970, month = 1, day = 1;
    double seconds_of_day = 0.0;

    TimeOfDay time_of_day() const { return TimeOfDay(seconds_of_day / 60.0); }
    Timestamp plus_seconds(double s) const;
    std::string iso() const;                      // YYYY-MM-DDTHH:MM:SS.mmm
    static Timestamp parse(const std::string& text);
    static bool looks_like(const std::string& text);
};

std::vector<ManifestRow> read_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows);

// Loads each manifest row's snippet and computes its truncated spectrum with
// 1 Hz bins (dft length = sample rate). All snippets must share one rate,
// reported through sample_rate_out when given.
std::vector<Exemplar> load_exemplars(const std::string& manifest_path,
                                     double band_lo_hz = kBandLoHz,
                                     double band_hi_hz = kBandHiHz,
                                     int* sample_rate_out = nullptr);

// Single-row loader; expected_rate_hz = 0 accepts any rate, otherwise a
// differing rate raises BinMismatch.
Exemplar load_exemplar_row(const ManifestRow& row, const std::string& base_dir,
                           double band_lo_hz = kBandLoHz, double band_hi_hz = kBandHiHz,
                           int expected_rate_hz = 0, int* rate_out = nullptr);

// Turns a 1-s snippet clip into an exemplar spectrum (1 Hz bins, truncated).
Spectrum snippet_spectrum(const AudioClip& clip,
                          double band_lo_hz = kBandLoHz,
                          double band_hi_hz = kBandHiHz);

std::vector<ClassLabel> dataset_classes(const std::vector<Exemplar>& rows);

}  // namespace wingbeat
