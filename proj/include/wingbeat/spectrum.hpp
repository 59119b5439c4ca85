#pragma once

#include <cstddef>
#include <vector>

#include "wingbeat/audio.hpp"

namespace wingbeat {

// One-sided DFT magnitude spectrum. Bin i is centered at start_hz + i * bin_width_hz.
struct Spectrum {
    std::vector<double> magnitudes;
    double bin_width_hz = 0.0;
    double start_hz = 0.0;

    std::size_t size() const { return magnitudes.size(); }
    double bin_center_hz(std::size_t i) const { return start_hz + static_cast<double>(i) * bin_width_hz; }
    bool same_geometry(const Spectrum& other) const;
};

// Mean background magnitude per bin, aligned with the one-sided spectrum of a
// clip of the profile's analysis length.
struct NoiseProfile {
    std::vector<double> mean_magnitudes;
};

// Plausible wingbeat band (Hz); everything outside is sensor noise.
inline constexpr double kBandLoHz = 100.0;
inline constexpr double kBandHiHz = 2000.0;

// One-sided magnitude of the DFT, bins 0 .. dft_length/2. The clip is
// zero-padded (or truncated) to dft_length samples.
Spectrum compute_spectrum(const AudioClip& clip, std::size_t dft_length);

// Keeps exactly the bins whose center frequency lies in [lo_hz, hi_hz].
Spectrum truncate_band(const Spectrum& spec, double lo_hz = kBandLoHz, double hi_hz = kBandHiHz);

// Builds the background estimate by averaging the magnitude spectra of the
// given clips. All clips must share length and rate.
NoiseProfile estimate_noise_profile(const std::vector<AudioClip>& noise_clips);

// Magnitude-domain subtraction over a single analysis frame spanning the whole
// clip; residual magnitudes are clamped below at floor_beta * noise magnitude
// and the signal is resynthesized with the original phase.
AudioClip spectral_subtract(const AudioClip& clip, const NoiseProfile& noise, double floor_beta = 0.02);

// Center frequency of the highest-magnitude bin within [lo_hz, hi_hz];
// ties break toward the lower frequency.
double fundamental_frequency(const Spectrum& spec, double lo_hz, double hi_hz);

// Sum of squared magnitudes over bins with center in [lo_hz, hi_hz].
double band_energy(const Spectrum& spec, double lo_hz = kBandLoHz, double hi_hz = kBandHiHz);

}  // namespace wingbeat
