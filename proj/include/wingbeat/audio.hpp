#pragma once

#include <vector>

namespace wingbeat {

// Uniformly sampled mono waveform, dimensionless amplitude in [-1, 1].
struct AudioClip {
    std::vector<double> samples;
    int sample_rate_hz = 0;

    double duration_s() const {
        return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
    }
};

// Minimum rate accepted anywhere: Nyquist must cover the 2 kHz band ceiling.
inline constexpr int kMinSampleRateHz = 4000;

// Throws InvalidInput unless the clip satisfies the container invariants
// (rate >= 4 kHz, samples finite, |sample| <= 1).
void validate_clip(const AudioClip& clip);

double clip_energy(const AudioClip& clip);
double clip_rms(const AudioClip& clip);

}  // namespace wingbeat
