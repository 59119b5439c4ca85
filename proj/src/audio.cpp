#include "wingbeat/audio.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "wingbeat/errors.hpp"

namespace wingbeat {

void validate_clip(const AudioClip& clip) {
    if (clip.sample_rate_hz < kMinSampleRateHz) {
        throw InvalidInput("sample rate " + std::to_string(clip.sample_rate_hz) +
                           " Hz below minimum " + std::to_string(kMinSampleRateHz));
    }
    for (double s : clip.samples) {
        if (!std::isfinite(s) || std::abs(s) > 1.0) {
            throw InvalidInput("sample out of range or non-finite");
        }
    }
}

double clip_energy(const AudioClip& clip) {
    return std::inner_product(clip.samples.begin(), clip.samples.end(),
                              clip.samples.begin(), 0.0);
}

double clip_rms(const AudioClip& clip) {
    if (clip.samples.empty()) return 0.0;
    return std::sqrt(clip_energy(clip) / static_cast<double>(clip.samples.size()));
}

}  // namespace wingbeat
