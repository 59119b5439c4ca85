#include "wingbeat/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <string>

#include "wingbeat/errors.hpp"

namespace wingbeat {

namespace {

// FFTW plan creation is not thread-safe; executions on distinct buffers are.
// Plans are cached per transform length behind a mutex.
class RealDft {
public:
    static RealDft& instance() {
        static RealDft dft;
        return dft;
    }

    // x (n real) -> X (n/2+1 complex)
    void forward(const double* in, std::size_t n, std::complex<double>* out) {
        Plans& p = plans_for(n);
        std::vector<double> buf_in(in, in + n);
        std::vector<std::complex<double>> buf_out(n / 2 + 1);
        fftw_execute_dft_r2c(p.fwd, buf_in.data(),
                             reinterpret_cast<fftw_complex*>(buf_out.data()));
        std::copy(buf_out.begin(), buf_out.end(), out);
    }

    // X (n/2+1 complex) -> x (n real), scaled by 1/n.
    void inverse(const std::complex<double>* in, std::size_t n, double* out) {
        Plans& p = plans_for(n);
        std::vector<std::complex<double>> buf_in(in, in + n / 2 + 1);
        std::vector<double> buf_out(n);
        fftw_execute_dft_c2r(p.inv, reinterpret_cast<fftw_complex*>(buf_in.data()),
                             buf_out.data());
        const double scale = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = buf_out[i] * scale;
    }

private:
    struct Plans {
        fftw_plan fwd = nullptr;
        fftw_plan inv = nullptr;
    };

    Plans& plans_for(std::size_t n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        std::vector<double> re(n);
        std::vector<std::complex<double>> cx(n / 2 + 1);
        Plans p;
        p.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), re.data(),
                                     reinterpret_cast<fftw_complex*>(cx.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        p.inv = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                     reinterpret_cast<fftw_complex*>(cx.data()),
                                     re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
        return plans_.emplace(n, p).first->second;
    }

    std::mutex mutex_;
    std::map<std::size_t, Plans> plans_;
};

std::vector<std::complex<double>> forward_dft(const AudioClip& clip, std::size_t dft_length) {
    std::vector<double> padded(dft_length, 0.0);
    const std::size_t n = std::min(clip.samples.size(), dft_length);
    std::copy_n(clip.samples.begin(), n, padded.begin());
    std::vector<std::complex<double>> bins(dft_length / 2 + 1);
    RealDft::instance().forward(padded.data(), dft_length, bins.data());
    return bins;
}

}  // namespace

bool Spectrum::same_geometry(const Spectrum& other) const {
    return magnitudes.size() == other.magnitudes.size() &&
           std::abs(bin_width_hz - other.bin_width_hz) < 1e-9 &&
           std::abs(start_hz - other.start_hz) < 1e-9;
}

Spectrum compute_spectrum(const AudioClip& clip, std::size_t dft_length) {
    if (clip.samples.empty()) throw EmptyInput("compute_spectrum: empty clip");
    if (dft_length < 2) throw InvalidInput("compute_spectrum: dft_length < 2");
    if (clip.sample_rate_hz <= 0) throw InvalidInput("compute_spectrum: non-positive sample rate");

    const auto bins = forward_dft(clip, dft_length);
    Spectrum spec;
    spec.bin_width_hz = static_cast<double>(clip.sample_rate_hz) / static_cast<double>(dft_length);
    spec.start_hz = 0.0;
    spec.magnitudes.resize(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i) spec.magnitudes[i] = std::abs(bins[i]);
    return spec;
}

Spectrum truncate_band(const Spectrum& spec, double lo_hz, double hi_hz) {
    if (!(lo_hz < hi_hz)) throw InvalidInput("truncate_band: lo_hz must be < hi_hz");
    std::size_t first = spec.size();
    std::size_t last = 0;  // exclusive
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double f = spec.bin_center_hz(i);
        if (f >= lo_hz && f <= hi_hz) {
            first = std::min(first, i);
            last = i + 1;
        }
    }
    if (first >= last) throw EmptyBand("truncate_band: no bins in [" + std::to_string(lo_hz) +
                                       ", " + std::to_string(hi_hz) + "] Hz");
    Spectrum out;
    out.bin_width_hz = spec.bin_width_hz;
    out.start_hz = spec.bin_center_hz(first);
    out.magnitudes.assign(spec.magnitudes.begin() + static_cast<std::ptrdiff_t>(first),
                          spec.magnitudes.begin() + static_cast<std::ptrdiff_t>(last));
    return out;
}

NoiseProfile estimate_noise_profile(const std::vector<AudioClip>& noise_clips) {
    if (noise_clips.empty()) throw EmptyInput("estimate_noise_profile: no clips");
    const std::size_t n = noise_clips.front().samples.size();
    if (n == 0) throw EmptyInput("estimate_noise_profile: empty clip");
    NoiseProfile profile;
    profile.mean_magnitudes.assign(n / 2 + 1, 0.0);
    for (const AudioClip& clip : noise_clips) {
        if (clip.samples.size() != n) {
            throw BinMismatch("estimate_noise_profile: clips differ in length");
        }
        const auto bins = forward_dft(clip, n);
        for (std::size_t i = 0; i < bins.size(); ++i) {
            profile.mean_magnitudes[i] += std::abs(bins[i]);
        }
    }
    const double inv = 1.0 / static_cast<double>(noise_clips.size());
    for (double& m : profile.mean_magnitudes) m *= inv;
    return profile;
}

AudioClip spectral_subtract(const AudioClip& clip, const NoiseProfile& noise, double floor_beta) {
    if (clip.samples.empty()) throw EmptyInput("spectral_subtract: empty clip");
    if (floor_beta < 0.0 || floor_beta >= 1.0) {
        throw InvalidInput("spectral_subtract: floor_beta must be in [0, 1)");
    }
    const std::size_t n = clip.samples.size();
    if (noise.mean_magnitudes.size() != n / 2 + 1) {
        throw BinMismatch("spectral_subtract: noise profile has " +
                          std::to_string(noise.mean_magnitudes.size()) + " bins, clip needs " +
                          std::to_string(n / 2 + 1));
    }

    auto bins = forward_dft(clip, n);
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double mag = std::abs(bins[i]);
        const double noise_mag = noise.mean_magnitudes[i];
        const double cleaned = std::max(mag - noise_mag, floor_beta * noise_mag);
        if (mag > 0.0) {
            bins[i] *= cleaned / mag;
        } else {
            bins[i] = cleaned;  // zero phase for an empty bin
        }
    }

    AudioClip out;
    out.sample_rate_hz = clip.sample_rate_hz;
    out.samples.resize(n);
    RealDft::instance().inverse(bins.data(), n, out.samples.data());
    return out;
}

double fundamental_frequency(const Spectrum& spec, double lo_hz, double hi_hz) {
    if (!(lo_hz < hi_hz)) throw InvalidInput("fundamental_frequency: lo_hz must be < hi_hz");
    double best_mag = 0.0;
    double best_freq = 0.0;
    bool found = false;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double f = spec.bin_center_hz(i);
        if (f < lo_hz || f > hi_hz) continue;
        if (spec.magnitudes[i] > best_mag) {  // strict: ties keep the lower frequency
            best_mag = spec.magnitudes[i];
            best_freq = f;
            found = true;
        }
    }
    if (!found || best_mag <= 0.0) throw NoPeak("fundamental_frequency: band is all zero");
    return best_freq;
}

double band_energy(const Spectrum& spec, double lo_hz, double hi_hz) {
    double e = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double f = spec.bin_center_hz(i);
        if (f >= lo_hz && f <= hi_hz) e += spec.magnitudes[i] * spec.magnitudes[i];
    }
    return e;
}

}  // namespace wingbeat
