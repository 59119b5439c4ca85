#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wingbeat/audio.hpp"
#include "wingbeat/errors.hpp"
#include "wingbeat/spectrum.hpp"

using namespace wingbeat;

namespace {

AudioClip make_sine(double freq_hz, int rate, double seconds, double amplitude = 0.5) {
    AudioClip clip;
    clip.sample_rate_hz = rate;
    const auto n = static_cast<std::size_t>(seconds * rate);
    clip.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        clip.samples[i] = amplitude * std::sin(2.0 * M_PI * freq_hz *
                                               static_cast<double>(i) / rate);
    }
    return clip;
}

AudioClip make_noise(int rate, double seconds, double rms, std::uint64_t seed) {
    AudioClip clip;
    clip.sample_rate_hz = rate;
    clip.samples.resize(static_cast<std::size_t>(seconds * rate));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, rms);
    for (double& s : clip.samples) s = dist(rng);
    return clip;
}

double clip_band_energy(const AudioClip& clip) {
    return band_energy(compute_spectrum(clip, clip.samples.size()));
}

double snr_db_vs(const AudioClip& noisy, const AudioClip& clean) {
    double signal = 0.0, residual = 0.0;
    for (std::size_t i = 0; i < clean.samples.size(); ++i) {
        signal += clean.samples[i] * clean.samples[i];
        const double e = noisy.samples[i] - clean.samples[i];
        residual += e * e;
    }
    return 10.0 * std::log10(signal / residual);
}

}  // namespace

TEST_CASE("compute_spectrum finds a pure tone in its bin") {
    const auto clip = make_sine(354.0, 8000, 1.0);
    const auto spec = compute_spectrum(clip, 8000);
    REQUIRE(spec.size() == 4001);
    CHECK(spec.bin_width_hz == doctest::Approx(1.0));

    std::size_t peak = 0;
    for (std::size_t i = 1; i < spec.size(); ++i) {
        if (spec.magnitudes[i] > spec.magnitudes[peak]) peak = i;
    }
    CHECK(peak == 354);
    // Everything else is far below the peak for an integer-cycle tone.
    CHECK(spec.magnitudes[354] > 100.0 * spec.magnitudes[360]);
}

TEST_CASE("compute_spectrum of silence is all zero") {
    AudioClip clip;
    clip.sample_rate_hz = 8000;
    clip.samples.assign(8000, 0.0);
    const auto spec = compute_spectrum(clip, 8000);
    for (double m : spec.magnitudes) CHECK(m == 0.0);
}

TEST_CASE("compute_spectrum matches the direct-summation DFT") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);

    SUBCASE("two-tone example") {
        // 4096 samples puts both tones off bin centers, so every bin carries
        // leakage and the per-bin relative comparison is meaningful.
        AudioClip clip = make_sine(354.0, 8000, 0.512, 0.4);
        const AudioClip second = make_sine(708.0, 8000, 0.512, 0.2);
        for (std::size_t i = 0; i < clip.samples.size(); ++i) {
            clip.samples[i] += second.samples[i];
        }
        const auto spec = compute_spectrum(clip, clip.samples.size());
        const auto reference = oracles::direct_dft_magnitudes(clip.samples, clip.samples.size());
        double peak = 0.0;
        for (double m : reference) peak = std::max(peak, m);
        for (std::size_t i = 0; i < reference.size(); ++i) {
            const double rel = std::abs(spec.magnitudes[i] - reference[i]) /
                               std::max(reference[i], peak * 1e-12);
            CHECK(rel <= 1e-9);
        }
    }

    SUBCASE("random clips, odd and even lengths") {
        for (std::size_t n : {64u, 255u, 1000u}) {
            AudioClip clip;
            clip.sample_rate_hz = 8000;
            clip.samples.resize(n);
            for (double& s : clip.samples) s = amp(rng);
            const auto spec = compute_spectrum(clip, n);
            const auto reference = oracles::direct_dft_magnitudes(clip.samples, n);
            double peak = 0.0;
            for (double m : reference) peak = std::max(peak, m);
            for (std::size_t i = 0; i < reference.size(); ++i) {
                CHECK(std::abs(spec.magnitudes[i] - reference[i]) <=
                      1e-9 * std::max(reference[i], peak * 1e-12));
            }
        }
    }
}

TEST_CASE("compute_spectrum rejects an empty clip") {
    AudioClip clip;
    clip.sample_rate_hz = 8000;
    CHECK_THROWS_AS(compute_spectrum(clip, 8000), EmptyInput);
}

TEST_CASE("Parseval: one-sided magnitudes account for the signal energy") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    for (std::size_t n : {128u, 129u, 2048u}) {
        AudioClip clip;
        clip.sample_rate_hz = 8000;
        clip.samples.resize(n);
        for (double& s : clip.samples) s = amp(rng);
        const auto spec = compute_spectrum(clip, n);

        double one_sided = spec.magnitudes[0] * spec.magnitudes[0];
        const bool has_nyquist = n % 2 == 0;
        const std::size_t last = spec.size() - 1;
        for (std::size_t i = 1; i < spec.size(); ++i) {
            const double m2 = spec.magnitudes[i] * spec.magnitudes[i];
            one_sided += (has_nyquist && i == last) ? m2 : 2.0 * m2;
        }
        const double energy = clip_energy(clip);
        CHECK(one_sided == doctest::Approx(static_cast<double>(n) * energy).epsilon(1e-6));
    }
}

TEST_CASE("truncate_band keeps exactly the bins inside the band") {
    const auto clip = make_sine(354.0, 8000, 1.0);
    const auto spec = compute_spectrum(clip, 8000);

    SUBCASE("default band has 1901 one-hertz bins") {
        const auto band = truncate_band(spec, 100.0, 2000.0);
        CHECK(band.size() == 1901);
        CHECK(band.start_hz == doctest::Approx(100.0));
        CHECK(band.bin_center_hz(band.size() - 1) == doctest::Approx(2000.0));
    }

    SUBCASE("full-range band is the identity") {
        const auto band = truncate_band(spec, 0.0, 4000.0);
        CHECK(band.size() == spec.size());
        CHECK(band.magnitudes == spec.magnitudes);
    }

    SUBCASE("band clipped to the spectrum end") {
        Spectrum short_spec;
        short_spec.bin_width_hz = 1.0;
        short_spec.start_hz = 0.0;
        short_spec.magnitudes.assign(1501, 1.0);  // ends at 1500 Hz
        const auto band = truncate_band(short_spec, 100.0, 2000.0);
        CHECK(band.size() == 1401);
        CHECK(band.start_hz == doctest::Approx(100.0));
        CHECK(band.bin_center_hz(band.size() - 1) == doctest::Approx(1500.0));
    }

    SUBCASE("empty intersection raises EmptyBand") {
        CHECK_THROWS_AS(truncate_band(spec, 5000.0, 6000.0), EmptyBand);
    }

    SUBCASE("truncation is idempotent") {
        const auto once = truncate_band(spec, 100.0, 2000.0);
        const auto twice = truncate_band(once, 100.0, 2000.0);
        CHECK(once.magnitudes == twice.magnitudes);
        CHECK(once.start_hz == twice.start_hz);
    }
}

TEST_CASE("spectral_subtract with a zero profile is the identity") {
    const auto clip = make_sine(440.0, 8000, 1.0);
    NoiseProfile zero;
    zero.mean_magnitudes.assign(clip.samples.size() / 2 + 1, 0.0);
    const auto out = spectral_subtract(clip, zero, 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        const double d = out.samples[i] - clip.samples[i];
        err += d * d;
    }
    CHECK(std::sqrt(err / static_cast<double>(clip.samples.size())) <= 1e-6);
}

TEST_CASE("spectral_subtract removes noise matching its profile") {
    const auto noise = make_noise(8000, 1.0, 0.05, 21);
    const auto profile = estimate_noise_profile({noise});
    const auto out = spectral_subtract(noise, profile, 0.0);
    CHECK(clip_band_energy(out) <= 0.1 * clip_band_energy(noise));
}

TEST_CASE("spectral_subtract improves SNR by 6 dB at 0 dB input") {
    const int rate = 8000;
    const double amplitude = 0.4;
    const auto clean = make_sine(400.0, rate, 1.0, amplitude);
    const double sine_rms = amplitude / std::sqrt(2.0);

    AudioClip noisy = clean;
    {
        std::mt19937_64 rng(33);
        std::normal_distribution<double> dist(0.0, sine_rms);  // 0 dB SNR
        for (double& s : noisy.samples) s += dist(rng);
    }

    std::vector<AudioClip> noise_clips;
    for (std::uint64_t i = 0; i < 20; ++i) {
        noise_clips.push_back(make_noise(rate, 1.0, sine_rms, 100 + i));
    }
    const auto profile = estimate_noise_profile(noise_clips);
    const auto cleaned = spectral_subtract(noisy, profile, 0.0);

    const double before = snr_db_vs(noisy, clean);
    const double after = snr_db_vs(cleaned, clean);
    CHECK(before == doctest::Approx(0.0).epsilon(0.2));
    CHECK(after - before >= 6.0);
}

TEST_CASE("spectral_subtract rejects mismatched profiles") {
    const auto clip = make_sine(440.0, 8000, 1.0);
    NoiseProfile wrong;
    wrong.mean_magnitudes.assign(100, 0.0);
    CHECK_THROWS_AS(spectral_subtract(clip, wrong, 0.0), BinMismatch);
}

TEST_CASE("fundamental_frequency returns the highest in-band peak") {
    SUBCASE("pure tone") {
        const auto spec = compute_spectrum(make_sine(354.0, 8000, 1.0), 8000);
        CHECK(fundamental_frequency(spec, 100.0, 2000.0) == doctest::Approx(354.0));
    }

    SUBCASE("harmonic stack picks the fundamental") {
        AudioClip clip = make_sine(400.0, 8000, 1.0, 0.4);
        const auto h2 = make_sine(800.0, 8000, 1.0, 0.2);
        const auto h3 = make_sine(1200.0, 8000, 1.0, 0.1);
        for (std::size_t i = 0; i < clip.samples.size(); ++i) {
            clip.samples[i] += h2.samples[i] + h3.samples[i];
        }
        const auto spec = compute_spectrum(clip, 8000);
        CHECK(fundamental_frequency(spec, 100.0, 2000.0) == doctest::Approx(400.0));
    }

    SUBCASE("single-bin band returns that bin") {
        // A non-integer tone leaks into every bin, so the band is never empty.
        const auto spec = compute_spectrum(make_sine(354.3, 8000, 1.0), 8000);
        CHECK(fundamental_frequency(spec, 500.0, 500.4) == doctest::Approx(500.0));
    }

    SUBCASE("all-zero band raises NoPeak") {
        Spectrum spec;
        spec.bin_width_hz = 1.0;
        spec.start_hz = 0.0;
        spec.magnitudes.assign(1000, 0.0);
        CHECK_THROWS_AS(fundamental_frequency(spec, 100.0, 900.0), NoPeak);
    }

    SUBCASE("ties break toward the lower frequency") {
        Spectrum spec;
        spec.bin_width_hz = 1.0;
        spec.start_hz = 0.0;
        spec.magnitudes.assign(1000, 0.0);
        spec.magnitudes[300] = 2.0;
        spec.magnitudes[700] = 2.0;
        CHECK(fundamental_frequency(spec, 100.0, 900.0) == doctest::Approx(300.0));
    }
}
