#include "wingbeat/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "wingbeat/errors.hpp"

namespace wingbeat {

namespace {

uint32_t read_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void write_u32(std::ofstream& out, uint32_t v) {
    const uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                          static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u16(std::ofstream& out, uint16_t v) {
    const uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

AudioClip read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw IoError(path + ": not a RIFF/WAVE file");
    }

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    const uint8_t* data = nullptr;
    uint32_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
        const std::size_t body = pos + 8;
        if (body + chunk_size > bytes.size()) throw IoError(path + ": truncated chunk");
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw IoError(path + ": short fmt chunk");
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = chunk_size;
        }
        pos = body + chunk_size + (chunk_size & 1u);  // chunks are word-aligned
    }
    if (!data) throw IoError(path + ": no data chunk");
    if (channels != 1) throw IoError(path + ": only mono supported (got " +
                                     std::to_string(channels) + " channels)");
    if (rate < static_cast<uint32_t>(kMinSampleRateHz)) {
        throw IoError(path + ": sample rate below 4000 Hz");
    }

    AudioClip clip;
    clip.sample_rate_hz = static_cast<int>(rate);
    if (format == 1 && bits == 16) {
        const std::size_t n = data_size / 2;
        clip.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int16_t s = static_cast<int16_t>(read_u16(data + 2 * i));
            clip.samples[i] = static_cast<double>(s) / 32768.0;
        }
    } else if (format == 3 && bits == 32) {
        const std::size_t n = data_size / 4;
        clip.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            float f;
            std::memcpy(&f, data + 4 * i, 4);
            clip.samples[i] = std::clamp(static_cast<double>(f), -1.0, 1.0);
        }
    } else {
        throw IoError(path + ": unsupported format (need PCM16 or float32)");
    }
    return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
    if (clip.sample_rate_hz <= 0) throw InvalidInput("write_wav: bad sample rate");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);

    const uint32_t n = static_cast<uint32_t>(clip.samples.size());
    const uint32_t data_size = n * 2;
    out.write("RIFF", 4);
    write_u32(out, 36 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, 1);  // PCM
    write_u16(out, 1);  // mono
    write_u32(out, static_cast<uint32_t>(clip.sample_rate_hz));
    write_u32(out, static_cast<uint32_t>(clip.sample_rate_hz) * 2);
    write_u16(out, 2);
    write_u16(out, 16);
    out.write("data", 4);
    write_u32(out, data_size);
    for (uint32_t i = 0; i < n; ++i) {
        const double s = std::clamp(clip.samples[i], -1.0, 1.0);
        const auto q = static_cast<int16_t>(std::lrint(s * 32767.0));
        write_u16(out, static_cast<uint16_t>(q));
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace wingbeat
