#pragma once

#include <string>

#include "wingbeat/audio.hpp"

namespace wingbeat {

// Reads a mono WAV file (PCM 16-bit or IEEE float 32-bit). Stereo files and
// rates below 4 kHz are rejected with IoError.
AudioClip read_wav(const std::string& path);

// Writes a mono 16-bit PCM WAV file. Samples are clamped to [-1, 1].
void write_wav(const std::string& path, const AudioClip& clip);

}  // namespace wingbeat
