#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace binaural {

enum class WavEncoding { pcm16, pcm24, pcm32, float32 };

struct WavData {
    std::uint32_t sample_rate_hz = 0;
    // One vector per channel, samples in [-1, 1) for integer PCM sources.
    std::vector<std::vector<double>> channels;

    std::size_t frames() const { return channels.empty() ? 0 : channels.front().size(); }
};

WavData read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const WavData& data,
               WavEncoding encoding = WavEncoding::float32);

}  // namespace binaural
