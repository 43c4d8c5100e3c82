// Minimal RIFF/WAVE reader and writer. Reads 16/24/32-bit integer PCM and
// 32-bit float, including WAVE_FORMAT_EXTENSIBLE headers; writes float32 by
// default so datasets round-trip bit-exactly.

#include "binaural/wav.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "binaural/errors.hpp"

namespace binaural {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p)
{
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}

std::uint16_t read_u16(const unsigned char* p)
{
    return std::uint16_t(p[0] | p[1] << 8);
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v)
{
    out.push_back(v & 0xFF);
    out.push_back((v >> 8) & 0xFF);
    out.push_back((v >> 16) & 0xFF);
    out.push_back((v >> 24) & 0xFF);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v)
{
    out.push_back(v & 0xFF);
    out.push_back((v >> 8) & 0xFF);
}

double decode_sample(const unsigned char* p, std::uint16_t format, std::uint16_t bits)
{
    if (format == kFormatFloat) {
        std::uint32_t u = read_u32(p);
        float f;
        std::memcpy(&f, &u, sizeof f);
        return static_cast<double>(f);
    }
    switch (bits) {
    case 16: {
        auto v = static_cast<std::int16_t>(read_u16(p));
        return static_cast<double>(v) / 32768.0;
    }
    case 24: {
        std::int32_t v = p[0] | p[1] << 8 | p[2] << 16;
        if (v & 0x800000)
            v |= ~0xFFFFFF;
        return static_cast<double>(v) / 8388608.0;
    }
    case 32: {
        auto v = static_cast<std::int32_t>(read_u32(p));
        return static_cast<double>(v) / 2147483648.0;
    }
    default:
        throw IoError("wav: unsupported PCM bit depth " + std::to_string(bits));
    }
}

}  // namespace

WavData read_wav(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("wav: cannot open " + path.string());
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (raw.size() < 12 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
        std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
        throw IoError("wav: not a RIFF/WAVE file: " + path.string());

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= raw.size()) {
        const char* id = reinterpret_cast<const char*>(raw.data() + pos);
        std::uint32_t len = read_u32(raw.data() + pos + 4);
        if (pos + 8 + len > raw.size())
            throw IoError("wav: truncated chunk in " + path.string());
        const unsigned char* body = raw.data() + pos + 8;
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (len < 16)
                throw IoError("wav: malformed fmt chunk in " + path.string());
            format = read_u16(body);
            channels = read_u16(body + 2);
            rate = read_u32(body + 4);
            bits = read_u16(body + 14);
            if (format == kFormatExtensible) {
                if (len < 40)
                    throw IoError("wav: malformed extensible fmt chunk");
                format = read_u16(body + 24);  // first two bytes of the subformat GUID
            }
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = body;
            data_len = len;
        }
        pos += 8 + len + (len & 1);  // chunks are word-aligned
    }

    if (format == 0 || data == nullptr)
        throw IoError("wav: missing fmt or data chunk in " + path.string());
    if (format != kFormatPcm && format != kFormatFloat)
        throw IoError("wav: unsupported format tag " + std::to_string(format));
    if (format == kFormatFloat && bits != 32)
        throw IoError("wav: only 32-bit float supported");
    if (channels == 0)
        throw IoError("wav: zero channel count in " + path.string());

    const std::size_t bytes_per_sample = bits / 8;
    const std::size_t frame_bytes = bytes_per_sample * channels;
    if (frame_bytes == 0 || data_len % frame_bytes != 0)
        throw IoError("wav: data size not a whole number of frames");
    const std::size_t frames = data_len / frame_bytes;

    WavData out;
    out.sample_rate_hz = rate;
    out.channels.assign(channels, std::vector<double>(frames));
    for (std::size_t i = 0; i < frames; ++i) {
        const unsigned char* frame = data + i * frame_bytes;
        for (std::uint16_t c = 0; c < channels; ++c)
            out.channels[c][i] = decode_sample(frame + c * bytes_per_sample, format, bits);
    }
    return out;
}

void write_wav(const std::filesystem::path& path, const WavData& data, WavEncoding encoding)
{
    if (data.channels.empty())
        throw ValidationError("wav: no channels to write");
    const std::size_t frames = data.frames();
    for (const auto& ch : data.channels)
        if (ch.size() != frames)
            throw ValidationError("wav: channel length mismatch");

    std::uint16_t bits = 0, format = kFormatPcm;
    switch (encoding) {
    case WavEncoding::pcm16: bits = 16; break;
    case WavEncoding::pcm24: bits = 24; break;
    case WavEncoding::pcm32: bits = 32; break;
    case WavEncoding::float32: bits = 32; format = kFormatFloat; break;
    }
    const auto channels = static_cast<std::uint16_t>(data.channels.size());
    const std::uint32_t frame_bytes = channels * bits / 8;
    const std::uint32_t data_len = static_cast<std::uint32_t>(frames) * frame_bytes;

    std::vector<unsigned char> out;
    out.reserve(44 + data_len);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, 36 + data_len);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    put_u32(out, 16);
    put_u16(out, format);
    put_u16(out, channels);
    put_u32(out, data.sample_rate_hz);
    put_u32(out, data.sample_rate_hz * frame_bytes);
    put_u16(out, static_cast<std::uint16_t>(frame_bytes));
    put_u16(out, bits);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, data_len);

    for (std::size_t i = 0; i < frames; ++i) {
        for (std::uint16_t c = 0; c < channels; ++c) {
            const double v = data.channels[c][i];
            switch (encoding) {
            case WavEncoding::float32: {
                const auto f = static_cast<float>(v);
                std::uint32_t u;
                std::memcpy(&u, &f, sizeof u);
                put_u32(out, u);
                break;
            }
            case WavEncoding::pcm16: {
                auto s = static_cast<std::int32_t>(std::lround(v * 32768.0));
                s = std::clamp(s, -32768, 32767);
                put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(s)));
                break;
            }
            case WavEncoding::pcm24: {
                auto s = static_cast<std::int64_t>(std::llround(v * 8388608.0));
                s = std::clamp<std::int64_t>(s, -8388608, 8388607);
                auto u = static_cast<std::uint32_t>(s & 0xFFFFFF);
                out.push_back(u & 0xFF);
                out.push_back((u >> 8) & 0xFF);
                out.push_back((u >> 16) & 0xFF);
                break;
            }
            case WavEncoding::pcm32: {
                auto s = static_cast<std::int64_t>(std::llround(v * 2147483648.0));
                s = std::clamp<std::int64_t>(s, -2147483648LL, 2147483647LL);
                put_u32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(s)));
                break;
            }
            }
        }
    }

    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream of(tmp, std::ios::binary | std::ios::trunc);
        if (!of)
            throw IoError("wav: cannot write " + path.string());
        of.write(reinterpret_cast<const char*>(out.data()),
                 static_cast<std::streamsize>(out.size()));
        if (!of)
            throw IoError("wav: short write to " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace binaural
