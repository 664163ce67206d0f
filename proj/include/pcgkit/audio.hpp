#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "pcgkit/common.hpp"

namespace pcgkit {

/// A labeled mono waveform. Amplitudes are dimensionless, |x| <= 1 once normalized.
struct AudioSample {
    std::string id;
    Signal samples;
    int sample_rate_hz = 0;
    std::string patient_id;
    Label label = Label::unlabeled;
    bool noisy = false;
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u16le(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace detail

/// Read a RIFF/PCM WAV file. Mono only, 8- or 16-bit; anything else is rejected
/// rather than converted, so envelope statistics are never silently altered.
/// 16-bit samples map to [-1, 1) by division with 32768; 8-bit via (v-128)/128.
/// Metadata fields (patient, label) are left for the caller to fill.
inline AudioSample read_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open WAV file: " + path);
    std::string blob((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (blob.size() < 12) throw Error("not a RIFF/WAVE file: " + path);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(blob.data());
    if (std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
        throw Error("not a RIFF/WAVE file: " + path);

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t sample_rate = 0;
    bool have_fmt = false;
    size_t data_off = 0, data_len = 0;

    size_t off = 12;
    while (off + 8 <= blob.size()) {
        const unsigned char* ch = p + off;
        std::uint32_t chunk_size = detail::read_u32le(ch + 4);
        const size_t body = off + 8;
        if (body + chunk_size > blob.size()) chunk_size = static_cast<std::uint32_t>(blob.size() - body);
        if (std::memcmp(ch, "fmt ", 4) == 0 && chunk_size >= 16) {
            format = detail::read_u16le(p + body);
            channels = detail::read_u16le(p + body + 2);
            sample_rate = detail::read_u32le(p + body + 4);
            bits = detail::read_u16le(p + body + 14);
            have_fmt = true;
        } else if (std::memcmp(ch, "data", 4) == 0) {
            data_off = body;
            data_len = chunk_size;
        }
        off = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }

    if (!have_fmt || data_off == 0) throw Error("missing fmt/data chunk: " + path);
    if (format != 1) throw Error("non-PCM WAV encoding (format tag " + std::to_string(format) + "): " + path);
    if (channels != 1)
        throw Error("unsupported channel count (" + std::to_string(channels) + "): " + path);
    if (bits != 8 && bits != 16)
        throw Error("unsupported bit depth (" + std::to_string(bits) + "): " + path);
    if (sample_rate == 0) throw Error("zero sample rate: " + path);

    AudioSample out;
    out.id = path;
    out.sample_rate_hz = static_cast<int>(sample_rate);
    if (bits == 16) {
        const size_t n = data_len / 2;
        out.samples.resize(n);
        for (size_t i = 0; i < n; ++i) {
            const std::int16_t v =
                static_cast<std::int16_t>(detail::read_u16le(p + data_off + 2 * i));
            out.samples[i] = static_cast<double>(v) / 32768.0;
        }
    } else {
        out.samples.resize(data_len);
        for (size_t i = 0; i < data_len; ++i)
            out.samples[i] = (static_cast<double>(p[data_off + i]) - 128.0) / 128.0;
    }
    if (out.samples.empty()) throw Error("WAV file has no samples: " + path);
    return out;
}

/// Write 16-bit PCM mono. Requires |x| <= 1 everywhere; round-trip error is
/// bounded by 1/32768 per sample.
inline void write_wav(const AudioSample& s, const std::string& path) {
    if (s.sample_rate_hz <= 0) throw Error("write_wav: sample rate must be positive");
    for (double x : s.samples)
        if (!(std::abs(x) <= 1.0)) throw Error("write_wav: amplitude out of range [-1, 1]");

    const std::uint32_t n = static_cast<std::uint32_t>(s.samples.size());
    const std::uint32_t data_bytes = n * 2;
    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    detail::put_u32le(out, 36 + data_bytes);
    out += "WAVEfmt ";
    detail::put_u32le(out, 16);
    detail::put_u16le(out, 1);  // PCM
    detail::put_u16le(out, 1);  // mono
    detail::put_u32le(out, static_cast<std::uint32_t>(s.sample_rate_hz));
    detail::put_u32le(out, static_cast<std::uint32_t>(s.sample_rate_hz) * 2);
    detail::put_u16le(out, 2);
    detail::put_u16le(out, 16);
    out += "data";
    detail::put_u32le(out, data_bytes);
    for (double x : s.samples) {
        long q = std::lround(x * 32767.0);
        if (q > 32767) q = 32767;
        if (q < -32768) q = -32768;
        detail::put_u16le(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error("write failed: " + path);
}

}  // namespace pcgkit
