/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#include <mle/audio_track.hpp>
#include <mle/error.hpp>
#include <mle/text_util.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>

namespace mle {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const std::string& b, std::size_t at) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t read_u16(const std::string& b, std::size_t at) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                      static_cast<unsigned char>(b[at + 1]) << 8);
}

void put_u32(std::string& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u16(std::string& b, std::uint16_t v) {
    b.push_back(static_cast<char>(v & 0xFF));
    b.push_back(static_cast<char>((v >> 8) & 0xFF));
}

}// namespace

void check_sample_rate(int rate, const std::string& context) {
    if (rate < kMinSampleRate || rate > kMaxSampleRate) {
        throw Error(ErrorCode::RateOutOfRange,
                    context + ": sample rate " + std::to_string(rate) + " Hz outside [16000, 48000]");
    }
}

AudioTrack decode_wav(const std::string& b, const std::string& name) {
    if (b.size() < 12 || b.compare(0, 4, "RIFF") != 0 || b.compare(8, 4, "WAVE") != 0) {
        throw MalformedStream(name, 0, "not a RIFF/WAVE file");
    }
    bool have_fmt = false;
    std::uint16_t channels = 0;
    std::uint16_t bits = 0;
    std::uint32_t rate = 0;
    std::size_t pos = 12;
    while (pos + 8 <= b.size()) {
        const std::string id = b.substr(pos, 4);
        const std::uint32_t size = read_u32(b, pos + 4);
        const std::size_t body = pos + 8;
        if (body + size > b.size()) {
            // Truncated streams are common for the data chunk; clamp it.
            if (id != "data") throw MalformedStream(name, 0, "chunk '" + id + "' runs past end of file");
        }
        if (id == "fmt ") {
            if (size < 16) throw MalformedStream(name, 0, "fmt chunk too short");
            std::uint16_t format = read_u16(b, body);
            channels = read_u16(b, body + 2);
            rate = read_u32(b, body + 4);
            bits = read_u16(b, body + 14);
            if (format == kFormatExtensible && size >= 26) format = read_u16(b, body + 24);
            if (format != kFormatPcm) throw MalformedStream(name, 0, "only PCM WAVE data is supported");
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) throw MalformedStream(name, 0, "data chunk before fmt chunk");
            if (channels != 1) throw MalformedStream(name, 0, "expected a single channel, got " + std::to_string(channels));
            if (bits != 16) throw MalformedStream(name, 0, "expected 16-bit samples, got " + std::to_string(bits));
            check_sample_rate(static_cast<int>(rate), name);
            const std::size_t avail = std::min<std::size_t>(size, b.size() - body);
            AudioTrack track;
            track.sample_rate = static_cast<int>(rate);
            track.samples.resize(avail / 2);
            for (std::size_t i = 0; i < track.samples.size(); ++i) {
                const auto raw = static_cast<std::int16_t>(read_u16(b, body + 2 * i));
                track.samples[i] = static_cast<double>(raw) / 32768.0;
            }
            return track;
        }
        pos = body + size + (size & 1U);
    }
    throw MalformedStream(name, 0, "no data chunk");
}

std::string encode_wav(const AudioTrack& track) {
    const auto n = static_cast<std::uint32_t>(track.samples.size());
    std::string b;
    b.reserve(44 + 2 * static_cast<std::size_t>(n));
    b += "RIFF";
    put_u32(b, 36 + 2 * n);
    b += "WAVE";
    b += "fmt ";
    put_u32(b, 16);
    put_u16(b, kFormatPcm);
    put_u16(b, 1);
    put_u32(b, static_cast<std::uint32_t>(track.sample_rate));
    put_u32(b, static_cast<std::uint32_t>(track.sample_rate) * 2);
    put_u16(b, 2);
    put_u16(b, 16);
    b += "data";
    put_u32(b, 2 * n);
    for (double s : track.samples) {
        const double scaled = std::round(s * 32768.0);
        const auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
        put_u16(b, static_cast<std::uint16_t>(q));
    }
    return b;
}

AudioTrack read_wav(const std::filesystem::path& path) {
    return decode_wav(text::read_file(path), path.filename().string());
}

void write_wav(const std::filesystem::path& path, const AudioTrack& track) {
    text::write_file_atomic(path, encode_wav(track));
}

}// namespace mle
