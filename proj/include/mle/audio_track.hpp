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

#ifndef MLE_AUDIO_TRACK_HPP
#define MLE_AUDIO_TRACK_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace mle {

inline constexpr int kMinSampleRate = 16000;
inline constexpr int kMaxSampleRate = 48000;

/// Mono PCM audio, samples scaled to [-1, 1).
struct AudioTrack {
    std::vector<double> samples;
    int sample_rate = 0;

    double duration() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }

    bool operator==(const AudioTrack&) const = default;
};

/// Throws RateOutOfRange unless rate is within [16000, 48000] Hz.
void check_sample_rate(int rate, const std::string& context);

/// Reads a RIFF/WAVE file holding 16-bit PCM, mono. Multi-channel or
/// non-PCM files raise MalformedStream; out-of-range rates raise
/// RateOutOfRange.
AudioTrack read_wav(const std::filesystem::path& path);

/// Writes 16-bit PCM mono. Samples are clipped to the int16 range.
void write_wav(const std::filesystem::path& path, const AudioTrack& track);

/// In-memory variants used by tests and by the synthetic corpus writer.
AudioTrack decode_wav(const std::string& bytes, const std::string& name);
std::string encode_wav(const AudioTrack& track);

}// namespace mle

#endif// MLE_AUDIO_TRACK_HPP
