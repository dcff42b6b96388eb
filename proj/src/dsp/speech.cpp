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

#include "dsp_internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace mle::dsp {

namespace {

constexpr double kSegmentPadS = 0.05;

// Peaks that rise at least dip_db above the preceding valley and fall at
// least dip_db below themselves afterwards.
int count_peaks(std::span<const double> contour, double dip_db, double floor_db) {
    int count = 0;
    bool armed = false;
    double valley = std::numeric_limits<double>::infinity();
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : contour) {
        if (!armed) {
            valley = std::min(valley, v);
            if (v - valley >= dip_db) {
                armed = true;
                peak = v;
            }
        } else {
            peak = std::max(peak, v);
            if (peak - v >= dip_db) {
                if (peak >= floor_db) ++count;
                armed = false;
                valley = v;
            }
        }
    }
    return count;
}

}// namespace

std::pair<std::optional<double>, std::optional<double>> speech_rates(double duration_s, double phonation_s,
                                                                     int syllables) {
    std::pair<std::optional<double>, std::optional<double>> out;
    if (duration_s > 0.0) out.first = syllables / duration_s;
    if (phonation_s > 0.0) out.second = syllables / phonation_s;
    return out;
}

int count_syllables(const AudioTrack& track, const VadSegments& segments, const DspConfig& cfg) {
    const double fs = track.sample_rate;
    const auto n = track.samples.size();
    int total = 0;
    for (const auto& s : segments) {
        const auto begin = static_cast<std::size_t>(std::max(0.0, std::round((s.start - kSegmentPadS) * fs)));
        const auto end = std::min(n, static_cast<std::size_t>(std::round((s.end + kSegmentPadS) * fs)));
        if (end <= begin) continue;
        const auto contour = detail::intensity_contour(track.samples, fs, begin, end);
        total += count_peaks(contour, cfg.syllable_dip_db, cfg.vad_threshold_db);
    }
    return total;
}

SpeechStats speech_stats(const AudioTrack& track, const VadSegments& segments, const DspConfig& cfg) {
    SpeechStats st;
    st.speech_duration_s = track.duration();
    double pause_total = 0.0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        st.phonation_time_s += segments[i].end - segments[i].start;
        if (i > 0) {
            const double gap = segments[i].start - segments[i - 1].end;
            if (gap >= cfg.pause_min_s) {
                ++st.pauses;
                pause_total += gap;
            }
        }
    }
    st.syllables = count_syllables(track, segments, cfg);
    std::tie(st.speech_rate, st.articulation_rate) = speech_rates(st.speech_duration_s, st.phonation_time_s, st.syllables);
    if (st.pauses > 0) st.mean_pause_s = pause_total / st.pauses;
    return st;
}

}// namespace mle::dsp
