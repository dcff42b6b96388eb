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

#ifndef MLE_DSP_INTERNAL_HPP
#define MLE_DSP_INTERNAL_HPP

#include <mle/audio_dsp.hpp>

#include <optional>
#include <span>
#include <vector>

namespace mle::dsp::detail {

// Pitch, perturbation and HNR run at this rate (or the input rate if lower).
inline constexpr double kPitchAnalysisRate = 16000.0;
// LPC runs on a band limited to formant_ceiling_hz, i.e. twice that rate.
inline constexpr double kSilenceDb = -200.0;

double rms_db(std::span<const double> x);

struct Periodicity {
    double lag = 0.0;// fractional samples
    double r = 0.0;  // interpolated normalized autocorrelation
};

/// Best normalized-autocorrelation peak with lag in [fs/ceiling, fs/floor].
/// Among peaks within 0.03 of the global best, the shortest lag wins.
std::optional<Periodicity> best_periodicity(std::span<const double> x, double fs, double floor_hz,
                                            double ceiling_hz);

/// Signal at the pitch analysis rate.
std::vector<double> pitch_signal(const AudioTrack& track, double& fs_out);

struct WindowSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Consecutive non-overlapping windows; a trailing partial window is kept
/// when it covers at least half a window.
std::vector<WindowSpan> analysis_windows(std::size_t n, double fs, double window_s);

/// Keeps VAD segments, trims leading/trailing silence and drops internal
/// gaps of at least cfg.silence_min_gap_s.
AudioTrack remove_silence(const AudioTrack& track, const VadSegments& segments, const DspConfig& cfg);

/// Intensity contour in dB, 40 ms Hann windows every 10 ms, over samples
/// [begin, end).
std::vector<double> intensity_contour(std::span<const double> x, double fs, std::size_t begin, std::size_t end);

double median(std::vector<double> v);
double mean(std::span<const double> v);
double population_sd(std::span<const double> v);

}// namespace mle::dsp::detail

#endif// MLE_DSP_INTERNAL_HPP
