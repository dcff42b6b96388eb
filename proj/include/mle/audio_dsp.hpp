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

#ifndef MLE_AUDIO_DSP_HPP
#define MLE_AUDIO_DSP_HPP

#include <mle/audio_track.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mle::dsp {

/// Tunable analysis parameters. The CLI config file exposes them as
/// vad.threshold_db, vad.hangover_ms, pitch.floor_hz, pitch.ceiling_hz,
/// pause.min_s, syllable.dip_db, highpass.cutoff_hz and silence.min_gap_s.
struct DspConfig {
    // Voice activity: 10 ms frames.
    double vad_frame_ms = 10.0;
    double vad_threshold_db = -45.0;// frame RMS in dBFS
    double vad_hangover_ms = 200.0; // inactive runs shorter than this are bridged
    double vad_min_segment_ms = 30.0;
    // Frames up to this many dB under the threshold still count when their
    // zero-crossing rate is low (weak periodic sound).
    double vad_zcr_margin_db = 10.0;
    double vad_zcr_max = 0.1;// crossings per sample

    double highpass_cutoff_hz = 60.0;
    double silence_min_gap_s = 0.25;

    double window_s = 0.5;
    double pitch_floor_hz = 60.0;
    double pitch_ceiling_hz = 500.0;
    double voicing_threshold = 0.45;

    double formant_ceiling_hz = 5500.0;
    double formant_floor_hz = 90.0;
    double formant_max_bandwidth_hz = 600.0;

    double pause_min_s = 0.3;
    double syllable_dip_db = 2.0;
};

struct Segment {
    double start = 0.0;
    double end = 0.0;
};

/// Sorted, non-overlapping voiced intervals in seconds.
using VadSegments = std::vector<Segment>;

VadSegments vad(const AudioTrack& track, const DspConfig& cfg = {});

/// Second-order Butterworth high-pass run forward and backward.
std::vector<double> highpass(std::span<const double> x, double sample_rate, double cutoff_hz);

/// Windowed-sinc sample-rate conversion.
std::vector<double> resample(std::span<const double> x, double from_hz, double to_hz);

/// High-pass filtering followed by silence removal: leading and trailing
/// silence is trimmed and internal gaps of at least silence_min_gap_s are cut.
AudioTrack preprocess(const AudioTrack& track, const DspConfig& cfg = {});

struct PitchWindow {
    double t = 0.0;              // window center, seconds
    std::optional<double> f0;    // Hz; nullopt when unvoiced
    double periodicity = 0.0;    // normalized autocorrelation at the chosen lag
    bool active = false;         // window energy above the VAD threshold
};

/// One entry per 0.5 s window, no overlap.
struct PitchTrack {
    double window_s = 0.5;
    std::vector<PitchWindow> windows;
};

PitchTrack f0_track(const AudioTrack& track, const DspConfig& cfg = {});

// Cycle-to-cycle perturbation measures. Inputs are period lengths (any
// unit) or peak amplitudes; all raise TooFewPeriods below their minimum
// input length (2, or 3 / 5 / 11 for the smoothed variants).
double jitter(std::span<const double> periods);
double jitter_rap(std::span<const double> periods);
double jitter_ppq5(std::span<const double> periods);
double jitter_ddp(std::span<const double> periods);
double shimmer(std::span<const double> amplitudes);
double shimmer_db(std::span<const double> amplitudes);
double shimmer_apq(std::span<const double> amplitudes, std::size_t points);
double shimmer_dda(std::span<const double> amplitudes);

/// Successive glottal cycles found inside one analysis window.
struct Cycles {
    std::vector<double> periods_s;
    std::vector<double> amplitudes;
};

/// Peak-picking cycle extraction guided by a known period.
Cycles extract_cycles(std::span<const double> x, double sample_rate, double f0_hz);

inline constexpr double kHnrCapDb = 40.0;

/// Harmonics-to-noise ratio of one normalized autocorrelation peak.
double hnr_from_periodicity(double r);

/// Mean HNR over active windows. Raises NoVoicedContent if none is active.
double hnr(const AudioTrack& track, const DspConfig& cfg = {});

struct FormantWindow {
    double t = 0.0;
    std::vector<double> frequencies;// ascending, at most four
    std::vector<double> bandwidths;
};

struct FormantSummary {
    std::vector<FormantWindow> windows;
    std::array<std::optional<double>, 4> mean;
    std::array<std::optional<double>, 4> median;
    std::array<std::optional<double>, 4> stddev;
    std::array<std::optional<double>, 4> bandwidth;
};

/// Linear-prediction formant estimates for one stretch of audio.
FormantWindow lpc_formants(std::span<const double> x, double sample_rate, const DspConfig& cfg = {});

/// Per-window formants over the pitch-voiced windows. Raises
/// NoVoicedContent when no window is voiced.
FormantSummary formants(const AudioTrack& track, const DspConfig& cfg = {});

inline constexpr double kSpeedOfSoundCm = 35000.0;

struct DerivedFormants {
    double average_hz = 0.0;
    double dispersion_hz = 0.0;
    double spacing_hz = 0.0;
    double vocal_tract_length_cm = 0.0;
    std::optional<double> gpr_vtl_interaction;
};

/// F1..F4 must be present and strictly increasing (MissingFormant otherwise).
/// Spacing is the least-squares fit of F_i = (2i - 1)/2 * spacing.
DerivedFormants derived_formant_features(const std::array<std::optional<double>, 4>& formant_means,
                                         std::optional<double> f0_mean_hz = std::nullopt);

struct SpeechStats {
    double speech_duration_s = 0.0;
    double phonation_time_s = 0.0;
    int syllables = 0;
    int pauses = 0;
    std::optional<double> speech_rate;
    std::optional<double> articulation_rate;
    std::optional<double> mean_pause_s;
};

/// Syllables divided by speech duration and by phonation time.
std::pair<std::optional<double>, std::optional<double>> speech_rates(double duration_s, double phonation_s,
                                                                     int syllables);

/// Count of intensity peaks rising and falling by at least dip_db inside the
/// voiced segments.
int count_syllables(const AudioTrack& track, const VadSegments& segments, const DspConfig& cfg = {});

SpeechStats speech_stats(const AudioTrack& track, const VadSegments& segments, const DspConfig& cfg = {});

enum class FeatureSubset { Voice = 1, Formant = 2, Timing = 3 };

struct FeatureSpec {
    std::string_view name;
    std::string_view unit;
    FeatureSubset subset;
    std::string_view formula;
};

inline constexpr std::size_t kAudioFeatureCount = 53;
inline constexpr std::string_view kFeatureRegistryVersion = "audio-features/1";

/// The normative, ordered list of audio features.
const std::array<FeatureSpec, kAudioFeatureCount>& feature_registry();

/// Registry rendered as the JSON document shipped in data/.
std::string feature_registry_json();

struct FeatureVector {
    std::array<std::optional<double>, kAudioFeatureCount> values;
    bool usable = false;
};

FeatureVector audio_feature_vector(const AudioTrack& track, const DspConfig& cfg = {});

}// namespace mle::dsp

#endif// MLE_AUDIO_DSP_HPP
