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

#ifndef MLE_SYNTH_HPP
#define MLE_SYNTH_HPP

#include <mle/audio_track.hpp>
#include <mle/predictor.hpp>
#include <mle/session_store.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mle::synth {

/// Linear amplitude of a level in dBFS (0 dBFS = 1.0).
double db_to_amplitude(double dbfs);

AudioTrack silence(double seconds, int rate);
AudioTrack sine(double freq_hz, double seconds, int rate, double amplitude = 0.5, double phase = 0.0);
AudioTrack white_noise(double seconds, int rate, double rms, std::uint64_t seed);

/// Unit impulses every 1/f0 seconds (fractional positions are rounded).
AudioTrack pulse_train(double f0_hz, double seconds, int rate);

/// Pulse train with explicit successive periods (seconds) and per-pulse
/// amplitudes; the two spans must have equal length.
AudioTrack pulse_sequence(std::span<const double> periods_s, std::span<const double> amplitudes, int rate);

/// Second-order digital resonator with unit gain at DC.
std::vector<double> resonate(std::span<const double> x, double rate, double freq_hz, double bandwidth_hz);

struct Resonance {
    double freq_hz;
    double bandwidth_hz;
};

/// Glottal pulse train through a cascade of resonators, scaled to the
/// given peak amplitude.
AudioTrack vowel(double f0_hz, std::span<const Resonance> resonances, double seconds, int rate, double peak = 0.5);

/// Speech-like utterance: `syllables` vowel nuclei of `syllable_s` each with a
/// raised-cosine envelope, separated by `dip_s` of strongly attenuated voicing.
AudioTrack syllable_train(int syllables, double syllable_s, double dip_s, double f0_hz,
                          std::span<const Resonance> resonances, int rate, double peak = 0.5);

AudioTrack concat(std::span<const AudioTrack> parts);
AudioTrack add(const AudioTrack& a, const AudioTrack& b);
AudioTrack scaled(const AudioTrack& a, double gain);

/// Neutral-tube vowel resonances (500/1500/2500/3500 Hz).
std::vector<Resonance> neutral_vowel();

/// Labelled table over the 53 audio feature names: `informative` columns
/// shifted by +/- effect/2 with the label, `duplicates` near-copies of the
/// first informative columns, and pure noise everywhere else.
struct FeatureCohortSpec {
    std::size_t sessions = 204;
    std::size_t positives = 130;
    std::size_t informative = 17;
    std::size_t duplicates = 3;
    double effect = 3.0;       // class mean difference in noise sd units
    double duplicate_noise = 0.1;
    std::uint64_t seed = 1;
};

struct FeatureCohort {
    predict::Dataset data;
    std::vector<std::string> informative;
    std::vector<std::string> duplicates;// duplicates[i] copies informative[i]
};

FeatureCohort make_feature_cohort(const FeatureCohortSpec& spec);

/// Complete session bundles for `participants` people times four scenarios.
/// Success labels are planted first (exactly `positives` successful sessions;
/// with 51 participants the scenario 1 -> 4 transitions follow the table
/// [[20,3],[12,16]]); surveys and IMPACT streams follow the label, and the
/// participant audio carries a label-dependent pitch and speaking rate scaled
/// by `signal` (0 = none).
struct SessionCohortSpec {
    std::size_t participants = 51;
    std::size_t positives = 130;
    double signal = 1.0;
    double speech_s = 3.0;
    int rate = 16000;
    double emotion_fps = 5.0;
    std::uint64_t seed = 1;
};

std::vector<store::Session> make_session_cohort(const SessionCohortSpec& spec);

}// namespace mle::synth

#endif// MLE_SYNTH_HPP
