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

#include <mle/error.hpp>
#include <mle/synth.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace mle::synth {

namespace {

std::size_t samples_for(double seconds, int rate) {
    return static_cast<std::size_t>(std::llround(seconds * rate));
}

void normalize_peak(std::vector<double>& x, double peak) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    if (m > 0.0) {
        for (double& v : x) v *= peak / m;
    }
}

}// namespace

double db_to_amplitude(double dbfs) {
    return std::pow(10.0, dbfs / 20.0);
}

AudioTrack silence(double seconds, int rate) {
    return {std::vector<double>(samples_for(seconds, rate), 0.0), rate};
}

AudioTrack sine(double freq_hz, double seconds, int rate, double amplitude, double phase) {
    AudioTrack t{std::vector<double>(samples_for(seconds, rate)), rate};
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        t.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate + phase);
    }
    return t;
}

AudioTrack white_noise(double seconds, int rate, double rms, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, rms);
    AudioTrack t{std::vector<double>(samples_for(seconds, rate)), rate};
    for (double& v : t.samples) v = dist(rng);
    return t;
}

AudioTrack pulse_train(double f0_hz, double seconds, int rate) {
    AudioTrack t{std::vector<double>(samples_for(seconds, rate), 0.0), rate};
    const double period = rate / f0_hz;
    for (double pos = 0.0; pos < static_cast<double>(t.samples.size()); pos += period) {
        const auto i = static_cast<std::size_t>(std::llround(pos));
        if (i < t.samples.size()) t.samples[i] = 1.0;
    }
    return t;
}

AudioTrack pulse_sequence(std::span<const double> periods_s, std::span<const double> amplitudes, int rate) {
    if (periods_s.size() != amplitudes.size()) throw Error(ErrorCode::LengthMismatch, "periods and amplitudes differ in length");
    double total = 0.0;
    for (double p : periods_s) total += p;
    AudioTrack t{std::vector<double>(samples_for(total, rate) + 1, 0.0), rate};
    double pos = 0.0;
    for (std::size_t k = 0; k < periods_s.size(); ++k) {
        const auto i = static_cast<std::size_t>(std::llround(pos * rate));
        if (i < t.samples.size()) t.samples[i] = amplitudes[k];
        pos += periods_s[k];
    }
    return t;
}

std::vector<double> resonate(std::span<const double> x, double rate, double freq_hz, double bandwidth_hz) {
    const double T = 1.0 / rate;
    const double c = -std::exp(-2.0 * std::numbers::pi * bandwidth_hz * T);
    const double b = 2.0 * std::exp(-std::numbers::pi * bandwidth_hz * T) * std::cos(2.0 * std::numbers::pi * freq_hz * T);
    const double a = 1.0 - b - c;
    std::vector<double> y(x.size());
    double y1 = 0.0, y2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = a * x[i] + b * y1 + c * y2;
        y2 = y1;
        y1 = y[i];
    }
    return y;
}

AudioTrack vowel(double f0_hz, std::span<const Resonance> resonances, double seconds, int rate, double peak) {
    auto t = pulse_train(f0_hz, seconds, rate);
    // One-pole glottal smoothing gives the source a -6 dB/octave tilt.
    double s1 = 0.0;
    for (double& v : t.samples) {
        s1 = v + 0.97 * s1;
        v = s1;
    }
    const double mean = [&] {
        double acc = 0.0;
        for (double v : t.samples) acc += v;
        return t.samples.empty() ? 0.0 : acc / static_cast<double>(t.samples.size());
    }();
    for (double& v : t.samples) v -= mean;
    for (const auto& r : resonances) t.samples = resonate(t.samples, rate, r.freq_hz, r.bandwidth_hz);
    normalize_peak(t.samples, peak);
    return t;
}

AudioTrack syllable_train(int syllables, double syllable_s, double dip_s, double f0_hz,
                          std::span<const Resonance> resonances, int rate, double peak) {
    const double total = syllables * syllable_s + (syllables - 1) * dip_s;
    auto t = vowel(f0_hz, resonances, total, rate, peak);
    constexpr double kFloor = 0.1;// -20 dB between nuclei
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        const double time = static_cast<double>(i) / rate;
        const double cycle = syllable_s + dip_s;
        const double in = std::fmod(time, cycle);
        double env = kFloor;
        if (in < syllable_s) env = kFloor + (1.0 - kFloor) * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * in / syllable_s));
        t.samples[i] *= env;
    }
    return t;
}

AudioTrack concat(std::span<const AudioTrack> parts) {
    AudioTrack out;
    for (const auto& p : parts) {
        if (out.sample_rate == 0) out.sample_rate = p.sample_rate;
        if (p.sample_rate != out.sample_rate) throw Error(ErrorCode::LengthMismatch, "concatenating tracks of different rates");
        out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
    }
    return out;
}

AudioTrack add(const AudioTrack& a, const AudioTrack& b) {
    if (a.sample_rate != b.sample_rate) throw Error(ErrorCode::LengthMismatch, "mixing tracks of different rates");
    AudioTrack out{std::vector<double>(std::max(a.samples.size(), b.samples.size()), 0.0), a.sample_rate};
    for (std::size_t i = 0; i < a.samples.size(); ++i) out.samples[i] += a.samples[i];
    for (std::size_t i = 0; i < b.samples.size(); ++i) out.samples[i] += b.samples[i];
    return out;
}

AudioTrack scaled(const AudioTrack& a, double gain) {
    AudioTrack out = a;
    for (double& v : out.samples) v *= gain;
    return out;
}

std::vector<Resonance> neutral_vowel() {
    return {{500.0, 60.0}, {1500.0, 90.0}, {2500.0, 120.0}, {3500.0, 150.0}};
}

}// namespace mle::synth
