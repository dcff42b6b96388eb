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

// Filtering, resampling, voice activity detection and silence removal.

#include "dsp_internal.hpp"

#include <mle/error.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mle::dsp {

namespace detail {

double rms_db(std::span<const double> x) {
    if (x.empty()) return kSilenceDb;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    acc /= static_cast<double>(x.size());
    return acc > 0.0 ? std::max(kSilenceDb, 10.0 * std::log10(acc)) : kSilenceDb;
}

std::vector<WindowSpan> analysis_windows(std::size_t n, double fs, double window_s) {
    const auto len = static_cast<std::size_t>(std::llround(window_s * fs));
    std::vector<WindowSpan> out;
    if (len == 0) return out;
    std::size_t begin = 0;
    for (; begin + len <= n; begin += len) out.push_back({begin, begin + len});
    if (n - begin >= len / 2 && n > begin) out.push_back({begin, n});
    return out;
}

AudioTrack remove_silence(const AudioTrack& track, const VadSegments& segments, const DspConfig& cfg) {
    AudioTrack out;
    out.sample_rate = track.sample_rate;
    const double fs = track.sample_rate;
    const auto n = track.samples.size();
    const auto to_index = [&](double t) { return std::min(n, static_cast<std::size_t>(std::llround(t * fs))); };
    for (std::size_t i = 0; i < segments.size(); ++i) {
        std::size_t begin = to_index(segments[i].start);
        std::size_t end = to_index(segments[i].end);
        if (i + 1 < segments.size() && segments[i + 1].start - segments[i].end < cfg.silence_min_gap_s) {
            end = to_index(segments[i + 1].start);// short gap stays
        }
        out.samples.insert(out.samples.end(), track.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                           track.samples.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

std::vector<double> intensity_contour(std::span<const double> x, double fs, std::size_t begin, std::size_t end) {
    const auto win = static_cast<std::size_t>(std::llround(0.04 * fs));
    const auto hop = static_cast<std::size_t>(std::llround(0.01 * fs));
    std::vector<double> w(win);
    double wsum = 0.0;
    for (std::size_t i = 0; i < win; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(win));
        wsum += w[i];
    }
    std::vector<double> out;
    for (std::size_t c = begin; c < end; c += hop) {
        double acc = 0.0;
        for (std::size_t i = 0; i < win; ++i) {
            const auto idx = static_cast<std::ptrdiff_t>(c + i) - static_cast<std::ptrdiff_t>(win / 2);
            if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(x.size())) continue;
            const double v = x[static_cast<std::size_t>(idx)];
            acc += w[i] * v * v;
        }
        acc /= wsum;
        out.push_back(acc > 0.0 ? std::max(kSilenceDb, 10.0 * std::log10(acc)) : kSilenceDb);
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_sd(std::span<const double> v) {
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

}// namespace detail

std::vector<double> highpass(std::span<const double> x, double sample_rate, double cutoff_hz) {
    if (x.empty() || cutoff_hz <= 0.0) return {x.begin(), x.end()};
    const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
    constexpr double kQ = 1.0 / std::numbers::sqrt2;// Butterworth
    const double alpha = std::sin(w0) / (2.0 * kQ);
    const double cw = std::cos(w0);
    const double a0 = 1.0 + alpha;
    const double b0 = (1.0 + cw) / 2.0 / a0;
    const double b1 = -(1.0 + cw) / a0;
    const double b2 = b0;
    const double a1 = -2.0 * cw / a0;
    const double a2 = (1.0 - alpha) / a0;

    // Odd reflection at both ends keeps the start-up transient out of the signal.
    const auto n = x.size();
    const std::size_t pad = std::min<std::size_t>(n - 1, static_cast<std::size_t>(3.0 * sample_rate / cutoff_hz));
    std::vector<double> y;
    y.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) y.push_back(2.0 * x[0] - x[i]);
    y.insert(y.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) y.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    const auto run = [&](std::vector<double>& s) {
        double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
        for (double& v : s) {
            const double in = v;
            const double out = b0 * in + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
            x2 = x1;
            x1 = in;
            y2 = y1;
            y1 = out;
            v = out;
        }
    };
    run(y);
    std::reverse(y.begin(), y.end());
    run(y);
    std::reverse(y.begin(), y.end());
    return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

std::vector<double> resample(std::span<const double> x, double from_hz, double to_hz) {
    if (from_hz == to_hz || x.empty()) return {x.begin(), x.end()};
    constexpr double kZeroCrossings = 16.0;
    const double cutoff = 0.95 * 0.5 * std::min(from_hz, to_hz);// Hz
    const double fc = cutoff / from_hz;                          // cycles per input sample
    const double half_width = kZeroCrossings / (2.0 * fc);       // input samples
    const auto n_out = static_cast<std::size_t>(std::floor(static_cast<double>(x.size()) * to_hz / from_hz));
    std::vector<double> y(n_out);
    const auto n_in = static_cast<std::ptrdiff_t>(x.size());
    for (std::size_t j = 0; j < n_out; ++j) {
        const double u = static_cast<double>(j) * from_hz / to_hz;
        const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::ceil(u - half_width)));
        const auto hi = std::min<std::ptrdiff_t>(n_in - 1, static_cast<std::ptrdiff_t>(std::floor(u + half_width)));
        double acc = 0.0;
        for (std::ptrdiff_t k = lo; k <= hi; ++k) {
            const double d = u - static_cast<double>(k);
            const double arg = 2.0 * fc * d;
            const double sinc = arg == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
            // Blackman window over [-half_width, half_width].
            const double p = (d / half_width + 1.0) * 0.5;
            const double win = 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * p) + 0.08 * std::cos(4.0 * std::numbers::pi * p);
            acc += x[static_cast<std::size_t>(k)] * 2.0 * fc * sinc * win;
        }
        y[j] = acc;
    }
    return y;
}

VadSegments vad(const AudioTrack& track, const DspConfig& cfg) {
    if (track.samples.empty()) throw Error(ErrorCode::EmptyAudio, "voice activity detection on empty audio");
    const double fs = track.sample_rate;
    const auto frame_len = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.vad_frame_ms * fs / 1000.0)));
    const auto n = track.samples.size();
    const std::size_t n_frames = (n + frame_len - 1) / frame_len;

    std::vector<bool> active(n_frames, false);
    for (std::size_t f = 0; f < n_frames; ++f) {
        const std::size_t b = f * frame_len;
        const std::size_t e = std::min(n, b + frame_len);
        const std::span<const double> frame(track.samples.data() + b, e - b);
        const double db = detail::rms_db(frame);
        std::size_t crossings = 0;
        for (std::size_t i = 1; i < frame.size(); ++i) {
            if ((frame[i] >= 0.0) != (frame[i - 1] >= 0.0)) ++crossings;
        }
        const double zcr = frame.size() > 1 ? static_cast<double>(crossings) / static_cast<double>(frame.size() - 1) : 0.0;
        active[f] = db >= cfg.vad_threshold_db ||
                    (db > detail::kSilenceDb && db >= cfg.vad_threshold_db - cfg.vad_zcr_margin_db && zcr <= cfg.vad_zcr_max);
    }

    // Runs of active frames as [first, last) frame indices.
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    for (std::size_t f = 0; f < n_frames;) {
        if (!active[f]) {
            ++f;
            continue;
        }
        std::size_t g = f;
        while (g < n_frames && active[g]) ++g;
        runs.emplace_back(f, g);
        f = g;
    }

    // Hangover: bridge inactive stretches shorter than the hangover time.
    const double frame_s = static_cast<double>(frame_len) / fs;
    std::vector<std::pair<std::size_t, std::size_t>> merged;
    for (const auto& r : runs) {
        if (!merged.empty() && static_cast<double>(r.first - merged.back().second) * frame_s < cfg.vad_hangover_ms / 1000.0) {
            merged.back().second = r.second;
        } else {
            merged.push_back(r);
        }
    }

    VadSegments out;
    for (const auto& [first, last] : merged) {
        const double start = static_cast<double>(first * frame_len) / fs;
        const double end = static_cast<double>(std::min(n, last * frame_len)) / fs;
        if ((end - start) * 1000.0 < cfg.vad_min_segment_ms) continue;
        out.push_back({start, end});
    }
    return out;
}

AudioTrack preprocess(const AudioTrack& track, const DspConfig& cfg) {
    if (track.samples.empty()) throw Error(ErrorCode::EmptyAudio, "preprocess on empty audio");
    AudioTrack filtered{highpass(track.samples, track.sample_rate, cfg.highpass_cutoff_hz), track.sample_rate};
    const auto segments = vad(filtered, cfg);
    return detail::remove_silence(filtered, segments, cfg);
}

}// namespace mle::dsp
