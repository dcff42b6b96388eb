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

// Autocorrelation pitch, cycle extraction, jitter/shimmer and HNR.

#include "dsp_internal.hpp"

#include <mle/error.hpp>

#include <algorithm>
#include <cmath>

namespace mle::dsp {

namespace {

constexpr double kOctaveTolerance = 0.03;

void require(std::span<const double> v, std::size_t n, const char* what) {
    if (v.size() < n) {
        throw Error(ErrorCode::TooFewPeriods,
                    std::string(what) + " needs at least " + std::to_string(n) + " values, got " + std::to_string(v.size()));
    }
}

// Parabolic vertex through (i-1, i, i+1): offset in [-0.5, 0.5] and value.
std::pair<double, double> parabolic_peak(double left, double center, double right) {
    const double denom = left - 2.0 * center + right;
    if (denom >= 0.0) return {0.0, center};
    const double delta = std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
    return {delta, center - 0.25 * (left - right) * delta};
}

// Mean |x_k - average of the `points` values centred on x_k| over all full
// neighbourhoods, relative to the overall mean.
double smoothed_perturbation(std::span<const double> v, std::size_t points) {
    const std::size_t half = points / 2;
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t k = half; k + half < v.size(); ++k) {
        double local = 0.0;
        for (std::size_t j = k - half; j <= k + half; ++j) local += v[j];
        local /= static_cast<double>(points);
        acc += std::abs(v[k] - local);
        ++count;
    }
    return (acc / static_cast<double>(count)) / detail::mean(v);
}

double mean_abs_diff(std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) acc += std::abs(v[k] - v[k - 1]);
    return acc / static_cast<double>(v.size() - 1);
}

double mean_abs_second_diff(std::span<const double> v) {
    double acc = 0.0;
    for (std::size_t k = 1; k + 1 < v.size(); ++k) acc += std::abs((v[k + 1] - v[k]) - (v[k] - v[k - 1]));
    return acc / static_cast<double>(v.size() - 2);
}

}// namespace

namespace detail {

std::optional<Periodicity> best_periodicity(std::span<const double> x_in, double fs, double floor_hz,
                                            double ceiling_hz) {
    const auto n = x_in.size();
    const auto lag_min = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(fs / ceiling_hz)));
    const auto lag_max = std::min<std::size_t>(n / 2, static_cast<std::size_t>(std::ceil(fs / floor_hz)));
    if (lag_max <= lag_min + 1) return std::nullopt;

    std::vector<double> x(x_in.begin(), x_in.end());
    const double m = mean(x);
    for (double& v : x) v -= m;
    std::vector<double> energy(n + 1, 0.0);// prefix sums of x^2
    for (std::size_t i = 0; i < n; ++i) energy[i + 1] = energy[i] + x[i] * x[i];

    std::vector<double> r(lag_max + 2, 0.0);
    for (std::size_t lag = lag_min - 1; lag <= lag_max + 1 && lag < n; ++lag) {
        double acc = 0.0;
        const std::size_t len = n - lag;
        for (std::size_t i = 0; i < len; ++i) acc += x[i] * x[i + lag];
        const double e1 = energy[len];
        const double e2 = energy[n] - energy[lag];
        r[lag] = e1 > 0.0 && e2 > 0.0 ? acc / std::sqrt(e1 * e2) : 0.0;
    }

    std::vector<Periodicity> peaks;
    for (std::size_t lag = lag_min; lag <= lag_max; ++lag) {
        if (r[lag] > r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] > 0.0) {
            const auto [delta, value] = parabolic_peak(r[lag - 1], r[lag], r[lag + 1]);
            peaks.push_back({static_cast<double>(lag) + delta, std::min(1.0, value)});
        }
    }
    if (peaks.empty()) return std::nullopt;
    double best = 0.0;
    for (const auto& p : peaks) best = std::max(best, p.r);
    for (const auto& p : peaks) {
        if (p.r >= best - kOctaveTolerance) return p;
    }
    return std::nullopt;
}

std::vector<double> pitch_signal(const AudioTrack& track, double& fs_out) {
    if (track.sample_rate > kPitchAnalysisRate) {
        fs_out = kPitchAnalysisRate;
        return resample(track.samples, track.sample_rate, kPitchAnalysisRate);
    }
    fs_out = track.sample_rate;
    return track.samples;
}

}// namespace detail

PitchTrack f0_track(const AudioTrack& track, const DspConfig& cfg) {
    PitchTrack out;
    out.window_s = cfg.window_s;
    if (track.samples.empty()) return out;
    double fs = 0.0;
    const auto x = detail::pitch_signal(track, fs);
    for (const auto& w : detail::analysis_windows(x.size(), fs, cfg.window_s)) {
        const std::span<const double> win(x.data() + w.begin, w.end - w.begin);
        PitchWindow pw;
        pw.t = 0.5 * static_cast<double>(w.begin + w.end) / fs;
        pw.active = detail::rms_db(win) >= cfg.vad_threshold_db;
        if (pw.active) {
            if (const auto p = detail::best_periodicity(win, fs, cfg.pitch_floor_hz, cfg.pitch_ceiling_hz)) {
                pw.periodicity = p->r;
                const double f0 = fs / p->lag;
                if (p->r >= cfg.voicing_threshold && f0 >= cfg.pitch_floor_hz && f0 <= cfg.pitch_ceiling_hz) pw.f0 = f0;
            }
        }
        out.windows.push_back(pw);
    }
    return out;
}

double jitter(std::span<const double> periods) {
    require(periods, 2, "jitter");
    return mean_abs_diff(periods) / detail::mean(periods);
}

double jitter_rap(std::span<const double> periods) {
    require(periods, 3, "jitter (rap)");
    return smoothed_perturbation(periods, 3);
}

double jitter_ppq5(std::span<const double> periods) {
    require(periods, 5, "jitter (ppq5)");
    return smoothed_perturbation(periods, 5);
}

double jitter_ddp(std::span<const double> periods) {
    require(periods, 3, "jitter (ddp)");
    return mean_abs_second_diff(periods) / detail::mean(periods);
}

double shimmer(std::span<const double> amplitudes) {
    require(amplitudes, 2, "shimmer");
    return mean_abs_diff(amplitudes) / detail::mean(amplitudes);
}

double shimmer_db(std::span<const double> amplitudes) {
    require(amplitudes, 2, "shimmer (dB)");
    double acc = 0.0;
    for (std::size_t k = 1; k < amplitudes.size(); ++k) acc += std::abs(20.0 * std::log10(amplitudes[k] / amplitudes[k - 1]));
    return acc / static_cast<double>(amplitudes.size() - 1);
}

double shimmer_apq(std::span<const double> amplitudes, std::size_t points) {
    if (points < 3 || points % 2 == 0) throw Error(ErrorCode::OutOfRange, "APQ needs an odd neighbourhood of at least 3");
    require(amplitudes, points, "shimmer (apq)");
    return smoothed_perturbation(amplitudes, points);
}

double shimmer_dda(std::span<const double> amplitudes) {
    require(amplitudes, 3, "shimmer (dda)");
    return mean_abs_second_diff(amplitudes) / detail::mean(amplitudes);
}

Cycles extract_cycles(std::span<const double> x, double sample_rate, double f0_hz) {
    Cycles out;
    const double period = sample_rate / f0_hz;
    const auto n = x.size();
    if (n < 3 || period * 2.0 > static_cast<double>(n)) return out;

    const auto refine = [&](std::size_t i) -> std::pair<double, double> {
        if (i == 0 || i + 1 >= n) return {static_cast<double>(i), x[i]};
        const auto [delta, value] = parabolic_peak(x[i - 1], x[i], x[i + 1]);
        return {static_cast<double>(i) + delta, value};
    };
    const auto argmax = [&](std::size_t lo, std::size_t hi) {
        std::size_t best = lo;
        for (std::size_t i = lo; i <= hi; ++i) {
            if (x[i] > x[best]) best = i;
        }
        return best;
    };

    std::vector<double> positions;
    std::vector<double> amps;
    {
        const auto hi = std::min(n - 1, static_cast<std::size_t>(std::ceil(period)));
        const auto [pos, amp] = refine(argmax(0, hi));
        positions.push_back(pos);
        amps.push_back(amp);
    }
    while (true) {
        const double lo = positions.back() + 0.8 * period;
        const double hi = positions.back() + 1.2 * period;
        if (hi >= static_cast<double>(n - 1)) break;
        const auto [pos, amp] = refine(argmax(static_cast<std::size_t>(std::ceil(lo)), static_cast<std::size_t>(std::floor(hi))));
        positions.push_back(pos);
        amps.push_back(amp);
    }

    // Longest run of cycles whose peak is a real pulse rather than silence.
    const double max_amp = *std::max_element(amps.begin(), amps.end());
    if (!(max_amp > 0.0)) return out;
    std::size_t best_begin = 0, best_len = 0;
    for (std::size_t i = 0; i < amps.size();) {
        if (amps[i] < 0.1 * max_amp) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < amps.size() && amps[j] >= 0.1 * max_amp) ++j;
        if (j - i > best_len) {
            best_begin = i;
            best_len = j - i;
        }
        i = j;
    }
    for (std::size_t k = best_begin; k < best_begin + best_len; ++k) {
        out.amplitudes.push_back(amps[k]);
        if (k > best_begin) out.periods_s.push_back((positions[k] - positions[k - 1]) / sample_rate);
    }
    return out;
}

double hnr_from_periodicity(double r) {
    if (r >= 1.0) return kHnrCapDb;
    if (r <= 0.0) return -kHnrCapDb;
    return std::clamp(10.0 * std::log10(r / (1.0 - r)), -kHnrCapDb, kHnrCapDb);
}

double hnr(const AudioTrack& track, const DspConfig& cfg) {
    double fs = 0.0;
    const auto x = detail::pitch_signal(track, fs);
    double acc = 0.0;
    std::size_t count = 0;
    for (const auto& w : detail::analysis_windows(x.size(), fs, cfg.window_s)) {
        const std::span<const double> win(x.data() + w.begin, w.end - w.begin);
        if (detail::rms_db(win) < cfg.vad_threshold_db) continue;
        const auto p = detail::best_periodicity(win, fs, cfg.pitch_floor_hz, cfg.pitch_ceiling_hz);
        acc += hnr_from_periodicity(p ? p->r : 0.0);
        ++count;
    }
    if (count == 0) throw Error(ErrorCode::NoVoicedContent, "no active window for HNR");
    return acc / static_cast<double>(count);
}

}// namespace mle::dsp
